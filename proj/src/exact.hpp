#pragma once

// Exact fallbacks shared by the enumeration and the partition code.

#include <cstdint>
#include <optional>

#include "kbad/numberfield.hpp"

namespace kbad::detail {

// m when q = m * 1 for an integer m.
std::optional<std::int64_t> integer_value(const FieldSpec& field, const FieldElement& q);

// The value of a finite double as a rational.
Rational exact_rational(double x);

// When q^2 = N is a rational integer every |sigma(q)| equals sqrt N, so
// H(q) = N^{e/2} and ||q||_r^{2r} = N^{f/2} with e = 1 + r_max / r_min and
// f = 2 r_max / r_min over S1.
struct RationalSquare {
  std::int64_t N;
  Rational height_exponent;
  Rational size_exponent;
};
std::optional<RationalSquare> rational_square(const FieldSpec& field, const WeightVector& w, const FieldElement& q);

// Sign of N^{e/2} - b for N >= 1, e > 0, b > 0.
int compare_root_power(std::int64_t N, const Rational& e, const Rational& b);

}  // namespace kbad::detail
