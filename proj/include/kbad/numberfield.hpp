#pragma once

// Exact arithmetic in a totally real number field K given by a monic integer
// minimal polynomial and an integral basis of its ring of integers, together
// with certified real embeddings and the weighted norm / height used by the
// exclusion-box machinery.

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "kbad/errors.hpp"
#include "kbad/interval.hpp"

namespace kbad {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Parses "p/q", "p" or "-p/q".
Rational parse_rational(const std::string& text);
std::string to_string(const Rational& r);

struct RationalInterval {
  Rational lo;
  Rational hi;
};

// Outward conversion of an exact enclosure to doubles.
Interval to_interval(const RationalInterval& r);

// Element of the ring of integers as integer coordinates over the field's
// integral basis.
struct FieldElement {
  std::vector<std::int64_t> coords;

  bool is_zero() const;
  auto operator<=>(const FieldElement&) const = default;
};

std::string to_string(const FieldElement& q);

class FieldSpec;

// Weights r_sigma >= 0 summing to one, indexed like the embeddings.
class WeightVector {
 public:
  // Throws InvalidWeights unless every weight is >= 0 and the sum is exactly 1.
  static WeightVector make(std::vector<Rational> weights);
  static WeightVector parse(const std::string& comma_separated);

  std::size_t size() const { return weights_.size(); }
  const Rational& weight(std::size_t i) const { return weights_[i]; }
  double weight_d(std::size_t i) const { return weights_d_[i]; }
  // 1 / r_sigma as a double; only meaningful on S1.
  double inv_weight_d(std::size_t i) const { return inv_weights_d_[i]; }
  const std::vector<std::size_t>& s1() const { return s1_; }
  const std::vector<std::size_t>& s2() const { return s2_; }
  std::size_t omega() const { return omega_; }
  const Rational& r_max() const { return weights_[omega_]; }
  double r_max_d() const { return weights_d_[omega_]; }
  // Smallest positive weight.
  double r_min_positive_d() const;
  std::string to_string() const;

 private:
  std::vector<Rational> weights_;
  std::vector<double> weights_d_;
  std::vector<double> inv_weights_d_;
  std::vector<std::size_t> s1_, s2_;
  std::size_t omega_ = 0;
};

class FieldSpec {
 public:
  int degree() const { return degree_; }
  // Coefficients, constant term first, leading coefficient 1 last.
  const std::vector<std::int64_t>& min_poly() const { return min_poly_; }
  // Row i is basis element i over the power basis 1, a, a^2, ...
  const std::vector<std::vector<Rational>>& integral_basis() const { return basis_; }
  const BigInt& disc() const { return disc_; }
  // Root enclosures of the minimal polynomial in ascending order; this fixes
  // the embedding order sigma_1 < ... < sigma_d.
  const std::vector<RationalInterval>& roots() const { return roots_; }
  // Enclosure of sigma_i(basis_j).
  const Interval& embedding_entry(std::size_t i, std::size_t j) const {
    return emb_[i * static_cast<std::size_t>(degree_) + j];
  }
  const RationalInterval& embedding_entry_exact(std::size_t i, std::size_t j) const {
    return emb_exact_[i * static_cast<std::size_t>(degree_) + j];
  }
  // Upper bound on |(M^{-1})_{ji}| where M_ij = sigma_i(basis_j); used to
  // turn embedding bounds into coordinate bounds.
  double inverse_embedding_bound(std::size_t j, std::size_t i) const {
    return inv_emb_bound_[j * static_cast<std::size_t>(degree_) + i];
  }
  // Approximate (M^{-1})_{ji}.
  double inverse_embedding(std::size_t j, std::size_t i) const {
    return inv_emb_[j * static_cast<std::size_t>(degree_) + i];
  }

  FieldElement zero() const;
  FieldElement one() const;
  FieldElement from_coords(std::vector<std::int64_t> coords) const;

  FieldElement add(const FieldElement& a, const FieldElement& b) const;
  FieldElement sub(const FieldElement& a, const FieldElement& b) const;
  FieldElement neg(const FieldElement& a) const;
  // Throws ArithmeticOverflow when a coordinate leaves int64.
  FieldElement mul(const FieldElement& a, const FieldElement& b) const;
  // Exact norm: determinant of multiplication by q.
  BigInt norm(const FieldElement& q) const;
  BigInt trace(const FieldElement& q) const;
  // Structure constants: basis_i * basis_j = sum_k mul_table(i,j,k) basis_k.
  std::int64_t mul_table(std::size_t i, std::size_t j, std::size_t k) const {
    const auto d = static_cast<std::size_t>(degree_);
    return table_[(i * d + j) * d + k];
  }

  std::string describe() const;

 private:
  friend FieldSpec make_field(const std::vector<std::int64_t>&,
                              const std::optional<std::vector<std::vector<Rational>>>&);
  int degree_ = 0;
  std::vector<std::int64_t> min_poly_;
  std::vector<std::vector<Rational>> basis_;
  BigInt disc_;
  std::vector<RationalInterval> roots_;
  std::vector<Interval> emb_;
  std::vector<RationalInterval> emb_exact_;
  std::vector<double> inv_emb_bound_;
  std::vector<double> inv_emb_;
  std::vector<std::int64_t> table_;
  std::vector<std::int64_t> trace_;
};

// Builds and validates a field. For degree 2 the integral basis and the
// discriminant are derived from the polynomial; for higher degree the caller
// supplies the basis, which is checked for multiplicative closure and
// discriminant consistency.
FieldSpec make_field(const std::vector<std::int64_t>& min_poly,
                     const std::optional<std::vector<std::vector<Rational>>>& integral_basis = std::nullopt);

// Enclosures of sigma_i(q), each of width <= precision unless that is below
// a few ulps of the value, where the tightest double enclosure is returned.
std::vector<Interval> embed(const FieldSpec& field, const FieldElement& q, double precision);

// Certified enclosures with small relative width, switching to exact
// rational evaluation when the double path loses too much to cancellation.
std::vector<Interval> embed_certified(const FieldSpec& field, const FieldElement& q);

// Double-only evaluation, no enclosure. Fast path for geometry.
std::vector<double> embed_approx(const FieldSpec& field, const FieldElement& q);

// max over S1 of |x_sigma|^(1/r_sigma).
double weighted_norm(std::span<const double> x, const WeightVector& w);
Interval weighted_norm(std::span<const Interval> x, const WeightVector& w);

// H(q) = max over S1 of |sigma(q)| * ||q||_r^(r_sigma). Throws ZeroElement.
Interval height(const FieldSpec& field, const FieldElement& q, const WeightVector& w);

// All the per-denominator quantities the badness machinery needs.
struct ElementMetrics {
  std::vector<Interval> embeddings;
  Interval r_norm;
  Interval height;
};

ElementMetrics element_metrics(const FieldSpec& field, const FieldElement& q,
                               const WeightVector& w);
ElementMetrics element_metrics(std::vector<Interval> embeddings, const WeightVector& w);

}  // namespace kbad
