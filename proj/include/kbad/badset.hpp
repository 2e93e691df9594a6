#pragma once

// Denominator enumeration, exclusion boxes Delta_eps(p, q) and truncated
// membership / badness decisions. Every verdict is relative to an explicit
// height bound: only denominators with H(q) < height_bound are considered.

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "kbad/numberfield.hpp"

namespace kbad {

// An enumerated denominator with its certified metrics.
struct Denominator {
  FieldElement q;
  ElementMetrics metrics;
};

// All q != 0 (one of each pair +-q) with max over S2 of |sigma(q)| <= eps and
// H(q) < height_bound, ordered by height then coordinates. OpenMP kernel.
std::vector<Denominator> enumerate_denominators(const FieldSpec& field, const WeightVector& w, double eps,
                                                double height_bound);

// Serial reference: scans the full coordinate box implied by the embedding
// bounds without any inner-coordinate solving. Kept for tests and benchmarks.
std::vector<Denominator> enumerate_denominators_reference(const FieldSpec& field, const WeightVector& w,
                                                          double eps, double height_bound);

// Calls visit(coords) for a superset of the integer coordinate vectors c whose
// embeddings sigma_i(c) lie in [lo_i, hi_i] for all i. Outer coordinates come
// from the inverse embedding matrix, the last coordinate is solved from the
// box constraints, and every range is padded by one.
void for_each_coordinate_candidate(const FieldSpec& field, std::span<const double> lo,
                                   std::span<const double> hi,
                                   const std::function<void(const std::vector<std::int64_t>&)>& visit);

// Canonical sign: first nonzero coordinate positive.
bool is_sign_canonical(const FieldElement& q);

enum class Tri { No, Yes, Undecided };

struct ExclusionBox {
  FieldElement p;
  FieldElement q;
  double eps = 0.0;
  std::vector<Interval> center;      // sigma(p) / sigma(q)
  std::vector<Interval> half_width;  // certified enclosures

  Interval lower(std::size_t i) const { return center[i] - half_width[i]; }
  Interval upper(std::size_t i) const { return center[i] + half_width[i]; }
  // Closed-box membership of a point.
  Tri contains(std::span<const double> x) const;
  // Does the closed box meet the closed ball B(c, radius)?
  Tri meets_ball(std::span<const double> c, double radius) const;
};

// Throws DenominatorNotAdmissible if max over S2 of |sigma(q)| > eps.
ExclusionBox exclusion_box(const FieldSpec& field, const WeightVector& w, const FieldElement& p,
                           const FieldElement& q, double eps);
ExclusionBox exclusion_box(const FieldSpec& field, const WeightVector& w, const FieldElement& p,
                           const Denominator& q, double eps);

// Numerators p whose box Delta_eps(p, q) could meet the axis box [lo, hi];
// each returned box has been built (membership is not yet decided).
std::vector<ExclusionBox> boxes_meeting_region(const FieldSpec& field, const WeightVector& w, const Denominator& q,
                                               double eps, std::span<const double> lo, std::span<const double> hi);

struct Excluded {
  FieldElement p;
  FieldElement q;
};
struct Survives {
  double height_bound;
};
using Membership = std::variant<Excluded, Survives>;

// Truncated membership in Bad_eps(K, r). Throws PrecisionExhausted when x sits
// on a box boundary that the enclosures cannot resolve.
Membership membership(const FieldSpec& field, const WeightVector& w, std::span<const double> x, double eps,
                      double height_bound);
// Same, against a precomputed denominator list (which must have been
// enumerated with the same eps).
Membership membership(const FieldSpec& field, const WeightVector& w, std::span<const double> x, double eps,
                      std::span<const Denominator> denominators);

struct BadnessReport {
  Interval value;  // +inf when no denominator lies below the bound
  std::optional<std::pair<FieldElement, FieldElement>> witness;  // (p, q)
  double height_bound = 0.0;
};

// The inf-max expression of the badly-approximable definition, restricted to
// H(q) < height_bound.
BadnessReport badness_constant(const FieldSpec& field, const WeightVector& w, std::span<const double> x,
                               double height_bound);

// The max-expression for one pair (p, q).
Interval badness_expression(const FieldSpec& field, const WeightVector& w, std::span<const double> x,
                            const FieldElement& p, const FieldElement& q);

// CSV: coords..., embeddings..., r_norm, height, n, k. The index callback
// supplies (n, k); empty cells when it returns nothing.
void write_denominators_csv(std::ostream& os, const FieldSpec& field, std::span<const Denominator> list,
                            const std::function<std::optional<std::pair<int, int>>(const Denominator&)>& index);

}  // namespace kbad
