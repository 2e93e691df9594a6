#pragma once

#include <cmath>
#include <iosfwd>
#include <limits>

namespace kbad {

// Closed interval of doubles. Every arithmetic result is widened by one ulp
// on each side, so the true real result of the operation on any members of
// the operands is contained in the returned interval.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  constexpr Interval() = default;
  constexpr Interval(double v) : lo(v), hi(v) {}  // NOLINT: exact point
  constexpr Interval(double l, double h) : lo(l), hi(h) {}

  double mid() const { return 0.5 * lo + 0.5 * hi; }
  double width() const { return hi - lo; }
  bool contains(double x) const { return lo <= x && x <= hi; }
  bool contains_zero() const { return lo <= 0.0 && 0.0 <= hi; }
  // Largest absolute value of any member.
  double mag() const { return std::fmax(std::fabs(lo), std::fabs(hi)); }
  // Smallest absolute value of any member.
  double mig() const {
    if (contains_zero()) return 0.0;
    return std::fmin(std::fabs(lo), std::fabs(hi));
  }
};

inline double round_down(double x) {
  return std::nextafter(x, -std::numeric_limits<double>::infinity());
}
inline double round_up(double x) {
  return std::nextafter(x, std::numeric_limits<double>::infinity());
}

Interval operator+(const Interval& a, const Interval& b);
Interval operator-(const Interval& a, const Interval& b);
Interval operator-(const Interval& a);
Interval operator*(const Interval& a, const Interval& b);
// Throws std::domain_error when b contains zero.
Interval operator/(const Interval& a, const Interval& b);

Interval abs(const Interval& a);
Interval hull(const Interval& a, const Interval& b);
Interval imax(const Interval& a, const Interval& b);
Interval imin(const Interval& a, const Interval& b);

// |a|^e for e > 0. libm pow is within one ulp; two are added on each side.
Interval pow_abs(const Interval& a, double e);
Interval sqrt(const Interval& a);
Interval exp(const Interval& a);
Interval log(const Interval& a);

// Three-valued ordering used by every certified comparison in the library.
enum class Order { Less, Greater, Undecided };

// Compares a with b: Less if every member of a is < every member of b.
Order compare(const Interval& a, const Interval& b);

inline bool certainly_lt(const Interval& a, const Interval& b) { return a.hi < b.lo; }
inline bool certainly_le(const Interval& a, const Interval& b) { return a.hi <= b.lo; }
inline bool possibly_le(const Interval& a, const Interval& b) { return a.lo <= b.hi; }

std::ostream& operator<<(std::ostream& os, const Interval& a);

}  // namespace kbad
