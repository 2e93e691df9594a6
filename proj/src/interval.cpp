#include "kbad/interval.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace kbad {

namespace {

Interval widen(double lo, double hi, int ulps) {
  for (int i = 0; i < ulps; ++i) {
    lo = round_down(lo);
    hi = round_up(hi);
  }
  return {lo, hi};
}

}  // namespace

Interval operator+(const Interval& a, const Interval& b) {
  return {round_down(a.lo + b.lo), round_up(a.hi + b.hi)};
}

Interval operator-(const Interval& a, const Interval& b) {
  return {round_down(a.lo - b.hi), round_up(a.hi - b.lo)};
}

Interval operator-(const Interval& a) { return {-a.hi, -a.lo}; }

Interval operator*(const Interval& a, const Interval& b) {
  // Point times point is the hot path in embeddings of integer vectors.
  if (a.lo == a.hi && b.lo == b.hi) {
    const double p = a.lo * b.lo;
    if (a.lo == 0.0 || b.lo == 0.0) return {0.0, 0.0};
    return {round_down(p), round_up(p)};
  }
  const double p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
  const double lo = std::min({p1, p2, p3, p4});
  const double hi = std::max({p1, p2, p3, p4});
  return {round_down(lo), round_up(hi)};
}

Interval operator/(const Interval& a, const Interval& b) {
  if (b.contains_zero()) throw std::domain_error("interval division by an interval containing zero");
  const double q1 = a.lo / b.lo, q2 = a.lo / b.hi, q3 = a.hi / b.lo, q4 = a.hi / b.hi;
  return {round_down(std::min({q1, q2, q3, q4})), round_up(std::max({q1, q2, q3, q4}))};
}

Interval abs(const Interval& a) {
  if (a.lo >= 0.0) return a;
  if (a.hi <= 0.0) return -a;
  return {0.0, std::max(-a.lo, a.hi)};
}

Interval hull(const Interval& a, const Interval& b) {
  return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

Interval imax(const Interval& a, const Interval& b) {
  return {std::max(a.lo, b.lo), std::max(a.hi, b.hi)};
}

Interval imin(const Interval& a, const Interval& b) {
  return {std::min(a.lo, b.lo), std::min(a.hi, b.hi)};
}

Interval pow_abs(const Interval& a, double e) {
  const Interval m = abs(a);
  if (e == 1.0) return m;
  const double lo = m.lo == 0.0 ? 0.0 : std::pow(m.lo, e);
  const double hi = std::pow(m.hi, e);
  Interval r = widen(lo, hi, 2);
  r.lo = std::max(r.lo, 0.0);
  return r;
}

Interval sqrt(const Interval& a) {
  if (a.hi < 0.0) throw std::domain_error("sqrt of a negative interval");
  // IEEE sqrt is correctly rounded.
  return {a.lo <= 0.0 ? 0.0 : round_down(std::sqrt(a.lo)), round_up(std::sqrt(a.hi))};
}

Interval exp(const Interval& a) {
  Interval r = widen(std::exp(a.lo), std::exp(a.hi), 2);
  r.lo = std::max(r.lo, 0.0);
  return r;
}

Interval log(const Interval& a) {
  if (a.lo <= 0.0) throw std::domain_error("log of a non-positive interval");
  return widen(std::log(a.lo), std::log(a.hi), 2);
}

Order compare(const Interval& a, const Interval& b) {
  if (a.hi < b.lo) return Order::Less;
  if (a.lo > b.hi) return Order::Greater;
  return Order::Undecided;
}

std::ostream& operator<<(std::ostream& os, const Interval& a) {
  return os << '[' << a.lo << ", " << a.hi << ']';
}

}  // namespace kbad
