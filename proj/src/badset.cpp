#include "kbad/badset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include <omp.h>

#include "exact.hpp"

namespace kbad {

namespace detail {

std::optional<std::int64_t> integer_value(const FieldSpec& field, const FieldElement& q) {
  const FieldElement one = field.one();
  std::size_t lead = 0;
  while (one.coords[lead] == 0) ++lead;
  if (q.coords[lead] % one.coords[lead] != 0) return std::nullopt;
  const std::int64_t m = q.coords[lead] / one.coords[lead];
  for (std::size_t j = 0; j < q.coords.size(); ++j)
    if (q.coords[j] != m * one.coords[j]) return std::nullopt;
  return m;
}

Rational exact_rational(double x) {
  int exp = 0;
  const double frac = std::frexp(x, &exp);
  Rational r(static_cast<std::int64_t>(std::ldexp(frac, 53)));
  exp -= 53;
  const Rational two(2);
  for (; exp > 0; --exp) r *= two;
  for (; exp < 0; ++exp) r /= two;
  return r;
}

std::optional<RationalSquare> rational_square(const FieldSpec& field, const WeightVector& w, const FieldElement& q) {
  const auto N = integer_value(field, field.mul(q, q));
  if (!N || *N <= 0) return std::nullopt;
  Rational lo = w.r_max(), hi = w.r_max();
  for (auto i : w.s1()) lo = std::min(lo, w.weight(i));
  return RationalSquare{*N, 1 + hi / lo, 2 * hi / lo};
}

int compare_root_power(std::int64_t N, const Rational& e, const Rational& b) {
  using boost::multiprecision::cpp_int;
  using boost::multiprecision::pow;
  const cpp_int a = boost::multiprecision::numerator(e), c = boost::multiprecision::denominator(e);
  const cpp_int bn = boost::multiprecision::numerator(b), bd = boost::multiprecision::denominator(b);
  // N^{a / 2c} against bn / bd, raised to the power 2c.
  const auto ua = static_cast<unsigned>(a), uc2 = static_cast<unsigned>(2 * c);
  const cpp_int lhs = pow(cpp_int(N), ua) * pow(bd, uc2), rhs = pow(bn, uc2);
  return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
}

}  // namespace detail

namespace {

using detail::integer_value;

constexpr double kMaxCandidates = 4e9;

struct Range {
  std::int64_t lo = 0;
  std::int64_t hi = -1;
  std::int64_t size() const { return hi >= lo ? hi - lo + 1 : 0; }
};

Range to_range(double lo, double hi) {
  if (!(lo <= hi)) return {};
  if (std::fabs(lo) > 9e18 || std::fabs(hi) > 9e18) throw IncompleteEnumeration("coordinate range exceeds 64-bit integers");
  return {static_cast<std::int64_t>(std::floor(lo)) - 1, static_cast<std::int64_t>(std::ceil(hi)) + 1};
}

// Coordinate ranges for a box in embedding space.
class CandidatePlan {
 public:
  CandidatePlan(const FieldSpec& field, std::span<const double> lo, std::span<const double> hi)
      : field_(field), d_(static_cast<std::size_t>(field.degree())), lo_(lo.begin(), lo.end()), hi_(hi.begin(), hi.end()) {
    for (std::size_t j = 0; j < d_; ++j) {
      double center = 0.0, spread = 0.0;
      for (std::size_t i = 0; i < d_; ++i) {
        const double mid = 0.5 * lo_[i] + 0.5 * hi_[i];
        const double rad = 0.5 * hi_[i] - 0.5 * lo_[i];
        center += field.inverse_embedding(j, i) * mid;
        spread += field.inverse_embedding_bound(j, i) * (rad + 1e-9 * std::fabs(mid));
      }
      ranges_.push_back(to_range(center - spread, center + spread));
    }
    for (std::size_t i = 0; i < d_; ++i) last_col_.push_back(field.embedding_entry(i, d_ - 1).mid());
  }

  std::size_t degree() const { return d_; }
  const Range& range(std::size_t j) const { return ranges_[j]; }

  // Number of outer tuples (all coordinates except the last).
  double outer_count() const {
    double n = 1;
    for (std::size_t j = 0; j + 1 < d_; ++j) n *= static_cast<double>(ranges_[j].size());
    return n;
  }

  double full_count() const { return outer_count() * static_cast<double>(ranges_[d_ - 1].size()); }

  void decode_outer(std::int64_t index, std::vector<std::int64_t>& c) const {
    for (std::size_t j = d_ - 1; j-- > 0;) {
      const std::int64_t n = ranges_[j].size();
      c[j] = ranges_[j].lo + index % n;
      index /= n;
    }
  }

  // Range of the last coordinate given the outer ones, from the box constraints.
  Range inner_range(const std::vector<std::int64_t>& c) const {
    double lo = static_cast<double>(ranges_[d_ - 1].lo), hi = static_cast<double>(ranges_[d_ - 1].hi);
    for (std::size_t i = 0; i < d_; ++i) {
      const double e = last_col_[i];
      if (std::fabs(e) < 1e-300) continue;
      double s = 0.0;
      for (std::size_t j = 0; j + 1 < d_; ++j) s += static_cast<double>(c[j]) * field_.embedding_entry(i, j).mid();
      const double slack = 1e-9 * (std::fabs(s) + std::fabs(lo_[i]) + std::fabs(hi_[i]));
      double a = (lo_[i] - s - slack) / e, b = (hi_[i] - s + slack) / e;
      if (a > b) std::swap(a, b);
      lo = std::max(lo, a);
      hi = std::min(hi, b);
    }
    if (!(lo <= hi)) return {};
    Range r = to_range(lo, hi);
    r.lo = std::max(r.lo, ranges_[d_ - 1].lo);
    r.hi = std::min(r.hi, ranges_[d_ - 1].hi);
    return r;
  }

 private:
  const FieldSpec& field_;
  std::size_t d_;
  std::vector<double> lo_, hi_;
  std::vector<Range> ranges_;
  std::vector<double> last_col_;
};

std::vector<double> denominator_bounds(const WeightVector& w, std::size_t d, double eps, double height_bound) {
  // |sigma(q)| <= sqrt(H(q)) on S1 because H(q) >= |sigma(q)| ||q||_r^{r_sigma} >= sigma(q)^2.
  std::vector<double> a(d, eps);
  const double s1_bound = std::sqrt(height_bound) * (1 + 1e-12);
  for (auto i : w.s1()) a[i] = s1_bound;
  return a;
}

Order certified_compare(const FieldSpec& field, const FieldElement& q, const WeightVector& w,
                        ElementMetrics& m, const std::function<Order(const ElementMetrics&)>& cmp,
                        const char* what) {
  Order o = cmp(m);
  if (o != Order::Undecided) return o;
  m = element_metrics(embed(field, q, 0.0), w);
  o = cmp(m);
  if (o == Order::Undecided)
    throw PrecisionExhausted(std::string(what) + " is undecidable for q = " + to_string(q));
  return o;
}

Interval max_abs_s2(const ElementMetrics& m, const WeightVector& w) {
  Interval s(0.0);
  for (auto i : w.s2()) s = imax(s, abs(m.embeddings[i]));
  return s;
}

// Certified admissibility and height test for one candidate.
std::optional<Denominator> check_candidate(const FieldSpec& field, const WeightVector& w, const FieldElement& q,
                                           double eps, double height_bound, std::span<const double> a) {
  if (q.is_zero() || !is_sign_canonical(q)) return std::nullopt;
  const auto approx = embed_approx(field, q);
  for (std::size_t i = 0; i < approx.size(); ++i)
    if (std::fabs(approx[i]) > a[i] * (1 + 1e-9) + 1e-12) return std::nullopt;
  ElementMetrics m = element_metrics(field, q, w);
  if (!w.s2().empty()) {
    // Admissible iff max |sigma(q)| <= eps: reject only on certain excess.
    auto cmp = [&](const ElementMetrics& mm) {
      const Interval s = max_abs_s2(mm, w);
      if (s.lo > eps) return Order::Greater;
      if (s.hi <= eps) return Order::Less;
      return Order::Undecided;
    };
    Order o = cmp(m);
    if (o == Order::Undecided) {
      // An embedding can equal the rational eps only when q is rational.
      if (auto v = integer_value(field, q))
        o = static_cast<double>(std::llabs(*v)) <= eps ? Order::Less : Order::Greater;
      else
        o = certified_compare(field, q, w, m, cmp, "S2 admissibility");
    }
    if (o == Order::Greater) return std::nullopt;
  }
  auto height_cmp = [&](const ElementMetrics& mm) {
    if (mm.height.hi < height_bound) return Order::Less;
    if (mm.height.lo >= height_bound) return Order::Greater;
    return Order::Undecided;
  };
  Order o = height_cmp(m);
  if (o == Order::Undecided) {
    if (auto sq = detail::rational_square(field, w, q))
      o = detail::compare_root_power(sq->N, sq->height_exponent, detail::exact_rational(height_bound)) < 0
              ? Order::Less
              : Order::Greater;
    else
      o = certified_compare(field, q, w, m, height_cmp, "height bound");
  }
  if (o == Order::Greater) return std::nullopt;
  return Denominator{q, std::move(m)};
}

void sort_denominators(std::vector<Denominator>& out) {
  std::sort(out.begin(), out.end(), [](const Denominator& a, const Denominator& b) {
    const double ha = a.metrics.height.mid(), hb = b.metrics.height.mid();
    if (ha != hb) return ha < hb;
    return a.q < b.q;
  });
}

void validate_enumeration_args(const FieldSpec& field, const WeightVector& w, double eps, double height_bound) {
  if (static_cast<int>(w.size()) != field.degree()) throw InvalidWeights("weight count does not match the degree");
  if (!(eps > 0)) throw std::invalid_argument("eps must be positive");
  if (!(height_bound > 0)) throw std::invalid_argument("height_bound must be positive");
}

std::vector<Interval> half_widths(const WeightVector& w, const Denominator& q, double eps) {
  const auto& m = q.metrics;
  std::vector<Interval> hw(m.embeddings.size());
  for (auto i : w.s1()) hw[i] = Interval(eps) / (abs(m.embeddings[i]) * pow_abs(m.r_norm, w.weight_d(i)));
  for (auto i : w.s2()) hw[i] = Interval(eps) / abs(m.embeddings[i]);
  return hw;
}

ExclusionBox build_box(const FieldSpec& field, const WeightVector& w, const FieldElement& p, const Denominator& q,
                       double eps, std::vector<Interval> hw) {
  ExclusionBox box;
  box.p = p;
  box.q = q.q;
  box.eps = eps;
  const auto pe = embed_certified(field, p);
  for (std::size_t i = 0; i < pe.size(); ++i) box.center.push_back(pe[i] / q.metrics.embeddings[i]);
  box.half_width = std::move(hw);
  (void)w;
  return box;
}

}  // namespace

bool is_sign_canonical(const FieldElement& q) {
  for (auto c : q.coords)
    if (c != 0) return c > 0;
  return false;
}

void for_each_coordinate_candidate(const FieldSpec& field, std::span<const double> lo, std::span<const double> hi,
                                   const std::function<void(const std::vector<std::int64_t>&)>& visit) {
  const CandidatePlan plan(field, lo, hi);
  const double outer = plan.outer_count();
  if (outer > kMaxCandidates) throw IncompleteEnumeration("coordinate box too large to enumerate");
  const std::size_t d = plan.degree();
  std::vector<std::int64_t> c(d, 0);
  for (std::int64_t idx = 0; idx < static_cast<std::int64_t>(outer); ++idx) {
    plan.decode_outer(idx, c);
    const Range r = plan.inner_range(c);
    for (std::int64_t v = r.lo; v <= r.hi; ++v) {
      c[d - 1] = v;
      visit(c);
    }
  }
}

std::vector<Denominator> enumerate_denominators(const FieldSpec& field, const WeightVector& w, double eps,
                                                double height_bound) {
  validate_enumeration_args(field, w, eps, height_bound);
  if (height_bound <= 1) return {};  // H(q) >= 1
  const std::size_t d = static_cast<std::size_t>(field.degree());
  const auto a = denominator_bounds(w, d, eps, height_bound);
  std::vector<double> lo(d), hi(d);
  for (std::size_t i = 0; i < d; ++i) {
    lo[i] = -a[i];
    hi[i] = a[i];
  }
  const CandidatePlan plan(field, lo, hi);
  const double outer = plan.outer_count();
  if (outer > kMaxCandidates) throw IncompleteEnumeration("coordinate box too large to enumerate");
  const auto n_outer = static_cast<std::int64_t>(outer);

  std::vector<std::vector<Denominator>> per_thread(static_cast<std::size_t>(omp_get_max_threads()));
  bool failed = false;
  std::string failure_name, failure_what;
#pragma omp parallel
  {
    auto& local = per_thread[static_cast<std::size_t>(omp_get_thread_num())];
    std::vector<std::int64_t> c(d, 0);
#pragma omp for schedule(dynamic, 16)
    for (std::int64_t idx = 0; idx < n_outer; ++idx) {
      try {
        plan.decode_outer(idx, c);
        const Range r = plan.inner_range(c);
        for (std::int64_t v = r.lo; v <= r.hi; ++v) {
          c[d - 1] = v;
          if (auto den = check_candidate(field, w, FieldElement{c}, eps, height_bound, a)) local.push_back(std::move(*den));
        }
      } catch (const Error& e) {
#pragma omp critical(kbad_enum_failure)
        {
          failed = true;
          failure_name = e.name();
          failure_what = e.detail();
        }
      }
    }
  }
  if (failed) {
    if (failure_name == "ArithmeticOverflow") throw ArithmeticOverflow(failure_what);
    throw PrecisionExhausted(failure_what);
  }
  std::vector<Denominator> out;
  for (auto& part : per_thread)
    for (auto& den : part) out.push_back(std::move(den));
  sort_denominators(out);
  return out;
}

std::vector<Denominator> enumerate_denominators_reference(const FieldSpec& field, const WeightVector& w, double eps,
                                                          double height_bound) {
  validate_enumeration_args(field, w, eps, height_bound);
  if (height_bound <= 1) return {};  // H(q) >= 1
  const std::size_t d = static_cast<std::size_t>(field.degree());
  const auto a = denominator_bounds(w, d, eps, height_bound);
  std::vector<double> lo(d), hi(d);
  for (std::size_t i = 0; i < d; ++i) {
    lo[i] = -a[i];
    hi[i] = a[i];
  }
  const CandidatePlan plan(field, lo, hi);
  if (plan.full_count() > kMaxCandidates) throw IncompleteEnumeration("coordinate box too large to enumerate");
  std::vector<Denominator> out;
  std::vector<std::int64_t> c(d);
  for (std::size_t j = 0; j < d; ++j) c[j] = plan.range(j).lo;
  while (true) {
    if (auto den = check_candidate(field, w, FieldElement{c}, eps, height_bound, a)) out.push_back(std::move(*den));
    std::size_t j = 0;
    for (; j < d; ++j) {
      if (c[j] < plan.range(j).hi) {
        ++c[j];
        break;
      }
      c[j] = plan.range(j).lo;
    }
    if (j == d) break;
  }
  sort_denominators(out);
  return out;
}

// ---- boxes ----

Tri ExclusionBox::contains(std::span<const double> x) const {
  bool undecided = false;
  for (std::size_t i = 0; i < center.size(); ++i) {
    const Interval l = lower(i), u = upper(i);
    if (x[i] < l.lo || x[i] > u.hi) return Tri::No;
    if (!(x[i] >= l.hi && x[i] <= u.lo)) undecided = true;
  }
  return undecided ? Tri::Undecided : Tri::Yes;
}

Tri ExclusionBox::meets_ball(std::span<const double> c, double radius) const {
  Interval dist2(0.0);
  for (std::size_t i = 0; i < center.size(); ++i) {
    const Interval below = lower(i) - Interval(c[i]);
    const Interval above = Interval(c[i]) - upper(i);
    const Interval gap = imax(imax(below, above), Interval(0.0));
    dist2 = dist2 + gap * gap;
  }
  const Interval r2 = Interval(radius) * Interval(radius);
  if (dist2.hi <= r2.lo) return Tri::Yes;
  if (dist2.lo > r2.hi) return Tri::No;
  return Tri::Undecided;
}

ExclusionBox exclusion_box(const FieldSpec& field, const WeightVector& w, const FieldElement& p,
                           const Denominator& q, double eps) {
  if (!w.s2().empty()) {
    const Interval s = max_abs_s2(q.metrics, w);
    if (s.lo > eps) throw DenominatorNotAdmissible("max over S2 of |sigma(q)| exceeds eps for q = " + to_string(q.q));
    if (s.hi > eps) throw PrecisionExhausted("admissibility of q = " + to_string(q.q) + " is undecidable");
  }
  return build_box(field, w, p, q, eps, half_widths(w, q, eps));
}

ExclusionBox exclusion_box(const FieldSpec& field, const WeightVector& w, const FieldElement& p,
                           const FieldElement& q, double eps) {
  if (q.is_zero()) throw ZeroElement("denominator is 0");
  Denominator den{q, element_metrics(field, q, w)};
  if (!w.s2().empty() && max_abs_s2(den.metrics, w).hi > eps && max_abs_s2(den.metrics, w).lo <= eps)
    den.metrics = element_metrics(embed(field, q, 0.0), w);
  return exclusion_box(field, w, p, den, eps);
}

std::vector<ExclusionBox> boxes_meeting_region(const FieldSpec& field, const WeightVector& w, const Denominator& q,
                                               double eps, std::span<const double> lo, std::span<const double> hi) {
  const auto hw = half_widths(w, q, eps);
  const std::size_t d = hw.size();
  std::vector<double> plo(d), phi(d);
  for (std::size_t i = 0; i < d; ++i) {
    // sigma(p) in sigma(q) * [lo - w, hi + w]
    const Interval region(round_down(lo[i] - hw[i].hi), round_up(hi[i] + hw[i].hi));
    const Interval scaled = q.metrics.embeddings[i] * region;
    plo[i] = scaled.lo;
    phi[i] = scaled.hi;
  }
  std::vector<ExclusionBox> out;
  for_each_coordinate_candidate(field, plo, phi, [&](const std::vector<std::int64_t>& c) {
    const FieldElement p{c};
    const auto approx = embed_approx(field, p);
    for (std::size_t i = 0; i < d; ++i) {
      const double slack = 1e-9 * (std::fabs(approx[i]) + 1.0);
      if (approx[i] < plo[i] - slack || approx[i] > phi[i] + slack) return;
    }
    ExclusionBox box = build_box(field, w, p, q, eps, hw);
    for (std::size_t i = 0; i < d; ++i)
      if (box.upper(i).hi < lo[i] || box.lower(i).lo > hi[i]) return;
    out.push_back(std::move(box));
  });
  return out;
}

Membership membership(const FieldSpec& field, const WeightVector& w, std::span<const double> x, double eps,
                      std::span<const Denominator> denominators) {
  for (const auto& q : denominators) {
    for (const auto& box : boxes_meeting_region(field, w, q, eps, x, x)) {
      switch (box.contains(x)) {
        case Tri::Yes:
          return Excluded{box.p, box.q};
        case Tri::Undecided:
          throw PrecisionExhausted("point lies on the boundary of the box for p = " + to_string(box.p) +
                                   ", q = " + to_string(box.q));
        case Tri::No:
          break;
      }
    }
  }
  return Survives{0.0};
}

Membership membership(const FieldSpec& field, const WeightVector& w, std::span<const double> x, double eps,
                      double height_bound) {
  const auto list = enumerate_denominators(field, w, eps, height_bound);
  Membership m = membership(field, w, x, eps, std::span<const Denominator>(list));
  if (auto* s = std::get_if<Survives>(&m)) s->height_bound = height_bound;
  return m;
}

Interval badness_expression(const FieldSpec& field, const WeightVector& w, std::span<const double> x,
                            const FieldElement& p, const FieldElement& q) {
  const ElementMetrics m = element_metrics(field, q, w);
  const auto pe = embed_certified(field, p);
  Interval value(0.0);
  for (auto i : w.s1()) {
    const Interval t = m.embeddings[i] * Interval(x[i]) + pe[i];
    value = imax(value, pow_abs(m.r_norm, w.weight_d(i)) * abs(t));
  }
  for (auto i : w.s2()) {
    const Interval t = m.embeddings[i] * Interval(x[i]) + pe[i];
    value = imax(value, imax(abs(t), abs(m.embeddings[i])));
  }
  return value;
}

BadnessReport badness_constant(const FieldSpec& field, const WeightVector& w, std::span<const double> x,
                               double height_bound) {
  BadnessReport report;
  report.height_bound = height_bound;
  const double inf = std::numeric_limits<double>::infinity();
  report.value = Interval(inf);
  if (!(height_bound > 1)) return report;  // H(q) >= 1 for every q
  const std::size_t d = static_cast<std::size_t>(field.degree());

  auto consider = [&](const FieldElement& p, const FieldElement& q) {
    const Interval v = badness_expression(field, w, x, p, q);
    if (v.mid() < report.value.mid() || (v.mid() == report.value.mid() && report.witness &&
                                         std::make_pair(q, p) < std::make_pair(report.witness->second,
                                                                               report.witness->first))) {
      report.value = v;
      report.witness = std::make_pair(p, q);
    }
  };

  // Incumbent from q = 1: every point is within half the sum of the basis
  // embeddings of some lattice point, per coordinate.
  const FieldElement one = field.one();
  {
    std::vector<double> lo(d), hi(d);
    for (std::size_t i = 0; i < d; ++i) {
      double reach = 0.0;
      for (std::size_t j = 0; j < d; ++j) reach += 0.5 * field.embedding_entry(i, j).mag();
      lo[i] = -x[i] - reach - 1e-9;
      hi[i] = -x[i] + reach + 1e-9;
    }
    for_each_coordinate_candidate(field, lo, hi, [&](const std::vector<std::int64_t>& c) { consider(FieldElement{c}, one); });
  }

  // Any q with an S2 embedding above the incumbent cannot win.
  const double s2_cap = report.value.hi;
  const auto qs = enumerate_denominators(field, w, s2_cap, height_bound);
  for (const auto& q : qs) {
    const double v = report.value.hi;
    std::vector<double> lo(d), hi(d);
    for (std::size_t i = 0; i < d; ++i) {
      double reach = v;
      if (std::find(w.s1().begin(), w.s1().end(), i) != w.s1().end())
        reach = v / pow_abs(q.metrics.r_norm, w.weight_d(i)).lo;
      const Interval c = -(q.metrics.embeddings[i] * Interval(x[i]));
      lo[i] = c.lo - reach * (1 + 1e-9);
      hi[i] = c.hi + reach * (1 + 1e-9);
    }
    // (p, q) and (-p, -q) give the same value, so one sign of q suffices.
    for_each_coordinate_candidate(field, lo, hi, [&](const std::vector<std::int64_t>& c) { consider(FieldElement{c}, q.q); });
  }
  return report;
}

void write_denominators_csv(std::ostream& os, const FieldSpec& field, std::span<const Denominator> list,
                            const std::function<std::optional<std::pair<int, int>>(const Denominator&)>& index) {
  const int d = field.degree();
  for (int j = 0; j < d; ++j) os << "c" << (j + 1) << ',';
  for (int i = 0; i < d; ++i) os << "sigma" << (i + 1) << ',';
  os << "r_norm,height,n,k\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (const auto& q : list) {
    for (auto c : q.q.coords) os << c << ',';
    for (const auto& e : q.metrics.embeddings) os << num(e.mid()) << ',';
    os << num(q.metrics.r_norm.mid()) << ',' << num(q.metrics.height.mid()) << ',';
    const auto nk = index ? index(q) : std::nullopt;
    if (nk)
      os << nk->first << ',' << nk->second;
    else
      os << ',';
    os << '\n';
  }
}

}  // namespace kbad
