#include "kbad/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "exact.hpp"

namespace kbad {

namespace {

// R^e as an enclosure, e of either sign.
Interval ipow(std::int64_t R, int e) {
  Interval base(static_cast<double>(R));
  Interval acc(1.0);
  for (int i = 0; i < std::abs(e); ++i) acc = acc * base;
  return e >= 0 ? acc : Interval(1.0) / acc;
}

// certified a <= b
Order le(const Interval& a, const Interval& b) {
  if (a.hi <= b.lo) return Order::Less;
  if (a.lo > b.hi) return Order::Greater;
  return Order::Undecided;
}

// certified a < b
Order lt(const Interval& a, const Interval& b) {
  if (a.hi < b.lo) return Order::Less;
  if (a.lo >= b.hi) return Order::Greater;
  return Order::Undecided;
}

struct Undecidable {};

std::optional<PartitionIndex> classify(const WeightVector& w, const StrategyConstants& c, const ElementMetrics& m) {
  const Interval& h = m.height;
  const double ratio = h.mid() / c.H(0).mid();
  int n = std::max(0, static_cast<int>(std::floor(std::log(ratio) / std::log(static_cast<double>(c.R)))));
  for (int guard = 0; guard < 64; ++guard) {
    const Order below = le(c.H(n), h);
    const Order above = lt(h, c.H(n + 1));
    if (below == Order::Undecided || above == Order::Undecided) throw Undecidable{};
    if (below == Order::Greater && n > 0) {
      --n;
      continue;
    }
    if (above == Order::Greater) {
      ++n;
      continue;
    }
    break;
  }
  const Interval size = pow_abs(m.r_norm, 2 * w.r_max_d());
  const Interval hn = c.H(n);
  const double per_k = 4.0 * c.d * std::log(static_cast<double>(c.R));
  int k = 1 + static_cast<int>(std::floor(std::log(size.mid() / hn.mid()) / per_k));
  if (k < 1) k = 1;
  for (int guard = 0; guard < 64; ++guard) {
    const Order below = le(hn * ipow(c.R, (4 * k - 4) * c.d), size);
    const Order above = lt(size, hn * ipow(c.R, 4 * k * c.d));
    if (below == Order::Undecided || above == Order::Undecided) throw Undecidable{};
    if (below == Order::Greater) {
      if (k == 1) return std::nullopt;
      --k;
      continue;
    }
    if (above == Order::Greater) {
      ++k;
      continue;
    }
    return PartitionIndex{n, k};
  }
  return std::nullopt;
}

// Exact version for q with q^2 rational.
std::optional<PartitionIndex> classify_exact(const StrategyConstants& c, const detail::RationalSquare& sq) {
  auto H = [&](int n) {
    Rational r(1, 4);
    for (int i = 0; i < std::abs(n - 4 * c.d); ++i) {
      if (n > 4 * c.d) r *= c.R;
      else r /= c.R;
    }
    return r;
  };
  // a <= N^{e/2}
  auto at_most = [&](const Rational& a, const Rational& e) { return detail::compare_root_power(sq.N, e, a) >= 0; };
  int n = 0;
  while (at_most(H(n + 1), sq.height_exponent)) ++n;
  Rational lo = H(n), hi = H(n);
  for (int i = 0; i < 4 * c.d; ++i) hi *= c.R;
  for (int k = 1; k < 64; ++k) {
    const bool above_lo = at_most(lo, sq.size_exponent), below_hi = !at_most(hi, sq.size_exponent);
    if (above_lo && below_hi) return PartitionIndex{n, k};
    if (!above_lo) return std::nullopt;
    for (int i = 0; i < 4 * c.d; ++i) {
      lo *= c.R;
      hi *= c.R;
    }
  }
  return std::nullopt;
}

}  // namespace

Interval StrategyConstants::H(int n) const { return ipow(R, n - 4 * d) * Interval(0.25); }

double StrategyConstants::radius_scale(int j) const { return rho0 / std::pow(static_cast<double>(R), j); }

StrategyConstants compute_constants(double beta, double gamma, int d, double rho0) {
  if (!(beta > 0 && beta < 1)) throw ParameterOutOfRange("beta must lie in (0, 1)");
  if (!(gamma > 0)) throw ParameterOutOfRange("gamma must be positive");
  if (!(rho0 > 0 && rho0 < 1)) throw ParameterOutOfRange("rho0 must lie in (0, 1)");
  if (d < 1) throw ParameterOutOfRange("degree must be positive");
  StrategyConstants c;
  c.d = d;
  c.beta = beta;
  c.gamma = gamma;
  c.rho0 = rho0;
  const long double threshold = std::pow(static_cast<long double>(beta) * beta / 2, static_cast<long double>(gamma));
  std::int64_t R = 2;
  // Ties are accepted up to a relative 1e-12, which keeps exact cases such as
  // 2/16 = (1/8)^1 on the right side.
  while (static_cast<long double>(d) > threshold * (std::pow(static_cast<long double>(R), gamma) - 1) * (1 + 1e-12L)) ++R;
  c.R = R;
  c.eps = rho0 * std::pow(static_cast<double>(R), -4.0 * d) / 4;
  return c;
}

std::optional<int> ball_class(const StrategyConstants& c, const Ball& b) {
  const double rho = b.radius;
  if (!(rho > 0) || rho > c.rho0) return std::nullopt;
  int n = static_cast<int>(std::floor(std::log(c.rho0 / rho) / std::log(static_cast<double>(c.R))));
  n = std::max(n, 0);
  while (n > 0 && rho > c.radius_scale(n)) --n;
  while (rho <= c.radius_scale(n + 1)) ++n;
  if (c.beta * c.radius_scale(n) < rho) return n;
  return std::nullopt;
}

std::optional<PartitionIndex> partition_index(const FieldSpec& field, const WeightVector& w,
                                              const StrategyConstants& c, const Denominator& q) {
  try {
    return classify(w, c, q.metrics);
  } catch (const Undecidable&) {
  }
  try {
    return classify(w, c, element_metrics(embed(field, q.q, 0.0), w));
  } catch (const Undecidable&) {
  }
  if (auto sq = detail::rational_square(field, w, q.q)) return classify_exact(c, *sq);
  throw PrecisionExhausted("partition cell of q = " + to_string(q.q) + " sits on a boundary");
}

std::optional<PartitionIndex> partition_index(const FieldSpec& field, const WeightVector& w,
                                              const StrategyConstants& c, const FieldElement& q) {
  return partition_index(field, w, c, Denominator{q, element_metrics(field, q, w)});
}

std::int64_t required_coord_bound(const FieldSpec& field, const WeightVector& w, double eps, double height_bound) {
  const auto d = static_cast<std::size_t>(field.degree());
  std::vector<double> a(d, eps);
  for (auto i : w.s1()) a[i] = std::sqrt(height_bound);
  double best = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) s += field.inverse_embedding_bound(j, i) * a[i];
    best = std::max(best, s);
  }
  return static_cast<std::int64_t>(std::ceil(best)) + 1;
}

DenominatorIndex::DenominatorIndex(const FieldSpec& field, const WeightVector& w, const StrategyConstants& c,
                                   int m_cap, std::optional<std::int64_t> coord_bound)
    : m_cap_(m_cap), height_bound_(c.H(m_cap + 1).hi) {
  const std::int64_t needed = required_coord_bound(field, w, c.eps, height_bound_);
  if (coord_bound && needed > *coord_bound)
    throw IncompleteEnumeration("heights below " + format_double(height_bound_) + " need coordinates up to " +
                                std::to_string(needed) + " > coord_bound " + std::to_string(*coord_bound));
  for (auto& q : enumerate_denominators(field, w, c.eps, height_bound_)) {
    const auto cell = partition_index(field, w, c, q);
    if (!cell) throw PrecisionExhausted("no partition cell for q = " + to_string(q.q));
    if (cell->n > m_cap) continue;
    buckets_[*cell].push_back(q);
    cells_.push_back(*cell);
    all_.push_back(std::move(q));
  }
}

std::span<const Denominator> DenominatorIndex::bucket(int m, int k) const {
  const auto it = buckets_.find(PartitionIndex{m, k});
  if (it == buckets_.end()) return {};
  return it->second;
}

std::span<const Denominator> DenominatorIndex::up_to_class(int m) const {
  std::size_t end = 0;
  for (std::size_t i = 0; i < all_.size(); ++i)
    if (cells_[i].n <= m) end = i + 1;
  for (std::size_t i = 0; i < end; ++i)
    if (cells_[i].n > m) throw PrecisionExhausted("height order and partition cells disagree near class " + std::to_string(m));
  return std::span<const Denominator>(all_.data(), end);
}

std::optional<RatioPoint> unique_point(const FieldSpec& field, const WeightVector& w, const StrategyConstants& c,
                                       const Ball& b, int n, int k, const DenominatorIndex& index) {
  if (n + k > index.m_cap())
    throw IncompleteEnumeration("cell (" + std::to_string(n + k) + "," + std::to_string(k) + ") lies above m_cap " +
                                std::to_string(index.m_cap()));
  const std::size_t d = b.center.size();
  std::vector<double> lo(d), hi(d);
  for (std::size_t i = 0; i < d; ++i) {
    lo[i] = b.center[i] - b.radius;
    hi[i] = b.center[i] + b.radius;
  }
  std::optional<RatioPoint> found;
  for (const auto& q : index.bucket(n + k, k)) {
    for (const auto& box : boxes_meeting_region(field, w, q, c.eps, lo, hi)) {
      if (box.meets_ball(b.center, b.radius) == Tri::No) continue;
      if (!found) {
        RatioPoint r;
        for (const auto& x : box.center) r.point.push_back(x.mid());
        r.p = box.p;
        r.q = box.q;
        found = std::move(r);
      } else if (field.mul(box.p, found->q) != field.mul(found->p, box.q)) {
        throw UniquenessViolation("ratios " + to_string(found->p) + "/" + to_string(found->q) + " and " +
                                  to_string(box.p) + "/" + to_string(box.q) + " both meet the ball in cell (" +
                                  std::to_string(n + k) + "," + std::to_string(k) + ")");
      }
    }
  }
  return found;
}

PotentialStrategy::PotentialStrategy(const FieldSpec& field, WeightVector w, StrategyConfig config, std::size_t rounds)
    : field_(field), w_(std::move(w)), config_(config), k_cut_(config.k_cut.value_or(static_cast<int>(rounds) + 5)) {
  if (static_cast<int>(w_.size()) != field.degree()) throw InvalidWeights("weight count does not match the degree");
  if (k_cut_ < 0) throw ConfigError("k_cut must be nonnegative");
}

AliceFamily PotentialStrategy::respond(const GameTranscript& t) {
  if (t.kind() != GameKind::Potential) throw ParameterOutOfRange("the strategy plays the potential game");
  const std::size_t round = t.alice_moves().size();
  const Ball& b = t.current_ball();
  if (!constants_) {
    if (b.radius >= 1) return {};
    constants_ = compute_constants(t.beta(), *t.gamma(), field_.degree(), b.radius);
    relabel_round_ = round;
    m_cap_ = 0;
    while (constants_->H(m_cap_ + 2).hi <= config_.precision_cap) ++m_cap_;
    std::optional<std::int64_t> bound = config_.coord_bound;
    if (!bound) bound = 2 * required_coord_bound(field_, w_, constants_->eps, constants_->H(m_cap_ + 1).hi);
    index_.emplace(field_, w_, *constants_, m_cap_, bound);
  }
  const auto& c = *constants_;
  const auto n = ball_class(c, b);
  if (!n || state_.seen(*n)) return {};
  state_.first_round[*n] = round;
  AliceFamily family;
  const int k_max = std::min(k_cut_, m_cap_ - *n);
  for (int k = 1; k <= k_max; ++k) {
    const auto s = unique_point(field_, w_, c, b, *n, k, *index_);
    if (!s) continue;
    const double delta = c.radius_scale(*n + k);
    for (std::size_t tau = 0; tau < s->point.size(); ++tau) {
      family.push_back(axis_slab(s->point.size(), tau, s->point[tau], delta, k));
      log_.push_back({round, *n, k, tau, s->point[tau], delta});
    }
  }
  return family;
}

int PotentialStrategy::covered_class() const {
  if (!constants_) return -1;
  int first_unvisited = 0;
  while (state_.seen(first_unvisited)) ++first_unvisited;
  return std::min({first_unvisited, m_cap_, k_cut_ + 1});
}

double PotentialStrategy::covered_height_bound() const {
  const int m = covered_class();
  if (m < 0) return 1.0;
  return constants_->H(m + 1).lo;
}

bool PotentialStrategy::survives(std::span<const double> x) const {
  const int m = covered_class();
  if (m < 0) return false;
  const auto list = index_->up_to_class(m);
  return std::holds_alternative<Survives>(membership(field_, w_, x, constants_->eps, list));
}

void write_emission_log(std::ostream& os, const std::vector<EmissionRecord>& log) {
  os << "round,n,k,tau,offset,delta\n";
  for (const auto& e : log)
    os << e.round << ',' << e.n << ',' << e.k << ',' << e.tau << ',' << format_double(e.offset) << ','
       << format_double(e.delta) << '\n';
}

}  // namespace kbad
