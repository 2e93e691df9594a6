#pragma once

// Alice's winning strategy in the hyperplane potential game for the set of
// (K, r)-badly approximable vectors: ball classes, denominator partitions,
// the unique ratio point per (n, k) and the emitted slab families.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "kbad/badset.hpp"
#include "kbad/game.hpp"

namespace kbad {

struct StrategyConstants {
  int d = 0;
  double beta = 0.0;
  double gamma = 0.0;
  double rho0 = 0.0;
  std::int64_t R = 0;
  double eps = 0.0;

  // H_n = eps / rho0 * R^n = R^(n - 4d) / 4, enclosed.
  Interval H(int n) const;
  // R^-j * rho0, the slab half-width for class n and index k is radius_scale(n + k).
  double radius_scale(int j) const;
};

// R is the smallest integer >= 2 with d / (R^gamma - 1) <= (beta^2 / 2)^gamma.
// Throws ParameterOutOfRange unless 0 < beta < 1, gamma > 0, 0 < rho0 < 1.
StrategyConstants compute_constants(double beta, double gamma, int d, double rho0);

// The n with beta R^-n rho0 < radius <= R^-n rho0, if any.
std::optional<int> ball_class(const StrategyConstants& c, const Ball& b);

struct PartitionIndex {
  int n = 0;
  int k = 0;
  auto operator<=>(const PartitionIndex&) const = default;
};

// (n, k) with H_n <= H(q) < H_{n+1} and H_n R^{(4k-4)d} <= ||q||_r^{2r} < H_n R^{4kd},
// r the largest weight. Elements below H_1 land in n = 0. Empty when no k >= 1
// fits. Throws PrecisionExhausted on unresolvable ties.
std::optional<PartitionIndex> partition_index(const FieldSpec& field, const WeightVector& w,
                                              const StrategyConstants& c, const Denominator& q);
std::optional<PartitionIndex> partition_index(const FieldSpec& field, const WeightVector& w,
                                              const StrategyConstants& c, const FieldElement& q);

// All eps-admissible denominators with H(q) < H_{m_cap + 1}, bucketed by
// their (m, k) partition cell.
class DenominatorIndex {
 public:
  // coord_bound: largest coordinate magnitude the enumeration may need; when
  // the embedding bounds require more, IncompleteEnumeration is thrown.
  DenominatorIndex(const FieldSpec& field, const WeightVector& w, const StrategyConstants& c, int m_cap,
                   std::optional<std::int64_t> coord_bound = std::nullopt);

  int m_cap() const { return m_cap_; }
  double height_bound() const { return height_bound_; }
  const std::vector<Denominator>& all() const { return all_; }
  const PartitionIndex& cell(std::size_t i) const { return cells_[i]; }
  std::span<const Denominator> bucket(int m, int k) const;
  // Denominators with H(q) < H_{m + 1}, in height order.
  std::span<const Denominator> up_to_class(int m) const;
  const std::map<PartitionIndex, std::vector<Denominator>>& buckets() const { return buckets_; }

 private:
  int m_cap_;
  double height_bound_;
  std::vector<Denominator> all_;
  std::vector<PartitionIndex> cells_;
  std::map<PartitionIndex, std::vector<Denominator>> buckets_;
};

// Largest coordinate magnitude needed to enumerate q with H(q) < height_bound.
std::int64_t required_coord_bound(const FieldSpec& field, const WeightVector& w, double eps, double height_bound);

struct RatioPoint {
  std::vector<double> point;  // theta(p / q)
  FieldElement p;
  FieldElement q;
};

// The common ratio point of every (p, q), q in P_{n+k,k}, whose box meets the
// ball; empty when there is none. Throws UniquenessViolation with both ratios
// if two distinct ratios occur, IncompleteEnumeration if n + k > m_cap.
std::optional<RatioPoint> unique_point(const FieldSpec& field, const WeightVector& w, const StrategyConstants& c,
                                       const Ball& b, int n, int k, const DenominatorIndex& index);

// i(n): the first round at which a ball of class n appeared.
struct BallClassState {
  std::map<int, std::size_t> first_round;
  bool seen(int n) const { return first_round.count(n) > 0; }
};

struct StrategyConfig {
  std::optional<int> k_cut;                 // default rounds + 5
  std::optional<std::int64_t> coord_bound;  // default: twice the required bound
  double precision_cap = 2e5;               // largest height enumerated
};

struct EmissionRecord {
  std::size_t round;
  int n;
  int k;
  std::size_t tau;
  double offset;
  double delta;
};

// Emits, on the first ball of each class n, the d axis slabs x_tau = s_tau(k, B)
// of half-width R^{-n-k} rho0 for every k <= k_cut whose cell P_{n+k,k}(B) is
// nonempty; plays empty moves otherwise. Balls of radius >= 1 get empty moves
// and the first ball below 1 becomes B_0.
class PotentialStrategy final : public AliceStrategy {
 public:
  PotentialStrategy(const FieldSpec& field, WeightVector w, StrategyConfig config, std::size_t rounds);

  AliceFamily respond(const GameTranscript& t) override;

  const std::optional<StrategyConstants>& constants() const { return constants_; }
  const BallClassState& state() const { return state_; }
  const std::vector<EmissionRecord>& emissions() const { return log_; }
  int k_cut() const { return k_cut_; }
  // Largest m_cap allowed by precision_cap.
  int m_cap() const { return m_cap_; }
  const DenominatorIndex* index() const { return index_ ? &*index_ : nullptr; }

  // Largest class m whose cells are fully handled: every class below m was
  // visited, m <= m_cap and m - 1 <= k_cut. -1 before B_0 is fixed.
  int covered_class() const;
  // Denominators with H(q) below this bound are fully handled by the play so
  // far: every box meeting the ball of the relevant class lies in an emitted
  // slab.
  double covered_height_bound() const;
  // Truncated membership of x against the covered denominators, false
  // before B_0 is fixed.
  bool survives(std::span<const double> x) const;

 private:
  const FieldSpec& field_;
  WeightVector w_;
  StrategyConfig config_;
  int k_cut_;
  int m_cap_ = 0;
  std::size_t relabel_round_ = 0;
  std::optional<StrategyConstants> constants_;
  std::optional<DenominatorIndex> index_;
  BallClassState state_;
  std::vector<EmissionRecord> log_;
};

void write_emission_log(std::ostream& os, const std::vector<EmissionRecord>& log);

}  // namespace kbad
