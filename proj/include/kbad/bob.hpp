#pragma once

// Legal Bob players for exercising the referee and Alice's strategy.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "kbad/badset.hpp"
#include "kbad/game.hpp"

namespace kbad {

enum class BobKind { Random, GreedyRational, Scripted };

std::string to_string(BobKind kind);
BobKind parse_bob_kind(const std::string& text);

struct Target {
  std::vector<double> center;
  double height = 0.0;
};

struct BobPolicy {
  BobKind kind = BobKind::Random;
  std::uint64_t seed = 0;
  double shrink = 0.5;  // in [beta, 1]
  std::optional<std::vector<Target>> target_pool;
};

class BobPlayer {
 public:
  virtual ~BobPlayer() = default;
  virtual Ball move(const GameTranscript& t) = 0;
};

// Radius shrink * rho, center uniform in the feasible region by rejection
// sampling; constructive fallback after 10^4 rejections, then radius beta * rho.
class RandomBob final : public BobPlayer {
 public:
  explicit RandomBob(BobPolicy policy);
  Ball move(const GameTranscript& t) override;

 private:
  BobPolicy policy_;
  std::mt19937_64 rng_;
};

// Moves as far as legality allows toward the nearest target center that no
// emitted neighborhood contains yet; concentric when none is left.
class GreedyRationalBob final : public BobPlayer {
 public:
  explicit GreedyRationalBob(BobPolicy policy);
  Ball move(const GameTranscript& t) override;

  std::size_t surviving_targets() const;

 private:
  BobPolicy policy_;
  std::vector<char> alive_;
  std::size_t seen_moves_ = 0;
};

// Replays the balls of a recorded transcript.
class ScriptedBob final : public BobPlayer {
 public:
  explicit ScriptedBob(TranscriptRecord record);
  Ball move(const GameTranscript& t) override;
  const TranscriptRecord& record() const { return record_; }

 private:
  TranscriptRecord record_;
};

// Throws NoFeasibleBall. Both validate shrink >= beta.
Ball random_bob(RandomBob& bob, const GameTranscript& t);
Ball greedy_rational_bob(GreedyRationalBob& bob, const GameTranscript& t);
// Throws ParseError.
ScriptedBob scripted_bob(const std::string& path);

// Centers of the boxes Delta_eps(p, q) meeting the region [lo, hi] for every
// q with H(q) < height_bound, ordered by height of q then coordinates of q, p.
std::vector<Target> target_pool(const FieldSpec& field, const WeightVector& w, double eps, double height_bound,
                                std::span<const double> lo, std::span<const double> hi);
std::vector<Target> target_pool(const std::vector<ExclusionBox>& boxes, const std::vector<double>& heights);

}  // namespace kbad
