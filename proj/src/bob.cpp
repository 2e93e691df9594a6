#include "kbad/bob.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kbad {

namespace {

constexpr int kMaxRejections = 10000;

void check_policy(const BobPolicy& p, const GameTranscript& t) {
  if (!t.bob_to_move()) throw WrongTurn("it is not Bob's turn");
  if (!(p.shrink >= t.beta() && p.shrink <= 1)) throw ParameterOutOfRange("shrink must lie in [beta, 1], got " + format_double(p.shrink));
}

const AliceFamily* slabs_to_avoid(const GameTranscript& t) {
  if (t.kind() != GameKind::Absolute || t.alice_moves().empty()) return nullptr;
  return &t.alice_moves().back();
}

bool avoids(const AliceFamily* slabs, const std::vector<double>& c, double radius, double margin) {
  if (!slabs) return true;
  for (const auto& h : *slabs)
    if (std::fabs(h.signed_distance(c)) < h.delta + radius + margin) return false;
  return true;
}

std::vector<double> uniform_in_ball(std::mt19937_64& rng, const std::vector<double>& c, double R) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t d = c.size();
  std::vector<double> v(d);
  double len = 0.0;
  while (len == 0.0) {
    len = 0.0;
    for (auto& x : v) {
      x = normal(rng);
      len += x * x;
    }
    len = std::sqrt(len);
  }
  const double scale = R * std::pow(unit(rng), 1.0 / static_cast<double>(d)) / len;
  std::vector<double> out(d);
  for (std::size_t i = 0; i < d; ++i) out[i] = c[i] + scale * v[i];
  return out;
}

// Moves the center away from the single slab along its normal, on whichever
// side fits inside the current ball.
std::optional<Ball> constructive(const GameTranscript& t, double radius) {
  const Ball& cur = t.current_ball();
  const AliceFamily* slabs = slabs_to_avoid(t);
  Ball b{cur.center, radius};
  if (!slabs || slabs->empty()) return b;
  const auto& h = slabs->front();
  const double sd = h.signed_distance(cur.center);
  const double side = sd >= 0 ? 1.0 : -1.0;
  const double need = h.delta + radius;
  const double room = cur.radius - radius;
  for (double dir : {side, -side}) {
    // Signed distance after moving by a along dir * normal is sd + dir * a.
    const double a = dir == side ? std::max(0.0, need - std::fabs(sd)) : need + std::fabs(sd);
    if (a > room) continue;
    // A hair past the boundary so the avoidance check is not a tie.
    const double shift = std::min(room, a * (1 + 1e-12) + 1e-300);
    for (std::size_t i = 0; i < b.center.size(); ++i) b.center[i] = cur.center[i] + dir * shift * h.normal[i];
    if (!bob_move_violation(t, b)) return b;
  }
  return std::nullopt;
}

Ball feasible_ball(std::mt19937_64* rng, const BobPolicy& policy, const GameTranscript& t) {
  const Ball& cur = t.current_ball();
  const AliceFamily* slabs = slabs_to_avoid(t);
  for (double factor : {policy.shrink, t.beta()}) {
    const double radius = factor * cur.radius;
    const double room = (cur.radius - radius) * (1 - 1e-13);
    if (rng) {
      for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
        Ball b{uniform_in_ball(*rng, cur.center, room), radius};
        if (avoids(slabs, b.center, radius, 1e-12 * cur.radius) && !bob_move_violation(t, b)) return b;
        if (!slabs) break;
      }
    }
    if (auto b = constructive(t, radius)) return *b;
  }
  throw NoFeasibleBall("no legal ball of radius in [beta*rho, shrink*rho] avoids the last neighborhood");
}

}  // namespace

std::string to_string(BobKind kind) {
  switch (kind) {
    case BobKind::Random:
      return "random";
    case BobKind::GreedyRational:
      return "greedy_rational";
    case BobKind::Scripted:
      return "scripted";
  }
  return "random";
}

BobKind parse_bob_kind(const std::string& text) {
  if (text == "random") return BobKind::Random;
  if (text == "greedy_rational" || text == "greedy") return BobKind::GreedyRational;
  if (text == "scripted") return BobKind::Scripted;
  throw ConfigError("unknown bob policy '" + text + "'");
}

RandomBob::RandomBob(BobPolicy policy) : policy_(std::move(policy)), rng_(policy_.seed) {}

Ball RandomBob::move(const GameTranscript& t) {
  check_policy(policy_, t);
  return feasible_ball(&rng_, policy_, t);
}

GreedyRationalBob::GreedyRationalBob(BobPolicy policy) : policy_(std::move(policy)) {
  if (!policy_.target_pool || policy_.target_pool->empty()) throw ConfigError("greedy bob needs a nonempty target pool");
  alive_.assign(policy_.target_pool->size(), 1);
}

std::size_t GreedyRationalBob::surviving_targets() const {
  return static_cast<std::size_t>(std::count(alive_.begin(), alive_.end(), 1));
}

Ball GreedyRationalBob::move(const GameTranscript& t) {
  check_policy(policy_, t);
  const auto& pool = *policy_.target_pool;
  for (; seen_moves_ < t.alice_moves().size(); ++seen_moves_)
    for (const auto& h : t.alice_moves()[seen_moves_])
      for (std::size_t j = 0; j < pool.size(); ++j)
        if (alive_[j] && std::fabs(h.signed_distance(pool[j].center)) < h.delta) alive_[j] = 0;

  const Ball& cur = t.current_ball();
  const double radius = policy_.shrink * cur.radius;
  const double room = cur.radius - radius;
  std::optional<std::size_t> best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < pool.size(); ++j) {
    if (!alive_[j]) continue;
    double s = 0.0;
    for (std::size_t i = 0; i < cur.center.size(); ++i) s += (pool[j].center[i] - cur.center[i]) * (pool[j].center[i] - cur.center[i]);
    const double dist = std::sqrt(s);
    if (dist < best_dist) {  // strict: the pool order breaks ties
      best_dist = dist;
      best = j;
    }
  }
  Ball b{cur.center, radius};
  if (best && best_dist > 0) {
    const double step = std::min(best_dist, room);
    for (std::size_t i = 0; i < b.center.size(); ++i)
      b.center[i] = cur.center[i] + step * (pool[*best].center[i] - cur.center[i]) / best_dist;
  }
  if (!bob_move_violation(t, b)) return b;
  return feasible_ball(nullptr, policy_, t);
}

ScriptedBob::ScriptedBob(TranscriptRecord record) : record_(std::move(record)) {}

Ball ScriptedBob::move(const GameTranscript& t) {
  if (!t.bob_to_move()) throw WrongTurn("it is not Bob's turn");
  const std::size_t next = t.balls().size();
  if (next >= record_.balls.size()) throw ParseError("scripted transcript has no ball for round " + std::to_string(next - 1));
  return record_.balls[next];
}

Ball random_bob(RandomBob& bob, const GameTranscript& t) { return bob.move(t); }

Ball greedy_rational_bob(GreedyRationalBob& bob, const GameTranscript& t) { return bob.move(t); }

ScriptedBob scripted_bob(const std::string& path) { return ScriptedBob(load_transcript(path)); }

std::vector<Target> target_pool(const FieldSpec& field, const WeightVector& w, double eps, double height_bound,
                                std::span<const double> lo, std::span<const double> hi) {
  std::vector<Target> out;
  for (const auto& q : enumerate_denominators(field, w, eps, height_bound)) {
    auto boxes = boxes_meeting_region(field, w, q, eps, lo, hi);
    std::sort(boxes.begin(), boxes.end(), [](const ExclusionBox& a, const ExclusionBox& b) { return a.p < b.p; });
    for (const auto& box : boxes) {
      Target tg;
      for (const auto& c : box.center) tg.center.push_back(c.mid());
      tg.height = q.metrics.height.mid();
      out.push_back(std::move(tg));
    }
  }
  return out;
}

std::vector<Target> target_pool(const std::vector<ExclusionBox>& boxes, const std::vector<double>& heights) {
  if (boxes.size() != heights.size()) throw std::invalid_argument("one height per box");
  std::vector<std::size_t> order(boxes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (heights[a] != heights[b]) return heights[a] < heights[b];
    if (boxes[a].q != boxes[b].q) return boxes[a].q < boxes[b].q;
    return boxes[a].p < boxes[b].p;
  });
  std::vector<Target> out;
  for (auto i : order) {
    Target tg;
    for (const auto& c : boxes[i].center) tg.center.push_back(c.mid());
    tg.height = heights[i];
    out.push_back(std::move(tg));
  }
  return out;
}

}  // namespace kbad
