#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "kbad/bob.hpp"
#include "kbad/strategy.hpp"

using namespace kbad;

namespace {

using ld = long double;

FieldSpec sqrt2() { return make_field({-2, 0, 1}); }

// Direct evaluation of the cell inequalities in long double.
std::pair<int, int> cell_oracle(const StrategyConstants& c, ld h, ld size) {
  auto H = [&](int n) { return std::pow(static_cast<ld>(c.R), n - 4 * c.d) / 4; };
  int n = 0;
  while (H(n + 1) <= h) ++n;
  int k = 1;
  while (!(H(n) * std::pow(static_cast<ld>(c.R), (4 * k - 4) * c.d) <= size &&
           size < H(n) * std::pow(static_cast<ld>(c.R), 4 * k * c.d)))
    ++k;
  return {n, k};
}

struct Run {
  GameTranscript t;
  std::unique_ptr<PotentialStrategy> alice;
};

Run play(const FieldSpec& K, const WeightVector& w, BobPlayer& bob, std::size_t rounds, Ball b0,
         double beta = 0.9, double gamma = 5.0) {
  Run r{new_game(GameKind::Potential, beta, gamma, std::move(b0)),
        std::make_unique<PotentialStrategy>(K, w, StrategyConfig{}, rounds)};
  for (std::size_t i = 0; i < rounds; ++i) {
    alice_move(r.t, r.alice->respond(r.t));
    bob_move(r.t, bob.move(r.t));
  }
  r.t.finish();
  return r;
}

}  // namespace

TEST_CASE("strategy constants") {
  const auto a = compute_constants(0.5, 1.0, 2, 0.5);
  CHECK(a.R == 17);
  CHECK(a.eps == doctest::Approx(0.125 * std::pow(17.0, -8)).epsilon(1e-14));
  CHECK(compute_constants(0.25, 2.0, 2, 0.5).R == 46);
  CHECK(compute_constants(0.1, 0.5, 2, 0.5).R == 858);
  const auto c = compute_constants(0.9, 5.0, 2, 0.5);
  CHECK(c.R == 3);
  CHECK(c.eps == doctest::Approx(0.125 * std::pow(3.0, -8)).epsilon(1e-14));
  for (const auto& k : {a, c}) {
    CHECK(k.H(1).hi < 1);
    for (int n = 2; n < 30; ++n) CHECK((k.H(n) / k.H(n - 1)).contains(static_cast<double>(k.R)));
    CHECK(static_cast<double>(k.d) / (std::pow(static_cast<double>(k.R), k.gamma) - 1) <=
          std::pow(k.beta * k.beta / 2, k.gamma) * (1 + 1e-12));
    // R is minimal.
    CHECK(static_cast<double>(k.d) / (std::pow(static_cast<double>(k.R - 1), k.gamma) - 1) >
          std::pow(k.beta * k.beta / 2, k.gamma));
  }
  CHECK_THROWS_AS(compute_constants(1.0, 1.0, 2, 0.5), ParameterOutOfRange);
  CHECK_THROWS_AS(compute_constants(0.5, 1.0, 2, 1.0), ParameterOutOfRange);
}

TEST_CASE("ball classes") {
  const auto c = compute_constants(0.5, 1.0, 2, 0.5);
  CHECK(ball_class(c, Ball{{0, 0}, 0.5}) == 0);
  CHECK(ball_class(c, Ball{{0, 0}, 0.5 / (17.0 * 17 * 17)}) == 3);
  CHECK(ball_class(c, Ball{{0, 0}, 0.6 * 0.5 / 17}) == 1);
  CHECK_FALSE(ball_class(c, Ball{{0, 0}, 0.4 * 0.5 / 17}).has_value());
  CHECK_FALSE(ball_class(c, Ball{{0, 0}, 0.7}).has_value());
}

TEST_CASE("partition cells agree with direct evaluation") {
  const auto K = sqrt2();
  for (const char* wt : {"1/2,1/2", "1/3,2/3"}) {
    const auto w = WeightVector::parse(wt);
    const auto c = compute_constants(0.9, 5.0, 2, 0.5);
    const DenominatorIndex index(K, w, c, 16);
    REQUIRE(index.all().size() > 100);
    std::size_t total = 0;
    for (std::size_t i = 0; i < index.all().size(); ++i) {
      const auto& q = index.all()[i];
      const auto& cell = index.cell(i);
      const auto o = cell_oracle(c, q.metrics.height.mid(), std::pow(static_cast<ld>(q.metrics.r_norm.mid()), 2 * w.r_max_d()));
      CHECK(cell.n == o.first);
      CHECK(cell.k == o.second);
      CHECK(cell.k < cell.n);
      CHECK(partition_index(K, w, c, q) == cell);
    }
    for (const auto& [cell, list] : index.buckets()) total += list.size();
    CHECK(total == index.all().size());
  }
  const auto c = compute_constants(0.9, 5.0, 2, 0.5);
  CHECK(partition_index(K, WeightVector::parse("1/2,1/2"), c, K.one()) == PartitionIndex{9, 1});
  // H(23) = 529 = 46^2 / 4 sits exactly on H_10 for R = 46.
  const auto c46 = compute_constants(0.25, 2.0, 2, 0.5);
  REQUIRE(c46.R == 46);
  CHECK(partition_index(K, WeightVector::parse("1/2,1/2"), c46, K.from_coords({23, 0})) == PartitionIndex{10, 1});
  CHECK(partition_index(K, WeightVector::parse("1/2,1/2"), c46, K.from_coords({22, 0})) == PartitionIndex{9, 1});
  // With weights (1/3, 2/3), H(q) = q^3 and ||q||_r^{2r} = q^4 for rational q:
  // H_12 = 20.25 <= 27 < 60.75 and 20.25 <= 81 < 20.25 * 3^8.
  const auto t = WeightVector::parse("1/3,2/3");
  CHECK(partition_index(K, t, c, K.from_coords({3, 0})) == PartitionIndex{12, 1});
}

TEST_CASE("unique point on a ratio ball") {
  const auto K = sqrt2();
  const auto w = WeightVector::parse("1/2,1/2");
  const auto c = compute_constants(0.9, 5.0, 2, 0.5);
  const DenominatorIndex index(K, w, c, 16);
  int checked = 0;
  for (const auto& [cell, list] : index.buckets()) {
    if (cell.n - cell.k < 0) continue;
    const auto& q = list.front();
    const int n = cell.n - cell.k;
    const auto p = K.from_coords({1, 0});
    const auto box = exclusion_box(K, w, p, q, c.eps);
    Ball b{{box.center[0].mid(), box.center[1].mid()}, c.radius_scale(n)};
    const auto s = unique_point(K, w, c, b, n, cell.k, index);
    REQUIRE(s.has_value());
    CHECK(K.mul(s->p, q.q) == K.mul(p, s->q));
    ++checked;
  }
  CHECK(checked > 5);
  Ball far{{1e3 + 0.123, -1e3 + 0.456}, c.radius_scale(12)};
  CHECK_THROWS_AS(unique_point(K, w, c, far, 12, 5, index), IncompleteEnumeration);
}

TEST_CASE("strategy legality, covering and determinism") {
  const auto K = sqrt2();
  const auto w = WeightVector::parse("1/2,1/2");
  const auto pool = target_pool(K, w, 1.0, 50.5, std::vector<double>{-1, -1}, std::vector<double>{1, 1});
  for (int variant = 0; variant < 2; ++variant) {
    std::unique_ptr<BobPlayer> bob;
    if (variant == 0)
      bob = std::make_unique<RandomBob>(BobPolicy{BobKind::Random, 17, 0.9, std::nullopt});
    else
      bob = std::make_unique<GreedyRationalBob>(BobPolicy{BobKind::GreedyRational, 0, 0.9, pool});
    auto run = play(K, w, *bob, 120, Ball{{0.05, -0.02}, 0.5});
    const auto& alice = *run.alice;
    const auto& c = *alice.constants();
    const auto& index = *alice.index();

    std::size_t boxes_checked = 0;
    for (const auto& [n, round] : alice.state().first_round) {
      const Ball& b = run.t.balls()[round];
      const auto& fam = run.t.alice_moves()[round];
      double budget = 0;
      for (const auto& h : fam) budget += std::pow(h.delta / (c.beta * b.radius), c.gamma);
      CHECK(budget <= 1 + 1e-12);
      const int kmax = std::min(alice.k_cut(), alice.m_cap() - n);
      for (int k = 1; k <= kmax; ++k)
        for (const auto& q : index.bucket(n + k, k)) {
          const std::vector<double> lo{b.center[0] - b.radius, b.center[1] - b.radius},
              hi{b.center[0] + b.radius, b.center[1] + b.radius};
          for (const auto& box : boxes_meeting_region(K, w, q, c.eps, lo, hi)) {
            if (box.meets_ball(b.center, b.radius) == Tri::No) continue;
            bool covered = false;
            for (const auto& h : fam) {
              if (h.label != k) continue;
              for (std::size_t tau = 0; tau < 2; ++tau)
                if (h.normal[tau] == 1.0 &&
                    std::fabs(box.center[tau].mid() - h.offset) + box.half_width[tau].hi <= h.delta * (1 + 1e-9))
                  covered = true;
            }
            CHECK(covered);
            ++boxes_checked;
          }
        }
    }
    // Classes after the first visit only get empty moves.
    for (std::size_t i = 0; i < run.t.alice_moves().size(); ++i) {
      bool first = false;
      for (const auto& [n, r] : alice.state().first_round) first = first || r == i;
      if (!first) CHECK(run.t.alice_moves()[i].empty());
    }
    if (variant == 1) CHECK(boxes_checked > 0);

    // Replaying the same Bob balls reproduces the same emissions.
    ScriptedBob again(TranscriptRecord{run.t.kind(), run.t.beta(), run.t.gamma(), run.t.balls(), {}});
    auto rerun = play(K, w, again, 120, run.t.balls().front());
    std::ostringstream a, b;
    write_emission_log(a, alice.emissions());
    write_emission_log(b, rerun.alice->emissions());
    CHECK(a.str() == b.str());
    CHECK(a.str().rfind("round,n,k,tau,offset,delta\n", 0) == 0);
  }
}

TEST_CASE("opening radius above one is relabeled") {
  const auto K = sqrt2();
  const auto w = WeightVector::parse("1/2,1/2");
  RandomBob bob(BobPolicy{BobKind::Random, 5, 0.5, std::nullopt});
  auto run = play(K, w, bob, 12, Ball{{0, 0}, 3.0}, 0.5, 1.0);
  REQUIRE(run.alice->constants().has_value());
  CHECK(run.alice->constants()->rho0 < 1);
  CHECK(run.t.alice_moves()[0].empty());
  CHECK(run.t.alice_moves()[1].empty());
}

TEST_CASE("covered heights and survival") {
  const auto K = sqrt2();
  const auto w = WeightVector::parse("1/2,1/2");
  PotentialStrategy idle(K, w, StrategyConfig{}, 0);
  CHECK(idle.covered_class() == -1);
  CHECK_FALSE(idle.survives(std::vector<double>{0.1, 0.2}));

  const auto pool = target_pool(K, w, 1.0, 50.5, std::vector<double>{-1, -1}, std::vector<double>{1, 1});
  GreedyRationalBob bob(BobPolicy{BobKind::GreedyRational, 0, 0.9, pool});
  auto run = play(K, w, bob, 100, Ball{{0.0, 0.0}, 0.5});
  const auto& alice = *run.alice;
  CHECK(alice.covered_class() >= 1);
  const auto o = outcome(run.t);
  const auto v = win_check_potential(run.t, [&](std::span<const double> x) { return alice.survives(x); });
  CHECK(alice_wins(v));
  if (std::holds_alternative<InTarget>(v)) {
    const auto rep = badness_constant(K, w, o.point, alice.covered_height_bound());
    CHECK(rep.value.lo >= alice.constants()->eps);
  }
}
