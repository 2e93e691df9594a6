#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "kbad/bob.hpp"
#include "kbad/game.hpp"

using namespace kbad;

namespace {

Ball ball(std::vector<double> c, double r) { return Ball{std::move(c), r}; }

std::string illegal_message(const std::function<void()>& f) {
  try {
    f();
  } catch (const IllegalMove& e) {
    return e.what();
  }
  return "";
}

double dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("new_game parameters") {
  CHECK_NOTHROW(new_game(GameKind::Absolute, 0.3, std::nullopt, ball({0, 0}, 1)));
  CHECK_THROWS_AS(new_game(GameKind::Absolute, 0.4, std::nullopt, ball({0, 0}, 1)), ParameterOutOfRange);
  CHECK_THROWS_AS(new_game(GameKind::Absolute, 0.2, 1.0, ball({0, 0}, 1)), ParameterOutOfRange);
  CHECK_NOTHROW(new_game(GameKind::Potential, 0.5, 1.0, ball({0, 0}, 0.5)));
  CHECK_THROWS_AS(new_game(GameKind::Potential, 1.0, 1.0, ball({0, 0}, 0.5)), ParameterOutOfRange);
  CHECK_THROWS_AS(new_game(GameKind::Potential, 0.5, 0.0, ball({0, 0}, 0.5)), ParameterOutOfRange);
  CHECK_THROWS_AS(new_game(GameKind::Potential, 0.5, std::nullopt, ball({0, 0}, 0.5)), ParameterOutOfRange);
}

TEST_CASE("alice_move legality") {
  auto t = new_game(GameKind::Potential, 0.5, 1.0, ball({0, 0}, 1));
  AliceFamily ok{axis_slab(2, 0, 0, 0.2), axis_slab(2, 1, 0, 0.2), axis_slab(2, 0, 0.5, 0.1)};
  CHECK_NOTHROW(alice_move(t, ok));
  CHECK_THROWS_AS(alice_move(t, {}), WrongTurn);

  auto u = new_game(GameKind::Potential, 0.5, 1.0, ball({0, 0}, 1));
  const auto msg = illegal_message([&] { alice_move(u, {axis_slab(2, 0, 0, 0.3), axis_slab(2, 1, 0, 0.3)}); });
  CHECK(msg.find("sum delta^gamma") != std::string::npos);
  CHECK(msg.find("0.59999") != std::string::npos);
  CHECK(msg.find("> 0.5") != std::string::npos);
  CHECK_NOTHROW(alice_move(u, {}));

  auto a = new_game(GameKind::Absolute, 0.3, std::nullopt, ball({0, 0}, 1));
  CHECK_THROWS_AS(alice_move(a, {axis_slab(2, 0, 0, 0.31)}), IllegalMove);
  CHECK_THROWS_AS(alice_move(a, {axis_slab(2, 0, 0, 0.1), axis_slab(2, 1, 0, 0.1)}), IllegalMove);
  HyperplaneNeighborhood skew{{1.0, 1.0}, 0.0, 0.1, 0};
  CHECK_THROWS_AS(alice_move(a, {skew}), IllegalMove);
  CHECK_NOTHROW(alice_move(a, {axis_slab(2, 0, 0, 0.3)}));
}

TEST_CASE("bob_move legality") {
  auto t = new_game(GameKind::Absolute, 0.3, std::nullopt, ball({0, 0}, 1));
  alice_move(t, {});
  CHECK(illegal_message([&] { bob_move(t, ball({0, 0}, 0.2)); }).find("radius") != std::string::npos);
  CHECK(illegal_message([&] { bob_move(t, ball({0.6, 0}, 0.5)); }).find("containment") != std::string::npos);
  CHECK_THROWS_AS(alice_move(t, {}), WrongTurn);
  CHECK_NOTHROW(bob_move(t, ball({0.5, 0}, 0.5)));

  auto s = new_game(GameKind::Absolute, 0.3, std::nullopt, ball({0, 0}, 1));
  alice_move(s, {axis_slab(2, 0, 0, 0.2)});
  CHECK(illegal_message([&] { bob_move(s, ball({0.1, 0}, 0.3)); }).find("avoidance") != std::string::npos);
  CHECK_NOTHROW(bob_move(s, ball({0.5, 0}, 0.3)));

  // The potential game has no avoidance constraint.
  auto p = new_game(GameKind::Potential, 0.3, 1.0, ball({0, 0}, 1));
  alice_move(p, {axis_slab(2, 0, 0, 0.2)});
  CHECK_NOTHROW(bob_move(p, ball({0.1, 0}, 0.3)));
}

TEST_CASE("outcome") {
  auto t = new_game(GameKind::Potential, 0.5, 1.0, ball({0.25, -1}, 2));
  auto o = outcome(t);
  CHECK(o.point == std::vector<double>{0.25, -1});
  CHECK(o.radius_bound == 2);
  double prev = o.radius_bound;
  for (int n = 1; n <= 10; ++n) {
    alice_move(t, {});
    bob_move(t, ball(t.current_ball().center, 0.5 * t.current_ball().radius));
    o = outcome(t);
    CHECK(o.radius_bound == doctest::Approx(std::pow(0.5, n) * 2));
    CHECK(o.radius_bound <= prev);
    prev = o.radius_bound;
  }
}

TEST_CASE("win_check_potential") {
  auto t = new_game(GameKind::Potential, 0.5, 1.0, ball({0, 0}, 1));
  alice_move(t, {axis_slab(2, 1, 5, 0.1), axis_slab(2, 0, 0.05, 0.4)});
  bob_move(t, ball({0, 0}, 0.5));
  for (int i = 0; i < 2; ++i) {
    alice_move(t, {});
    bob_move(t, ball({0, 0}, 0.5 * t.current_ball().radius));
  }
  t.finish();
  const auto v = win_check_potential(t, nullptr);
  REQUIRE(std::holds_alternative<InNeighborhood>(v));
  CHECK(std::get<InNeighborhood>(v).round == 0);
  CHECK(std::get<InNeighborhood>(v).index == 1);
  CHECK(describe(v) == "AliceWins(InNeighborhood(0,1))");

  auto u = new_game(GameKind::Potential, 0.5, 1.0, ball({0, 0}, 1));
  alice_move(u, {axis_slab(2, 0, 0.3, 0.4)});
  bob_move(u, ball({0, 0}, 0.5));
  u.finish();
  CHECK(std::holds_alternative<InTarget>(win_check_potential(u, [](std::span<const double>) { return true; })));
  const auto w = win_check_potential(u, [](std::span<const double>) { return false; });
  CHECK(std::holds_alternative<Undetermined>(w));
  CHECK_FALSE(alice_wins(w));
  CHECK(describe(w) == "Undetermined");
}

TEST_CASE("transcript round trip and tampering") {
  auto t = new_game(GameKind::Absolute, 0.25, std::nullopt, ball({0.1, 0.2}, 1));
  CenterSlabStrategy alice;
  RandomBob bob(BobPolicy{BobKind::Random, 9, 0.25, std::nullopt});
  for (int i = 0; i < 30; ++i) {
    alice_move(t, alice.respond(t));
    bob_move(t, bob.move(t));
  }
  std::ostringstream os;
  write_transcript(os, t);
  std::istringstream in(os.str());
  const auto rec = parse_transcript(in);
  const auto again = replay(rec);
  std::ostringstream os2;
  write_transcript(os2, again);
  CHECK(os.str() == os2.str());
  CHECK(again.rounds() == 30);

  // Move one ball center into the previous slab.
  auto bad = rec;
  bad.balls[7].center = bad.balls[6].center;
  const auto msg = illegal_message([&] { replay(bad); });
  CHECK(msg.find("round 6") != std::string::npos);
  CHECK(msg.find("avoidance") != std::string::npos);

  std::istringstream empty("");
  CHECK_THROWS_AS(parse_transcript(empty), ParseError);
  std::istringstream junk("GAME absolute 0.25\nBOB 0,0 1\nALICE x\n");
  CHECK_THROWS_AS(parse_transcript(junk), ParseError);
}

TEST_CASE("referee invariants over random play") {
  for (auto kind : {GameKind::Absolute, GameKind::Potential}) {
    const double beta = kind == GameKind::Absolute ? 0.3 : 0.6;
    const std::optional<double> gamma = kind == GameKind::Absolute ? std::nullopt : std::optional<double>(2.0);
    auto t = new_game(kind, beta, gamma, ball({0, 0, 0}, 1));
    CenterSlabStrategy alice;
    RandomBob bob(BobPolicy{BobKind::Random, 4, kind == GameKind::Absolute ? 0.35 : 0.7, std::nullopt});
    for (int i = 0; i < 200; ++i) {
      alice_move(t, alice.respond(t));
      bob_move(t, bob.move(t));
    }
    const auto& balls = t.balls();
    for (std::size_t i = 0; i + 1 < balls.size(); ++i) {
      const auto& a = balls[i];
      const auto& b = balls[i + 1];
      CHECK(dist(a.center, b.center) + b.radius <= a.radius + 1e-12);
      CHECK(b.radius >= beta * a.radius - 1e-12);
      const auto& f = t.alice_moves()[i];
      double sum = 0;
      for (const auto& h : f) sum += std::pow(h.delta, gamma.value_or(1.0));
      CHECK(sum <= std::pow(beta * a.radius, gamma.value_or(1.0)) + 1e-12);
      if (kind == GameKind::Absolute)
        for (const auto& h : f) CHECK(std::fabs(h.signed_distance(b.center)) >= h.delta + b.radius - 1e-12);
    }
  }
}

TEST_CASE("product strategy") {
  SUBCASE("empty factors give empty moves") {
    auto t = new_game(GameKind::Absolute, 0.3, std::nullopt, ball({0, 0}, 1));
    ProductStrategy prod(std::make_unique<EmptyStrategy>(), 1, std::make_unique<EmptyStrategy>(), 1);
    RandomBob bob(BobPolicy{BobKind::Random, 2, 0.3, std::nullopt});
    for (int i = 0; i < 10; ++i) {
      const auto f = prod.respond(t);
      CHECK(f.empty());
      alice_move(t, f);
      bob_move(t, bob.move(t));
    }
  }
  SUBCASE("center slab factors alternate normals and stay legal") {
    auto t = new_game(GameKind::Absolute, 0.3, std::nullopt, ball({0, 0}, 1));
    auto prod = product_strategy(std::make_unique<CenterSlabStrategy>(), 1, std::make_unique<CenterSlabStrategy>(), 1);
    RandomBob bob(BobPolicy{BobKind::Random, 3, 0.3, std::nullopt});
    for (int i = 0; i < 200; ++i) {
      const auto f = prod->respond(t);
      REQUIRE(f.size() == 1);
      CHECK(f[0].normal == (i % 2 == 0 ? std::vector<double>{1, 0} : std::vector<double>{0, 1}));
      CHECK(f[0].delta <= 0.09 * t.current_ball().radius * (1 + 1e-12));
      CHECK_NOTHROW(alice_move(t, f));
      CHECK_NOTHROW(bob_move(t, bob.move(t)));
    }
  }
}
