#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "kbad/badset.hpp"
#include "oracles.hpp"

using namespace kbad;

namespace {

FieldSpec sqrt2() { return make_field({-2, 0, 1}); }

std::vector<oracle::ld> weights_ld(const WeightVector& w) {
  std::vector<oracle::ld> out;
  for (std::size_t i = 0; i < w.size(); ++i) out.push_back(w.weight_d(i));
  return out;
}

bool has(const std::vector<Denominator>& list, std::vector<std::int64_t> coords) {
  for (const auto& d : list)
    if (d.q.coords == coords) return true;
  return false;
}

std::vector<double> ratio_point(const FieldSpec& K, const FieldElement& p, const FieldElement& q, double sign) {
  const auto ep = embed_approx(K, p), eq = embed_approx(K, q);
  std::vector<double> x;
  for (std::size_t i = 0; i < ep.size(); ++i) x.push_back(sign * ep[i] / eq[i]);
  return x;
}

}  // namespace

TEST_CASE("enumeration examples") {
  const auto K = sqrt2();
  const auto half = WeightVector::parse("1/2,1/2");
  const auto list = enumerate_denominators(K, half, 1.0, 2.0);
  CHECK(has(list, {1, 0}));
  CHECK_FALSE(has(list, {1, 1}));

  // (0, 1) weights the embedding sqrt 2 -> +sqrt 2, so S2 is sqrt 2 -> -sqrt 2.
  const auto plus = WeightVector::parse("0,1");
  const auto adm = enumerate_denominators(K, plus, 0.25, 100.0);
  CHECK_FALSE(has(adm, {1, 0}));
  CHECK(has(adm, {3, 2}));

  CHECK(enumerate_denominators(K, half, 1.0, 1.0).empty());
  CHECK(enumerate_denominators_reference(K, half, 1.0, 1.0).empty());

  // H(10) = 10 * (10^3)^(2/3) = 1000 exactly for weights (1/3, 2/3).
  const auto third = WeightVector::parse("1/3,2/3");
  CHECK_FALSE(has(enumerate_denominators(K, third, 1.0, 1000.0), {10, 0}));
  CHECK_FALSE(has(enumerate_denominators_reference(K, third, 1.0, 1000.0), {10, 0}));
  CHECK(has(enumerate_denominators(K, third, 1.0, 1000.5), {10, 0}));
}

TEST_CASE("enumeration is complete against a naive double loop") {
  struct Case {
    std::vector<std::int64_t> poly;
    std::int64_t D;
    const char* w;
    double eps, bound;
  };
  for (const auto& c : {Case{{-2, 0, 1}, 2, "1/2,1/2", 1.0, 2000.0}, Case{{-2, 0, 1}, 2, "1/3,2/3", 1.0, 300.0},
                        Case{{-2, 0, 1}, 2, "0,1", 0.25, 1000.0}, Case{{-1, -1, 1}, 5, "1/2,1/2", 1.0, 1500.0},
                        Case{{-1, -1, 1}, 5, "1,0", 0.1, 2000.0}}) {
    CAPTURE(c.w);
    CAPTURE(c.D);
    const auto K = make_field(c.poly);
    const auto w = WeightVector::parse(c.w);
    const auto naive = oracle::naive_denominators(oracle::quadratic(c.D), weights_ld(w), c.eps, c.bound, 50);
    const auto fast = enumerate_denominators(K, w, c.eps, c.bound);
    const auto ref = enumerate_denominators_reference(K, w, c.eps, c.bound);
    REQUIRE(fast.size() == naive.size());
    REQUIRE(ref.size() == naive.size());
    std::set<std::vector<std::int64_t>> a, b;
    for (const auto& d : naive) a.insert({d.a, d.b});
    for (const auto& d : fast) b.insert(d.q.coords);
    CHECK(a == b);
    for (std::size_t i = 0; i < fast.size(); ++i) {
      CHECK(fast[i].q == ref[i].q);
      CHECK(fast[i].metrics.height.contains(static_cast<double>(naive[i].height)) == true);
    }
  }
}

TEST_CASE("exclusion box examples") {
  const auto K = sqrt2();
  const auto half = WeightVector::parse("1/2,1/2");
  const auto b0 = exclusion_box(K, half, K.zero(), K.one(), 0.1);
  for (int i = 0; i < 2; ++i) {
    CHECK(b0.lower(i).contains(-0.1));
    CHECK(b0.upper(i).contains(0.1));
  }
  const auto b1 = exclusion_box(K, half, K.one(), K.one(), 0.1);
  for (int i = 0; i < 2; ++i) {
    CHECK(b1.center[i].contains(1.0));
    CHECK(b1.half_width[i].contains(0.1));
  }

  const auto plus = WeightVector::parse("0,1");
  const auto q = K.from_coords({3, 2});
  const auto box = exclusion_box(K, plus, K.one(), q, 0.25);
  const double big = 3 + 2 * std::sqrt(2.0), small = 3 - 2 * std::sqrt(2.0);
  CHECK(box.half_width[1].mid() == doctest::Approx(0.25 / (big * big)).epsilon(1e-12));
  CHECK(box.half_width[0].mid() == doctest::Approx(0.25 / small).epsilon(1e-12));
  CHECK(box.center[0].mid() == doctest::Approx(1 / small).epsilon(1e-12));
  CHECK_THROWS_AS(exclusion_box(K, plus, K.one(), K.one(), 0.25), DenominatorNotAdmissible);
}

TEST_CASE("membership examples and monotonicity") {
  const auto K = sqrt2();
  const auto half = WeightVector::parse("1/2,1/2");
  const auto p = K.from_coords({1, 2}), q = K.from_coords({3, 1});
  const auto x = ratio_point(K, p, q, 1.0);
  const auto hq = height(K, q, half).hi;
  const auto m = membership(K, half, x, 0.01, hq + 1);
  REQUIRE(std::holds_alternative<Excluded>(m));
  const auto& ex = std::get<Excluded>(m);
  CHECK(exclusion_box(K, half, ex.p, ex.q, 0.01).contains(x) == Tri::Yes);

  // (1e6, 1e6) = theta(1e6 / 1) is itself a box center.
  const std::vector<double> far{1e6, 1e6};
  const auto mf = membership(K, half, far, 0.01, 10.0);
  REQUIRE(std::holds_alternative<Excluded>(mf));
  CHECK(std::get<Excluded>(mf).q == K.one());
  CHECK(std::get<Excluded>(mf).p == K.from_coords({1000000, 0}));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  int excluded = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::vector<double> y{u(rng), u(rng)};
    const auto big = membership(K, half, y, 0.05, 60.0);
    const auto small = membership(K, half, y, 0.005, 60.0);
    if (std::holds_alternative<Survives>(big)) CHECK(std::holds_alternative<Survives>(small));
    excluded += std::holds_alternative<Excluded>(big);
  }
  CHECK(excluded > 0);
}

TEST_CASE("membership agrees with a brute-force box scan") {
  const auto K = sqrt2();
  const auto half = WeightVector::parse("1/2,1/2");
  const auto O = oracle::quadratic(2);
  const oracle::ld r2 = std::sqrt(static_cast<oracle::ld>(2));
  const auto qs = oracle::naive_denominators(O, {0.5L, 0.5L}, 1, 10, 10);
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const double eps = 0.05;
  int excluded = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::vector<double> x{1e6 + u(rng), 1e6 + u(rng)};
    bool inside = false;
    for (const auto& q : qs) {
      const auto eq = O.embed(q.a, q.b);
      const oracle::ld nq = std::max(eq[0] * eq[0], eq[1] * eq[1]);
      const oracle::ld t1 = eq[0] * x[0], t2 = eq[1] * x[1];
      const auto a0 = static_cast<std::int64_t>(std::llround((t1 + t2) / 2));
      const auto b0 = static_cast<std::int64_t>(std::llround((t2 - t1) / (2 * r2)));
      for (std::int64_t a = a0 - 3; a <= a0 + 3; ++a)
        for (std::int64_t b = b0 - 3; b <= b0 + 3; ++b) {
          const auto ep = O.embed(a, b);
          bool in = true;
          for (int i = 0; i < 2; ++i) {
            const oracle::ld w = eps / (std::fabs(eq[i]) * std::sqrt(nq));
            in = in && std::fabs(x[i] - ep[i] / eq[i]) <= w;
          }
          inside = inside || in;
        }
    }
    const auto m = membership(K, half, x, eps, 10.0);
    CHECK(std::holds_alternative<Excluded>(m) == inside);
    excluded += inside;
  }
  CHECK(excluded > 0);
}

TEST_CASE("box membership matches the max-expression") {
  const auto K = sqrt2();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (const char* wt : {"1/2,1/2", "0,1"}) {
    const auto w = WeightVector::parse(wt);
    const double eps = 0.2;
    const auto qs = enumerate_denominators(K, w, eps, 40.0);
    REQUIRE_FALSE(qs.empty());
    const std::vector<double> lo{-1.5, -1.5}, hi{1.5, 1.5};
    int agree = 0;
    for (int trial = 0; trial < 500; ++trial) {
      const std::vector<double> x{u(rng), u(rng)};
      for (const auto& q : qs)
        for (const auto& box : boxes_meeting_region(K, w, q, eps, lo, hi)) {
          const auto in = box.contains(x);
          const auto expr = badness_expression(K, w, x, box.p, K.neg(box.q));
          if (in == Tri::Undecided || expr.contains(eps)) continue;
          CHECK((in == Tri::Yes) == (expr.hi <= eps));
          ++agree;
        }
    }
    CHECK(agree > 1000);
  }
}

TEST_CASE("sign symmetry") {
  const auto K = sqrt2();
  const auto half = WeightVector::parse("1/2,1/2");
  const auto p = K.from_coords({2, -1}), q = K.from_coords({1, 3});
  const auto a = exclusion_box(K, half, p, q, 0.3), b = exclusion_box(K, half, K.neg(p), K.neg(q), 0.3);
  for (int i = 0; i < 2; ++i) {
    CHECK(a.center[i].mid() == doctest::Approx(b.center[i].mid()).epsilon(1e-14));
    CHECK(a.half_width[i].mid() == doctest::Approx(b.half_width[i].mid()).epsilon(1e-14));
  }
  const auto x = ratio_point(K, p, q, 1.0);
  CHECK(badness_expression(K, half, x, p, K.neg(q)).hi ==
        doctest::Approx(badness_expression(K, half, x, K.neg(p), q).hi));
}

TEST_CASE("badness constant") {
  const auto K = sqrt2();
  const auto half = WeightVector::parse("1/2,1/2");
  const auto p = K.from_coords({1, 1}), q = K.from_coords({2, 1});
  const auto x = ratio_point(K, p, q, -1.0);
  const double hq = height(K, q, half).hi;
  const auto r = badness_constant(K, half, x, hq + 1);
  CHECK(r.value.lo <= 1e-12);
  REQUIRE(r.witness.has_value());
  const auto& [wp, wq] = *r.witness;
  // The witness is (p, q) up to a common sign.
  CHECK(K.mul(wp, q) == K.mul(p, wq));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::vector<double> y{u(rng), u(rng)};
    double prev = INFINITY;
    for (double bound : {2.0, 5.0, 20.0, 80.0}) {
      const auto rep = badness_constant(K, half, y, bound);
      CHECK(rep.value.lo <= prev);
      prev = rep.value.hi;
    }
  }
}

TEST_CASE("coordinate candidates cover the embedding box") {
  const auto K = make_field({-1, -1, 1});
  const auto O = oracle::quadratic(5);
  const std::vector<double> lo{-3.2, 0.5}, hi{1.1, 4.4};
  std::set<std::vector<std::int64_t>> seen;
  for_each_coordinate_candidate(K, lo, hi, [&](const std::vector<std::int64_t>& c) { seen.insert(c); });
  for (std::int64_t a = -20; a <= 20; ++a)
    for (std::int64_t b = -20; b <= 20; ++b) {
      const auto e = O.embed(a, b);
      if (e[0] >= lo[0] && e[0] <= hi[0] && e[1] >= lo[1] && e[1] <= hi[1]) CHECK(seen.count({a, b}) == 1);
    }
}

TEST_CASE("denominator csv") {
  const auto K = sqrt2();
  const auto half = WeightVector::parse("1/2,1/2");
  const auto list = enumerate_denominators(K, half, 1.0, 10.0);
  std::ostringstream os;
  write_denominators_csv(os, K, list, [](const Denominator&) { return std::optional<std::pair<int, int>>{}; });
  std::istringstream in(os.str());
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == list.size() + 1);
  CHECK(os.str().rfind("c1,c2,", 0) == 0);
}
