#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "lcdiag/prepared.hpp"

using namespace lcdiag;

namespace {

// One group c(x)*y^r*(log y)^s on a 1-parameter, 1-fiber-variable cell.
Group simple_group(std::string label, const TruncPoly& cx, const Rat& r,
                   unsigned s, bool critical = true) {
  Group g;
  g.label = std::move(label);
  g.r = {r};
  g.s = {s};
  g.critical = critical;
  g.coeff = CoeffFn(1, 1);
  CoeffFn c(1, 1);
  for (const auto& [e, k] : cx.terms()) {
    Expo expo(4, 0);
    expo[c.x_var(0)] = e[0];
    c.add_term(expo, k);
  }
  g.coeff = c;
  return g;
}

PreparedSum sum_of(std::vector<Group> groups, std::size_t m = 1,
                   std::size_t n = 1, std::size_t l = 0) {
  PreparedSum s;
  s.m = m;
  s.n = n;
  s.l = l;
  s.groups = std::move(groups);
  return s;
}

TruncPoly xpoly(std::vector<std::pair<unsigned, Rat>> terms) {
  TruncPoly p(1);
  for (auto& [e, c] : terms) p.add_term({e}, c);
  return p;
}

}  // namespace

TEST_CASE("CoeffFn log constants expand over primes") {
  // log 4 - 2 log 2 = 0 exactly; log 6 = log 2 + log 3.
  auto l4 = CoeffFn::log_const(0, 0, Rat(4));
  auto l2 = CoeffFn::log_const(0, 0, Rat(2));
  CHECK((l4 - (l2 + l2)).is_zero());
  auto l6 = CoeffFn::log_const(0, 0, Rat(6));
  auto l3 = CoeffFn::log_const(0, 0, Rat(3));
  CHECK((l6 - l2 - l3).is_zero());
  auto lhalf = CoeffFn::log_const(0, 0, Rat(1, 2));
  CHECK((lhalf + l2).is_zero());
  CHECK(CoeffFn::log_const(0, 0, Rat(1)).is_zero());
  CHECK(std::abs(l6.evaluate({}, {}) - std::log(6.0)) < 1e-12);
}

TEST_CASE("CoeffFn substitution keeps log symbols formal") {
  CoeffFn c(1, 1);
  // x * log x
  Expo e(4, 0);
  e[c.x_var(0)] = 1;
  e[c.logx_var(0)] = 1;
  c.add_term(e, Rat(1));
  CHECK(!c.at_point({Rat(2)}).is_zero());  // 2*log 2 != 0, kept formal
  CHECK(c.at_point({Rat(1)}).is_zero());   // log 1 = 0
  CHECK(c.at_point({Rat(0)}).is_zero());   // x factor kills it
}

TEST_CASE("critical_delta generic vs point mode") {
  auto g1 = simple_group("a", xpoly({{0, Rat(1)}}), Rat(-1), 0);
  auto g2 = simple_group("b", xpoly({{1, Rat(1)}}), Rat(2), 1);
  auto s = sum_of({g1, g2});
  validate_prepared(s, CrMode::Generic);
  CHECK(critical_delta(s) == std::vector<std::string>{"a", "b"});
  CHECK(critical_delta(s, {Rat(0)}) == std::vector<std::string>{"a"});
  CHECK(critical_delta(s, {Rat(1, 2)}) == std::vector<std::string>{"a", "b"});
  CHECK(critical_delta(sum_of({})).empty());
  // Point-mode labels are always a subset of generic labels.
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> num(-5, 5);
  for (int t = 0; t < 50; ++t) {
    auto gen = critical_delta(s);
    for (const auto& lab : critical_delta(s, {Rat(num(rng), 7)}))
      CHECK(std::find(gen.begin(), gen.end(), lab) != gen.end());
  }
}

TEST_CASE("profile spec cases") {
  auto g1 = simple_group("a", xpoly({{0, Rat(1)}}), Rat(-1), 0);
  auto g2 = simple_group("b", xpoly({{0, Rat(1)}}), Rat(2), 1);
  auto s = sum_of({g1, g2});
  auto p = profile(s, {"a", "b"});
  REQUIRE(p.rbar.size() == 1);
  CHECK(*p.rbar[0] == Rat(-1));
  CHECK(p.sbar[0] == 0);

  auto pe = profile(s, {});
  CHECK(!pe.rbar[0].has_value());
  CHECK(pe.sbar[0] == 0);
  CHECK(pe.empty());

  auto g3 = simple_group("c", xpoly({{0, Rat(1)}}), Rat(0), 3);
  auto g4 = simple_group("d", xpoly({{0, Rat(1)}}), Rat(0), 1);
  auto p2 = profile(sum_of({g3, g4}), {"c", "d"});
  CHECK(*p2.rbar[0] == Rat(0));
  CHECK(p2.sbar[0] == 3);
}

TEST_CASE("profile is antitone under enlarging the group set") {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> rnum(-4, 4);
  std::uniform_int_distribution<unsigned> snum(0, 3);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Group> gs;
    for (int i = 0; i < 5; ++i)
      gs.push_back(simple_group("g" + std::to_string(i),
                                xpoly({{0, Rat(1)}}), Rat(rnum(rng), 2),
                                snum(rng)));
    auto s = sum_of(gs);
    std::vector<std::string> small, big;
    for (int i = 0; i < 5; ++i) {
      const auto lab = "g" + std::to_string(i);
      const bool in_small = rng() % 2 == 0;
      if (in_small) small.push_back(lab);
      if (in_small || rng() % 2 == 0) big.push_back(lab);
    }
    auto ps = profile(s, small), pb = profile(s, big);
    for (std::size_t i = 0; i < ps.rbar.size(); ++i) {
      if (!ps.rbar[i]) continue;  // infinity: anything is smaller
      REQUIRE(pb.rbar[i].has_value());
      CHECK(*pb.rbar[i] <= *ps.rbar[i]);
      if (*pb.rbar[i] == *ps.rbar[i]) CHECK(pb.sbar[i] >= ps.sbar[i]);
    }
  }
}

TEST_CASE("CR-domination validation") {
  // Noncritical y^-2 with no critical term below it: rejected generically.
  auto cr = simple_group("cr", xpoly({{0, Rat(1)}}), Rat(-1), 0);
  auto nc = simple_group("nc", xpoly({{0, Rat(1)}}), Rat(-2), 0, false);
  CHECK_THROWS_AS(validate_prepared(sum_of({cr, nc}), CrMode::Generic),
                  std::invalid_argument);
  // With the critical exponent below the noncritical one it passes.
  auto cr2 = simple_group("cr", xpoly({{0, Rat(1)}}), Rat(-2), 0);
  auto nc2 = simple_group("nc", xpoly({{0, Rat(1)}}), Rat(-1), 0, false);
  validate_prepared(sum_of({cr2, nc2}), CrMode::Generic);
  // Sampled mode: x*y^-2 critical, 1*y^-1 noncritical fails at x=0 where
  // the critical coefficient vanishes but the noncritical one does not.
  auto cr3 = simple_group("cr", xpoly({{1, Rat(1)}}), Rat(-2), 0);
  auto nc3 = simple_group("nc", xpoly({{0, Rat(1)}}), Rat(-1), 0, false);
  validate_prepared(sum_of({cr3, nc3}), CrMode::Generic);
  CHECK_THROWS_AS(
      validate_prepared(sum_of({cr3, nc3}), CrMode::Sampled, {{Rat(0)}}),
      std::invalid_argument);
  validate_prepared(sum_of({cr3, nc3}), CrMode::Sampled, {{Rat(1, 2)}});
  // A critical coefficient depending on y_{>l} is rejected outright.
  Group bad = simple_group("bad", xpoly({{0, Rat(1)}}), Rat(0), 0);
  CoeffFn c(1, 1);
  Expo e(4, 0);
  e[c.y_var(0)] = 1;
  c.add_term(e, Rat(1));
  bad.coeff = c;
  CHECK_THROWS_AS(validate_prepared(sum_of({bad}), CrMode::Generic),
                  std::invalid_argument);
}

TEST_CASE("fiber_vanishing_witness spec cases") {
  SUBCASE("f = x(1-x) y^-1 gives g = x^2 (1-x)^2") {
    auto fx = xpoly({{1, Rat(1)}, {2, Rat(-1)}});  // x - x^2
    auto s = sum_of({simple_group("a", fx, Rat(-1), 0)});
    auto g = fiber_vanishing_witness(s);
    CHECK(g.at_point({Rat(0)}).is_zero());
    CHECK(g.at_point({Rat(1)}).is_zero());
    CHECK(!g.at_point({Rat(1, 2)}).is_zero());
    // And f itself vanishes on the fiber exactly at those x.
    for (double y : {0.2, 0.5, 0.9}) {
      CHECK(evaluate(s, {0.0}, {y}) == 0.0);
      CHECK(evaluate(s, {1.0}, {y}) == 0.0);
      CHECK(evaluate(s, {0.5}, {y}) != 0.0);
    }
  }
  SUBCASE("zero sum gives zero witness") {
    CHECK(fiber_vanishing_witness(sum_of({})).is_zero());
  }
  SUBCASE("x y^-1 + (x-1) y^-2 gives x^2 + (x-1)^2, nowhere zero") {
    auto s = sum_of({simple_group("a", xpoly({{1, Rat(1)}}), Rat(-1), 0),
                     simple_group("b", xpoly({{1, Rat(1)}, {0, Rat(-1)}}),
                                  Rat(-2), 0)});
    auto g = fiber_vanishing_witness(s);
    for (int k = 0; k <= 10; ++k)
      CHECK(!g.at_point({Rat(k, 10)}).is_zero());
    // Direct check that the witness equals x^2 + (x-1)^2 as a polynomial.
    CoeffFn expect(1, 1);
    Expo e0(4, 0), e1(4, 0), e2(4, 0);
    e2[expect.x_var(0)] = 2;
    e1[expect.x_var(0)] = 1;
    expect.add_term(e2, Rat(2));
    expect.add_term(e1, Rat(-2));
    expect.add_term(e0, Rat(1));
    CHECK(g == expect);
  }
}

TEST_CASE("witness zero iff all critical coefficients vanish at x") {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> cnum(-3, 3);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Group> gs;
    for (int i = 0; i < 3; ++i) {
      TruncPoly cx(1);
      for (unsigned e = 0; e < 3; ++e) cx.add_term({e}, Rat(cnum(rng)));
      gs.push_back(simple_group("g" + std::to_string(i), cx,
                                Rat(cnum(rng)), 0));
    }
    auto s = sum_of(gs);
    auto g = fiber_vanishing_witness(s);
    const Rat x(cnum(rng), 3);
    bool all_zero = true;
    for (const auto& grp : s.groups)
      if (!grp.coeff.at_point({x}).is_zero()) all_zero = false;
    CHECK(g.at_point({x}).is_zero() == all_zero);
    // Numeric cross-check on the fiber.
    const double xd = rat_to_double(x);
    bool num_zero = true;
    for (int k = 1; k <= 20; ++k)
      if (std::abs(evaluate(s, {xd}, {k / 21.0})) > 1e-10) num_zero = false;
    CHECK(num_zero == all_zero);
  }
}

TEST_CASE("evaluate spec cases") {
  auto one = xpoly({{0, Rat(1)}});
  CHECK(evaluate(sum_of({simple_group("a", one, Rat(1), 0)}), {0.5}, {0.5}) ==
        doctest::Approx(0.5));
  CHECK(evaluate(sum_of({simple_group("a", one, Rat(-1), 0)}), {0.5}, {0.25}) ==
        doctest::Approx(4.0));
  const double ye = std::exp(-1.0);
  CHECK(evaluate(sum_of({simple_group("a", one, Rat(0), 1)}), {0.5}, {ye}) ==
        doctest::Approx(-1.0));
  CHECK_THROWS_AS(
      evaluate(sum_of({simple_group("a", one, Rat(1), 0)}), {0.5}, {1.0}),
      std::domain_error);
  CHECK_THROWS_AS(
      evaluate(sum_of({simple_group("a", one, Rat(1), 0)}), {0.5}, {0.0}),
      std::domain_error);
}

TEST_CASE("density of nonvanishing critical coefficients on the prefix") {
  // For x with nonempty critical set, the prefix points where some critical
  // coefficient vanishes should be scarce. Coefficient: x * (y1 - c) on an
  // l=1 cell; vanishing prefix locus is a single point of (0,1).
  const std::size_t m = 1, n = 2, l = 1;
  CoeffFn c(m, n);
  Expo e1(2 * m + 2 * n, 0), e2(2 * m + 2 * n, 0);
  e1[c.x_var(0)] = 1;
  e1[c.y_var(0)] = 1;
  e2[c.x_var(0)] = 1;
  c.add_term(e1, Rat(1));
  c.add_term(e2, Rat(-1, 3));
  Group g;
  g.label = "a";
  g.r = {Rat(0), Rat(-1)};
  g.s = {0, 0};
  g.critical = true;
  g.coeff = c;
  PreparedSum s;
  s.m = m;
  s.n = n;
  s.l = l;
  s.groups = {g};
  validate_prepared(s, CrMode::Generic);
  std::mt19937 rng(13);
  std::uniform_int_distribution<int> num(1, 999);
  int vanish = 0;
  const int trials = 400;
  for (int t = 0; t < trials; ++t) {
    const Rat y1(num(rng), 1000);
    if (c.at_point({Rat(1, 2)}, {y1}).is_zero()) ++vanish;
  }
  CHECK(double(vanish) / trials < 0.05);
}
