#include <doctest.h>

#include <array>
#include <optional>

#include "rwrp/counter_rng.hpp"
#include "rwrp/lp.hpp"
#include "rwrp/types.hpp"

using namespace rwrp;

TEST_CASE("rational parsing is exact") {
  CHECK(parse_rational("1/2") == Rational(1, 2));
  CHECK(parse_rational("0.25") == Rational(1, 4));
  CHECK(parse_rational("-3") == Rational(-3));
  CHECK(parse_rational("1e-2") == Rational(1, 100));
  CHECK(parse_rational("2.5e1") == Rational(25));
  CHECK(parse_rational_vec("1/2,1/2") == RatVec{Rational(1, 2), Rational(1, 2)});
  CHECK(parse_int_vec("3,-5") == IntVec{3, -5});
  CHECK_THROWS_AS(parse_rational("1/0"), SchemaError);
  CHECK_THROWS_AS(parse_rational("abc"), SchemaError);
  CHECK_THROWS_AS(parse_int_vec("1,x"), SchemaError);
}

TEST_CASE("doubles convert to their exact rational value") {
  CHECK(rational_from_double(0.75) == Rational(3, 4));
  CHECK(rational_from_double(-2.0) == Rational(-2));
  Rational tenth = rational_from_double(0.1);
  CHECK(tenth != Rational(1, 10));
  CHECK(tenth.convert_to<double>() == 0.1);
}

TEST_CASE("vector formatting") {
  CHECK(format_vec(IntVec{1, -2, 3}) == "1 -2 3");
  CHECK(format_vec(RatVec{Rational(1, 2), Rational(2)}) == "1/2 2");
}

TEST_CASE("small LP with a known vertex optimum") {
  LinearProgram lp;
  int x = lp.add_var(), y = lp.add_var();
  lp.add_constraint({{x, 1}, {y, 2}}, LinearProgram::Sense::le, 4);
  lp.add_constraint({{x, 3}, {y, 1}}, LinearProgram::Sense::le, 6);
  lp.maximize({{x, 1}, {y, 1}});
  LpResult r = lp.solve();
  REQUIRE(r.status == LpStatus::optimal);
  CHECK(r.value == Rational(14, 5));
  CHECK(r.x[x] == Rational(8, 5));
  CHECK(r.x[y] == Rational(6, 5));
}

TEST_CASE("LP detects infeasible and unbounded programs") {
  LinearProgram a;
  int x = a.add_var();
  a.add_constraint({{x, 1}}, LinearProgram::Sense::ge, 2);
  a.add_constraint({{x, 1}}, LinearProgram::Sense::le, 1);
  a.maximize({{x, 1}});
  CHECK(a.solve().status == LpStatus::infeasible);

  LinearProgram b;
  int u = b.add_var(true), v = b.add_var();
  b.add_constraint({{u, 1}, {v, -1}}, LinearProgram::Sense::le, 0);
  b.maximize({{u, 1}});
  CHECK(b.solve().status == LpStatus::unbounded);
}

TEST_CASE("free variables and equality constraints") {
  LinearProgram lp;
  int x = lp.add_var(true), y = lp.add_var(true);
  lp.add_constraint({{x, 1}, {y, 1}}, LinearProgram::Sense::eq, -3);
  lp.add_constraint({{x, 1}}, LinearProgram::Sense::ge, -5);
  lp.add_constraint({{y, 1}}, LinearProgram::Sense::ge, -5);
  lp.maximize({{x, 2}, {y, 1}});
  LpResult r = lp.solve();
  REQUIRE(r.status == LpStatus::optimal);
  CHECK(r.x[x] == Rational(2));
  CHECK(r.x[y] == Rational(-5));
}

// Oracle: every vertex of {x,y >= 0, a_i.x <= b_i} is the intersection of two
// tight constraints; the optimum is the best feasible vertex.
TEST_CASE("random 2-D LPs agree with vertex enumeration") {
  CounterRng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = static_cast<int>(rng.between(1, 4));
    std::vector<std::array<Rational, 3>> rows;  // a1 x + a2 y <= b
    for (int i = 0; i < m; ++i) rows.push_back({Rational(rng.between(0, 5)), Rational(rng.between(0, 5)),
                                                Rational(rng.between(1, 9))});
    rows.push_back({Rational(-1), Rational(0), Rational(0)});
    rows.push_back({Rational(0), Rational(-1), Rational(0)});
    const Rational c1(rng.between(-3, 4)), c2(rng.between(-3, 4));
    bool bounded_dir = true;  // unbounded if some ray direction e1/e2 is free with positive gain
    auto feasible = [&](const Rational& x, const Rational& y) {
      for (auto& r : rows)
        if (r[0] * x + r[1] * y > r[2]) return false;
      return true;
    };
    if ((c1 > 0 && feasible(Rational(1000000), 0)) || (c2 > 0 && feasible(0, Rational(1000000)))) bounded_dir = false;
    std::optional<Rational> best;
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = i + 1; j < rows.size(); ++j) {
        Rational det = rows[i][0] * rows[j][1] - rows[i][1] * rows[j][0];
        if (det == 0) continue;
        Rational x = (rows[i][2] * rows[j][1] - rows[i][1] * rows[j][2]) / det;
        Rational y = (rows[i][0] * rows[j][2] - rows[i][2] * rows[j][0]) / det;
        if (!feasible(x, y)) continue;
        Rational v = c1 * x + c2 * y;
        if (!best || v > *best) best = v;
      }
    LinearProgram lp;
    int x = lp.add_var(), y = lp.add_var();
    for (int i = 0; i < m; ++i) lp.add_constraint({{x, rows[i][0]}, {y, rows[i][1]}}, LinearProgram::Sense::le, rows[i][2]);
    lp.maximize({{x, c1}, {y, c2}});
    LpResult r = lp.solve();
    if (!bounded_dir) {
      CHECK(r.status == LpStatus::unbounded);
      continue;
    }
    REQUIRE(r.status == LpStatus::optimal);
    REQUIRE(best.has_value());
    CHECK(r.value == *best);
  }
}

TEST_CASE("counter RNG is a pure function of its key") {
  CHECK(uniform_at(1, {3, 4}, 0) == uniform_at(1, {3, 4}, 0));
  CHECK(uniform_at(1, {3, 4}, 0) != uniform_at(1, {3, 4}, 1));
  CHECK(uniform_at(1, {3, 4}, 0) != uniform_at(2, {3, 4}, 0));
  double lo = 1, hi = 0;
  for (std::int64_t i = 0; i < 10000; ++i) {
    double u = uniform_at(5, {i}, 0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(lo > 0.0);
  CHECK(hi < 1.0);
}
