#include <random>

#include "doctest.h"
#include "rsyn/lp.hpp"
#include "rsyn/rational.hpp"

using namespace rsyn;

TEST_CASE("rational parsing and formatting") {
  CHECK(rat_parse("1/3") == Rat(1, 3));
  CHECK(rat_parse("-2/4") == Rat(-1, 2));
  CHECK(rat_parse("7") == Rat(7));
  CHECK(rat_parse("0.25") == Rat(1, 4));
  CHECK(rat_parse("-0.125") == Rat(-1, 8));
  CHECK(rat_str(Rat(1, 2)) == "1/2");
  CHECK(rat_str(Rat(-3)) == "-3");
  CHECK(rat_parse(rat_str(Rat(355, 113))) == Rat(355, 113));
  CHECK_THROWS_AS(rat_parse(""), std::invalid_argument);
  CHECK_THROWS_AS(rat_parse("abc"), std::invalid_argument);
  CHECK_THROWS_AS(rat_parse("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(rat_parse("1.2.3"), std::invalid_argument);
}

TEST_CASE("rational arithmetic is exact") {
  Rat third(1, 3);
  Rat sum = third + third + third;
  CHECK(sum == 1);
  Rat tiny(1, 1000000007);
  CHECK(tiny * Rat(1000000007) == 1);
  // repeated halving and re-doubling returns exactly
  Rat x(355, 113);
  Rat y = x;
  for (int i = 0; i < 200; ++i) y /= 2;
  for (int i = 0; i < 200; ++i) y *= 2;
  CHECK(y == x);
}

namespace {

// Fourier-Motzkin feasibility oracle for systems in at most two variables.
// Independent of the simplex; used to cross-check lp_feasible.
bool fm_feasible_2d(const IneqSystem& sys) {
  REQUIRE(sys.vars() == 2);
  // eliminate x0: rows ax0 + bx1 <= c -> bounds on x0 given x1
  std::vector<std::pair<Vec, Rat>> upper, lower, pure; // coefficient on x1, rhs
  for (size_t i = 0; i < sys.rows(); ++i) {
    const Rat& a = sys.a[i][0];
    if (a == 0) {
      pure.push_back({{sys.a[i][1]}, sys.b[i]});
    } else if (a > 0) {
      upper.push_back({{sys.a[i][1] / a}, sys.b[i] / a}); // x0 <= rhs - coeff x1
    } else {
      lower.push_back({{sys.a[i][1] / a}, sys.b[i] / a}); // x0 >= rhs - coeff x1
    }
  }
  // combine lower/upper into 1-d constraints on x1
  std::vector<std::pair<Rat, Rat>> one_d; // a*x1 <= b
  for (auto& p : pure) one_d.push_back({p.first[0], p.second});
  for (auto& up : upper)
    for (auto& lo : lower)
      one_d.push_back({up.first[0] - lo.first[0], up.second - lo.second});
  // 1-d feasibility
  bool has_lo = false, has_hi = false;
  Rat best_lo, best_hi;
  for (auto& [a, b] : one_d) {
    if (a == 0) {
      if (b < 0) return false;
    } else if (a > 0) {
      Rat bound = b / a;
      if (!has_hi || bound < best_hi) { best_hi = bound; has_hi = true; }
    } else {
      Rat bound = b / a;
      if (!has_lo || bound > best_lo) { best_lo = bound; has_lo = true; }
    }
  }
  if (has_lo && has_hi && best_lo > best_hi) return false;
  return true;
}

} // namespace

TEST_CASE("lp feasibility: hand cases") {
  IneqSystem sys;
  SUBCASE("simple box") {
    sys.push_row({Rat(1)}, Rat(1));
    sys.push_row({Rat(-1)}, Rat(0));
    CHECK(lp_feasible(sys));
    auto w = lp_witness(sys);
    REQUIRE(w);
    CHECK(sys.satisfied_by(*w));
  }
  SUBCASE("contradiction") {
    sys.push_row({Rat(1)}, Rat(0));
    sys.push_row({Rat(-1)}, Rat(-1)); // x >= 1 and x <= 0
    CHECK_FALSE(lp_feasible(sys));
    CHECK_FALSE(lp_witness(sys).has_value());
  }
  SUBCASE("equality meets box") {
    // x + y == 1, 0 <= x,y <= 1
    sys.push_eq({Rat(1), Rat(1)}, Rat(1));
    sys.push_row({Rat(1), Rat(0)}, Rat(1));
    sys.push_row({Rat(-1), Rat(0)}, Rat(0));
    sys.push_row({Rat(0), Rat(1)}, Rat(1));
    sys.push_row({Rat(0), Rat(-1)}, Rat(0));
    CHECK(lp_feasible(sys));
  }
  SUBCASE("equality misses box") {
    // x + y == 3 inside the unit box
    sys.push_eq({Rat(1), Rat(1)}, Rat(3));
    sys.push_row({Rat(1), Rat(0)}, Rat(1));
    sys.push_row({Rat(-1), Rat(0)}, Rat(0));
    sys.push_row({Rat(0), Rat(1)}, Rat(1));
    sys.push_row({Rat(0), Rat(-1)}, Rat(0));
    CHECK_FALSE(lp_feasible(sys));
  }
}

TEST_CASE("lp strict feasibility distinguishes flat sets") {
  IneqSystem sys;
  SUBCASE("full-dimensional") {
    sys.push_row({Rat(1), Rat(0)}, Rat(1));
    sys.push_row({Rat(-1), Rat(0)}, Rat(0));
    sys.push_row({Rat(0), Rat(1)}, Rat(1));
    sys.push_row({Rat(0), Rat(-1)}, Rat(0));
    CHECK(lp_strictly_feasible(sys));
  }
  SUBCASE("a segment is feasible but not strictly") {
    sys.push_eq({Rat(1), Rat(1)}, Rat(1));
    sys.push_row({Rat(1), Rat(0)}, Rat(1));
    sys.push_row({Rat(-1), Rat(0)}, Rat(0));
    CHECK(lp_feasible(sys));
    CHECK_FALSE(lp_strictly_feasible(sys));
  }
  SUBCASE("a point is feasible but not strictly") {
    sys.push_eq({Rat(1)}, Rat(2));
    CHECK(lp_feasible(sys));
    CHECK_FALSE(lp_strictly_feasible(sys));
  }
  SUBCASE("empty is neither") {
    sys.push_row({Rat(1)}, Rat(0));
    sys.push_row({Rat(-1)}, Rat(-1));
    CHECK_FALSE(lp_strictly_feasible(sys));
  }
}

TEST_CASE("lp feasibility agrees with Fourier-Motzkin on random 2-var systems") {
  std::mt19937_64 rng(20240817);
  std::uniform_int_distribution<int> coeff(-4, 4);
  std::uniform_int_distribution<int> nrows(1, 7);
  size_t feasible_seen = 0, infeasible_seen = 0;
  for (int trial = 0; trial < 400; ++trial) {
    IneqSystem sys;
    int m = nrows(rng);
    for (int i = 0; i < m; ++i) {
      Vec row{Rat(coeff(rng)), Rat(coeff(rng))};
      sys.push_row(std::move(row), rat_frac(coeff(rng), 2));
    }
    bool expect = fm_feasible_2d(sys);
    bool got = lp_feasible(sys);
    CAPTURE(trial);
    CHECK(got == expect);
    if (expect) {
      ++feasible_seen;
      auto w = lp_witness(sys);
      REQUIRE(w);
      CHECK(sys.satisfied_by(*w));
    } else {
      ++infeasible_seen;
    }
  }
  // make sure the corpus exercised both outcomes
  CHECK(feasible_seen > 50);
  CHECK(infeasible_seen > 50);
}
