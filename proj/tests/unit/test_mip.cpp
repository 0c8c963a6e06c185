#include <random>

#include "doctest.h"
#include "learnbd/errors.hpp"
#include "learnbd/mip.hpp"
#include "test_support.hpp"

using namespace learnbd;

namespace {

MipInstance pure_binary(std::vector<double> objective, std::vector<LpRow> rows) {
  MipInstance mip;
  const std::size_t n = objective.size();
  mip.lp.objective = std::move(objective);
  mip.lp.rows = std::move(rows);
  mip.lp.lower.assign(n, 0.0);
  mip.lp.upper.assign(n, 1.0);
  for (std::size_t j = 0; j < n; ++j) mip.binaries.push_back(j);
  return mip;
}

}  // namespace

TEST_CASE("solve_mip: dominance picks the cheaper binary") {
  const MipInstance mip = pure_binary({-3.0, -2.0}, {{{1.0, 1.0}, Relation::LessEqual, 1.0}});
  const MipSolution s = solve_mip(mip);
  REQUIRE(s.status == MipStatus::Optimal);
  CHECK(s.incumbent[0] == 1.0);
  CHECK(s.incumbent[1] == 0.0);
  CHECK(s.objective == doctest::Approx(-3.0));
}

TEST_CASE("solve_mip: knapsack agrees with enumeration of all 8 assignments") {
  const MipInstance mip = pure_binary({-3.0, -4.0, -5.0}, {{{2.0, 3.0, 4.0}, Relation::LessEqual, 5.0}});
  const auto oracle = testing::brute_force_pure_binary(mip);
  REQUIRE(oracle);
  CHECK(*oracle == doctest::Approx(-7.0));
  const MipSolution s = solve_mip(mip);
  REQUIRE(s.status == MipStatus::Optimal);
  CHECK(s.objective == doctest::Approx(-7.0));
  CHECK(s.incumbent == std::vector<double>{1.0, 1.0, 0.0});
}

TEST_CASE("solve_mip: integral relaxation needs no branching") {
  const MipInstance mip = pure_binary({1.0, -1.0}, {{{1.0, 1.0}, Relation::LessEqual, 2.0}});
  const LpSolution relaxed = solve_lp(mip.lp);
  const MipSolution s = solve_mip(mip);
  CHECK(s.objective == doctest::Approx(relaxed.objective));
  CHECK(s.nodes == 1);
}

TEST_CASE("solve_mip: infeasible and malformed instances") {
  const MipInstance infeasible = pure_binary({1.0, 1.0}, {{{1.0, 1.0}, Relation::GreaterEqual, 3.0}});
  CHECK(solve_mip(infeasible).status == MipStatus::Infeasible);

  MipInstance bad = pure_binary({1.0}, {});
  bad.binaries = {4};
  CHECK_THROWS_AS(solve_mip(bad), InputError);
  bad.binaries = {0};
  bad.lp.upper = {2.0};
  CHECK_THROWS_AS(solve_mip(bad), InputError);

  MipInstance unbounded = pure_binary({1.0}, {});
  unbounded.lp.objective.push_back(-1.0);
  unbounded.lp.lower.push_back(0.0);
  unbounded.lp.upper.push_back(kInfinity);
  CHECK_THROWS_AS(solve_mip(unbounded), SolverError);
}

TEST_CASE("solve_mip property: pure binary instances agree with enumeration") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> coef(-9, 9);
  std::uniform_int_distribution<int> nvars(1, 12);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = nvars(rng);
    std::vector<double> c(static_cast<std::size_t>(n));
    for (double& v : c) v = coef(rng);
    std::vector<LpRow> rows;
    for (int i = 0; i < 1 + trial % 4; ++i) {
      LpRow row;
      row.coefficients.resize(c.size());
      for (double& a : row.coefficients) a = coef(rng);
      row.relation = trial % 3 == 0 ? Relation::GreaterEqual : Relation::LessEqual;
      row.rhs = coef(rng);
      rows.push_back(row);
    }
    const MipInstance mip = pure_binary(c, rows);
    const auto oracle = testing::brute_force_pure_binary(mip);
    const MipSolution s = solve_mip(mip);
    if (!oracle) {
      CHECK(s.status == MipStatus::Infeasible);
      continue;
    }
    REQUIRE(s.status == MipStatus::Optimal);
    CHECK(s.objective == doctest::Approx(*oracle).epsilon(1e-9));
    for (double v : s.incumbent) CHECK((v == 0.0 || v == 1.0));
  }
}

TEST_CASE("solve_mip property: mixed binary/continuous instances agree with enumeration") {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 40; ++trial) {
    LpInstance lp = testing::random_bounded_lp(rng, 1 + trial % 3, 2);
    const std::size_t binaries = 1 + static_cast<std::size_t>(trial % 3);
    MipInstance mip;
    mip.lp = lp;
    std::uniform_int_distribution<int> coef(-5, 5);
    for (std::size_t b = 0; b < binaries; ++b) {
      mip.lp.objective.push_back(coef(rng));
      mip.lp.lower.push_back(0.0);
      mip.lp.upper.push_back(1.0);
      for (LpRow& row : mip.lp.rows) row.coefficients.push_back(coef(rng));
      mip.binaries.push_back(mip.lp.num_variables() - 1);
    }
    const auto oracle = testing::brute_force_mixed(mip);
    const MipSolution s = solve_mip(mip);
    if (!oracle) {
      CHECK(s.status == MipStatus::Infeasible);
      continue;
    }
    REQUIRE(s.status == MipStatus::Optimal);
    CHECK(s.objective == doctest::Approx(*oracle).epsilon(1e-8));
  }
}

TEST_CASE("solve_mip: deterministic and independent of the warm-start budget") {
  const MipInstance mip = pure_binary({-5, -4, -3, -7, -6, -2},
                                      {{{3, 2, 1, 4, 3, 1}, Relation::LessEqual, 7},
                                       {{1, 3, 2, 1, 2, 3}, Relation::LessEqual, 6}});
  const MipSolution a = solve_mip(mip);
  const MipSolution b = solve_mip(mip);
  CHECK(a.incumbent == b.incumbent);
  MipOptions cold;
  cold.warm_start_budget_bytes = 0;
  CHECK(solve_mip(mip, cold).objective == doctest::Approx(a.objective));
  CHECK(a.objective == doctest::Approx(*testing::brute_force_pure_binary(mip)));
}
