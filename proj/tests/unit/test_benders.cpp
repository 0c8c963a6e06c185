#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "learnbd/benders.hpp"
#include "learnbd/errors.hpp"
#include "test_support.hpp"

using namespace learnbd;

namespace {

TwoStageProblem cflp_toy(double demand = 4.0) {
  CflpData d;
  d.facilities = {{10.0, 5.0}};
  d.customers = {{4.0, 5.0}};
  d.unit_cost = DenseMatrix(1, 1, 1.0);
  return build_cflp(d, nominal_scenario({demand}));
}

// π·(h − T x) computed straight from the scenario data.
double dual_value(const TwoStageProblem& p, std::size_t s, const std::vector<double>& pi, const std::vector<double>& x) {
  const Scenario& sc = p.scenarios[s];
  double v = 0.0;
  for (std::size_t i = 0; i < pi.size(); ++i) {
    double tx = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) tx += sc.block->technology(i, j) * x[j];
    v += pi[i] * (sc.rhs[i] - tx);
  }
  return v;
}

double extensive_optimum(const TwoStageProblem& p, std::vector<double>* x = nullptr) {
  const MipSolution s = solve_mip(extensive_form(p));
  REQUIRE(s.status == MipStatus::Optimal);
  if (x) x->assign(s.incumbent.begin(), s.incumbent.begin() + static_cast<std::ptrdiff_t>(p.num_binaries()));
  return s.objective;
}

}  // namespace

TEST_CASE("solve_rmp: empty master and the toy cut") {
  const TwoStageProblem p = testing::toy_bd_problem();
  BendersState state(p);
  const RmpSolution empty = solve_rmp(p, state);
  CHECK(empty.x == std::vector<double>{0.0});
  CHECK(empty.theta[0] == doctest::Approx(0.0));
  CHECK(empty.objective == doctest::Approx(0.0));
  CHECK(state.lower_bound == doctest::Approx(0.0));

  Cut cut;
  cut.scenario = 0;
  cut.coefficients = {3.0};
  cut.rhs = 3.0;
  REQUIRE(add_cut(state, cut));
  const RmpSolution with_cut = solve_rmp(p, state);
  CHECK(with_cut.x == std::vector<double>{1.0});
  CHECK(with_cut.theta[0] == doctest::Approx(0.0));
  CHECK(with_cut.objective == doctest::Approx(1.0));

  Cut weaker = cut;
  weaker.rhs = 2.0;
  REQUIRE(add_cut(state, weaker));
  CHECK(solve_rmp(p, state).objective == doctest::Approx(1.0));
}

TEST_CASE("solve_subproblem: CFLP toy duals and values") {
  const TwoStageProblem p = cflp_toy();
  const SubproblemSolution open = solve_subproblem(p, 0, {1.0});
  CHECK(open.value == doctest::Approx(4.0));
  REQUIRE(open.duals.size() == 2);
  CHECK(open.duals[0] == doctest::Approx(0.0));  // capacity row
  CHECK(open.duals[1] == doctest::Approx(1.0));  // demand row
  CHECK(solve_subproblem(p, 0, {0.0}).value == doctest::Approx(20.0));
  CHECK(solve_subproblem(cflp_toy(0.0), 0, {1.0}).value == doctest::Approx(0.0));
  CHECK(solve_subproblem(cflp_toy(0.0), 0, {0.0}).value == doctest::Approx(0.0));
}

TEST_CASE("make_cut: products of the duals") {
  const TwoStageProblem p = cflp_toy();
  const Cut cut = make_cut(p, 0, {0.0, 1.0});
  CHECK(cut.rhs == doctest::Approx(4.0));
  CHECK(cut.coefficients[0] == doctest::Approx(0.0));
  const Cut zero = make_cut(p, 0, {0.0, 0.0});
  CHECK(zero.rhs == 0.0);
  CHECK(zero.coefficients[0] == 0.0);
  CHECK_THROWS_AS(make_cut(p, 0, {1.0}), InputError);
}

TEST_CASE("make_cut: x-independent scenario gives a constant bound") {
  TwoStageProblem p = testing::toy_bd_problem();
  auto block = std::make_shared<RecourseBlock>(*p.scenarios[0].block);
  block->technology = DenseMatrix(1, 1, 0.0);
  p.scenarios[0].block = block;
  const Cut cut = make_cut(p, 0, {3.0});
  CHECK(cut.coefficients[0] == 0.0);
  CHECK(cut.rhs == doctest::Approx(3.0));
  CHECK(cut.value_at({0.0}) == cut.value_at({1.0}));
}

TEST_CASE("cut invariant: master row reproduces the dual value at random x") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const TwoStageProblem p = trial % 2 ? testing::small_cmnd(rng) : testing::small_cflp(rng);
    std::vector<double> x(p.num_binaries());
    for (double& v : x) v = unit(rng) < 0.5 ? 0.0 : 1.0;
    const std::size_t s = trial % p.num_scenarios();
    const SubproblemSolution sp = solve_subproblem(p, s, x);
    const Cut cut = make_cut(p, s, sp.duals);
    CHECK(cut.value_at(x) == doctest::Approx(sp.value).epsilon(1e-8));
    for (int k = 0; k < 3; ++k) {
      std::vector<double> y(p.num_binaries());
      for (double& v : y) v = unit(rng);
      CHECK(cut.value_at(y) == doctest::Approx(dual_value(p, s, sp.duals, y)).epsilon(1e-9));
    }
  }
}

TEST_CASE("violation and gap formulas") {
  Cut cut;
  cut.coefficients = {0.0};
  cut.rhs = 4.0;
  CHECK(violation(cut, {1.0}, {0.0}) == doctest::Approx(4.0));
  CHECK(violation(cut, {1.0}, {4.0}) == doctest::Approx(0.0));
  CHECK(violation(cut, {1.0}, {10.0}) == doctest::Approx(-6.0));
  CHECK(compute_gap(110, 100) == doctest::Approx(10.0));
  CHECK(compute_gap(5, 5) == 0.0);
  CHECK(compute_gap(3, 1) == doctest::Approx(200.0));
  CHECK(compute_gap(0, 0) == 0.0);
  CHECK(compute_gap(3, -1) == doctest::Approx(400.0));
  CHECK(std::isinf(compute_gap(3, 0)));
}

TEST_CASE("add_cut: duplicates are suppressed and NC counts additions") {
  const TwoStageProblem p = testing::toy_bd_problem();
  BendersState state(p);
  Cut cut;
  cut.coefficients = {3.0};
  cut.rhs = 3.0;
  CHECK(add_cut(state, cut));
  CHECK_FALSE(add_cut(state, cut));
  cut.rhs = 3.0 + 1e-12;
  CHECK_FALSE(add_cut(state, cut));
  CHECK(state.cut_counts[0] == 1);
  CHECK(state.total_cuts() == 1);
}

TEST_CASE("run_classic_bd: toy trace") {
  const TwoStageProblem p = testing::toy_bd_problem();
  BendersOptions opt;
  opt.gap_tol_pct = 1e-4;
  const BendersResult r = run_classic_bd(p, opt);
  CHECK(r.status == BendersStatus::Converged);
  CHECK(r.iterations == 2);
  CHECK(r.cuts_total == 1);
  CHECK(r.objective == doctest::Approx(1.0));
  CHECK(r.x == std::vector<double>{1.0});
  REQUIRE(r.state.log.size() == 2);
  const IterationLog& first = r.state.log[0];
  CHECK(first.lower_bound == doctest::Approx(0.0));
  CHECK(first.upper_bound == doctest::Approx(3.0));
  CHECK(first.cuts_added == 1);
  const Cut& cut = r.state.pools[0][0];
  CHECK(cut.rhs == doctest::Approx(3.0));
  CHECK(cut.coefficients[0] == doctest::Approx(3.0));
  CHECK(cut.features.violation == doctest::Approx(3.0));
  CHECK(cut.features.prior_cuts == 0);
  const IterationLog& second = r.state.log[1];
  CHECK(second.lower_bound == doctest::Approx(1.0));
  CHECK(second.upper_bound == doctest::Approx(1.0));
  CHECK(second.gap_pct == 0.0);
  CHECK(second.cuts_added == 0);
  CHECK(extensive_optimum(p) == doctest::Approx(1.0));
}

TEST_CASE("run_classic_bd: zero recourse cost converges immediately") {
  TwoStageProblem p = cflp_toy();
  auto block = std::make_shared<RecourseBlock>(*p.scenarios[0].block);
  std::fill(block->recourse_cost.begin(), block->recourse_cost.end(), 0.0);
  p.scenarios[0].block = block;
  const BendersResult r = run_classic_bd(p);
  CHECK(r.status == BendersStatus::Converged);
  CHECK(r.iterations == 1);
  CHECK(r.cuts_total == 0);
  CHECK(r.objective == doctest::Approx(0.0));
}

TEST_CASE("run_classic_bd: invalid options") {
  const TwoStageProblem p = testing::toy_bd_problem();
  BendersOptions opt;
  opt.gap_tol_pct = 0.0;
  CHECK_THROWS_AS(run_classic_bd(p, opt), InputError);
}

TEST_CASE("run_classic_bd property: oracle match, cut validity, bound discipline") {
  std::mt19937_64 rng(2024);
  BendersOptions opt;
  opt.gap_tol_pct = 1e-4;
  for (int trial = 0; trial < 16; ++trial) {
    const TwoStageProblem p = trial % 2 ? testing::small_cmnd(rng) : testing::small_cflp(rng);
    std::vector<double> x_star;
    const double opt_value = extensive_optimum(p, &x_star);
    const BendersResult r = run_classic_bd(p, opt);
    REQUIRE(r.status == BendersStatus::Converged);
    CHECK(r.objective == doctest::Approx(opt_value).epsilon(1e-6));
    CHECK(testing::bound_discipline(r.state.log));
    CHECK(r.state.log.front().lower_bound >= -1e-9);
    CHECK(r.lower_bound <= opt_value + 1e-6 * std::max(1.0, opt_value));
    CHECK(r.objective >= opt_value - 1e-6 * std::max(1.0, opt_value));
    CHECK(r.cuts_total <= r.iterations * p.num_scenarios());
    for (const auto& pool : r.state.pools) {
      for (const Cut& cut : pool) {
        CHECK(recourse_value(p, cut.scenario, x_star) >= cut.value_at(x_star) - 1e-6);
      }
    }
    std::size_t summed = 0;
    for (const IterationLog& row : r.state.log) {
      summed += row.cuts_added;
      CHECK(row.cuts_added <= row.cuts_violated);
    }
    CHECK(summed == r.cuts_total);
  }
}

TEST_CASE("run_classic_bd: iteration limit keeps the best bounds") {
  std::mt19937_64 rng(8);
  const TwoStageProblem p = testing::small_cflp(rng);
  BendersOptions opt;
  opt.gap_tol_pct = 1e-6;
  opt.max_iterations = 1;
  const BendersResult r = run_classic_bd(p, opt);
  CHECK(r.iterations == 1);
  CHECK(r.state.log.size() == 1);
  if (r.status == BendersStatus::IterationLimit) {
    CHECK(r.cuts_total == r.state.log[0].cuts_added);
    CHECK(r.cuts_total == p.num_scenarios());
  }
}

TEST_CASE("iteration log CSV") {
  const BendersResult r = run_classic_bd(testing::toy_bd_problem());
  std::ostringstream a;
  write_iteration_log(a, r.state.log);
  CHECK(a.str().rfind("iteration,lower_bound,upper_bound,gap_pct,cuts_added,cuts_total,rmp_time_s,cum_rmp_time_s,"
                      "sp_time_s,cum_sp_time_s\n",
                      0) == 0);
  std::ostringstream b;
  write_iteration_log_untimed(b, r.state.log, true);
  CHECK(b.str() == "iteration,lower_bound,upper_bound,gap_pct,cuts_added,cuts_total,delta_value,retrain_count\n"
                   "0,0,3,inf,1,1,0,0\n1,1,1,0,0,1,0,0\n");
}

TEST_CASE("run_classic_bd: deterministic logs") {
  std::mt19937_64 rng(77);
  const TwoStageProblem p = testing::small_cmnd(rng);
  std::ostringstream a, b;
  write_iteration_log_untimed(a, run_classic_bd(p).state.log);
  write_iteration_log_untimed(b, run_classic_bd(p).state.log);
  CHECK(a.str() == b.str());
}
