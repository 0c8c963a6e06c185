#include <random>
#include <sstream>

#include "doctest.h"
#include "learnbd/errors.hpp"
#include "learnbd/learnbd.hpp"
#include "test_support.hpp"

using namespace learnbd;

namespace {

BendersOptions tight() {
  BendersOptions o;
  o.gap_tol_pct = 1e-4;
  return o;
}

void check_same_cuts(const BendersResult& a, const BendersResult& b) {
  REQUIRE(a.state.pools.size() == b.state.pools.size());
  for (std::size_t s = 0; s < a.state.pools.size(); ++s) {
    REQUIRE(a.state.pools[s].size() == b.state.pools[s].size());
    for (std::size_t k = 0; k < a.state.pools[s].size(); ++k) {
      CHECK(a.state.pools[s][k].coefficients == b.state.pools[s][k].coefficients);
      CHECK(a.state.pools[s][k].rhs == b.state.pools[s][k].rhs);
      CHECK(a.state.pools[s][k].birth_iteration == b.state.pools[s][k].birth_iteration);
    }
  }
  std::ostringstream la, lb;
  write_iteration_log_untimed(la, a.state.log);
  write_iteration_log_untimed(lb, b.state.log);
  CHECK(la.str() == lb.str());
}

void check_trace(const LearnBdResult& r) {
  const auto& log = r.benders.state.log;
  for (std::size_t t = 1; t < log.size(); ++t) {
    CHECK(log[t].delta <= log[t - 1].delta);
    if (log[t].delta != log[t - 1].delta) CHECK(log[t].retrain_count > log[t - 1].retrain_count);
  }
}

}  // namespace

TEST_CASE("DeltaSchedule: standard list and validation") {
  const DeltaSchedule s = DeltaSchedule::standard();
  REQUIRE(s.values().size() == 51);
  CHECK(s.values().front() == 1.2);
  CHECK(s.values().back() == doctest::Approx(0.7));
  CHECK(s.values()[1] == doctest::Approx(1.19));
  CHECK_THROWS_AS(DeltaSchedule({1.0, 1.0}), InputError);
  CHECK_THROWS_AS(DeltaSchedule({}), InputError);
  DeltaSchedule two({1.0, 0.5});
  CHECK(two.current() == 1.0);
  CHECK(two.advance());
  CHECK(two.current() == 0.5);
  CHECK_FALSE(two.advance());
  CHECK(two.exhausted());
  CHECK_FALSE(two.advance());
}

TEST_CASE("run_learnbd: all-positive stub reproduces classic BD") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 6; ++trial) {
    const TwoStageProblem p = trial % 2 ? testing::small_cmnd(rng) : testing::small_cflp(rng);
    ConstantClassifier yes(1, DeltaSchedule::standard());
    const LearnBdResult l = run_learnbd(p, yes, tight());
    const BendersResult b = run_classic_bd(p, tight());
    check_same_cuts(l.benders, b);
    CHECK(l.retrain_count == 0);
    CHECK_FALSE(l.fallback_used);
  }
}

TEST_CASE("run_learnbd: all-negative stub exhausts the schedule and falls back") {
  std::mt19937_64 rng(42);
  const TwoStageProblem p = testing::small_cflp(rng);
  ConstantClassifier no(-1, DeltaSchedule::standard());
  const LearnBdResult r = run_learnbd(p, no, tight());
  CHECK(r.fallback_used);
  CHECK(r.retrain_count == 50);
  CHECK(r.benders.status == BendersStatus::Converged);
  const double opt = solve_mip(extensive_form(p)).objective;
  CHECK(r.benders.objective == doctest::Approx(opt).epsilon(1e-6));
  REQUIRE_FALSE(r.delta_trace.empty());
  CHECK(r.delta_trace.back().fallback);
  check_trace(r);
}

TEST_CASE("run_learnbd: toy with a trained classifier") {
  const TwoStageProblem p = testing::toy_bd_problem();
  const auto rows = run_phase1(p, 2, 2, 3);
  REQUIRE_FALSE(rows.empty());
  const LearnBdResult r = run_learnbd(p, rows, DeltaSchedule::standard(), SvmParams{}, tight());
  CHECK(r.benders.status == BendersStatus::Converged);
  CHECK(r.benders.objective == doctest::Approx(1.0));
  CHECK(r.benders.lower_bound == doctest::Approx(1.0));
}

TEST_CASE("run_learnbd: missing rows") {
  CHECK_THROWS_WITH_AS(run_learnbd(testing::toy_bd_problem(), {}, DeltaSchedule::standard(), SvmParams{}),
                       "phase-1 rows required", InputError);
}

TEST_CASE("run_learnbd property: oracle match, subset rule, bounds and Δ trace") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 10; ++trial) {
    const TwoStageProblem p = trial % 2 ? testing::small_cmnd(rng) : testing::small_cflp(rng);
    const auto rows = run_phase1(p, 2, default_path_length(p), rng());
    const LearnBdResult r = run_learnbd(p, rows, DeltaSchedule::standard(), SvmParams{}, tight());
    REQUIRE(r.benders.status == BendersStatus::Converged);
    const double opt = solve_mip(extensive_form(p)).objective;
    CHECK(r.benders.objective == doctest::Approx(opt).epsilon(1e-6));
    CHECK(testing::bound_discipline(r.benders.state.log));
    for (const IterationLog& row : r.benders.state.log) {
      CHECK(row.cuts_added <= row.cuts_violated);
      CHECK(row.cuts_violated <= p.num_scenarios());
    }
    check_trace(r);
  }
}

TEST_CASE("run_learnbd: deterministic with learnbd log columns") {
  std::mt19937_64 rng(44);
  const TwoStageProblem p = testing::small_cflp(rng);
  const auto rows = run_phase1(p, 2, default_path_length(p), 5);
  std::ostringstream a, b;
  write_iteration_log_untimed(a, run_learnbd(p, rows, DeltaSchedule::standard(), SvmParams{}).benders.state.log, true);
  write_iteration_log_untimed(b, run_learnbd(p, rows, DeltaSchedule::standard(), SvmParams{}).benders.state.log, true);
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("iteration,lower_bound,upper_bound,gap_pct,cuts_added,cuts_total,delta_value,retrain_count\n",
                      0) == 0);
}
