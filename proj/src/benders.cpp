#include "learnbd/benders.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

#include "learnbd/errors.hpp"

namespace learnbd {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

bool same_cut(const Cut& a, const Cut& b, double tol) {
  if (std::abs(a.rhs - b.rhs) > tol * std::max(1.0, std::abs(a.rhs))) return false;
  for (std::size_t j = 0; j < a.coefficients.size(); ++j) {
    if (std::abs(a.coefficients[j] - b.coefficients[j]) > tol * std::max(1.0, std::abs(a.coefficients[j]))) {
      return false;
    }
  }
  return true;
}

}  // namespace

double Cut::value_at(const std::vector<double>& x) const {
  double v = rhs;
  for (std::size_t j = 0; j < coefficients.size(); ++j) v -= coefficients[j] * x[j];
  return v;
}

BendersState::BendersState(const TwoStageProblem& problem)
    : pools(problem.num_scenarios()), cut_counts(problem.num_scenarios(), 0) {}

std::size_t BendersState::total_cuts() const {
  std::size_t total = 0;
  for (const auto& pool : pools) total += pool.size();
  return total;
}

RmpSolution solve_rmp(const TwoStageProblem& problem, BendersState& state, const MipOptions& options, bool relax) {
  const std::size_t n1 = problem.num_binaries();
  const std::size_t ns = problem.num_scenarios();
  const std::size_t nv = n1 + ns;

  MipInstance mip;
  LpInstance& lp = mip.lp;
  lp.objective.assign(nv, 0.0);
  lp.lower.assign(nv, 0.0);
  lp.upper.assign(nv, 1.0);
  for (std::size_t j = 0; j < n1; ++j) {
    lp.objective[j] = problem.first_stage_cost[j];
    mip.binaries.push_back(j);
  }
  for (std::size_t s = 0; s < ns; ++s) {
    lp.objective[n1 + s] = problem.scenarios[s].probability;
    lp.lower[n1 + s] = problem.theta_lower[s];
    lp.upper[n1 + s] = kInfinity;
  }
  for (const auto& pool : state.pools) {
    for (const Cut& cut : pool) {
      LpRow row;
      row.coefficients.assign(nv, 0.0);
      for (std::size_t j = 0; j < n1; ++j) row.coefficients[j] = cut.coefficients[j];
      row.coefficients[n1 + cut.scenario] = 1.0;
      row.relation = Relation::GreaterEqual;
      row.rhs = cut.rhs;
      lp.rows.push_back(std::move(row));
    }
  }

  std::vector<double> values;
  double objective = 0.0;
  if (relax) {
    const LpSolution s = solve_lp(lp, options.lp);
    if (s.status != LpStatus::Optimal) {
      throw SolverError("relaxed master problem is " + std::string(to_string(s.status)));
    }
    values = s.primal;
    objective = s.objective;
  } else {
    const MipSolution s = solve_mip(mip, options);
    if (s.status != MipStatus::Optimal) throw SolverError("master problem is infeasible");
    values = s.incumbent;
    objective = s.objective;
  }

  RmpSolution out;
  out.x.assign(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(n1));
  out.theta.assign(values.begin() + static_cast<std::ptrdiff_t>(n1), values.end());
  out.objective = objective;
  state.x_hat = out.x;
  state.theta_hat = out.theta;
  state.lower_bound = std::max(state.lower_bound, objective);
  return out;
}

SubproblemSolution solve_subproblem(const TwoStageProblem& problem, std::size_t scenario,
                                    const std::vector<double>& x) {
  const LpSolution s = solve_lp(recourse_lp(problem, scenario, x));
  if (s.status != LpStatus::Optimal) {
    throw SolverError("subproblem of scenario " + std::to_string(scenario) + " is " +
                      std::string(to_string(s.status)) + "; complete recourse violated");
  }
  return SubproblemSolution{s.duals, s.objective};
}

Cut make_cut(const TwoStageProblem& problem, std::size_t scenario, const std::vector<double>& duals) {
  const Scenario& sc = problem.scenarios.at(scenario);
  const DenseMatrix& t = sc.block->technology;
  if (duals.size() != t.rows) throw InputError("dual vector length differs from the recourse row count");
  Cut cut;
  cut.scenario = scenario;
  cut.duals = duals;
  cut.coefficients.assign(t.cols, 0.0);
  for (std::size_t i = 0; i < t.rows; ++i) {
    if (duals[i] == 0.0) continue;
    cut.rhs += sc.rhs[i] * duals[i];
    for (std::size_t j = 0; j < t.cols; ++j) cut.coefficients[j] += t(i, j) * duals[i];
  }
  return cut;
}

double violation(const Cut& cut, const std::vector<double>& x, const std::vector<double>& theta) {
  if (x.size() != cut.coefficients.size() || cut.scenario >= theta.size()) {
    throw InputError("violation: dimension mismatch");
  }
  return cut.value_at(x) - theta[cut.scenario];
}

double compute_gap(double ub, double lb) {
  if (std::abs(lb) < 1e-9 && ub - lb < 1e-9) return 0.0;
  if (ub == lb) return 0.0;
  return 100.0 * (ub - lb) / std::abs(lb);
}

bool add_cut(BendersState& state, Cut cut, double duplicate_tol) {
  auto& pool = state.pools.at(cut.scenario);
  for (const Cut& existing : pool) {
    if (same_cut(existing, cut, duplicate_tol)) return false;
  }
  ++state.cut_counts[cut.scenario];
  pool.push_back(std::move(cut));
  return true;
}

std::string_view to_string(BendersStatus status) {
  switch (status) {
    case BendersStatus::Converged: return "converged";
    case BendersStatus::IterationLimit: return "iteration_limit";
    case BendersStatus::TimeLimit: return "time_limit";
  }
  return "unknown";
}

std::vector<std::size_t> AcceptAllSelector::select(const std::vector<Cut>& candidates, const BendersState&) {
  std::vector<std::size_t> all(candidates.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return all;
}

BendersResult run_benders(const TwoStageProblem& problem, const BendersOptions& options, CutSelector& selector) {
  problem.validate();
  if (!(options.gap_tol_pct > 0.0)) throw InputError("gap tolerance must be positive");
  if (options.max_iterations == 0) throw InputError("iteration limit must be positive");

  BendersResult result;
  result.state = BendersState(problem);
  BendersState& state = result.state;
  const auto start = Clock::now();
  double cum_rmp = 0.0;
  double cum_sp = 0.0;
  result.status = BendersStatus::IterationLimit;

  while (true) {
    if (state.iteration >= options.max_iterations) {
      result.status = BendersStatus::IterationLimit;
      break;
    }
    if (options.time_limit_s > 0.0 && seconds_since(start) >= options.time_limit_s) {
      result.status = BendersStatus::TimeLimit;
      break;
    }

    IterationLog row;
    row.iteration = state.iteration;

    const auto rmp_start = Clock::now();
    solve_rmp(problem, state, options.mip);
    row.rmp_time_s = seconds_since(rmp_start);
    cum_rmp += row.rmp_time_s;
    ++state.iteration;

    const auto sp_start = Clock::now();
    double upper = 0.0;
    for (std::size_t j = 0; j < problem.num_binaries(); ++j) upper += problem.first_stage_cost[j] * state.x_hat[j];
    std::vector<Cut> candidates;
    for (std::size_t s = 0; s < problem.num_scenarios(); ++s) {
      const SubproblemSolution sp = solve_subproblem(problem, s, state.x_hat);
      upper += problem.scenarios[s].probability * sp.value;
      Cut cut = make_cut(problem, s, sp.duals);
      const double vl = violation(cut, state.x_hat, state.theta_hat);
      if (vl > options.violation_tol) {
        cut.features = {vl, state.cut_counts[s]};
        cut.birth_iteration = row.iteration;
        candidates.push_back(std::move(cut));
      }
    }
    row.sp_time_s = seconds_since(sp_start);
    cum_sp += row.sp_time_s;

    if (upper < state.upper_bound) {
      state.upper_bound = upper;
      state.incumbent = state.x_hat;
    }
    const double gap = compute_gap(state.upper_bound, state.lower_bound);
    row.lower_bound = state.lower_bound;
    row.upper_bound = state.upper_bound;
    row.gap_pct = gap;
    row.cuts_violated = candidates.size();
    row.cum_rmp_time_s = cum_rmp;
    row.cum_sp_time_s = cum_sp;

    const bool converged = gap <= options.gap_tol_pct || candidates.empty();
    if (!converged) {
      for (std::size_t idx : selector.select(candidates, state)) {
        if (add_cut(state, candidates.at(idx), options.duplicate_tol)) ++row.cuts_added;
      }
    }
    row.cuts_total = state.total_cuts();
    selector.annotate(row);
    state.log.push_back(row);
    if (converged) {
      result.status = BendersStatus::Converged;
      break;
    }
  }

  result.x = state.incumbent;
  result.objective = state.upper_bound;
  result.lower_bound = state.lower_bound;
  result.gap_pct = compute_gap(state.upper_bound, state.lower_bound);
  result.iterations = state.iteration;
  result.cuts_total = state.total_cuts();
  return result;
}

BendersResult run_classic_bd(const TwoStageProblem& problem, const BendersOptions& options) {
  AcceptAllSelector all;
  return run_benders(problem, options, all);
}

namespace {

void write_log(std::ostream& out, const std::vector<IterationLog>& log, bool learnbd_columns, bool timed) {
  out << "iteration,lower_bound,upper_bound,gap_pct,cuts_added,cuts_total";
  if (timed) out << ",rmp_time_s,cum_rmp_time_s,sp_time_s,cum_sp_time_s";
  if (learnbd_columns) out << ",delta_value,retrain_count";
  out << '\n';
  const auto old_precision = out.precision(17);
  for (const IterationLog& r : log) {
    out << r.iteration << ',' << r.lower_bound << ',' << r.upper_bound << ',' << r.gap_pct << ',' << r.cuts_added
        << ',' << r.cuts_total;
    if (timed) out << ',' << r.rmp_time_s << ',' << r.cum_rmp_time_s << ',' << r.sp_time_s << ',' << r.cum_sp_time_s;
    if (learnbd_columns) {
      out << ',';
      if (r.fallback) {
        out << "fallback";
      } else {
        out << r.delta;
      }
      out << ',' << r.retrain_count;
    }
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace

void write_iteration_log(std::ostream& out, const std::vector<IterationLog>& log, bool learnbd_columns) {
  write_log(out, log, learnbd_columns, true);
}

void write_iteration_log_untimed(std::ostream& out, const std::vector<IterationLog>& log, bool learnbd_columns) {
  write_log(out, log, learnbd_columns, false);
}

}  // namespace learnbd
