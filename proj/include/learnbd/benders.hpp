#pragma once

#include <cstddef>
#include <ostream>
#include <string_view>
#include <vector>

#include "learnbd/mip.hpp"
#include "learnbd/problems.hpp"

namespace learnbd {

struct CutObservation {
  double violation = 0.0;        // VL
  std::size_t prior_cuts = 0;    // NC
};

/// Optimality cut θ_ω >= rhs − g·x with g = T_ωᵀπ and rhs = h_ωᵀπ.
struct Cut {
  std::size_t scenario = 0;
  std::vector<double> duals;
  std::vector<double> coefficients;  // g
  double rhs = 0.0;
  CutObservation features;
  std::size_t birth_iteration = 0;

  /// rhs − g·x, the lower bound the cut imposes on θ_ω at x.
  double value_at(const std::vector<double>& x) const;
};

struct IterationLog {
  std::size_t iteration = 0;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  double gap_pct = 0.0;
  std::size_t cuts_violated = 0;
  std::size_t cuts_added = 0;
  std::size_t cuts_total = 0;
  double rmp_time_s = 0.0;
  double cum_rmp_time_s = 0.0;
  double sp_time_s = 0.0;
  double cum_sp_time_s = 0.0;
  // LearnBD only.
  double delta = 0.0;
  bool fallback = false;
  std::size_t retrain_count = 0;
};

struct BendersState {
  std::vector<std::vector<Cut>> pools;   // per scenario
  std::vector<std::size_t> cut_counts;   // NC_ω
  std::size_t iteration = 0;             // RMP solves so far
  double lower_bound = -kInfinity;
  double upper_bound = kInfinity;
  std::vector<double> x_hat;
  std::vector<double> theta_hat;
  std::vector<double> incumbent;         // x attaining upper_bound
  std::vector<IterationLog> log;

  BendersState() = default;
  explicit BendersState(const TwoStageProblem& problem);
  std::size_t total_cuts() const;
};

struct RmpSolution {
  std::vector<double> x;
  std::vector<double> theta;
  double objective = 0.0;
};

struct SubproblemSolution {
  std::vector<double> duals;
  double value = 0.0;  // ζ_ω = Q_ω(x̂)
};

/// min c·x + Σ p_ω θ_ω over the pooled cuts. Updates x̂, θ̂ and LB in `state`.
/// `relax` solves the LP relaxation instead of the binary master.
RmpSolution solve_rmp(const TwoStageProblem& problem, BendersState& state, const MipOptions& options = {},
                      bool relax = false);

SubproblemSolution solve_subproblem(const TwoStageProblem& problem, std::size_t scenario,
                                    const std::vector<double>& x);

Cut make_cut(const TwoStageProblem& problem, std::size_t scenario, const std::vector<double>& duals);

/// VL = rhs − g·x̂ − θ̂_ω.
double violation(const Cut& cut, const std::vector<double>& x, const std::vector<double>& theta);

/// 100·(ub − lb)/|lb|; 0 when both bounds are within 1e-9 of zero.
double compute_gap(double ub, double lb);

/// Appends the cut to its scenario pool and bumps NC_ω. Returns false (and
/// changes nothing) when an identical cut is already pooled.
bool add_cut(BendersState& state, Cut cut, double duplicate_tol = 1e-9);

enum class BendersStatus { Converged, IterationLimit, TimeLimit };
std::string_view to_string(BendersStatus status);

struct BendersOptions {
  double gap_tol_pct = 1e-2;     // δ in percent
  std::size_t max_iterations = 10000;
  double time_limit_s = 0.0;     // 0: none
  double violation_tol = 1e-6;
  double duplicate_tol = 1e-9;
  MipOptions mip;
};

struct BendersResult {
  BendersStatus status = BendersStatus::Converged;
  std::vector<double> x;
  double objective = kInfinity;   // UB
  double lower_bound = -kInfinity;
  double gap_pct = kInfinity;
  std::size_t iterations = 0;
  std::size_t cuts_total = 0;
  BendersState state;
};

/// Chooses which violated cuts enter the master. `candidates` carry frozen
/// features (NC counted before this iteration's additions).
class CutSelector {
 public:
  virtual ~CutSelector() = default;
  virtual std::vector<std::size_t> select(const std::vector<Cut>& candidates, const BendersState& state) = 0;
  virtual void annotate(IterationLog& /*row*/) const {}
};

class AcceptAllSelector final : public CutSelector {
 public:
  std::vector<std::size_t> select(const std::vector<Cut>& candidates, const BendersState& state) override;
};

/// Shared Benders loop: RMP, all subproblems, bound update, gap test, then
/// the selector decides which violated cuts are added.
BendersResult run_benders(const TwoStageProblem& problem, const BendersOptions& options, CutSelector& selector);

/// Adds every violated cut from every scenario each iteration.
BendersResult run_classic_bd(const TwoStageProblem& problem, const BendersOptions& options = {});

/// Header: iteration,lower_bound,upper_bound,gap_pct,cuts_added,cuts_total,
/// rmp_time_s,cum_rmp_time_s,sp_time_s,cum_sp_time_s[,delta_value,retrain_count]
void write_iteration_log(std::ostream& out, const std::vector<IterationLog>& log, bool learnbd_columns = false);

/// Same rows with every time column dropped; used for determinism checks.
void write_iteration_log_untimed(std::ostream& out, const std::vector<IterationLog>& log,
                                 bool learnbd_columns = false);

}  // namespace learnbd
