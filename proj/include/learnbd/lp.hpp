#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

namespace learnbd {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Relation { LessEqual, Equal, GreaterEqual };

struct LpRow {
  std::vector<double> coefficients;
  Relation relation = Relation::LessEqual;
  double rhs = 0.0;
};

/// min objective·x subject to rows and per-variable bounds.
/// Empty `lower`/`upper` mean the default bounds [0, +inf).
struct LpInstance {
  std::vector<double> objective;
  std::vector<LpRow> rows;
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t num_variables() const { return objective.size(); }
  double lower_bound(std::size_t j) const { return lower.empty() ? 0.0 : lower[j]; }
  double upper_bound(std::size_t j) const { return upper.empty() ? kInfinity : upper[j]; }

  /// Throws InputError on dimension mismatch, NaN data or lower > upper.
  void validate() const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

std::string_view to_string(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> primal;
  /// One multiplier per row: d objective / d rhs. Nonnegative on >= rows and
  /// nonpositive on <= rows at an optimum of a minimization.
  std::vector<double> duals;
  /// Reduced cost of each structural variable (zero when basic).
  std::vector<double> reduced_costs;
  double objective = 0.0;
  std::size_t iterations = 0;
};

struct SimplexOptions {
  double feasibility_tol = 1e-7;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-9;
  /// 0 selects a limit proportional to the instance size.
  std::size_t max_iterations = 0;
};

/// Bounded-variable primal simplex on a dense dictionary.
///
/// Every row i gets a logical variable s_i = a_i·x whose bounds encode the
/// relation, so the dictionary is homogeneous: x_B = D x_N with one column
/// per nonbasic variable. Phase 1 minimizes the sum of bound violations of the
/// basic variables; phase 2 prices with Dantzig's rule and falls back to
/// Bland's rule after 2·(rows + cols) consecutive degenerate pivots.
///
/// The object keeps its basis after solve(), so bounds can be tightened and
/// the problem re-solved from the previous basis (used by branch-and-bound).
class DenseSimplex {
 public:
  explicit DenseSimplex(const LpInstance& lp, SimplexOptions options = {});

  /// Changes the bounds of structural variable `var`; the basis is kept.
  void set_bounds(std::size_t var, double lower, double upper);

  LpStatus solve();

  LpSolution solution() const;
  double objective() const;
  std::vector<double> primal() const;
  std::size_t iterations() const { return iterations_; }

  std::size_t num_rows() const { return rows_; }
  std::size_t num_columns() const { return cols_; }

 private:
  enum class Phase { One, Two };

  struct Entering {
    std::size_t column;
    int direction;
  };

  struct Step {
    double length;
    std::ptrdiff_t row;  // -1 means a bound flip of the entering variable
    double leaving_value;
  };

  double& dict(std::size_t i, std::size_t j) { return dict_[i * cols_ + j]; }
  double dict(std::size_t i, std::size_t j) const { return dict_[i * cols_ + j]; }

  double tolerance_for(double bound) const;
  bool below_lower(std::size_t var) const;
  bool above_upper(std::size_t var) const;
  bool can_increase(std::size_t var) const;
  bool can_decrease(std::size_t var) const;

  bool choose_entering(std::span<const double> prices, Entering& out) const;
  Step ratio_test(Phase phase, const Entering& entering) const;
  void apply_step(const Entering& entering, const Step& step);
  void pivot(std::size_t row, std::size_t column);
  void compute_phase_one_prices(std::vector<double>& prices) const;
  bool has_infeasibility() const;
  void note_step(double length);

  SimplexOptions options_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;  // number of structural variables == nonbasic count
  std::vector<double> dict_;
  std::vector<double> cost_;     // per variable (structural then logical)
  std::vector<double> reduced_;  // per nonbasic column
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<double> value_;
  std::vector<std::size_t> basic_;     // row -> variable
  std::vector<std::size_t> nonbasic_;  // column -> variable
  std::vector<std::ptrdiff_t> where_;  // variable -> row (>= 0) or -(column + 1)
  std::size_t iterations_ = 0;
  std::size_t degenerate_run_ = 0;
  bool bland_ = false;
  LpStatus status_ = LpStatus::Infeasible;
  bool solved_ = false;
};

/// Solves the LP from scratch. Infeasible and unbounded instances are reported
/// through the status; malformed instances throw InputError.
LpSolution solve_lp(const LpInstance& lp, const SimplexOptions& options = {});

}  // namespace learnbd
