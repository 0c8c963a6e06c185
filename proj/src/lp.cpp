#include "learnbd/lp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "learnbd/errors.hpp"

namespace learnbd {

namespace {

constexpr double kDegenerateStep = 1e-12;
constexpr std::size_t kRecomputeEvery = 32;

bool is_nan(double v) { return std::isnan(v); }

}  // namespace

std::string_view to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal:
      return "optimal";
    case LpStatus::Infeasible:
      return "infeasible";
    case LpStatus::Unbounded:
      return "unbounded";
  }
  return "unknown";
}

void LpInstance::validate() const {
  const std::size_t n = objective.size();
  for (double c : objective) {
    if (!std::isfinite(c)) throw InputError("LP objective has a non-finite coefficient");
  }
  if (!lower.empty() && lower.size() != n) throw InputError("LP lower bounds have wrong length");
  if (!upper.empty() && upper.size() != n) throw InputError("LP upper bounds have wrong length");
  for (std::size_t j = 0; j < n; ++j) {
    const double lo = lower_bound(j);
    const double up = upper_bound(j);
    if (is_nan(lo) || is_nan(up) || lo > up || lo == kInfinity || up == -kInfinity) {
      throw InputError("LP variable " + std::to_string(j) + " has invalid bounds");
    }
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].coefficients.size() != n) {
      throw InputError("LP row " + std::to_string(i) + " has " +
                       std::to_string(rows[i].coefficients.size()) + " coefficients, expected " +
                       std::to_string(n));
    }
    if (!std::isfinite(rows[i].rhs)) throw InputError("LP row " + std::to_string(i) + " has a non-finite rhs");
    for (double a : rows[i].coefficients) {
      if (!std::isfinite(a)) throw InputError("LP row " + std::to_string(i) + " has a non-finite coefficient");
    }
  }
}

DenseSimplex::DenseSimplex(const LpInstance& lp, SimplexOptions options) : options_(options) {
  lp.validate();
  rows_ = lp.rows.size();
  cols_ = lp.num_variables();
  const std::size_t total = rows_ + cols_;

  dict_.assign(rows_ * cols_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    std::copy(lp.rows[i].coefficients.begin(), lp.rows[i].coefficients.end(), dict_.begin() + i * cols_);
  }

  cost_.assign(total, 0.0);
  std::copy(lp.objective.begin(), lp.objective.end(), cost_.begin());
  lower_.resize(total);
  upper_.resize(total);
  for (std::size_t j = 0; j < cols_; ++j) {
    lower_[j] = lp.lower_bound(j);
    upper_[j] = lp.upper_bound(j);
  }
  for (std::size_t i = 0; i < rows_; ++i) {
    const LpRow& row = lp.rows[i];
    double& lo = lower_[cols_ + i];
    double& up = upper_[cols_ + i];
    switch (row.relation) {
      case Relation::LessEqual:
        lo = -kInfinity;
        up = row.rhs;
        break;
      case Relation::GreaterEqual:
        lo = row.rhs;
        up = kInfinity;
        break;
      case Relation::Equal:
        lo = row.rhs;
        up = row.rhs;
        break;
    }
  }

  basic_.resize(rows_);
  nonbasic_.resize(cols_);
  where_.resize(total);
  value_.assign(total, 0.0);
  for (std::size_t j = 0; j < cols_; ++j) {
    nonbasic_[j] = j;
    where_[j] = -static_cast<std::ptrdiff_t>(j) - 1;
    if (std::isfinite(lower_[j])) {
      value_[j] = lower_[j];
    } else if (std::isfinite(upper_[j])) {
      value_[j] = upper_[j];
    }
  }
  for (std::size_t i = 0; i < rows_; ++i) {
    basic_[i] = cols_ + i;
    where_[cols_ + i] = static_cast<std::ptrdiff_t>(i);
    double activity = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) activity += dict(i, j) * value_[j];
    value_[cols_ + i] = activity;
  }
  reduced_.assign(lp.objective.begin(), lp.objective.end());
}

void DenseSimplex::set_bounds(std::size_t var, double lower, double upper) {
  if (var >= cols_) throw InputError("set_bounds: variable index out of range");
  if (is_nan(lower) || is_nan(upper) || lower > upper) throw InputError("set_bounds: invalid bounds");
  lower_[var] = lower;
  upper_[var] = upper;
  solved_ = false;
  const std::ptrdiff_t pos = where_[var];
  if (pos >= 0) return;  // basic: phase 1 repairs any violation

  const std::size_t column = static_cast<std::size_t>(-pos - 1);
  const double old_value = value_[var];
  double new_value = 0.0;
  if (std::isfinite(upper) && old_value >= upper) {
    new_value = upper;
  } else if (std::isfinite(lower)) {
    new_value = lower;
  } else if (std::isfinite(upper)) {
    new_value = upper;
  }
  const double delta = new_value - old_value;
  value_[var] = new_value;
  if (delta != 0.0) {
    for (std::size_t i = 0; i < rows_; ++i) value_[basic_[i]] += dict(i, column) * delta;
  }
}

double DenseSimplex::tolerance_for(double bound) const {
  return options_.feasibility_tol * std::max(1.0, std::abs(bound));
}

bool DenseSimplex::below_lower(std::size_t var) const {
  return std::isfinite(lower_[var]) && value_[var] < lower_[var] - tolerance_for(lower_[var]);
}

bool DenseSimplex::above_upper(std::size_t var) const {
  return std::isfinite(upper_[var]) && value_[var] > upper_[var] + tolerance_for(upper_[var]);
}

bool DenseSimplex::can_increase(std::size_t var) const { return value_[var] < upper_[var]; }

bool DenseSimplex::can_decrease(std::size_t var) const { return value_[var] > lower_[var]; }

bool DenseSimplex::has_infeasibility() const {
  for (std::size_t i = 0; i < rows_; ++i) {
    if (below_lower(basic_[i]) || above_upper(basic_[i])) return true;
  }
  return false;
}

void DenseSimplex::compute_phase_one_prices(std::vector<double>& prices) const {
  prices.assign(cols_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    double weight = 0.0;
    if (below_lower(basic_[i])) {
      weight = -1.0;
    } else if (above_upper(basic_[i])) {
      weight = 1.0;
    } else {
      continue;
    }
    const double* row = &dict_[i * cols_];
    for (std::size_t j = 0; j < cols_; ++j) prices[j] += weight * row[j];
  }
}

bool DenseSimplex::choose_entering(std::span<const double> prices, Entering& out) const {
  double best_score = 0.0;
  std::size_t best_var = 0;
  bool found = false;
  for (std::size_t j = 0; j < cols_; ++j) {
    const std::size_t var = nonbasic_[j];
    const double tol = options_.optimality_tol * std::max(1.0, std::abs(cost_[var]));
    const double d = prices[j];
    int direction = 0;
    if (d < -tol && can_increase(var)) {
      direction = 1;
    } else if (d > tol && can_decrease(var)) {
      direction = -1;
    } else {
      continue;
    }
    const double score = std::abs(d);
    bool better = false;
    if (!found) {
      better = true;
    } else if (bland_) {
      better = var < best_var;
    } else {
      better = score > best_score || (score == best_score && var < best_var);
    }
    if (better) {
      found = true;
      best_score = score;
      best_var = var;
      out = Entering{j, direction};
    }
  }
  return found;
}

DenseSimplex::Step DenseSimplex::ratio_test(Phase phase, const Entering& entering) const {
  struct Candidate {
    std::size_t row;
    double distance;
    double rate;
    double bound;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(16);

  for (std::size_t i = 0; i < rows_; ++i) {
    const double rate = dict(i, entering.column) * entering.direction;
    if (std::abs(rate) <= options_.pivot_tol) continue;
    const std::size_t var = basic_[i];
    const double x = value_[var];
    if (phase == Phase::One && below_lower(var)) {
      if (rate > 0.0) candidates.push_back({i, lower_[var] - x, rate, lower_[var]});
      continue;
    }
    if (phase == Phase::One && above_upper(var)) {
      if (rate < 0.0) candidates.push_back({i, x - upper_[var], -rate, upper_[var]});
      continue;
    }
    if (rate > 0.0 && std::isfinite(upper_[var])) {
      candidates.push_back({i, std::max(0.0, upper_[var] - x), rate, upper_[var]});
    } else if (rate < 0.0 && std::isfinite(lower_[var])) {
      candidates.push_back({i, std::max(0.0, x - lower_[var]), -rate, lower_[var]});
    }
  }

  const std::size_t entering_var = nonbasic_[entering.column];
  const double flip = upper_[entering_var] - lower_[entering_var];  // inf when a side is open

  Step step{kInfinity, -1, 0.0};
  if (!candidates.empty()) {
    const Candidate* chosen = nullptr;
    if (bland_) {
      double best = kInfinity;
      for (const Candidate& c : candidates) best = std::min(best, c.distance / c.rate);
      for (const Candidate& c : candidates) {
        if (c.distance / c.rate <= best + kDegenerateStep &&
            (chosen == nullptr || basic_[c.row] < basic_[chosen->row])) {
          chosen = &c;
        }
      }
    } else {
      // Harris two-pass: relax bounds by the feasibility tolerance, then take
      // the largest pivot among the rows blocking within the relaxed step.
      double relaxed = kInfinity;
      for (const Candidate& c : candidates) {
        relaxed = std::min(relaxed, (c.distance + tolerance_for(c.bound)) / c.rate);
      }
      for (const Candidate& c : candidates) {
        if (c.distance / c.rate <= relaxed && (chosen == nullptr || c.rate > chosen->rate)) chosen = &c;
      }
    }
    step = Step{std::max(0.0, chosen->distance / chosen->rate), static_cast<std::ptrdiff_t>(chosen->row),
                chosen->bound};
  }
  if (std::isfinite(flip) && flip <= step.length) {
    step = Step{flip, -1, 0.0};
  }
  return step;
}

void DenseSimplex::apply_step(const Entering& entering, const Step& step) {
  const std::size_t q = entering.column;
  const std::size_t var = nonbasic_[q];
  const double delta = entering.direction * step.length;
  if (step.row < 0) {
    value_[var] = entering.direction > 0 ? upper_[var] : lower_[var];
  } else {
    value_[var] += delta;
  }
  if (delta != 0.0) {
    for (std::size_t i = 0; i < rows_; ++i) value_[basic_[i]] += dict(i, q) * delta;
  }
  if (step.row >= 0) {
    const std::size_t r = static_cast<std::size_t>(step.row);
    value_[basic_[r]] = step.leaving_value;
    pivot(r, q);
  }
  note_step(step.length);
  ++iterations_;
  if (iterations_ % kRecomputeEvery == 0) {
    for (std::size_t i = 0; i < rows_; ++i) {
      double v = 0.0;
      const double* row = &dict_[i * cols_];
      for (std::size_t j = 0; j < cols_; ++j) v += row[j] * value_[nonbasic_[j]];
      value_[basic_[i]] = v;
    }
  }
}

void DenseSimplex::pivot(std::size_t r, std::size_t q) {
  double* pivot_row = &dict_[r * cols_];
  const double inv = 1.0 / pivot_row[q];
  for (std::size_t j = 0; j < cols_; ++j) pivot_row[j] *= -inv;
  pivot_row[q] = inv;

  for (std::size_t i = 0; i < rows_; ++i) {
    if (i == r) continue;
    double* row = &dict_[i * cols_];
    const double factor = row[q];
    if (factor == 0.0) continue;
    row[q] = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) row[j] += factor * pivot_row[j];
  }
  const double factor = reduced_[q];
  if (factor != 0.0) {
    reduced_[q] = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) reduced_[j] += factor * pivot_row[j];
  }

  const std::size_t leaving = basic_[r];
  const std::size_t entering = nonbasic_[q];
  basic_[r] = entering;
  nonbasic_[q] = leaving;
  where_[entering] = static_cast<std::ptrdiff_t>(r);
  where_[leaving] = -static_cast<std::ptrdiff_t>(q) - 1;
}

void DenseSimplex::note_step(double length) {
  if (length <= kDegenerateStep) {
    if (++degenerate_run_ > 2 * (rows_ + cols_)) bland_ = true;
  } else {
    degenerate_run_ = 0;
    bland_ = false;
  }
}

LpStatus DenseSimplex::solve() {
  if (solved_) return status_;
  const std::size_t limit =
      options_.max_iterations != 0 ? options_.max_iterations : 200 * (rows_ + cols_) + 10000;
  const std::size_t start = iterations_;
  auto check_limit = [&] {
    if (iterations_ - start > limit) throw SolverError("simplex iteration limit exceeded");
  };

  std::vector<double> prices;
  degenerate_run_ = 0;
  bland_ = false;
  while (has_infeasibility()) {
    check_limit();
    compute_phase_one_prices(prices);
    Entering entering{};
    if (!choose_entering(prices, entering)) {
      status_ = LpStatus::Infeasible;
      solved_ = true;
      return status_;
    }
    const Step step = ratio_test(Phase::One, entering);
    if (!std::isfinite(step.length)) {
      status_ = LpStatus::Infeasible;
      solved_ = true;
      return status_;
    }
    apply_step(entering, step);
  }

  // Fresh reduced costs for phase 2: d_j = c_N(j) + sum_i c_B(i) D(i, j).
  reduced_.assign(cols_, 0.0);
  for (std::size_t j = 0; j < cols_; ++j) reduced_[j] = cost_[nonbasic_[j]];
  for (std::size_t i = 0; i < rows_; ++i) {
    const double c = cost_[basic_[i]];
    if (c == 0.0) continue;
    const double* row = &dict_[i * cols_];
    for (std::size_t j = 0; j < cols_; ++j) reduced_[j] += c * row[j];
  }

  degenerate_run_ = 0;
  bland_ = false;
  for (;;) {
    check_limit();
    Entering entering{};
    if (!choose_entering(reduced_, entering)) break;
    const Step step = ratio_test(Phase::Two, entering);
    if (!std::isfinite(step.length)) {
      status_ = LpStatus::Unbounded;
      solved_ = true;
      return status_;
    }
    apply_step(entering, step);
  }
  status_ = LpStatus::Optimal;
  solved_ = true;
  return status_;
}

double DenseSimplex::objective() const {
  double z = 0.0;
  for (std::size_t j = 0; j < cols_; ++j) z += cost_[j] * value_[j];
  return z;
}

std::vector<double> DenseSimplex::primal() const {
  return std::vector<double>(value_.begin(), value_.begin() + static_cast<std::ptrdiff_t>(cols_));
}

LpSolution DenseSimplex::solution() const {
  LpSolution out;
  out.status = status_;
  out.iterations = iterations_;
  out.primal = primal();
  out.duals.assign(rows_, 0.0);
  out.reduced_costs.assign(cols_, 0.0);
  if (status_ != LpStatus::Optimal) return out;
  for (std::size_t i = 0; i < rows_; ++i) {
    const std::ptrdiff_t pos = where_[cols_ + i];
    if (pos < 0) out.duals[i] = reduced_[static_cast<std::size_t>(-pos - 1)];
  }
  for (std::size_t j = 0; j < cols_; ++j) {
    const std::ptrdiff_t pos = where_[j];
    if (pos < 0) out.reduced_costs[j] = reduced_[static_cast<std::size_t>(-pos - 1)];
  }
  out.objective = objective();
  return out;
}

LpSolution solve_lp(const LpInstance& lp, const SimplexOptions& options) {
  DenseSimplex simplex(lp, options);
  simplex.solve();
  return simplex.solution();
}

}  // namespace learnbd
