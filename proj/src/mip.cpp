#include "learnbd/mip.hpp"

#include <cmath>
#include <memory>
#include <queue>
#include <string>
#include <utility>

#include "learnbd/errors.hpp"

namespace learnbd {

void MipInstance::validate() const {
  lp.validate();
  for (std::size_t idx : binaries) {
    if (idx >= lp.num_variables()) {
      throw InputError("binary index " + std::to_string(idx) + " out of range");
    }
    if (lp.lower_bound(idx) != 0.0 || lp.upper_bound(idx) != 1.0) {
      throw InputError("binary variable " + std::to_string(idx) + " must carry bounds [0, 1]");
    }
  }
}

namespace {

struct Fixing {
  std::size_t var;
  double value;
};

struct Node {
  double bound;
  std::size_t id;
  std::vector<Fixing> fixings;
  std::shared_ptr<const DenseSimplex> parent;  // null: cold start
};

struct WorseNode {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  }
};

}  // namespace

MipSolution solve_mip(const MipInstance& mip, const MipOptions& options) {
  mip.validate();

  MipSolution result;
  double incumbent_value = kInfinity;
  const auto prunable = [&](double bound) {
    return std::isfinite(incumbent_value) &&
           bound >= incumbent_value - options.prune_tol * std::max(1.0, std::abs(incumbent_value));
  };

  const DenseSimplex root(mip.lp, options.lp);
  const std::size_t snapshot_bytes =
      sizeof(double) * (root.num_rows() + 4) * (root.num_columns() + root.num_rows() + 4);
  std::size_t stored_bytes = 0;

  std::priority_queue<Node, std::vector<Node>, WorseNode> open;
  std::size_t next_id = 0;
  open.push(Node{-kInfinity, next_id++, {}, nullptr});

  while (!open.empty()) {
    Node node = open.top();
    open.pop();
    if (node.parent) stored_bytes -= std::min(stored_bytes, snapshot_bytes / 2);
    if (prunable(node.bound)) continue;
    ++result.nodes;

    auto simplex = std::make_shared<DenseSimplex>(node.parent ? *node.parent : root);
    if (node.parent) {
      const Fixing& last = node.fixings.back();
      simplex->set_bounds(last.var, last.value, last.value);
    } else {
      for (const Fixing& f : node.fixings) simplex->set_bounds(f.var, f.value, f.value);
    }
    const LpStatus status = simplex->solve();
    if (status == LpStatus::Unbounded) throw SolverError("MIP relaxation is unbounded");
    if (status == LpStatus::Infeasible) continue;

    const double bound = simplex->objective();
    if (prunable(bound)) continue;

    const std::vector<double> x = simplex->primal();
    std::size_t branch_var = 0;
    double best_fraction = -1.0;
    for (std::size_t idx : mip.binaries) {
      const double frac = std::abs(x[idx] - std::round(x[idx]));
      if (frac <= options.integrality_tol) continue;
      const double score = 0.5 - std::abs(x[idx] - std::floor(x[idx]) - 0.5);
      if (score > best_fraction || (score == best_fraction && idx < branch_var)) {
        best_fraction = score;
        branch_var = idx;
      }
    }

    if (best_fraction < 0.0) {
      incumbent_value = bound;
      result.incumbent = x;
      for (std::size_t idx : mip.binaries) result.incumbent[idx] = std::round(x[idx]);
      result.objective = bound;
      result.status = MipStatus::Optimal;
      continue;
    }

    std::shared_ptr<const DenseSimplex> parent;
    if (stored_bytes + snapshot_bytes <= options.warm_start_budget_bytes) {
      parent = simplex;
      stored_bytes += snapshot_bytes;
    }
    for (double value : {0.0, 1.0}) {
      Node child{bound, next_id++, node.fixings, parent};
      child.fixings.push_back({branch_var, value});
      open.push(std::move(child));
    }
  }
  return result;
}

}  // namespace learnbd
