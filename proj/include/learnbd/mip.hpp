#pragma once

#include <cstddef>
#include <vector>

#include "learnbd/lp.hpp"

namespace learnbd {

/// An LP in which the listed variables must take values in {0, 1}.
struct MipInstance {
  LpInstance lp;
  std::vector<std::size_t> binaries;

  void validate() const;
};

enum class MipStatus { Optimal, Infeasible };

struct MipSolution {
  MipStatus status = MipStatus::Infeasible;
  std::vector<double> incumbent;
  double objective = 0.0;
  std::size_t nodes = 0;
};

struct MipOptions {
  SimplexOptions lp;
  double integrality_tol = 1e-6;
  /// Nodes whose bound is within this relative margin of the incumbent are pruned.
  double prune_tol = 1e-9;
  /// Upper bound on memory used by stored parent bases for warm starts.
  std::size_t warm_start_budget_bytes = std::size_t{256} << 20;
};

/// Best-bound branch-and-bound on the binaries, branching on the most
/// fractional variable (lowest index on ties). Returns a provably optimal
/// incumbent or Infeasible; throws SolverError if a relaxation is unbounded.
MipSolution solve_mip(const MipInstance& mip, const MipOptions& options = {});

}  // namespace learnbd
