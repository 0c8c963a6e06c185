#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <vector>

#include "learnbd/benders.hpp"

namespace learnbd {

struct TrainingRow {
  std::size_t path = 0;
  std::size_t step = 0;
  double violation = 0.0;      // VL
  std::size_t prior_cuts = 0;  // NC
  double improvement = 0.0;    // PI = |ẑ^{n+1} − ẑ^n|
  bool truncated = false;      // the path ran out of violated cuts
};

struct LabeledRow {
  CutObservation features;
  int label = 1;
  double delta = 0.0;
};

struct Phase1Options {
  double violation_tol = 1e-6;
  /// Solve path masters as LP relaxations instead of binary MIPs.
  bool relax_master = false;
  MipOptions mip;
};

/// Stream seed of path `path` derived from the top-level seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t path);

/// One sampling path of N single-cut steps. Rows carry `path` as their path
/// index; when no scenario yields a violated cut the path stops early and
/// every returned row is flagged truncated.
std::vector<TrainingRow> sample_cut_path(const TwoStageProblem& training, std::size_t steps, std::uint64_t seed,
                                         std::size_t path = 0, const Phase1Options& options = {});

/// K independent paths; path k uses derive_seed(seed, k).
std::vector<TrainingRow> run_phase1(const TwoStageProblem& training, std::size_t paths, std::size_t steps,
                                    std::uint64_t seed, const Phase1Options& options = {});

/// N = 2|Ω| steps per path.
inline std::size_t default_path_length(const TwoStageProblem& p) { return 2 * p.num_scenarios(); }
inline constexpr std::size_t kDefaultPaths = 2;

inline constexpr double kImprovementEpsilon = 1e-12;

/// Within each path the last row gets 1; row n gets −1 iff PI_n/PI_{n+1} < Δ.
/// A vanishing denominator counts as +∞ unless PI_n vanishes too (then −1).
std::vector<LabeledRow> transform_labels(const std::vector<TrainingRow>& rows, double delta);

/// CSV columns: path,step,VL,NC,PI,truncated
void write_rows_csv(std::ostream& out, const std::vector<TrainingRow>& rows);
std::vector<TrainingRow> read_rows_csv(std::istream& in);

}  // namespace learnbd
