#include "learnbd/phase1.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "learnbd/errors.hpp"

namespace learnbd {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t path) {
  // splitmix64 finalizer over the pair
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (path + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<TrainingRow> sample_cut_path(const TwoStageProblem& training, std::size_t steps, std::uint64_t seed,
                                         std::size_t path, const Phase1Options& options) {
  std::vector<TrainingRow> rows;
  if (steps == 0) return rows;
  training.validate();

  std::mt19937_64 rng(seed);
  BendersState state(training);
  double z = solve_rmp(training, state, options.mip, options.relax_master).objective;
  std::vector<std::size_t> order(training.num_scenarios());

  for (std::size_t n = 0; n < steps; ++n) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    bool added = false;
    for (std::size_t omega : order) {
      const SubproblemSolution sp = solve_subproblem(training, omega, state.x_hat);
      Cut cut = make_cut(training, omega, sp.duals);
      const double vl = violation(cut, state.x_hat, state.theta_hat);
      if (!(vl > options.violation_tol)) continue;
      cut.features = {vl, state.cut_counts[omega]};
      cut.birth_iteration = n;
      if (!add_cut(state, cut)) continue;
      const double next = solve_rmp(training, state, options.mip, options.relax_master).objective;
      rows.push_back(TrainingRow{path, n, vl, cut.features.prior_cuts, std::abs(next - z), false});
      z = next;
      added = true;
      break;
    }
    if (!added) {
      for (TrainingRow& r : rows) r.truncated = true;
      break;
    }
  }
  return rows;
}

std::vector<TrainingRow> run_phase1(const TwoStageProblem& training, std::size_t paths, std::size_t steps,
                                    std::uint64_t seed, const Phase1Options& options) {
  if (paths == 0 || steps == 0) throw InputError("phase 1 needs K >= 1 paths and N >= 1 steps");
  std::vector<TrainingRow> rows;
  for (std::size_t k = 0; k < paths; ++k) {
    const auto path_rows = sample_cut_path(training, steps, derive_seed(seed, k), k, options);
    rows.insert(rows.end(), path_rows.begin(), path_rows.end());
  }
  return rows;
}

std::vector<LabeledRow> transform_labels(const std::vector<TrainingRow>& rows, double delta) {
  if (!(delta >= 0.0 && delta <= 2.0)) throw InputError("delta must lie in [0, 2]");
  std::vector<LabeledRow> out;
  out.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    LabeledRow l{{rows[i].violation, rows[i].prior_cuts}, 1, delta};
    const bool last = i + 1 == rows.size() || rows[i + 1].path != rows[i].path;
    if (!last) {
      const double now = rows[i].improvement;
      const double next = rows[i + 1].improvement;
      if (next < kImprovementEpsilon) {
        l.label = now >= kImprovementEpsilon ? 1 : -1;
      } else {
        l.label = now / next < delta ? -1 : 1;
      }
    }
    out.push_back(l);
  }
  return out;
}

void write_rows_csv(std::ostream& out, const std::vector<TrainingRow>& rows) {
  out << "path,step,VL,NC,PI,truncated\n";
  const auto old = out.precision(17);
  for (const TrainingRow& r : rows) {
    out << r.path << ',' << r.step << ',' << r.violation << ',' << r.prior_cuts << ',' << r.improvement << ','
        << (r.truncated ? 1 : 0) << '\n';
  }
  out.precision(old);
}

namespace {

double parse_real(const std::string& cell, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used == cell.size()) return v;
  } catch (const std::logic_error&) {
  }
  throw ParseError("non-numeric cell '" + cell + "'", line);
}

std::size_t parse_count(const std::string& cell, std::size_t line) {
  const double v = parse_real(cell, line);
  if (v < 0.0 || v != std::floor(v)) throw ParseError("expected a nonnegative integer, got '" + cell + "'", line);
  return static_cast<std::size_t>(v);
}

}  // namespace

std::vector<TrainingRow> read_rows_csv(std::istream& in) {
  std::vector<TrainingRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != "path,step,VL,NC,PI,truncated") throw ParseError("unexpected header '" + line + "'", line_no);
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 6) throw ParseError("expected 6 columns", line_no);
    TrainingRow r;
    r.path = parse_count(cells[0], line_no);
    r.step = parse_count(cells[1], line_no);
    r.violation = parse_real(cells[2], line_no);
    r.prior_cuts = parse_count(cells[3], line_no);
    r.improvement = parse_real(cells[4], line_no);
    const std::size_t flag = parse_count(cells[5], line_no);
    if (flag > 1) throw ParseError("truncated flag must be 0 or 1", line_no);
    r.truncated = flag == 1;
    if (!std::isfinite(r.violation) || !(r.improvement >= 0.0)) throw ParseError("invalid VL or PI", line_no);
    rows.push_back(r);
  }
  if (line_no == 0) throw ParseError("empty row store", 1);
  return rows;
}

}  // namespace learnbd
