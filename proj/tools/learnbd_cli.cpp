#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "learnbd/errors.hpp"
#include "learnbd/harness.hpp"

namespace {

std::vector<double> parse_list(const std::string& text, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw learnbd::InputError(std::string(flag) + ": bad number '" + cell + "'");
    }
  }
  if (out.empty()) throw learnbd::InputError(std::string(flag) + ": empty list");
  return out;
}

struct Flags {
  std::string config;
  std::optional<std::string> method, out, kind, instance, name, scenarios, rows, models, grid, delta_list;
  std::optional<double> tol, time_limit, sigma, c, gamma;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> max_iterations, scenario_count, paths, steps, folds;
  std::vector<std::string> eval_rows, runs;
  bool relax_master = false;
  bool print_config = false;
};

void add_flags(CLI::App& app, Flags& f) {
  app.add_option("--config", f.config, "JSON experiment config; flags override its fields");
  app.add_option("--method", f.method, "bd or learnbd");
  app.add_option("--delta-list", f.delta_list, "comma-separated strictly decreasing delta schedule");
  app.add_option("--tol", f.tol, "relative gap tolerance in percent");
  app.add_option("--time-limit", f.time_limit, "wall-clock limit in seconds");
  app.add_option("--max-iterations", f.max_iterations, "master solve limit");
  app.add_option("--seed", f.seed, "top-level seed");
  app.add_option("--out", f.out, "output directory");
  app.add_option("--grid", f.grid, "grid search as C-list/gamma-list, e.g. 1,10,100/0.1,1,10");
  app.add_option("--C", f.c, "SVM penalty without grid search");
  app.add_option("--gamma", f.gamma, "RBF width without grid search");
  app.add_option("--folds", f.folds, "cross-validation folds");
  app.add_option("--kind", f.kind, "cflp or cmnd");
  app.add_option("--instance", f.instance, "cap file or CMND JSON; omitted: generated");
  app.add_option("--name", f.name, "instance label in outputs");
  app.add_option("--scenarios", f.scenarios, "scenario CSV for solving");
  app.add_option("--scenario-count", f.scenario_count, "sampled scenarios");
  app.add_option("--sigma", f.sigma, "demand std as a fraction of the nominal");
  app.add_option("--paths", f.paths, "phase-1 sampling paths K");
  app.add_option("--steps", f.steps, "phase-1 path length N (0: 2|Omega|)");
  app.add_flag("--relax-master", f.relax_master, "phase-1 masters as LP relaxations");
  app.add_option("--rows", f.rows, "phase-1 row store");
  app.add_option("--models", f.models, "model manifest");
  app.add_option("--eval-rows", f.eval_rows, "validation row stores for eval");
  app.add_option("--runs", f.runs, "summary files for report; default: all in --out");
  app.add_flag("--print-config", f.print_config, "print the effective config and exit");
}

learnbd::ExperimentConfig resolve(const Flags& f) {
  learnbd::ExperimentConfig c = f.config.empty() ? learnbd::ExperimentConfig{} : learnbd::load_config_file(f.config);
  if (f.method) c.solve.method = *f.method;
  if (f.out) c.out = *f.out;
  if (f.kind) c.problem.kind = *f.kind;
  if (f.instance) c.problem.path = *f.instance;
  if (f.name) c.problem.name = *f.name;
  if (f.scenarios) c.scenarios.path = *f.scenarios;
  if (f.rows) c.training.rows = *f.rows;
  if (f.models) c.classifier.models = *f.models;
  if (f.tol) c.solve.tol_pct = *f.tol;
  if (f.time_limit) c.solve.time_limit_s = *f.time_limit;
  if (f.max_iterations) c.solve.max_iterations = *f.max_iterations;
  if (f.sigma) c.scenarios.sigma_ratio = *f.sigma;
  if (f.scenario_count) c.scenarios.count = *f.scenario_count;
  if (f.c) c.classifier.C = *f.c;
  if (f.gamma) c.classifier.gamma = *f.gamma;
  if (f.folds) c.classifier.folds = *f.folds;
  if (f.seed) c.seed = *f.seed;
  if (f.paths) c.training.paths = *f.paths;
  if (f.steps) c.training.steps = *f.steps;
  if (f.relax_master) c.training.relax_master = true;
  if (!f.eval_rows.empty()) c.classifier.eval_rows = f.eval_rows;
  if (!f.runs.empty()) c.runs = f.runs;
  if (f.delta_list) c.classifier.deltas = parse_list(*f.delta_list, "--delta-list");
  if (f.grid) {
    const auto slash = f.grid->find('/');
    if (slash == std::string::npos) throw learnbd::InputError("--grid expects C-list/gamma-list");
    c.classifier.c_grid = parse_list(f.grid->substr(0, slash), "--grid");
    c.classifier.gamma_grid = parse_list(f.grid->substr(slash + 1), "--grid");
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Benders decomposition with learned cut selection"};
  app.require_subcommand(1);
  Flags flags;
  using Command = std::vector<std::string> (*)(const learnbd::ExperimentConfig&);
  const std::vector<std::tuple<const char*, const char*, Command>> commands = {
      {"generate", "write an instance and its scenario CSV", learnbd::cmd_generate},
      {"phase1", "sample cut paths on a training problem and write the row store", learnbd::cmd_phase1},
      {"train", "train one SVM per delta from the row store", learnbd::cmd_train},
      {"eval", "accuracy of trained models on row stores", learnbd::cmd_eval},
      {"solve", "run classic BD or LearnBD and write the iteration log and summary", learnbd::cmd_solve},
      {"report", "comparison table and per-iteration panel data", learnbd::cmd_report},
  };
  std::vector<std::pair<CLI::App*, Command>> subs;
  for (const auto& [name, help, fn] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_flags(*sub, flags);
    subs.emplace_back(sub, fn);
  }
  CLI11_PARSE(app, argc, argv);

  try {
    const learnbd::ExperimentConfig config = resolve(flags);
    if (flags.print_config) {
      learnbd::write_config(std::cout, config);
      return 0;
    }
    for (const auto& [sub, fn] : subs) {
      if (!sub->parsed()) continue;
      for (const std::string& path : fn(config)) std::cout << path << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
