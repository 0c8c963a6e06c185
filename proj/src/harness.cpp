#include "learnbd/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "learnbd/errors.hpp"

namespace learnbd {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <typename T>
void read_field(const json& obj, const char* key, T& target) {
  if (!obj.contains(key)) return;
  try {
    target = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InputError(std::string("config field '") + key + "': " + e.what());
  }
}

const json& section(const json& root, const char* key) {
  static const json empty = json::object();
  if (!root.contains(key)) return empty;
  const json& s = root.at(key);
  if (!s.is_object()) throw InputError(std::string("config section '") + key + "' must be an object");
  return s;
}

std::ifstream open_in(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw InputError(std::string(what) + " not found: " + path);
  return in;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double to_real(const std::string& cell, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size()) throw ParseError("bad number '" + cell + "'", line);
    return v;
  } catch (const std::invalid_argument&) {
    throw ParseError("bad number '" + cell + "'", line);
  } catch (const std::out_of_range&) {
    throw ParseError("number out of range '" + cell + "'", line);
  }
}

std::size_t to_count(const std::string& cell, std::size_t line) {
  const double v = to_real(cell, line);
  if (v < 0.0 || v != std::floor(v)) throw ParseError("bad count '" + cell + "'", line);
  return static_cast<std::size_t>(v);
}

/// Header cells to column indices; every name in `required` must be present.
std::map<std::string, std::size_t> header_index(std::istream& in, const std::vector<std::string>& required) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty file", 1);
  std::map<std::string, std::size_t> idx;
  const auto cells = split_csv(line);
  for (std::size_t c = 0; c < cells.size(); ++c) idx[cells[c]] = c;
  for (const std::string& name : required) {
    if (!idx.count(name)) throw ParseError("missing column '" + name + "'", 1);
  }
  return idx;
}

std::string default_stem(const ExperimentConfig& config) {
  return config.problem.kind + "-" + std::to_string(config.seed);
}

CflpData load_cflp(const ExperimentConfig& config) {
  if (config.problem.path.empty()) return generate_cflp(config.problem.cflp, stream_seed(config, SeedStream::Instance));
  std::ifstream in = open_in(config.problem.path, "instance");
  CapParseOptions opts;
  opts.penalty_factor = config.problem.cflp.penalty_factor;
  return parse_orlib_cap(in, opts);
}

CmndData load_cmnd(const ExperimentConfig& config) {
  if (config.problem.path.empty()) return generate_cmnd(config.problem.cmnd, stream_seed(config, SeedStream::Instance));
  std::ifstream in = open_in(config.problem.path, "instance");
  return parse_cmnd_json(in);
}

TwoStageProblem build(const ExperimentConfig& config, SeedStream stream, bool use_file) {
  auto scenarios_for = [&](const std::vector<double>& nominal) {
    if (use_file && !config.scenarios.path.empty()) {
      std::ifstream in = open_in(config.scenarios.path, "scenario file");
      return read_scenarios_csv(in);
    }
    return sample_scenarios(nominal, config.scenarios.sigma_ratio, config.scenarios.count,
                            stream_seed(config, stream));
  };
  TwoStageProblem p;
  if (config.problem.kind == "cflp") {
    const CflpData d = load_cflp(config);
    p = build_cflp(d, scenarios_for(d.nominal_demand()));
  } else {
    const CmndData d = load_cmnd(config);
    p = build_cmnd(d, scenarios_for(d.nominal_demand()));
  }
  p.name = instance_name(config);
  return p;
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

BendersOptions benders_options(const ExperimentConfig& config) {
  BendersOptions o;
  o.gap_tol_pct = config.solve.tol_pct;
  o.time_limit_s = config.solve.time_limit_s;
  o.max_iterations = config.solve.max_iterations;
  return o;
}

std::vector<TrainingRow> load_rows(const std::string& path) {
  std::ifstream in = open_in(path, "row store");
  return read_rows_csv(in);
}

std::vector<TrainingRow> require_rows(const ExperimentConfig& config) {
  if (config.training.rows.empty() || !fs::exists(config.training.rows)) throw InputError("phase-1 rows required");
  std::vector<TrainingRow> rows = load_rows(config.training.rows);
  if (rows.empty()) throw InputError("phase-1 rows required");
  return rows;
}

struct LoadedModels {
  std::vector<ModelEntry> entries;
  std::vector<SvmModel> models;
};

LoadedModels load_models(const std::string& manifest) {
  std::ifstream in = open_in(manifest, "model manifest");
  LoadedModels out;
  out.entries = read_manifest_csv(in);
  if (out.entries.empty()) throw InputError("model manifest is empty: " + manifest);
  const fs::path base = fs::path(manifest).parent_path();
  for (const ModelEntry& e : out.entries) {
    std::ifstream m = open_in((base / e.file).string(), "model");
    out.models.push_back(read_model_json(m));
  }
  return out;
}

std::string run_tag(const ExperimentConfig& config) { return instance_name(config) + "_" + config.solve.method; }

}  // namespace

// ---------------------------------------------------------------------------
// Config

void ExperimentConfig::validate() const {
  if (problem.kind != "cflp" && problem.kind != "cmnd") throw InputError("problem kind must be cflp or cmnd");
  if (solve.method != "bd" && solve.method != "learnbd") throw InputError("method must be bd or learnbd");
  if (!(solve.tol_pct > 0.0)) throw InputError("tolerance must be positive");
  if (!(solve.time_limit_s > 0.0)) throw InputError("time limit must be positive");
  if (solve.max_iterations == 0) throw InputError("iteration limit must be positive");
  if (scenarios.count == 0) throw InputError("scenario count must be positive");
  if (!(scenarios.sigma_ratio >= 0.0)) throw InputError("sigma ratio must be nonnegative");
  if (training.paths == 0) throw InputError("path count must be positive");
  if (classifier.folds < 2) throw InputError("grid search needs at least 2 folds");
  if (!(classifier.C > 0.0) || !(classifier.gamma > 0.0)) throw InputError("C and gamma must be positive");
  if (classifier.c_grid.empty() != classifier.gamma_grid.empty()) {
    throw InputError("grid search needs both a C grid and a gamma grid");
  }
  if (instance_name(*this).find(',') != std::string::npos) throw InputError("instance name may not contain ','");
  schedule();
}

DeltaSchedule ExperimentConfig::schedule() const {
  return classifier.deltas.empty() ? DeltaSchedule::standard() : DeltaSchedule(classifier.deltas);
}

ExperimentConfig load_config(std::istream& in) {
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what(), 1);
  }
  if (!root.is_object()) throw InputError("config must be a JSON object");
  ExperimentConfig c;
  read_field(root, "seed", c.seed);
  read_field(root, "out", c.out);
  read_field(root, "runs", c.runs);

  const json& p = section(root, "problem");
  read_field(p, "kind", c.problem.kind);
  read_field(p, "path", c.problem.path);
  read_field(p, "name", c.problem.name);
  const json& g = section(p, "cflp");
  read_field(g, "facilities", c.problem.cflp.facilities);
  read_field(g, "customers", c.problem.cflp.customers);
  read_field(g, "capacity_ratio", c.problem.cflp.capacity_ratio);
  read_field(g, "setup_cost", c.problem.cflp.setup_cost);
  read_field(g, "min_demand", c.problem.cflp.min_demand);
  read_field(g, "max_demand", c.problem.cflp.max_demand);
  read_field(g, "cost_scale", c.problem.cflp.cost_scale);
  read_field(g, "penalty_factor", c.problem.cflp.penalty_factor);
  const json& m = section(p, "cmnd");
  read_field(m, "nodes", c.problem.cmnd.nodes);
  read_field(m, "arcs", c.problem.cmnd.arcs);
  read_field(m, "commodities", c.problem.cmnd.commodities);
  read_field(m, "min_demand", c.problem.cmnd.min_demand);
  read_field(m, "max_demand", c.problem.cmnd.max_demand);
  read_field(m, "min_unit_cost", c.problem.cmnd.min_unit_cost);
  read_field(m, "max_unit_cost", c.problem.cmnd.max_unit_cost);
  read_field(m, "min_fixed_cost", c.problem.cmnd.min_fixed_cost);
  read_field(m, "max_fixed_cost", c.problem.cmnd.max_fixed_cost);
  read_field(m, "min_capacity", c.problem.cmnd.min_capacity);
  read_field(m, "max_capacity", c.problem.cmnd.max_capacity);
  read_field(m, "penalty", c.problem.cmnd.penalty);

  const json& s = section(root, "scenarios");
  read_field(s, "count", c.scenarios.count);
  read_field(s, "sigma_ratio", c.scenarios.sigma_ratio);
  read_field(s, "path", c.scenarios.path);

  const json& t = section(root, "training");
  read_field(t, "paths", c.training.paths);
  read_field(t, "steps", c.training.steps);
  read_field(t, "relax_master", c.training.relax_master);
  read_field(t, "rows", c.training.rows);

  const json& k = section(root, "classifier");
  read_field(k, "C", c.classifier.C);
  read_field(k, "gamma", c.classifier.gamma);
  read_field(k, "c_grid", c.classifier.c_grid);
  read_field(k, "gamma_grid", c.classifier.gamma_grid);
  read_field(k, "folds", c.classifier.folds);
  read_field(k, "deltas", c.classifier.deltas);
  read_field(k, "models", c.classifier.models);
  read_field(k, "eval_rows", c.classifier.eval_rows);

  const json& v = section(root, "solve");
  read_field(v, "method", c.solve.method);
  read_field(v, "tol_pct", c.solve.tol_pct);
  read_field(v, "time_limit_s", c.solve.time_limit_s);
  read_field(v, "max_iterations", c.solve.max_iterations);
  return c;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in = open_in(path, "config");
  return load_config(in);
}

void write_config(std::ostream& out, const ExperimentConfig& c) {
  const CflpGeneratorSpec& g = c.problem.cflp;
  const CmndGeneratorSpec& m = c.problem.cmnd;
  json root = {
      {"seed", c.seed},
      {"out", c.out},
      {"runs", c.runs},
      {"problem",
       {{"kind", c.problem.kind},
        {"path", c.problem.path},
        {"name", c.problem.name},
        {"cflp",
         {{"facilities", g.facilities},
          {"customers", g.customers},
          {"capacity_ratio", g.capacity_ratio},
          {"setup_cost", g.setup_cost},
          {"min_demand", g.min_demand},
          {"max_demand", g.max_demand},
          {"cost_scale", g.cost_scale},
          {"penalty_factor", g.penalty_factor}}},
        {"cmnd",
         {{"nodes", m.nodes},
          {"arcs", m.arcs},
          {"commodities", m.commodities},
          {"min_demand", m.min_demand},
          {"max_demand", m.max_demand},
          {"min_unit_cost", m.min_unit_cost},
          {"max_unit_cost", m.max_unit_cost},
          {"min_fixed_cost", m.min_fixed_cost},
          {"max_fixed_cost", m.max_fixed_cost},
          {"min_capacity", m.min_capacity},
          {"max_capacity", m.max_capacity},
          {"penalty", m.penalty}}}}},
      {"scenarios", {{"count", c.scenarios.count}, {"sigma_ratio", c.scenarios.sigma_ratio}, {"path", c.scenarios.path}}},
      {"training",
       {{"paths", c.training.paths},
        {"steps", c.training.steps},
        {"relax_master", c.training.relax_master},
        {"rows", c.training.rows}}},
      {"classifier",
       {{"C", c.classifier.C},
        {"gamma", c.classifier.gamma},
        {"c_grid", c.classifier.c_grid},
        {"gamma_grid", c.classifier.gamma_grid},
        {"folds", c.classifier.folds},
        {"deltas", c.classifier.deltas},
        {"models", c.classifier.models},
        {"eval_rows", c.classifier.eval_rows}}},
      {"solve",
       {{"method", c.solve.method},
        {"tol_pct", c.solve.tol_pct},
        {"time_limit_s", c.solve.time_limit_s},
        {"max_iterations", c.solve.max_iterations}}}};
  out << root.dump(2) << '\n';
}

std::uint64_t stream_seed(const ExperimentConfig& config, SeedStream stream) {
  return derive_seed(config.seed, static_cast<std::uint64_t>(stream));
}

std::string instance_name(const ExperimentConfig& config) {
  if (!config.problem.name.empty()) return config.problem.name;
  if (!config.problem.path.empty()) return fs::path(config.problem.path).stem().string();
  return default_stem(config);
}

TwoStageProblem load_problem(const ExperimentConfig& config) { return build(config, SeedStream::TestScenarios, true); }

TwoStageProblem training_problem(const ExperimentConfig& config) {
  return build(config, SeedStream::TrainingScenarios, false);
}

// ---------------------------------------------------------------------------
// CSV artifacts

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "instance,method,iterations,gap_pct,cuts_total,cum_rmp_time_s\n";
  for (const SummaryRow& r : rows) {
    out << r.instance << ',' << r.method << ',' << r.iterations << ',' << fmt(r.gap_pct) << ',' << r.cuts_total
        << ',' << fmt(r.cum_rmp_time_s) << '\n';
  }
}

std::vector<SummaryRow> read_summary_csv(std::istream& in) {
  const auto idx = header_index(in, {"instance", "method", "iterations", "gap_pct", "cuts_total", "cum_rmp_time_s"});
  std::vector<SummaryRow> rows;
  std::string line;
  for (std::size_t n = 2; std::getline(in, line); ++n) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != idx.size()) throw ParseError("expected " + std::to_string(idx.size()) + " cells", n);
    SummaryRow r;
    r.instance = cells[idx.at("instance")];
    r.method = cells[idx.at("method")];
    r.iterations = to_count(cells[idx.at("iterations")], n);
    r.gap_pct = to_real(cells[idx.at("gap_pct")], n);
    r.cuts_total = to_count(cells[idx.at("cuts_total")], n);
    r.cum_rmp_time_s = to_real(cells[idx.at("cum_rmp_time_s")], n);
    rows.push_back(r);
  }
  return rows;
}

std::vector<IterationLog> read_iteration_log(std::istream& in) {
  const auto idx = header_index(in, {"iteration", "lower_bound", "upper_bound", "gap_pct", "cuts_added", "cuts_total"});
  auto has = [&](const char* k) { return idx.count(k) > 0; };
  std::vector<IterationLog> log;
  std::string line;
  for (std::size_t n = 2; std::getline(in, line); ++n) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != idx.size()) throw ParseError("expected " + std::to_string(idx.size()) + " cells", n);
    auto cell = [&](const char* k) -> const std::string& { return cells[idx.at(k)]; };
    IterationLog r;
    r.iteration = to_count(cell("iteration"), n);
    r.lower_bound = to_real(cell("lower_bound"), n);
    r.upper_bound = to_real(cell("upper_bound"), n);
    r.gap_pct = to_real(cell("gap_pct"), n);
    r.cuts_added = to_count(cell("cuts_added"), n);
    r.cuts_total = to_count(cell("cuts_total"), n);
    if (has("rmp_time_s")) r.rmp_time_s = to_real(cell("rmp_time_s"), n);
    if (has("cum_rmp_time_s")) r.cum_rmp_time_s = to_real(cell("cum_rmp_time_s"), n);
    if (has("sp_time_s")) r.sp_time_s = to_real(cell("sp_time_s"), n);
    if (has("cum_sp_time_s")) r.cum_sp_time_s = to_real(cell("cum_sp_time_s"), n);
    if (has("delta_value")) {
      r.fallback = cell("delta_value") == "fallback";
      if (!r.fallback) r.delta = to_real(cell("delta_value"), n);
    }
    if (has("retrain_count")) r.retrain_count = to_count(cell("retrain_count"), n);
    log.push_back(r);
  }
  return log;
}

void write_manifest_csv(std::ostream& out, const std::vector<ModelEntry>& entries) {
  out << "delta,file,C,gamma,cv_accuracy,train_accuracy\n";
  for (const ModelEntry& e : entries) {
    out << fmt(e.delta) << ',' << e.file << ',' << fmt(e.C) << ',' << fmt(e.gamma) << ',' << fmt(e.cv_accuracy) << ','
        << fmt(e.train_accuracy) << '\n';
  }
}

std::vector<ModelEntry> read_manifest_csv(std::istream& in) {
  const auto idx = header_index(in, {"delta", "file", "C", "gamma", "cv_accuracy", "train_accuracy"});
  std::vector<ModelEntry> entries;
  std::string line;
  for (std::size_t n = 2; std::getline(in, line); ++n) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != idx.size()) throw ParseError("expected " + std::to_string(idx.size()) + " cells", n);
    ModelEntry e;
    e.delta = to_real(cells[idx.at("delta")], n);
    e.file = cells[idx.at("file")];
    e.C = to_real(cells[idx.at("C")], n);
    e.gamma = to_real(cells[idx.at("gamma")], n);
    const std::string& cv = cells[idx.at("cv_accuracy")];
    e.cv_accuracy = cv == "nan" || cv == "-nan" ? std::numeric_limits<double>::quiet_NaN() : to_real(cv, n);
    e.train_accuracy = to_real(cells[idx.at("train_accuracy")], n);
    entries.push_back(e);
  }
  return entries;
}

// ---------------------------------------------------------------------------
// Pre-trained classifier

PretrainedClassifier::PretrainedClassifier(std::vector<double> deltas, std::vector<SvmModel> models)
    : schedule_(std::move(deltas)), models_(std::move(models)) {
  if (models_.size() != schedule_.values().size()) throw InputError("one model per delta required");
}

int PretrainedClassifier::classify(const CutObservation& obs) {
  const std::size_t i = std::min(schedule_.index(), models_.size() - 1);
  return models_[i].predict(feature_vector(obs));
}

bool PretrainedClassifier::advance() {
  if (!schedule_.advance()) return false;
  ++retrains_;
  return true;
}

// ---------------------------------------------------------------------------
// Commands

std::vector<std::string> cmd_generate(const ExperimentConfig& config) {
  config.validate();
  const fs::path dir(config.out);
  const std::string stem = instance_name(config);
  std::vector<std::string> written;
  ScenarioSet set;
  const std::uint64_t scen_seed = stream_seed(config, SeedStream::TestScenarios);
  if (config.problem.kind == "cflp") {
    const CflpData d = load_cflp(config);
    if (config.problem.path.empty()) {
      const fs::path f = dir / (stem + ".cap");
      std::ofstream out = open_out(f);
      write_orlib_cap(out, d);
      written.push_back(f.string());
    }
    set = sample_scenarios(d.nominal_demand(), config.scenarios.sigma_ratio, config.scenarios.count, scen_seed);
  } else {
    const CmndData d = load_cmnd(config);
    if (config.problem.path.empty()) {
      const fs::path f = dir / (stem + ".json");
      std::ofstream out = open_out(f);
      write_cmnd_json(out, d);
      written.push_back(f.string());
    }
    set = sample_scenarios(d.nominal_demand(), config.scenarios.sigma_ratio, config.scenarios.count, scen_seed);
  }
  const fs::path f = dir / (stem + "_scenarios.csv");
  std::ofstream out = open_out(f);
  write_scenarios_csv(out, set);
  written.push_back(f.string());
  return written;
}

std::vector<std::string> cmd_phase1(const ExperimentConfig& config) {
  config.validate();
  const TwoStageProblem p = training_problem(config);
  Phase1Options opts;
  opts.relax_master = config.training.relax_master;
  const std::size_t steps = config.training.steps ? config.training.steps : default_path_length(p);
  const auto rows = run_phase1(p, config.training.paths, steps, stream_seed(config, SeedStream::Phase1), opts);
  const fs::path f = config.training.rows.empty() ? fs::path(config.out) / (instance_name(config) + "_rows.csv")
                                                  : fs::path(config.training.rows);
  std::ofstream out = open_out(f);
  write_rows_csv(out, rows);
  return {f.string()};
}

std::vector<std::string> cmd_train(const ExperimentConfig& config) {
  config.validate();
  const auto rows = require_rows(config);
  const DeltaSchedule schedule = config.schedule();
  const fs::path manifest = config.classifier.models.empty() ? fs::path(config.out) / "models" / "manifest.csv"
                                                             : fs::path(config.classifier.models);
  const fs::path dir = manifest.parent_path();
  fs::create_directories(dir.empty() ? fs::path(".") : dir);
  std::vector<ModelEntry> entries;
  std::vector<std::string> written;
  const bool grid = !config.classifier.c_grid.empty();
  for (std::size_t i = 0; i < schedule.values().size(); ++i) {
    const double delta = schedule.values()[i];
    ModelEntry e;
    e.delta = delta;
    e.C = config.classifier.C;
    e.gamma = config.classifier.gamma;
    e.cv_accuracy = std::numeric_limits<double>::quiet_NaN();
    const auto labeled = transform_labels(rows, delta);
    if (grid) {
      const GridSearchResult g = grid_search(rows, delta, config.classifier.c_grid, config.classifier.gamma_grid,
                                             config.classifier.folds, stream_seed(config, SeedStream::Grid));
      e.C = g.C;
      e.gamma = g.gamma;
      e.cv_accuracy = g.accuracy;
    }
    SvmParams params;
    params.C = e.C;
    params.gamma = e.gamma;
    const SvmModel model = train_svm(labeled, params);
    e.train_accuracy = accuracy(model, labeled);
    std::ostringstream name;
    name << "model_" << std::setw(3) << std::setfill('0') << i << ".json";
    e.file = name.str();
    std::ofstream out = open_out(dir / e.file);
    write_model_json(out, model);
    written.push_back((dir / e.file).string());
    entries.push_back(e);
  }
  std::ofstream out = open_out(manifest);
  write_manifest_csv(out, entries);
  written.push_back(manifest.string());
  return written;
}

std::vector<std::string> cmd_eval(const ExperimentConfig& config) {
  config.validate();
  const std::string manifest = config.classifier.models.empty()
                                   ? (fs::path(config.out) / "models" / "manifest.csv").string()
                                   : config.classifier.models;
  const LoadedModels models = load_models(manifest);
  std::vector<std::pair<std::string, std::vector<TrainingRow>>> sets;
  if (!config.training.rows.empty()) sets.emplace_back("training", load_rows(config.training.rows));
  for (std::size_t v = 0; v < config.classifier.eval_rows.size(); ++v) {
    sets.emplace_back("validation_" + std::to_string(v + 1), load_rows(config.classifier.eval_rows[v]));
  }
  if (sets.empty()) throw InputError("eval needs a row store");
  const fs::path f = fs::path(config.out) / "accuracy.csv";
  std::ofstream out = open_out(f);
  out << "delta,dataset,rows,accuracy\n";
  for (std::size_t m = 0; m < models.models.size(); ++m) {
    for (const auto& [name, rows] : sets) {
      if (rows.empty()) throw InputError("row store '" + name + "' is empty");
      const auto labeled = transform_labels(rows, models.entries[m].delta);
      out << fmt(models.entries[m].delta) << ',' << name << ',' << rows.size() << ','
          << fmt(accuracy(models.models[m], labeled)) << '\n';
    }
  }
  return {f.string()};
}

std::vector<std::string> cmd_solve(const ExperimentConfig& config) {
  config.validate();
  const TwoStageProblem p = load_problem(config);
  const BendersOptions opts = benders_options(config);
  const bool learn = config.solve.method == "learnbd";
  BendersResult result;
  if (learn) {
    if (!config.classifier.models.empty()) {
      const LoadedModels models = load_models(config.classifier.models);
      std::vector<double> deltas;
      for (const ModelEntry& e : models.entries) deltas.push_back(e.delta);
      PretrainedClassifier classifier(deltas, models.models);
      result = run_learnbd(p, classifier, opts).benders;
    } else {
      SvmParams params;
      params.C = config.classifier.C;
      params.gamma = config.classifier.gamma;
      result = run_learnbd(p, require_rows(config), config.schedule(), params, opts).benders;
    }
  } else {
    result = run_classic_bd(p, opts);
  }
  const fs::path dir(config.out);
  const std::string tag = run_tag(config);
  const fs::path log_file = dir / (tag + "_iterations.csv");
  {
    std::ofstream out = open_out(log_file);
    write_iteration_log(out, result.state.log, learn);
  }
  SummaryRow row;
  row.instance = p.name;
  row.method = config.solve.method;
  row.iterations = result.iterations;
  row.gap_pct = result.gap_pct;
  row.cuts_total = result.cuts_total;
  row.cum_rmp_time_s = result.state.log.empty() ? 0.0 : result.state.log.back().cum_rmp_time_s;
  const fs::path summary_file = dir / (tag + "_summary.csv");
  std::ofstream out = open_out(summary_file);
  write_summary_csv(out, {row});
  return {log_file.string(), summary_file.string()};
}

Report build_report(const std::vector<std::string>& summary_paths) {
  Report report;
  for (const std::string& path : summary_paths) {
    std::ifstream in = open_in(path, "summary");
    const auto rows = read_summary_csv(in);
    if (rows.size() != 1) throw InputError("summary must hold one run: " + path);
    std::string log_path = path;
    const std::string suffix = "_summary.csv";
    if (log_path.size() < suffix.size() || log_path.compare(log_path.size() - suffix.size(), suffix.size(), suffix)) {
      throw InputError("summary file name must end in " + suffix + ": " + path);
    }
    log_path.replace(log_path.size() - suffix.size(), suffix.size(), "_iterations.csv");
    std::ifstream log_in = open_in(log_path, "iteration log");
    Report::Panel panel{rows[0].instance, rows[0].method, read_iteration_log(log_in)};

    SummaryRow total = rows[0];
    std::size_t cuts = 0;
    for (const IterationLog& r : panel.log) cuts += r.cuts_added;
    if (cuts != rows[0].cuts_total || panel.log.size() != rows[0].iterations) {
      throw InputError("summary disagrees with its iteration log: " + path);
    }
    total.cuts_total = cuts;
    total.iterations = panel.log.size();
    if (!panel.log.empty()) total.cum_rmp_time_s = panel.log.back().cum_rmp_time_s;
    report.table.push_back(total);
    report.panels.push_back(std::move(panel));
  }
  return report;
}

std::vector<std::string> cmd_report(const ExperimentConfig& config) {
  std::vector<std::string> paths = config.runs;
  if (paths.empty()) {
    if (!fs::is_directory(config.out)) throw InputError("no runs to report in " + config.out);
    for (const auto& entry : fs::directory_iterator(config.out)) {
      const std::string name = entry.path().filename().string();
      if (name.size() > 12 && name.rfind("_summary.csv") == name.size() - 12) paths.push_back(entry.path().string());
    }
    std::sort(paths.begin(), paths.end());
  }
  if (paths.empty()) throw InputError("no runs to report in " + config.out);
  const Report report = build_report(paths);
  const fs::path table = fs::path(config.out) / "report_table.csv";
  {
    std::ofstream out = open_out(table);
    write_summary_csv(out, report.table);
  }
  const fs::path panels = fs::path(config.out) / "report_panels.csv";
  std::ofstream out = open_out(panels);
  out << "instance,method,iteration,gap_pct,cum_rmp_time_s,cuts_total,cum_sp_time_s\n";
  for (const Report::Panel& p : report.panels) {
    for (const IterationLog& r : p.log) {
      out << p.instance << ',' << p.method << ',' << r.iteration << ',' << fmt(r.gap_pct) << ','
          << fmt(r.cum_rmp_time_s) << ',' << r.cuts_total << ',' << fmt(r.cum_sp_time_s) << '\n';
    }
  }
  return {table.string(), panels.string()};
}

}  // namespace learnbd
