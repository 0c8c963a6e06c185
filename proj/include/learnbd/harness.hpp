#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "learnbd/benders.hpp"
#include "learnbd/learnbd.hpp"
#include "learnbd/phase1.hpp"
#include "learnbd/problems.hpp"
#include "learnbd/svm.hpp"

namespace learnbd {

struct ProblemSpec {
  std::string kind = "cflp";  // cflp | cmnd
  std::string path;           // cap file or CMND JSON; empty: generate
  std::string name;           // defaults to the file stem or "<kind>-<seed>"
  CflpGeneratorSpec cflp;
  CmndGeneratorSpec cmnd;
};

struct ScenarioSpec {
  std::size_t count = 20;
  double sigma_ratio = 0.1;
  std::string path;  // scenario CSV; empty: sample
};

struct TrainingSpec {
  std::size_t paths = kDefaultPaths;
  std::size_t steps = 0;  // 0: 2|Ω|
  bool relax_master = false;
  std::string rows;       // row store written by phase1, read by train/eval/solve
};

struct ClassifierSpec {
  double C = 1.0;
  double gamma = 1.0;
  std::vector<double> c_grid;  // both grids non-empty: grid search per Δ
  std::vector<double> gamma_grid;
  std::size_t folds = 5;
  std::vector<double> deltas;  // empty: 1.20 down to 0.70
  std::string models;          // model manifest written by train
  std::vector<std::string> eval_rows;  // validation row stores for eval
};

struct SolveSpec {
  std::string method = "bd";  // bd | learnbd
  double tol_pct = 1e-2;
  double time_limit_s = 3600.0;
  std::size_t max_iterations = 10000;
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  ProblemSpec problem;
  ScenarioSpec scenarios;
  TrainingSpec training;
  ClassifierSpec classifier;
  SolveSpec solve;
  std::string out = "out";
  std::vector<std::string> runs;  // summary files for report; empty: scan `out`

  /// δ > 0, positive limits, known kinds and methods.
  void validate() const;
  DeltaSchedule schedule() const;
};

/// Fields absent from the JSON keep their defaults.
ExperimentConfig load_config(std::istream& in);
ExperimentConfig load_config_file(const std::string& path);
void write_config(std::ostream& out, const ExperimentConfig& config);

/// Independent streams derived from the top-level seed.
enum class SeedStream : std::uint64_t { Instance = 1, TestScenarios = 2, TrainingScenarios = 3, Phase1 = 4, Grid = 5 };
std::uint64_t stream_seed(const ExperimentConfig& config, SeedStream stream);

std::string instance_name(const ExperimentConfig& config);
/// Testing problem: instance plus the scenario file or a sampled test set.
TwoStageProblem load_problem(const ExperimentConfig& config);
/// Same instance with an independent scenario sample.
TwoStageProblem training_problem(const ExperimentConfig& config);

struct SummaryRow {
  std::string instance;
  std::string method;
  std::size_t iterations = 0;
  double gap_pct = 0.0;
  std::size_t cuts_total = 0;
  double cum_rmp_time_s = 0.0;
};

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);
std::vector<SummaryRow> read_summary_csv(std::istream& in);
std::vector<IterationLog> read_iteration_log(std::istream& in);

struct ModelEntry {
  double delta = 0.0;
  std::string file;  // relative to the manifest
  double C = 0.0;
  double gamma = 0.0;
  double cv_accuracy = 0.0;  // NaN without grid search
  double train_accuracy = 0.0;
};

void write_manifest_csv(std::ostream& out, const std::vector<ModelEntry>& entries);
std::vector<ModelEntry> read_manifest_csv(std::istream& in);

/// Serves pre-trained models along the manifest's Δ order.
class PretrainedClassifier final : public CutClassifier {
 public:
  PretrainedClassifier(std::vector<double> deltas, std::vector<SvmModel> models);
  int classify(const CutObservation& obs) override;
  bool advance() override;
  double delta() const override { return schedule_.current(); }
  std::size_t retrain_count() const override { return retrains_; }

 private:
  DeltaSchedule schedule_;
  std::vector<SvmModel> models_;
  std::size_t retrains_ = 0;
};

// Each command writes under config.out and returns the paths it wrote.
std::vector<std::string> cmd_generate(const ExperimentConfig& config);
std::vector<std::string> cmd_phase1(const ExperimentConfig& config);
std::vector<std::string> cmd_train(const ExperimentConfig& config);
std::vector<std::string> cmd_eval(const ExperimentConfig& config);
std::vector<std::string> cmd_solve(const ExperimentConfig& config);
std::vector<std::string> cmd_report(const ExperimentConfig& config);

/// Table and panel data assembled from summaries and their iteration logs.
struct Report {
  std::vector<SummaryRow> table;
  struct Panel {
    std::string instance;
    std::string method;
    std::vector<IterationLog> log;
  };
  std::vector<Panel> panels;
};

/// Totals come from the logs; a summary that disagrees with its log is an
/// input error.
Report build_report(const std::vector<std::string>& summary_paths);

}  // namespace learnbd
