#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <vector>

#include "learnbd/phase1.hpp"
#include "learnbd/problems.hpp"

namespace learnbd {

struct Sample {
  std::vector<double> features;
  int label = 1;  // −1 or +1
};

/// (VL, NC) feature vectors with their labels.
std::vector<Sample> to_samples(const std::vector<LabeledRow>& rows);
std::vector<double> feature_vector(const CutObservation& obs);

/// Per-feature z-score; a constant feature keeps scale 1.
struct FeatureScaler {
  std::vector<double> mean;
  std::vector<double> scale;

  static FeatureScaler fit(const std::vector<Sample>& samples);
  static FeatureScaler identity(std::size_t dimension);
  std::vector<double> apply(const std::vector<double>& x) const;
};

/// exp(−γ‖a − b‖²).
double rbf_kernel(const std::vector<double>& a, const std::vector<double>& b, double gamma);

struct SvmParams {
  double C = 1.0;
  double gamma = 1.0;
  bool standardize = true;
  double tolerance = 1e-6;
  std::size_t max_iterations = 100000;
};

struct SvmModel {
  std::size_t dimension = 0;
  double C = 1.0;
  double gamma = 1.0;
  double b = 0.0;
  FeatureScaler scaler;
  std::vector<std::vector<double>> support_vectors;  // already scaled
  std::vector<double> alpha;                         // a_s in (0, C]
  std::vector<double> beta;                          // l_s · a_s
  bool degenerate = false;
  int constant_label = 1;

  /// u = Σ β_s K(scaled x, o_s) + b.
  double decision_value(const std::vector<double>& x) const;
  /// sign(u) with u = 0 mapped to +1.
  int predict(const std::vector<double>& x) const;
};

struct SvmFit {
  SvmModel model;
  std::vector<double> alpha;  // one per training sample, zeros included
  std::vector<std::vector<double>> scaled;  // training features after scaling
  double dual_objective = 0.0;
  std::size_t iterations = 0;
  bool converged = true;
};

/// SMO on max Σa − ½ ΣΣ l l' a a' K s.t. Σ a l = 0, 0 <= a <= C.
SvmFit train_svm_detailed(const std::vector<Sample>& samples, const SvmParams& params);
SvmModel train_svm(const std::vector<Sample>& samples, const SvmParams& params);
SvmModel train_svm(const std::vector<LabeledRow>& rows, const SvmParams& params);

inline double hinge_loss(double u, int label) { return u * label >= 1.0 ? 0.0 : 1.0 - label * u; }

/// Percentage of samples whose predicted label matches.
double accuracy(const SvmModel& model, const std::vector<Sample>& samples);
double accuracy(const SvmModel& model, const std::vector<LabeledRow>& rows);

struct GridSearchResult {
  double C = 0.0;
  double gamma = 0.0;
  double accuracy = 0.0;  // mean validation accuracy
};

/// Stratified k-fold cross-validation over C × γ. Ties go to the smaller C,
/// then the smaller γ.
GridSearchResult grid_search(const std::vector<Sample>& samples, std::vector<double> c_grid,
                             std::vector<double> gamma_grid, std::size_t folds, std::uint64_t seed,
                             const SvmParams& base = {});
GridSearchResult grid_search(const std::vector<TrainingRow>& rows, double delta, std::vector<double> c_grid,
                             std::vector<double> gamma_grid, std::size_t folds, std::uint64_t seed,
                             const SvmParams& base = {});

/// Problem statistics for moving a classifier between CFLP instances.
struct TransferStats {
  double total_demand = 0.0;     // Σ d̄_j
  double mean_unit_cost = 0.0;   // c̄
  double mean_setup_cost = 0.0;  // k̄
  std::size_t facilities = 0;
  std::size_t customers = 0;
};
TransferStats cflp_transfer_stats(const CflpData& data);

/// (VL / (Σd̄·c̄/k̄), NC / (|W|·|F|)).
std::vector<double> scale_features_transfer(const CutObservation& obs, const TransferStats& stats);

void write_model_json(std::ostream& out, const SvmModel& model);
SvmModel read_model_json(std::istream& in);

}  // namespace learnbd
