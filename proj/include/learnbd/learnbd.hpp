#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "learnbd/benders.hpp"
#include "learnbd/phase1.hpp"
#include "learnbd/svm.hpp"

namespace learnbd {

/// Strictly decreasing Δ values walked from the front.
class DeltaSchedule {
 public:
  explicit DeltaSchedule(std::vector<double> values);
  /// 1.20, 1.19, ..., 0.70.
  static DeltaSchedule standard();
  /// first, first − step, ... down to last (inclusive within step/2).
  static DeltaSchedule range(double first, double last, double step);

  double current() const;
  std::size_t index() const { return index_; }
  bool exhausted() const { return index_ >= values_.size(); }
  /// Moves to the next value; false once past the end.
  bool advance();
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> values_;
  std::size_t index_ = 0;
};

class CutClassifier {
 public:
  virtual ~CutClassifier() = default;
  virtual int classify(const CutObservation& obs) = 0;
  /// Relabel with the next Δ and retrain; false when the schedule is spent.
  virtual bool advance() = 0;
  virtual double delta() const = 0;
  virtual std::size_t retrain_count() const = 0;
  virtual double retrain_time_s() const { return 0.0; }
};

/// Always answers `label`; advance() walks its schedule without training.
class ConstantClassifier final : public CutClassifier {
 public:
  ConstantClassifier(int label, DeltaSchedule schedule);
  int classify(const CutObservation&) override { return label_; }
  bool advance() override;
  double delta() const override;
  std::size_t retrain_count() const override { return retrains_; }

 private:
  int label_;
  DeltaSchedule schedule_;
  std::size_t retrains_ = 0;
};

using FeatureMap = std::function<std::vector<double>(const CutObservation&)>;

/// SVM per Δ trained lazily from the phase-1 rows and cached.
class SvmCutClassifier final : public CutClassifier {
 public:
  SvmCutClassifier(std::vector<TrainingRow> rows, DeltaSchedule schedule, SvmParams params,
                   FeatureMap train_features = feature_vector, FeatureMap solve_features = feature_vector);
  int classify(const CutObservation& obs) override;
  bool advance() override;
  double delta() const override;
  std::size_t retrain_count() const override { return retrains_; }
  double retrain_time_s() const override { return retrain_time_; }
  const SvmModel& model();

 private:
  void ensure_model();

  std::vector<TrainingRow> rows_;
  DeltaSchedule schedule_;
  SvmParams params_;
  FeatureMap train_features_;
  FeatureMap solve_features_;
  std::map<std::size_t, SvmModel> cache_;
  std::size_t retrains_ = 0;
  double retrain_time_ = 0.0;
};

/// Iterations spent under one Δ (or in fallback).
struct DeltaSpan {
  double delta = 0.0;
  bool fallback = false;
  std::size_t first_iteration = 0;
  std::size_t last_iteration = 0;
};

struct LearnBdResult {
  BendersResult benders;
  std::size_t retrain_count = 0;
  double retrain_time_s = 0.0;
  bool fallback_used = false;
  std::vector<DeltaSpan> delta_trace;
};

/// Classifier-filtered Benders loop. When no violated cut is accepted the
/// classifier retrains with the next Δ without a new master solve; once the
/// schedule is spent every violated cut is added.
LearnBdResult run_learnbd(const TwoStageProblem& problem, CutClassifier& classifier,
                          const BendersOptions& options = {});

LearnBdResult run_learnbd(const TwoStageProblem& problem, const std::vector<TrainingRow>& rows,
                          const DeltaSchedule& schedule, const SvmParams& params,
                          const BendersOptions& options = {});

std::vector<DeltaSpan> delta_trace(const std::vector<IterationLog>& log);

}  // namespace learnbd
