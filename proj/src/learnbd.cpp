#include "learnbd/learnbd.hpp"

#include <chrono>
#include <cmath>

#include "learnbd/errors.hpp"

namespace learnbd {

DeltaSchedule::DeltaSchedule(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw InputError("delta schedule is empty");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) throw InputError("delta values must be finite");
    if (i > 0 && !(values_[i] < values_[i - 1])) throw InputError("delta schedule must be strictly decreasing");
  }
}

DeltaSchedule DeltaSchedule::standard() { return range(1.2, 0.7, 0.01); }

DeltaSchedule DeltaSchedule::range(double first, double last, double step) {
  if (!(step > 0.0) || first < last) throw InputError("delta range needs first >= last and a positive step");
  std::vector<double> v;
  for (std::size_t k = 0;; ++k) {
    const double d = first - static_cast<double>(k) * step;
    if (d < last - step / 2.0) break;
    v.push_back(std::round(d * 1e12) / 1e12);
  }
  return DeltaSchedule(std::move(v));
}

double DeltaSchedule::current() const { return exhausted() ? values_.back() : values_[index_]; }

bool DeltaSchedule::advance() {
  if (exhausted()) return false;
  ++index_;
  return !exhausted();
}

ConstantClassifier::ConstantClassifier(int label, DeltaSchedule schedule)
    : label_(label), schedule_(std::move(schedule)) {
  if (label != 1 && label != -1) throw InputError("classifier label must be -1 or 1");
}

bool ConstantClassifier::advance() {
  if (!schedule_.advance()) return false;
  ++retrains_;
  return true;
}

double ConstantClassifier::delta() const { return schedule_.current(); }

SvmCutClassifier::SvmCutClassifier(std::vector<TrainingRow> rows, DeltaSchedule schedule, SvmParams params,
                                   FeatureMap train_features, FeatureMap solve_features)
    : rows_(std::move(rows)),
      schedule_(std::move(schedule)),
      params_(params),
      train_features_(std::move(train_features)),
      solve_features_(std::move(solve_features)) {
  if (rows_.empty()) throw InputError("phase-1 rows required");
}

void SvmCutClassifier::ensure_model() {
  const std::size_t idx = schedule_.index();
  if (cache_.count(idx)) return;
  const auto start = std::chrono::steady_clock::now();
  std::vector<Sample> samples;
  for (const LabeledRow& r : transform_labels(rows_, schedule_.current())) {
    samples.push_back(Sample{train_features_(r.features), r.label});
  }
  cache_.emplace(idx, train_svm(samples, params_));
  retrain_time_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

const SvmModel& SvmCutClassifier::model() {
  ensure_model();
  return cache_.at(schedule_.index());
}

int SvmCutClassifier::classify(const CutObservation& obs) { return model().predict(solve_features_(obs)); }

bool SvmCutClassifier::advance() {
  if (!schedule_.advance()) return false;
  ++retrains_;
  ensure_model();
  return true;
}

double SvmCutClassifier::delta() const { return schedule_.current(); }

namespace {

class ClassifierSelector final : public CutSelector {
 public:
  explicit ClassifierSelector(CutClassifier& classifier) : classifier_(classifier) {}

  std::vector<std::size_t> select(const std::vector<Cut>& candidates, const BendersState&) override {
    std::vector<std::size_t> chosen;
    if (candidates.empty()) return chosen;
    while (!fallback_) {
      for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (classifier_.classify(candidates[i].features) == 1) chosen.push_back(i);
      }
      if (!chosen.empty()) return chosen;
      if (!classifier_.advance()) fallback_ = true;
    }
    for (std::size_t i = 0; i < candidates.size(); ++i) chosen.push_back(i);
    return chosen;
  }

  void annotate(IterationLog& row) const override {
    row.delta = classifier_.delta();
    row.fallback = fallback_;
    row.retrain_count = classifier_.retrain_count();
  }

  bool fallback() const { return fallback_; }

 private:
  CutClassifier& classifier_;
  bool fallback_ = false;
};

}  // namespace

std::vector<DeltaSpan> delta_trace(const std::vector<IterationLog>& log) {
  std::vector<DeltaSpan> spans;
  for (const IterationLog& r : log) {
    if (!spans.empty() && spans.back().delta == r.delta && spans.back().fallback == r.fallback) {
      spans.back().last_iteration = r.iteration;
    } else {
      spans.push_back(DeltaSpan{r.delta, r.fallback, r.iteration, r.iteration});
    }
  }
  return spans;
}

LearnBdResult run_learnbd(const TwoStageProblem& problem, CutClassifier& classifier, const BendersOptions& options) {
  ClassifierSelector selector(classifier);
  LearnBdResult out;
  out.benders = run_benders(problem, options, selector);
  out.retrain_count = classifier.retrain_count();
  out.retrain_time_s = classifier.retrain_time_s();
  out.fallback_used = selector.fallback();
  out.delta_trace = delta_trace(out.benders.state.log);
  return out;
}

LearnBdResult run_learnbd(const TwoStageProblem& problem, const std::vector<TrainingRow>& rows,
                          const DeltaSchedule& schedule, const SvmParams& params, const BendersOptions& options) {
  if (rows.empty()) throw InputError("phase-1 rows required");
  SvmCutClassifier classifier(rows, schedule, params);
  return run_learnbd(problem, classifier, options);
}

}  // namespace learnbd
