#include "learnbd/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "json.hpp"
#include "learnbd/errors.hpp"

namespace learnbd {

using nlohmann::json;

std::vector<double> feature_vector(const CutObservation& obs) {
  return {obs.violation, static_cast<double>(obs.prior_cuts)};
}

std::vector<Sample> to_samples(const std::vector<LabeledRow>& rows) {
  std::vector<Sample> out;
  out.reserve(rows.size());
  for (const LabeledRow& r : rows) out.push_back(Sample{feature_vector(r.features), r.label});
  return out;
}

FeatureScaler FeatureScaler::identity(std::size_t dimension) {
  return FeatureScaler{std::vector<double>(dimension, 0.0), std::vector<double>(dimension, 1.0)};
}

FeatureScaler FeatureScaler::fit(const std::vector<Sample>& samples) {
  const std::size_t dim = samples.front().features.size();
  FeatureScaler s = identity(dim);
  const double n = static_cast<double>(samples.size());
  for (const Sample& x : samples) {
    for (std::size_t k = 0; k < dim; ++k) s.mean[k] += x.features[k] / n;
  }
  std::vector<double> var(dim, 0.0);
  for (const Sample& x : samples) {
    for (std::size_t k = 0; k < dim; ++k) var[k] += (x.features[k] - s.mean[k]) * (x.features[k] - s.mean[k]) / n;
  }
  for (std::size_t k = 0; k < dim; ++k) s.scale[k] = var[k] > 1e-24 ? std::sqrt(var[k]) : 1.0;
  return s;
}

std::vector<double> FeatureScaler::apply(const std::vector<double>& x) const {
  if (x.size() != mean.size()) throw InputError("feature dimension differs from the scaler");
  std::vector<double> out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = (x[k] - mean[k]) / scale[k];
  return out;
}

double rbf_kernel(const std::vector<double>& a, const std::vector<double>& b, double gamma) {
  if (a.size() != b.size()) throw InputError("kernel arguments differ in dimension");
  double d2 = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d2 += (a[k] - b[k]) * (a[k] - b[k]);
  return std::exp(-gamma * d2);
}

double SvmModel::decision_value(const std::vector<double>& x) const {
  if (x.size() != dimension) throw InputError("feature dimension differs from the model");
  if (degenerate) return static_cast<double>(constant_label);
  const std::vector<double> z = scaler.apply(x);
  double u = b;
  for (std::size_t s = 0; s < support_vectors.size(); ++s) u += beta[s] * rbf_kernel(z, support_vectors[s], gamma);
  return u;
}

int SvmModel::predict(const std::vector<double>& x) const { return decision_value(x) >= 0.0 ? 1 : -1; }

namespace {

void check_samples(const std::vector<Sample>& samples) {
  if (samples.empty()) throw InputError("SVM training needs at least one row");
  const std::size_t dim = samples.front().features.size();
  for (const Sample& s : samples) {
    if (s.features.size() != dim) throw InputError("training rows differ in dimension");
    if (s.label != 1 && s.label != -1) throw InputError("labels must be -1 or 1");
    for (double v : s.features) {
      if (!std::isfinite(v)) throw InputError("non-finite feature value");
    }
  }
}

}  // namespace

SvmFit train_svm_detailed(const std::vector<Sample>& samples, const SvmParams& params) {
  check_samples(samples);
  if (!(params.C > 0.0) || !(params.gamma > 0.0)) throw InputError("C and gamma must be positive");
  const std::size_t n = samples.size();
  const std::size_t dim = samples.front().features.size();

  SvmFit fit;
  SvmModel& m = fit.model;
  m.dimension = dim;
  m.C = params.C;
  m.gamma = params.gamma;
  m.scaler = params.standardize ? FeatureScaler::fit(samples) : FeatureScaler::identity(dim);
  fit.alpha.assign(n, 0.0);
  fit.scaled.reserve(n);
  for (const Sample& s : samples) fit.scaled.push_back(m.scaler.apply(s.features));

  const bool has_pos = std::any_of(samples.begin(), samples.end(), [](const Sample& s) { return s.label == 1; });
  const bool has_neg = std::any_of(samples.begin(), samples.end(), [](const Sample& s) { return s.label == -1; });
  if (!has_pos || !has_neg) {
    m.degenerate = true;
    m.constant_label = has_pos ? 1 : -1;
    m.b = m.constant_label;
    return fit;
  }

  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = samples[i].label;
  std::vector<double> q(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double v = y[i] * y[j] * rbf_kernel(fit.scaled[i], fit.scaled[j], params.gamma);
      q[i * n + j] = v;
      q[j * n + i] = v;
    }
  }

  const double c = params.C;
  std::vector<double>& a = fit.alpha;
  std::vector<double> g(n, -1.0);  // gradient of ½aᵀQa − eᵀa
  const auto in_up = [&](std::size_t t) { return (y[t] > 0 && a[t] < c) || (y[t] < 0 && a[t] > 0.0); };
  const auto in_low = [&](std::size_t t) { return (y[t] > 0 && a[t] > 0.0) || (y[t] < 0 && a[t] < c); };
  constexpr double kTau = 1e-12;

  fit.converged = false;
  for (fit.iterations = 0; fit.iterations < params.max_iterations; ++fit.iterations) {
    double gmax = -std::numeric_limits<double>::infinity();
    double gmin = std::numeric_limits<double>::infinity();
    std::size_t i = n, j = n;
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -y[t] * g[t];
      if (in_up(t) && v > gmax) {
        gmax = v;
        i = t;
      }
      if (in_low(t) && v < gmin) {
        gmin = v;
        j = t;
      }
    }
    if (i == n || j == n || gmax - gmin <= params.tolerance) {
      fit.converged = true;
      break;
    }

    const double old_ai = a[i];
    const double old_aj = a[j];
    const double* qi = &q[i * n];
    const double* qj = &q[j * n];
    if (y[i] != y[j]) {
      double quad = qi[i] + qj[j] + 2.0 * qi[j];
      if (quad <= 0.0) quad = kTau;
      const double delta = (-g[i] - g[j]) / quad;
      const double diff = a[i] - a[j];
      a[i] += delta;
      a[j] += delta;
      if (diff > 0.0) {
        if (a[j] < 0.0) {
          a[j] = 0.0;
          a[i] = diff;
        }
      } else if (a[i] < 0.0) {
        a[i] = 0.0;
        a[j] = -diff;
      }
      if (diff > 0.0) {
        if (a[i] > c) {
          a[i] = c;
          a[j] = c - diff;
        }
      } else if (a[j] > c) {
        a[j] = c;
        a[i] = c + diff;
      }
    } else {
      double quad = qi[i] + qj[j] - 2.0 * qi[j];
      if (quad <= 0.0) quad = kTau;
      const double delta = (g[i] - g[j]) / quad;
      const double sum = a[i] + a[j];
      a[i] -= delta;
      a[j] += delta;
      if (sum > c) {
        if (a[i] > c) {
          a[i] = c;
          a[j] = sum - c;
        }
      } else if (a[j] < 0.0) {
        a[j] = 0.0;
        a[i] = sum;
      }
      if (sum > c) {
        if (a[j] > c) {
          a[j] = c;
          a[i] = sum - c;
        }
      } else if (a[i] < 0.0) {
        a[i] = 0.0;
        a[j] = sum;
      }
    }
    const double di = a[i] - old_ai;
    const double dj = a[j] - old_aj;
    for (std::size_t t = 0; t < n; ++t) g[t] += q[t * n + i] * di + q[t * n + j] * dj;
  }

  // Intercept: average over free multipliers, else midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * g[t];
    if (a[t] >= c) {
      if (y[t] < 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (a[t] <= 0.0) {
      if (y[t] > 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;
  m.b = -rho;

  double linear = 0.0;
  double quadratic = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    linear += a[t];
    quadratic += a[t] * (g[t] + 1.0);  // (Qa)_t = g_t + 1
  }
  fit.dual_objective = linear - 0.5 * quadratic;

  for (std::size_t t = 0; t < n; ++t) {
    if (a[t] <= 0.0) continue;
    m.support_vectors.push_back(fit.scaled[t]);
    m.alpha.push_back(a[t]);
    m.beta.push_back(y[t] * a[t]);
  }
  return fit;
}

SvmModel train_svm(const std::vector<Sample>& samples, const SvmParams& params) {
  return train_svm_detailed(samples, params).model;
}

SvmModel train_svm(const std::vector<LabeledRow>& rows, const SvmParams& params) {
  return train_svm(to_samples(rows), params);
}

double accuracy(const SvmModel& model, const std::vector<Sample>& samples) {
  if (samples.empty()) throw InputError("accuracy needs at least one row");
  std::size_t hits = 0;
  for (const Sample& s : samples) hits += model.predict(s.features) == s.label ? 1 : 0;
  return 100.0 * static_cast<double>(hits) / static_cast<double>(samples.size());
}

double accuracy(const SvmModel& model, const std::vector<LabeledRow>& rows) {
  return accuracy(model, to_samples(rows));
}

GridSearchResult grid_search(const std::vector<Sample>& samples, std::vector<double> c_grid,
                             std::vector<double> gamma_grid, std::size_t folds, std::uint64_t seed,
                             const SvmParams& base) {
  check_samples(samples);
  if (folds < 2) throw InputError("grid search needs at least two folds");
  if (samples.size() < folds) throw InputError("fewer rows than folds");
  if (c_grid.empty() || gamma_grid.empty()) throw InputError("empty parameter grid");
  std::sort(c_grid.begin(), c_grid.end());
  std::sort(gamma_grid.begin(), gamma_grid.end());

  // Stratified assignment: shuffle each class, deal indices round-robin.
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < samples.size(); ++i) (samples[i].label > 0 ? pos : neg).push_back(i);
  std::shuffle(pos.begin(), pos.end(), rng);
  std::shuffle(neg.begin(), neg.end(), rng);
  std::vector<std::size_t> fold_of(samples.size());
  std::size_t next = 0;
  for (const auto* group : {&pos, &neg}) {
    for (std::size_t idx : *group) fold_of[idx] = next++ % folds;
  }

  GridSearchResult best;
  best.accuracy = -1.0;
  for (double c : c_grid) {
    for (double gamma : gamma_grid) {
      SvmParams p = base;
      p.C = c;
      p.gamma = gamma;
      double total = 0.0;
      for (std::size_t f = 0; f < folds; ++f) {
        std::vector<Sample> train, valid;
        for (std::size_t i = 0; i < samples.size(); ++i) (fold_of[i] == f ? valid : train).push_back(samples[i]);
        total += accuracy(train_svm(train, p), valid);
      }
      const double mean = total / static_cast<double>(folds);
      if (mean > best.accuracy + 1e-12) best = GridSearchResult{c, gamma, mean};
    }
  }
  return best;
}

GridSearchResult grid_search(const std::vector<TrainingRow>& rows, double delta, std::vector<double> c_grid,
                             std::vector<double> gamma_grid, std::size_t folds, std::uint64_t seed,
                             const SvmParams& base) {
  return grid_search(to_samples(transform_labels(rows, delta)), std::move(c_grid), std::move(gamma_grid), folds,
                     seed, base);
}

TransferStats cflp_transfer_stats(const CflpData& data) {
  data.validate();
  TransferStats s;
  s.facilities = data.facilities.size();
  s.customers = data.customers.size();
  for (const Customer& c : data.customers) s.total_demand += c.demand;
  for (double c : data.unit_cost.data) s.mean_unit_cost += c;
  s.mean_unit_cost /= static_cast<double>(data.unit_cost.data.size());
  for (const Facility& f : data.facilities) s.mean_setup_cost += f.setup_cost;
  s.mean_setup_cost /= static_cast<double>(s.facilities);
  return s;
}

std::vector<double> scale_features_transfer(const CutObservation& obs, const TransferStats& stats) {
  if (!(stats.mean_setup_cost > 0.0)) throw InputError("transfer scaling needs a positive mean setup cost");
  const double vl_scale = stats.total_demand * stats.mean_unit_cost / stats.mean_setup_cost;
  const double nc_scale = static_cast<double>(stats.facilities * stats.customers);
  if (!(vl_scale > 0.0) || !(nc_scale > 0.0)) throw InputError("transfer scaler is zero");
  return {obs.violation / vl_scale, static_cast<double>(obs.prior_cuts) / nc_scale};
}

void write_model_json(std::ostream& out, const SvmModel& m) {
  json doc;
  doc["dimension"] = m.dimension;
  doc["C"] = m.C;
  doc["gamma"] = m.gamma;
  doc["b"] = m.b;
  doc["degenerate"] = m.degenerate;
  doc["constant_label"] = m.constant_label;
  doc["scaler"] = {{"mean", m.scaler.mean}, {"scale", m.scaler.scale}};
  doc["support_vectors"] = m.support_vectors;
  doc["alpha"] = m.alpha;
  doc["beta"] = m.beta;
  out << doc.dump(2) << '\n';
}

SvmModel read_model_json(std::istream& in) {
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t byte = std::min<std::size_t>(e.byte, text.size());
    throw ParseError(e.what(), 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n')));
  }
  SvmModel m;
  try {
    m.dimension = doc.at("dimension").get<std::size_t>();
    m.C = doc.at("C").get<double>();
    m.gamma = doc.at("gamma").get<double>();
    m.b = doc.at("b").get<double>();
    m.degenerate = doc.at("degenerate").get<bool>();
    m.constant_label = doc.at("constant_label").get<int>();
    m.scaler.mean = doc.at("scaler").at("mean").get<std::vector<double>>();
    m.scaler.scale = doc.at("scaler").at("scale").get<std::vector<double>>();
    m.support_vectors = doc.at("support_vectors").get<std::vector<std::vector<double>>>();
    m.alpha = doc.at("alpha").get<std::vector<double>>();
    m.beta = doc.at("beta").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed model: ") + e.what());
  }
  if (m.scaler.mean.size() != m.dimension || m.scaler.scale.size() != m.dimension ||
      m.alpha.size() != m.support_vectors.size() || m.beta.size() != m.support_vectors.size()) {
    throw InputError("malformed model: inconsistent sizes");
  }
  for (const auto& sv : m.support_vectors) {
    if (sv.size() != m.dimension) throw InputError("malformed model: support vector dimension");
  }
  return m;
}

}  // namespace learnbd
