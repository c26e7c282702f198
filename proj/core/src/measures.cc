// Copyright 2026 The infoverse Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "infoverse/measures.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "infoverse/error.h"

namespace infoverse {
namespace measures {
namespace {

double SquaredDistance(const Matrix& points, int64_t i, int64_t j) {
  double sum = 0.0;
  for (int64_t d = 0; d < points.cols(); ++d) {
    const double diff = points(i, d) - points(j, d);
    sum += diff * diff;
  }
  return sum;
}

// Keeps the K smallest values seen so far in ascending order.
class SmallestK {
 public:
  explicit SmallestK(int k) : k_(k) { values_.reserve(k); }

  void Push(double v) {
    if (static_cast<int>(values_.size()) == k_) {
      if (v >= values_.back()) return;
      values_.pop_back();
    }
    values_.insert(std::upper_bound(values_.begin(), values_.end(), v), v);
  }
  int count() const { return static_cast<int>(values_.size()); }
  double Kth() const { return values_.back(); }

 private:
  int k_;
  std::vector<double> values_;
};

bool Eligible(Candidates rule, std::span<const int32_t> groups, int64_t query,
              int64_t other) {
  switch (rule) {
    case Candidates::kAll: return true;
    case Candidates::kSameGroup: return groups[query] == groups[other];
    case Candidates::kOtherGroup: return groups[query] != groups[other];
  }
  return false;
}

double PopulationStd(std::span<const double> values, double mean) {
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size()));
}

// Non-finite log-probabilities (a float32 zero) are read as ln(kProbFloor).
double SafeLog(double lp) { return std::isfinite(lp) ? lp : std::log(kProbFloor); }

double ErrorNorm(const Matrix& probs, int64_t row, int32_t label) {
  double ss = 0.0;
  for (int64_t k = 0; k < probs.cols(); ++k) {
    const double r = probs(row, k) - (k == label ? 1.0 : 0.0);
    ss += r * r;
  }
  return std::sqrt(ss);
}

void CheckLabels(std::span<const int32_t> labels, int64_t n) {
  if (static_cast<int64_t>(labels.size()) != n) {
    throw Error(ErrorCode::kShapeMismatch,
                "expected " + std::to_string(n) + " labels, got " +
                    std::to_string(labels.size()));
  }
}

}  // namespace

Vector KnnDistance(const Matrix& points, int k, Candidates rule,
                   std::span<const int32_t> groups) {
  const int64_t n = points.rows();
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "K must be >= 1");
  if (rule != Candidates::kAll) CheckLabels(groups, n);

  std::vector<SmallestK> best(static_cast<size_t>(n), SmallestK(k));
  for (int64_t i = 0; i < n; ++i) {
    for (int64_t j = i + 1; j < n; ++j) {
      // Group eligibility is symmetric, so each pair is evaluated once.
      if (!Eligible(rule, groups, i, j)) continue;
      const double d2 = SquaredDistance(points, i, j);
      best[i].Push(d2);
      best[j].Push(d2);
    }
  }
  Vector out(n);
  for (int64_t i = 0; i < n; ++i) {
    if (best[i].count() < k) {
      throw Error(ErrorCode::kTooFewCandidates,
                  "sample " + std::to_string(i) + " has " +
                      std::to_string(best[i].count()) +
                      " candidate neighbours, K=" + std::to_string(k),
                  i);
    }
    out[i] = std::sqrt(best[i].Kth());
  }
  return out;
}

double Entropy(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log(std::max(p, kProbFloor));
  }
  return h;
}

double RowEntropy(const Matrix& probs, int64_t row) {
  double h = 0.0;
  for (int64_t k = 0; k < probs.cols(); ++k) {
    const double p = probs(row, k);
    if (p > 0.0) h -= p * std::log(std::max(p, kProbFloor));
  }
  return h;
}

int32_t ArgMax(const Matrix& probs, int64_t row) {
  int32_t best = 0;
  for (int64_t k = 1; k < probs.cols(); ++k) {
    if (probs(row, k) > probs(row, best)) best = static_cast<int32_t>(k);
  }
  return best;
}

StaticScores StaticConfidenceEntropy(const Matrix& probs,
                                     std::span<const int32_t> labels) {
  const int64_t n = probs.rows();
  CheckLabels(labels, n);
  StaticScores s{Vector(n), Vector(n)};
  for (int64_t i = 0; i < n; ++i) {
    s.confidence[i] = probs(i, labels[i]);
    s.entropy[i] = RowEntropy(probs, i);
  }
  return s;
}

Vector BadgeScore(const Matrix& probs, std::span<const int32_t> labels,
                  const Matrix& clf_embedding) {
  const int64_t n = probs.rows();
  CheckLabels(labels, n);
  Vector out(n);
  for (int64_t i = 0; i < n; ++i) {
    out[i] = ErrorNorm(probs, i, labels[i]) * clf_embedding.row(i).norm();
  }
  return out;
}

Densities ComputeDensities(const Matrix& clf_embedding,
                           const Matrix* sent_embedding,
                           std::span<const int32_t> labels, int k) {
  Densities d;
  d.task_density = -KnnDistance(clf_embedding, k);
  if (!labels.empty()) {
    const Vector same = KnnDistance(clf_embedding, k, Candidates::kSameGroup, labels);
    const Vector other =
        KnnDistance(clf_embedding, k, Candidates::kOtherGroup, labels);
    d.relative_density = other - same;
  }
  if (sent_embedding != nullptr) {
    d.semantic_density = -KnnDistance(*sent_embedding, k);
  }
  return d;
}

TrainingDynamics ComputeTrainingDynamics(
    const std::vector<Matrix>& epoch_logprobs,
    std::span<const int32_t> labels) {
  if (epoch_logprobs.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "need at least one epoch");
  }
  const int64_t epochs = static_cast<int64_t>(epoch_logprobs.size());
  const int64_t n = epoch_logprobs.front().rows();
  const int64_t c = epoch_logprobs.front().cols();
  CheckLabels(labels, n);

  TrainingDynamics td{Vector(n), Vector(n), Vector(n), Vector(n), Vector(n)};
  std::vector<double> conf(static_cast<size_t>(epochs));
  for (int64_t i = 0; i < n; ++i) {
    const int32_t y = labels[i];
    double margin_sum = 0.0;
    int forgets = 0;
    int correct_epochs = 0;
    bool prev_correct = false;
    for (int64_t e = 0; e < epochs; ++e) {
      const Matrix& lp = epoch_logprobs[e];
      conf[e] = std::exp(lp(i, y));

      double strongest_other = -std::numeric_limits<double>::infinity();
      for (int64_t k = 0; k < c; ++k) {
        if (k != y) strongest_other = std::max(strongest_other, SafeLog(lp(i, k)));
      }
      margin_sum += SafeLog(lp(i, y)) - strongest_other;

      const bool correct = ArgMax(lp, i) == y;
      if (e > 0 && prev_correct && !correct) ++forgets;
      correct_epochs += correct;
      prev_correct = correct;
    }
    double mean = 0.0;
    for (double v : conf) mean += v;
    mean /= static_cast<double>(epochs);
    td.avg_confidence[i] = mean;
    td.variability[i] = PopulationStd(conf, mean);
    td.forgetting[i] = forgets;
    td.aum[i] = margin_sum / static_cast<double>(epochs);
    td.correctness[i] =
        static_cast<double>(correct_epochs) / static_cast<double>(epochs);
  }
  return td;
}

EnsembleUncertainty ComputeEnsembleUncertainty(
    const std::vector<Matrix>& member_logprobs,
    std::span<const int32_t> labels) {
  if (member_logprobs.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "need at least one member");
  }
  const int64_t members = static_cast<int64_t>(member_logprobs.size());
  const int64_t n = member_logprobs.front().rows();
  const int64_t c = member_logprobs.front().cols();
  CheckLabels(labels, n);

  std::vector<Matrix> probs;
  probs.reserve(member_logprobs.size());
  for (const Matrix& lp : member_logprobs) probs.push_back(lp.array().exp());

  EnsembleUncertainty u{Vector(n), Vector(n), Vector(n),
                        Vector(n), Vector(n), Vector(n)};
  std::vector<double> avg(static_cast<size_t>(c));
  std::vector<double> conf(static_cast<size_t>(members));
  for (int64_t i = 0; i < n; ++i) {
    const int32_t y = labels[i];
    std::fill(avg.begin(), avg.end(), 0.0);
    double el2n = 0.0;
    double member_entropy = 0.0;
    for (int64_t t = 0; t < members; ++t) {
      const Matrix& p = probs[t];
      for (int64_t k = 0; k < c; ++k) avg[k] += p(i, k);
      el2n += ErrorNorm(p, i, y);
      member_entropy += RowEntropy(p, i);
      conf[t] = p(i, y);
    }
    for (double& v : avg) v /= static_cast<double>(members);

    const int32_t majority = static_cast<int32_t>(
        std::max_element(avg.begin(), avg.end()) - avg.begin());
    int agree = 0;
    for (int64_t t = 0; t < members; ++t) agree += ArgMax(probs[t], i) == majority;

    double mean_conf = 0.0;
    for (double v : conf) mean_conf += v;
    mean_conf /= static_cast<double>(members);

    u.el2n[i] = el2n;
    u.entropy[i] = Entropy(avg);
    u.bald[i] = u.entropy[i] - member_entropy / static_cast<double>(members);
    u.variation_ratio[i] =
        1.0 - static_cast<double>(agree) / static_cast<double>(members);
    u.confidence[i] = mean_conf;
    u.variability[i] = PopulationStd(conf, mean_conf);
  }
  return u;
}

Vector PseudoLogLikelihood(const TokenLogprobs& tokens, bool per_token_mean) {
  const int64_t n = tokens.num_samples();
  Vector out(n);
  for (int64_t i = 0; i < n; ++i) {
    const auto seq = tokens.Sample(i);
    if (seq.empty()) {
      throw Error(ErrorCode::kEmptyTokenSequence,
                  "sample " + std::to_string(i) + " has no tokens", i);
    }
    double sum = 0.0;
    for (float v : seq) sum += v;
    out[i] = per_token_mean ? sum / static_cast<double>(seq.size()) : sum;
  }
  return out;
}

MeasureMatrix ComputeAll(const RunBundle& bundle,
                         const ComputeOptions& options) {
  ValidateBundle(bundle);
  const auto& registry = MeasureRegistry();
  auto has_field = [&](BundleField f) {
    switch (f) {
      case BundleField::kMcLogprobs: return bundle.mc_logprobs.has_value();
      case BundleField::kSentEmbedding: return bundle.sent_embedding.has_value();
      case BundleField::kTokenLogprobs: return bundle.token_logprobs.has_value();
      default: return true;
    }
  };

  MeasureMatrix out;
  std::vector<bool> wanted(registry.size(), !options.selected.has_value());
  if (options.selected) {
    for (const std::string& name : *options.selected) {
      const int idx = RegistryIndex(name);
      if (idx < 0) throw Error(ErrorCode::kUnknownMeasure, name);
      wanted[idx] = true;
    }
  }
  for (size_t m = 0; m < registry.size(); ++m) {
    if (!wanted[m]) continue;
    for (BundleField f : registry[m].required_inputs) {
      if (has_field(f)) continue;
      if (options.selected) {
        throw Error(ErrorCode::kMissingInput,
                    registry[m].name + " requires " +
                        std::string(BundleFieldName(f)));
      }
      wanted[m] = false;
      out.skipped.push_back(registry[m].name);
      break;
    }
  }

  out.labels = ResolveLabels(bundle);
  out.label_source = bundle.labels ? LabelSource::kGold : LabelSource::kPseudo;
  const std::span<const int32_t> labels(out.labels);
  const int64_t n = bundle.n_samples;

  auto any_wanted = [&](MeasureCategory cat) {
    for (size_t m = 0; m < registry.size(); ++m) {
      if (wanted[m] && registry[m].category == cat) return true;
    }
    return false;
  };
  auto is_wanted = [&](std::string_view name) {
    return static_cast<bool>(wanted[RegistryIndex(name)]);
  };

  std::map<std::string, Vector> columns;

  const Matrix static_probs = ToMatrix(bundle.static_probs);
  if (is_wanted("static_confidence") || is_wanted("static_entropy")) {
    StaticScores s = StaticConfidenceEntropy(static_probs, labels);
    columns["static_confidence"] = std::move(s.confidence);
    columns["static_entropy"] = std::move(s.entropy);
  }
  const bool need_clf = is_wanted("task_density") ||
                        is_wanted("relative_density") || is_wanted("badge");
  const Matrix clf = need_clf ? ToMatrix(bundle.clf_embedding) : Matrix();
  if (is_wanted("badge")) {
    columns["badge"] = BadgeScore(static_probs, labels, clf);
  }
  const int k = options.knn_k;
  if (is_wanted("task_density")) {
    columns["task_density"] = -KnnDistance(clf, k);
  }
  if (is_wanted("relative_density")) {
    columns["relative_density"] =
        KnnDistance(clf, k, Candidates::kOtherGroup, labels) -
        KnnDistance(clf, k, Candidates::kSameGroup, labels);
  }
  if (is_wanted("semantic_density")) {
    columns["semantic_density"] = -KnnDistance(ToMatrix(*bundle.sent_embedding), k);
  }

  // Correctness for the data map is always derived from the epoch stack.
  const TrainingDynamics td =
      ComputeTrainingDynamics(ToStack(bundle.epoch_logprobs, false), labels);
  out.epoch_correctness = td.correctness;
  columns["avg_confidence"] = td.avg_confidence;
  columns["variability"] = td.variability;
  columns["forgetting"] = td.forgetting;
  columns["aum"] = td.aum;

  auto add_uncertainty = [&](const std::string& prefix,
                             const FloatTensor& stack) {
    EnsembleUncertainty u =
        ComputeEnsembleUncertainty(ToStack(stack, false), labels);
    columns[prefix + "el2n"] = std::move(u.el2n);
    columns[prefix + "entropy"] = std::move(u.entropy);
    columns[prefix + "bald"] = std::move(u.bald);
    columns[prefix + "variation_ratio"] = std::move(u.variation_ratio);
    columns[prefix + "confidence"] = std::move(u.confidence);
    columns[prefix + "variability"] = std::move(u.variability);
  };
  if (any_wanted(MeasureCategory::kModelUncertaintyEnsemble)) {
    add_uncertainty("ens_", bundle.seed_logprobs);
  }
  if (any_wanted(MeasureCategory::kModelUncertaintyMC)) {
    add_uncertainty("mc_", *bundle.mc_logprobs);
  }
  if (is_wanted("pll")) {
    columns["pll"] =
        PseudoLogLikelihood(*bundle.token_logprobs, options.pll_per_token_mean);
  }

  int64_t f = 0;
  for (size_t m = 0; m < registry.size(); ++m) f += wanted[m];
  out.values.resize(n, f);
  int64_t col = 0;
  for (size_t m = 0; m < registry.size(); ++m) {
    if (!wanted[m]) continue;
    out.values.col(col++) = columns.at(registry[m].name);
    out.columns.push_back(registry[m]);
  }
  return out;
}

}  // namespace measures
}  // namespace infoverse
