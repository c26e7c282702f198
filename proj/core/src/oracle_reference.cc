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

#include <algorithm>
#include <cmath>
#include <map>

#include "infoverse/error.h"
#include "infoverse/oracle.h"

namespace infoverse {
namespace oracle {
namespace {

using Rows = std::vector<std::vector<double>>;

Rows Rows2d(const FloatTensor& t) {
  Rows out(static_cast<size_t>(t.shape[0]),
           std::vector<double>(static_cast<size_t>(t.shape[1])));
  for (int64_t i = 0; i < t.shape[0]; ++i) {
    for (int64_t j = 0; j < t.shape[1]; ++j) {
      out[i][j] = static_cast<double>(t.data[i * t.shape[1] + j]);
    }
  }
  return out;
}

// Probability of class k for sample i in layer l of a log-probability stack.
double LayerProb(const FloatTensor& t, int64_t l, int64_t i, int64_t k) {
  return std::exp(static_cast<double>(t.data[(l * t.shape[1] + i) * t.shape[2] + k]));
}

double LayerLog(const FloatTensor& t, int64_t l, int64_t i, int64_t k) {
  const double v = t.data[(l * t.shape[1] + i) * t.shape[2] + k];
  return std::isfinite(v) ? v : std::log(1e-12);
}

double ShannonEntropy(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p) {
    if (v == 0.0) continue;
    h += -v * std::log(std::max(v, 1e-12));
  }
  return h;
}

int ArgmaxLowest(const std::vector<double>& p) {
  int best = 0;
  for (int k = 0; k < static_cast<int>(p.size()); ++k) {
    if (p[k] > p[best]) best = k;
  }
  return best;
}

double Mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double PopulationStd(const std::vector<double>& v) {
  const double m = Mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

struct StackMeasures {
  std::vector<double> el2n, entropy, bald, variation_ratio, confidence,
      variability;
};

StackMeasures ReferenceStack(const FloatTensor& stack,
                             const std::vector<int32_t>& y) {
  const int64_t members = stack.shape[0];
  const int64_t n = stack.shape[1];
  const int64_t c = stack.shape[2];
  StackMeasures out;
  for (int64_t i = 0; i < n; ++i) {
    std::vector<double> conf;
    double el2n = 0.0;
    double entropy_sum = 0.0;
    std::vector<int> member_argmax;
    for (int64_t t = 0; t < members; ++t) {
      std::vector<double> p(static_cast<size_t>(c));
      for (int64_t k = 0; k < c; ++k) p[k] = LayerProb(stack, t, i, k);
      double sq = 0.0;
      for (int64_t k = 0; k < c; ++k) {
        const double target = k == y[i] ? 1.0 : 0.0;
        sq += (p[k] - target) * (p[k] - target);
      }
      el2n += std::sqrt(sq);
      entropy_sum += ShannonEntropy(p);
      member_argmax.push_back(ArgmaxLowest(p));
      conf.push_back(p[y[i]]);
    }
    std::vector<double> p_avg(static_cast<size_t>(c), 0.0);
    for (int64_t k = 0; k < c; ++k) {
      double s = 0.0;
      for (int64_t t = 0; t < members; ++t) s += LayerProb(stack, t, i, k);
      p_avg[k] = s / static_cast<double>(members);
    }
    const int majority = ArgmaxLowest(p_avg);
    int fm = 0;
    for (int a : member_argmax) fm += (a == majority) ? 1 : 0;
    const double h = ShannonEntropy(p_avg);
    out.el2n.push_back(el2n);
    out.entropy.push_back(h);
    out.bald.push_back(h - entropy_sum / static_cast<double>(members));
    out.variation_ratio.push_back(1.0 - static_cast<double>(fm) /
                                            static_cast<double>(members));
    out.confidence.push_back(Mean(conf));
    out.variability.push_back(PopulationStd(conf));
  }
  return out;
}

}  // namespace

std::vector<double> ReferenceKnnDistance(const Rows& points, int k,
                                         measures::Candidates rule,
                                         const std::vector<int32_t>& groups) {
  std::vector<double> out;
  for (size_t i = 0; i < points.size(); ++i) {
    std::vector<double> dists;
    for (size_t j = 0; j < points.size(); ++j) {
      if (j == i) continue;
      if (rule == measures::Candidates::kSameGroup && groups[i] != groups[j]) continue;
      if (rule == measures::Candidates::kOtherGroup && groups[i] == groups[j]) continue;
      double s = 0.0;
      for (size_t d = 0; d < points[i].size(); ++d) {
        s += (points[i][d] - points[j][d]) * (points[i][d] - points[j][d]);
      }
      dists.push_back(std::sqrt(s));
    }
    if (static_cast<int>(dists.size()) < k) {
      throw Error(ErrorCode::kTooFewCandidates,
                  "reference kNN: sample " + std::to_string(i),
                  static_cast<int64_t>(i));
    }
    std::sort(dists.begin(), dists.end());
    out.push_back(dists[k - 1]);
  }
  return out;
}

MeasureMatrix ReferenceMeasures(const RunBundle& b, int knn_k) {
  ValidateBundle(b);
  const int64_t n = b.n_samples;
  const int64_t c = b.n_classes;

  std::vector<int32_t> y(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i) {
    if (b.labels) {
      y[i] = (*b.labels)[i];
    } else {
      std::vector<double> p(static_cast<size_t>(c));
      for (int64_t k = 0; k < c; ++k) p[k] = b.static_probs.data[i * c + k];
      y[i] = ArgmaxLowest(p);
    }
  }

  std::map<std::string, std::vector<double>> col;
  const Rows probs = Rows2d(b.static_probs);
  const Rows z = Rows2d(b.clf_embedding);

  const std::vector<double> task =
      ReferenceKnnDistance(z, knn_k, measures::Candidates::kAll, y);
  const std::vector<double> same =
      ReferenceKnnDistance(z, knn_k, measures::Candidates::kSameGroup, y);
  const std::vector<double> other =
      ReferenceKnnDistance(z, knn_k, measures::Candidates::kOtherGroup, y);
  for (int64_t i = 0; i < n; ++i) {
    col["task_density"].push_back(-task[i]);
    col["relative_density"].push_back((-same[i]) - (-other[i]));
    col["static_confidence"].push_back(probs[i][y[i]]);
    col["static_entropy"].push_back(ShannonEntropy(probs[i]));

    // Gradient of the cross-entropy wrt the last linear layer: (p - e_y) z^T.
    double frob = 0.0;
    for (int64_t k = 0; k < c; ++k) {
      const double residual = probs[i][k] - (k == y[i] ? 1.0 : 0.0);
      for (double zd : z[i]) frob += (residual * zd) * (residual * zd);
    }
    col["badge"].push_back(std::sqrt(frob));
  }

  const FloatTensor& ep = b.epoch_logprobs;
  const int64_t epochs = ep.shape[0];
  std::vector<double> correctness;
  for (int64_t i = 0; i < n; ++i) {
    std::vector<double> conf;
    std::vector<int> acc;
    double margins = 0.0;
    for (int64_t e = 0; e < epochs; ++e) {
      std::vector<double> p(static_cast<size_t>(c));
      for (int64_t k = 0; k < c; ++k) p[k] = LayerProb(ep, e, i, k);
      conf.push_back(p[y[i]]);
      acc.push_back(ArgmaxLowest(p) == y[i] ? 1 : 0);
      double other_max = -INFINITY;
      for (int64_t k = 0; k < c; ++k) {
        if (k != y[i]) other_max = std::max(other_max, LayerLog(ep, e, i, k));
      }
      margins += LayerLog(ep, e, i, y[i]) - other_max;
    }
    int forget = 0;
    for (int64_t e = 0; e + 1 < epochs; ++e) {
      if (acc[e] > acc[e + 1]) ++forget;
    }
    double n_correct = 0.0;
    for (int a : acc) n_correct += a;
    col["avg_confidence"].push_back(Mean(conf));
    col["variability"].push_back(PopulationStd(conf));
    col["forgetting"].push_back(forget);
    col["aum"].push_back(margins / static_cast<double>(epochs));
    correctness.push_back(n_correct / static_cast<double>(epochs));
  }

  auto put_stack = [&](const std::string& prefix, const FloatTensor& stack) {
    StackMeasures s = ReferenceStack(stack, y);
    col[prefix + "el2n"] = s.el2n;
    col[prefix + "entropy"] = s.entropy;
    col[prefix + "bald"] = s.bald;
    col[prefix + "variation_ratio"] = s.variation_ratio;
    col[prefix + "confidence"] = s.confidence;
    col[prefix + "variability"] = s.variability;
  };
  put_stack("ens_", b.seed_logprobs);
  if (b.mc_logprobs) put_stack("mc_", *b.mc_logprobs);

  if (b.sent_embedding) {
    const std::vector<double> sem = ReferenceKnnDistance(
        Rows2d(*b.sent_embedding), knn_k, measures::Candidates::kAll, y);
    for (double d : sem) col["semantic_density"].push_back(-d);
  }
  if (b.token_logprobs) {
    const auto& t = *b.token_logprobs;
    for (int64_t i = 0; i < n; ++i) {
      if (t.offsets[i + 1] == t.offsets[i]) {
        throw Error(ErrorCode::kEmptyTokenSequence,
                    "sample " + std::to_string(i), i);
      }
      double s = 0.0;
      for (int32_t p = t.offsets[i]; p < t.offsets[i + 1]; ++p) s += t.values[p];
      col["pll"].push_back(s);
    }
  }

  MeasureMatrix m;
  m.labels = y;
  m.label_source = b.labels ? LabelSource::kGold : LabelSource::kPseudo;
  m.epoch_correctness = Vector(n);
  for (int64_t i = 0; i < n; ++i) m.epoch_correctness[i] = correctness[i];
  std::vector<const MeasureSpec*> kept;
  for (const auto& spec : MeasureRegistry()) {
    if (col.count(spec.name)) {
      kept.push_back(&spec);
    } else {
      m.skipped.push_back(spec.name);
    }
  }
  m.values.resize(n, static_cast<int64_t>(kept.size()));
  for (size_t j = 0; j < kept.size(); ++j) {
    m.columns.push_back(*kept[j]);
    const auto& v = col.at(kept[j]->name);
    for (int64_t i = 0; i < n; ++i) m.values(i, static_cast<int64_t>(j)) = v[i];
  }
  return m;
}

}  // namespace oracle
}  // namespace infoverse
