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

#include "cli.h"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "infoverse/bundle.h"
#include "infoverse/error.h"
#include "infoverse/feature_io.h"
#include "infoverse/measures.h"
#include "infoverse/oracle.h"
#include "infoverse/select.h"
#include "infoverse/space.h"
#include "json.hpp"

namespace infoverse::cli {
namespace {

namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void Log(const std::string& msg) { std::cerr << "infoverse: " << msg << "\n"; }

bool HasFlag(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == flag || a.starts_with(flag + "=");
  });
}

// Expands `--config file.json` into explicit flags for every key the command
// line does not already set, so that flags always win over the file.
std::vector<std::string> ApplyConfigFile(std::vector<std::string> args) {
  auto it = std::find_if(args.begin(), args.end(), [](const std::string& a) {
    return a == "--config" || a.starts_with("--config=");
  });
  if (it == args.end()) return args;
  std::string path;
  if (*it == "--config") {
    if (it + 1 == args.end()) throw UsageError("--config requires a file");
    path = *(it + 1);
    it = args.erase(it, it + 2);
  } else {
    path = it->substr(9);
    it = args.erase(it);
  }
  std::ifstream in(path);
  if (!in) throw UsageError("--config: cannot read " + path);
  nlohmann::json cfg;
  try {
    cfg = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("--config: " + path + ": " + e.what());
  }
  if (!cfg.is_object()) throw UsageError("--config: top level must be an object");
  std::vector<std::string> extra;
  for (const auto& [key, value] : cfg.items()) {
    std::string flag = "--" + key;
    std::replace(flag.begin() + 2, flag.end(), '_', '-');
    if (HasFlag(args, flag)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) extra.push_back(flag);
    } else if (value.is_string()) {
      extra.push_back(flag);
      extra.push_back(value.get<std::string>());
    } else if (value.is_array()) {
      std::string joined;
      for (const auto& v : value) {
        if (!joined.empty()) joined += ",";
        joined += v.is_string() ? v.get<std::string>() : v.dump();
      }
      extra.push_back(flag);
      extra.push_back(joined);
    } else {
      extra.push_back(flag);
      extra.push_back(value.dump());
    }
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

std::vector<std::string> SplitList(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct ValidateArgs {
  std::string bundle;
};

struct CharacterizeArgs {
  std::string bundle;
  std::string out;
  std::string measures = "all";
  std::string corr;
  std::string csv;
  std::string normalized;
  int knn_k = measures::kDefaultKnn;
  bool pll_mean = false;
};

struct SelectArgs {
  std::string features;
  std::string mode = "prune";
  std::string method = "dpp";
  std::optional<int64_t> budget;
  std::optional<double> ratio;
  uint64_t seed = 0;
  std::string out;
  double beta = kDefaultBeta;
  int knn_k = measures::kDefaultKnn;
  bool ascending = false;
  std::string space = "infoverse";
  std::string bundle;
  int64_t pca_keep = 0;
  int64_t dense_threshold = kDefaultDenseThreshold;
};

struct ReportArgs {
  std::string features;
  std::string coords;
  std::string out;
};

struct SynthArgs {
  oracle::SynthConfig config;
  std::string out;
  bool no_labels = false;
  bool no_mc = false;
  bool no_sent = false;
  bool no_tokens = false;
};

int DoValidate(const ValidateArgs& a) {
  const RunBundle b = LoadBundle(a.bundle);
  std::ostringstream os;
  os << "valid bundle: N=" << b.n_samples << " C=" << b.n_classes
     << " E=" << b.num_epochs() << " T=" << b.num_seeds()
     << " M=" << b.num_mc_passes()
     << " labels=" << (b.labels ? "gold" : "pseudo")
     << " sent_embedding=" << (b.sent_embedding ? "yes" : "no")
     << " token_logprobs=" << (b.token_logprobs ? "yes" : "no");
  Log(os.str());
  return kExitOk;
}

int DoCharacterize(const CharacterizeArgs& a) {
  if (a.knn_k < 1) throw UsageError("--knn-k must be >= 1");
  measures::ComputeOptions opts;
  opts.knn_k = a.knn_k;
  opts.pll_per_token_mean = a.pll_mean;
  if (a.measures != "all") {
    opts.selected = SplitList(a.measures);
    for (const auto& name : *opts.selected) {
      if (RegistryIndex(name) < 0) throw UsageError("--measures: unknown measure " + name);
    }
  }
  const RunBundle b = LoadBundle(a.bundle);
  const MeasureMatrix m = measures::ComputeAll(b, opts);
  for (const auto& s : m.skipped) Log("skipped " + s + " (input absent)");
  if (m.label_source == LabelSource::kPseudo) Log("labels absent; using pseudo-labels");
  WriteMeasureMatrix(m, a.out);
  if (!a.csv.empty()) WriteMeasureCsv(m, a.csv);
  if (!a.corr.empty()) {
    const CorrelationMatrix c = space::Correlation(m);
    for (size_t j = 0; j < c.names.size(); ++j) {
      if (c.constant_columns[j]) Log("correlation: " + c.names[j] + " is constant");
    }
    WriteCorrelationCsv(c, a.corr);
  }
  if (!a.normalized.empty()) WriteFeatureMatrix(space::Normalize(m), a.normalized);
  Log("wrote " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
      " measure matrix to " + a.out);
  return kExitOk;
}

int DoSelect(const SelectArgs& a) {
  if (a.budget.has_value() == a.ratio.has_value()) {
    throw UsageError("select: exactly one of --budget or --ratio is required");
  }
  const auto mode = ParseMode(a.mode);
  if (!mode) throw UsageError("--mode: expected prune or acquire, got " + a.mode);
  if (a.space != "infoverse" && a.space != "embedding") {
    throw UsageError("--space: expected infoverse or embedding, got " + a.space);
  }
  if (a.space == "embedding" && a.bundle.empty()) {
    throw UsageError("--space embedding requires --bundle");
  }
  if (a.ratio && !(*a.ratio > 0.0 && *a.ratio < 1.0)) {
    throw UsageError("--ratio must lie in (0, 1)");
  }
  if (!(a.beta > 0.0)) throw UsageError("--beta must be positive");
  if (a.knn_k < 1) throw UsageError("--knn-k must be >= 1");

  select::Method method;
  try {
    method = select::ParseMethod(a.method);
  } catch (const Error&) {
    throw UsageError("--method: unknown method " + a.method);
  }
  const MeasureMatrix m = ReadMeasureMatrix(a.features);
  FeatureMatrix f = space::Normalize(m);
  if (a.pca_keep > 0) {
    if (a.pca_keep > f.cols()) throw UsageError("--pca-keep exceeds feature count");
    f = space::PcaFeatureSelect(f, a.pca_keep);
  }
  if (method.kind == select::MethodKind::kTopK && f.ColumnIndex(method.measure) < 0) {
    throw UsageError("--method: unknown measure " + method.measure);
  }

  std::optional<Matrix> embedding;
  if (a.space == "embedding") {
    embedding = ToMatrix(LoadBundle(a.bundle).clf_embedding);
  }

  select::SelectOptions opts;
  opts.mode = *mode;
  opts.method = method;
  opts.seed = a.seed;
  opts.beta = a.beta;
  opts.knn_k = a.knn_k;
  opts.ascending = a.ascending;
  opts.dense_threshold = a.dense_threshold;
  opts.baseline_space = embedding ? &*embedding : nullptr;
  opts.budget = a.budget ? *a.budget : select::BudgetFromRatio(*a.ratio, f.rows());
  if (opts.budget > f.rows() || opts.budget < 1) {
    throw UsageError("--budget must lie in [1, " + std::to_string(f.rows()) + "]");
  }

  const SelectionResult r = select::Select(f, m.labels, opts);
  for (const auto& w : r.warnings) Log(w);
  WriteSelectionResult(r, a.out);
  Log("selected " + std::to_string(r.indices.size()) + " samples with " +
      r.method + ", log-det " + FormatDouble(r.total_logdet));
  return kExitOk;
}

int DoReport(const ReportArgs& a) {
  const MeasureMatrix m = ReadMeasureMatrix(a.features);
  const FeatureMatrix f = space::Normalize(m);
  std::optional<Matrix> coords;
  if (!a.coords.empty()) coords = ReadCoordinatesCsv(a.coords);
  WriteDataMapCsv(m, space::Project2d(f, coords), a.out);
  Log("wrote data map to " + a.out);
  return kExitOk;
}

int DoSynth(SynthArgs a) {
  a.config.with_labels = !a.no_labels;
  a.config.with_mc = !a.no_mc;
  a.config.with_sent_embedding = !a.no_sent;
  a.config.with_tokens = !a.no_tokens;
  try {
    a.config.Validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  WriteBundle(oracle::GenerateBundle(a.config), a.out);
  Log("wrote synthetic bundle to " + a.out);
  return kExitOk;
}

}  // namespace

int Run(const std::vector<std::string>& raw_args) {
  std::vector<std::string> args;
  try {
    args = ApplyConfigFile(raw_args.empty() ? std::vector<std::string>{"infoverse"}
                                            : raw_args);
  } catch (const UsageError& e) {
    Log(std::string("usage error: ") + e.what());
    return kExitUsage;
  }

  CLI::App app{"infoverse: meta-information characterization and subset selection"};
  app.require_subcommand(1);

  ValidateArgs va;
  auto* validate = app.add_subcommand("validate", "Load and validate a run bundle");
  validate->add_option("bundle", va.bundle, "Bundle directory")->required();

  CharacterizeArgs ca;
  auto* characterize = app.add_subcommand(
      "characterize", "Compute the meta-information measure matrix");
  characterize->add_option("bundle", ca.bundle, "Bundle directory")->required();
  characterize->add_option("--out", ca.out, "Measure matrix output path")->required();
  characterize->add_option("--measures", ca.measures,
                           "Comma-separated measure names, or 'all'");
  characterize->add_option("--corr", ca.corr, "Correlation matrix CSV output");
  characterize->add_option("--csv", ca.csv, "Measure matrix CSV output");
  characterize->add_option("--normalized", ca.normalized,
                           "Normalized feature matrix output (raw f32 + sidecar)");
  characterize->add_option("--knn-k", ca.knn_k, "K for kNN densities");
  characterize->add_flag("--pll-mean", ca.pll_mean, "Per-token mean PLL");

  SelectArgs sa;
  auto* sel = app.add_subcommand("select", "Select a subset of samples");
  sel->add_option("features", sa.features, "Measure matrix from characterize")
      ->required();
  sel->add_option("--mode", sa.mode, "prune | acquire");
  sel->add_option("--method", sa.method,
                  "dpp | random | topk:<measure> | coreset | kmeans | density");
  sel->add_option("--budget", sa.budget, "Number of samples to select");
  sel->add_option("--ratio", sa.ratio, "Fraction of samples to select, in (0,1)");
  sel->add_option("--seed", sa.seed, "Seed for random / kmeans");
  sel->add_option("--out", sa.out, "Selection JSON output")->required();
  sel->add_option("--beta", sa.beta, "Gaussian similarity bandwidth");
  sel->add_option("--knn-k", sa.knn_k, "K for the density score");
  sel->add_flag("--ascending", sa.ascending, "topk picks the smallest values");
  sel->add_option("--space", sa.space,
                  "Space for coreset/kmeans/density: infoverse | embedding");
  sel->add_option("--bundle", sa.bundle,
                  "Bundle providing classifier embeddings for --space embedding");
  sel->add_option("--pca-keep", sa.pca_keep,
                  "Reduce features by PCA-based feature selection first");
  sel->add_option("--dense-threshold", sa.dense_threshold,
                  "Largest N for which the similarity matrix is materialized");

  ReportArgs ra;
  auto* report = app.add_subcommand("report", "Write data-map CSV");
  report->add_option("features", ra.features, "Measure matrix from characterize")
      ->required();
  report->add_option("--coords", ra.coords, "External 2-D coordinates CSV");
  report->add_option("--out", ra.out, "Data map CSV output")->required();

  SynthArgs ya;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic run bundle");
  synth->add_option("--out", ya.out, "Bundle output directory")->required();
  synth->add_option("--n-samples", ya.config.n_samples);
  synth->add_option("--n-classes", ya.config.n_classes);
  synth->add_option("--epochs", ya.config.epochs);
  synth->add_option("--seeds", ya.config.seeds);
  synth->add_option("--mc-passes", ya.config.mc_passes);
  synth->add_option("--clf-dim", ya.config.clf_dim);
  synth->add_option("--sent-dim", ya.config.sent_dim);
  synth->add_option("--separation", ya.config.cluster_separation);
  synth->add_option("--noise-fraction", ya.config.planted_noise_fraction);
  synth->add_option("--rng-seed", ya.config.rng_seed);
  synth->add_flag("--no-labels", ya.no_labels);
  synth->add_flag("--no-mc", ya.no_mc);
  synth->add_flag("--no-sent", ya.no_sent);
  synth->add_flag("--no-tokens", ya.no_tokens);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    Log(std::string("usage error: ") + e.what());
    return kExitUsage;
  }

  try {
    if (*validate) return DoValidate(va);
    if (*characterize) return DoCharacterize(ca);
    if (*sel) return DoSelect(sa);
    if (*report) return DoReport(ra);
    if (*synth) return DoSynth(ya);
  } catch (const UsageError& e) {
    Log(std::string("usage error: ") + e.what());
    return kExitUsage;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kUnknownMethod ||
        e.code() == ErrorCode::kUnknownMeasure) {
      Log(std::string("usage error: ") + e.what());
      return kExitUsage;
    }
    Log(std::string("error: ") + e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    Log(std::string("error: ") + e.what());
    return kExitValidation;
  }
  return kExitUsage;
}

}  // namespace infoverse::cli
