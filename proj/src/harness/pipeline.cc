// Copyright 2026 The Fairloop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fairloop/harness/pipeline.h"

#include "fairloop/common/files.h"
#include "fairloop/data/split.h"
#include "fairloop/gbdt/model.h"
#include "fairloop/harness/tables.h"

namespace fairloop::harness {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

inline constexpr int kPreprocessingSchemaVersion = 1;

data::Dataset FirstRows(const data::Dataset& ds, std::size_t count) {
  std::vector<std::size_t> rows(std::min(count, ds.num_rows()));
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  return ds.Select(rows);
}

std::map<std::string, data::BinningRule> FitBins(const data::SchemaConfig& config,
                                                 const data::Dataset& train,
                                                 Warnings* warnings) {
  std::map<std::string, data::BinningRule> bins;
  for (const auto& f : config.schema.features()) {
    if (f.kind != data::FeatureKind::kNumeric) continue;
    auto explicit_edges = config.bins.find(f.name);
    try {
      bins.emplace(f.name, explicit_edges != config.bins.end()
                               ? data::MakeBinningRule(f.name, explicit_edges->second, train)
                               : data::QuartileRule(f.name, train));
    } catch (const Error& e) {
      if (explicit_edges != config.bins.end()) throw;
      Warn(warnings, "no default bins for '" + f.name + "': " + e.what());
    }
  }
  return bins;
}

}  // namespace

fs::path Prepare(const ExperimentConfig& config, Warnings* warnings) {
  const data::SchemaConfig schema_config = data::LoadSchemaConfig(config.schema_config);
  auto schema = std::make_shared<const data::Schema>(schema_config.schema);
  const data::Dataset labeled = data::LoadCsv(config.labeled_csv, schema);
  labeled.RequireTargets();

  std::optional<data::TrainTestSplit> split;
  if (config.prepare.mode == PrepareConfig::Mode::kUndersample) {
    split = data::Split(labeled,
                        data::UndersampleTrain{config.prepare.n_train, config.prepare.n_holdout},
                        config.seed);
  } else {
    const auto sample =
        data::Split(labeled, data::Stratified{config.prepare.n_sample}, config.seed);
    split = data::Split(sample.train, data::Stratified{config.prepare.n_train},
                        config.seed);
  }
  const data::Dataset& train = split->train;
  const data::Dataset& test = split->test;
  data::Dataset display =
      config.display_csv ? data::LoadCsv(*config.display_csv, schema)
      : config.prepare.display_count > 0 ? FirstRows(test, config.prepare.display_count)
                                         : test;

  const data::ImputationRule imputation = data::FitImputation(train);
  const data::Dataset train_imputed = data::ApplyImputation(train, imputation);
  const data::Encoder encoder =
      data::Encoder::Fit(train_imputed, schema_config.amount_features, warnings);
  const auto bins = FitBins(schema_config, train_imputed, warnings);

  const fs::path dir = config.output_dir / "prepared";
  WriteFileAtomic(dir / "train.csv", data::ToCsv(train));
  WriteFileAtomic(dir / "test.csv", data::ToCsv(test));
  WriteFileAtomic(dir / "display.csv", data::ToCsv(display));
  WriteJsonFile(dir / "schema.json", data::ToJson(schema_config));
  json bins_json = json::object();
  for (const auto& [name, rule] : bins) bins_json[name] = data::ToJson(rule);
  WriteJsonFile(dir / "preprocessing.json",
                {{"schema_version", kPreprocessingSchemaVersion},
                 {"seed", config.seed},
                 {"prepare_mode", PrepareModeName(config.prepare.mode)},
                 {"rows", {{"train", train.num_rows()},
                           {"test", test.num_rows()},
                           {"display", display.num_rows()}}},
                 {"imputation", data::ToJson(imputation)},
                 {"encoder", encoder.ToJson()},
                 {"bins", bins_json}});
  return dir;
}

PreparedData LoadPrepared(const fs::path& dir, Warnings* warnings) {
  if (!fs::is_directory(dir)) {
    Fail(ErrorCode::kNotFound, "prepared directory not found: " + dir.string(),
         dir.string());
  }
  data::SchemaConfig schema_config = data::ParseSchemaConfig(ReadJsonFile(dir / "schema.json"));
  auto schema = std::make_shared<const data::Schema>(schema_config.schema);
  const json pre = ReadJsonFile(dir / "preprocessing.json");
  if (pre.value("schema_version", 0) != kPreprocessingSchemaVersion) {
    Fail(ErrorCode::kParse, "unsupported preprocessing.json schema_version");
  }
  data::ImputationRule imputation = data::ImputationRuleFromJson(pre.at("imputation"));
  auto encoder = std::make_shared<const data::Encoder>(
      data::Encoder::FromJson(pre.at("encoder"), schema));
  std::map<std::string, data::BinningRule> bins;
  for (const auto& [name, rule] : pre.at("bins").items()) {
    bins.emplace(name, data::BinningRuleFromJson(rule));
  }
  auto load = [&](const char* name) {
    return data::ApplyImputation(data::LoadCsv(dir / name, schema), imputation);
  };
  data::Dataset train = load("train.csv");
  if (train.empty()) Fail(ErrorCode::kFailedPrecondition, "prepared train split is empty");
  data::Dataset test = load("test.csv");
  data::Dataset display = load("display.csv");
  (void)warnings;
  return PreparedData{std::move(schema_config), std::move(imputation), std::move(encoder),
                      std::move(bins), std::move(train), std::move(test),
                      std::move(display)};
}

Baseline BuildBaseline(const fs::path& prepared_dir, const ExperimentConfig& config,
                       Warnings* warnings) {
  Baseline b;
  b.prepared = std::make_shared<const PreparedData>(LoadPrepared(prepared_dir, warnings));
  b.prepared_dir = fs::absolute(prepared_dir).lexically_normal();
  b.fairness = config.fairness;
  for (const auto& [name, rule] : b.prepared->bins) b.fairness.bins.emplace(name, rule);
  b.alpha = config.alpha;
  b.flip_source = config.flip_source;
  b.seed = config.seed;
  b.context = integration::MakeBaselineContext(b.prepared->train, b.prepared->encoder,
                                               b.prepared->display, config.gbdt, warnings);
  b.evaluator = std::make_shared<const fairness::Evaluator>(
      b.prepared->test, b.prepared->encoder, b.fairness, warnings);
  b.report = std::make_shared<const fairness::FairnessReport>(
      b.evaluator->Evaluate(*b.context->baseline_model));
  return b;
}

void WriteBaseline(const Baseline& b, const fs::path& dir) {
  WriteJsonFile(dir / "model.json", gbdt::ToJson(*b.context->baseline_model));
  json report = fairness::ToJson(*b.report);
  report["seed"] = b.seed;
  json headers = json::object();
  for (const auto& info : fairness::AllMetrics()) {
    headers[std::string(info.key)] = fairness::Header(info.id);
  }
  report["headers"] = headers;
  WriteJsonFile(dir / "report.json", report);
  WriteFileAtomic(dir / "report.csv", FormatCsv(ReportTable(*b.report, b.seed)));
  WriteFileAtomic(dir / "report.txt", ReportText(*b.report));
  json fairness_json = fairness::ToJson(b.fairness);
  fairness_json["num_threads"] = b.fairness.num_threads;
  WriteJsonFile(dir / "manifest.json",
                {{"schema_version", kManifestSchemaVersion},
                 {"seed", b.seed},
                 {"prepared_dir", b.prepared_dir.string()},
                 {"gbdt", gbdt::ToJson(b.context->params)},
                 {"gbdt_threads", b.context->params.num_threads},
                 {"fairness", fairness_json},
                 {"integration",
                  {{"alpha", b.alpha},
                   {"flip_source", integration::FlipSourceName(b.flip_source)}}},
                 {"model_fingerprint", b.context->baseline_model->fingerprint()},
                 {"eval_fingerprint", b.evaluator->fingerprint()}});
}

Baseline LoadBaseline(const fs::path& dir, Warnings* warnings) {
  const json manifest = ReadJsonFile(dir / "manifest.json");
  if (manifest.value("schema_version", 0) != kManifestSchemaVersion) {
    Fail(ErrorCode::kParse, "unsupported manifest schema_version");
  }
  ExperimentConfig config;
  try {
    config.seed = manifest.at("seed").get<std::uint64_t>();
    config.gbdt = gbdt::GbdtParamsFromJson(manifest.at("gbdt"));
    config.gbdt.num_threads = manifest.value("gbdt_threads", 1);
    config.fairness = fairness::ReportConfigFromJson(manifest.at("fairness"));
    config.alpha = manifest.at("integration").at("alpha").get<double>();
    config.flip_source = integration::ParseFlipSource(
        manifest.at("integration").at("flip_source").get<std::string>());
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParse, std::string("malformed manifest: ") + e.what());
  }
  Baseline b = BuildBaseline(manifest.at("prepared_dir").get<std::string>(), config,
                             warnings);
  const std::string stored = manifest.at("model_fingerprint").get<std::string>();
  if (b.context->baseline_model->fingerprint() != stored) {
    Fail(ErrorCode::kFailedPrecondition,
         "baseline fingerprint mismatch: stored " + stored + ", rebuilt " +
             b.context->baseline_model->fingerprint());
  }
  return b;
}

}  // namespace fairloop::harness
