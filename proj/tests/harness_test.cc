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

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "fairloop/common/csv.h"
#include "fairloop/common/error.h"
#include "fairloop/common/files.h"
#include "fairloop/harness/commands.h"
#include "fairloop/harness/config.h"
#include "fairloop/harness/pipeline.h"
#include "support/synthetic.h"

namespace fairloop::harness {
namespace {

namespace fs = std::filesystem;
using integration::FeedbackInstance;
using integration::FeedbackLabel;

std::map<std::string, std::string> Snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file()) {
      files[fs::relative(entry.path(), dir).string()] = ReadFile(entry.path());
    }
  }
  return files;
}

// CSV as header-keyed rows.
std::vector<std::map<std::string, std::string>> ReadRows(const fs::path& path) {
  const auto records = csv::ParseString(ReadFile(path));
  std::vector<std::map<std::string, std::string>> rows;
  for (std::size_t r = 1; r < records.size(); ++r) {
    std::map<std::string, std::string> row;
    for (std::size_t c = 0; c < records[0].size(); ++c) row[records[0][c]] = records[r][c];
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json ReadJson(const fs::path& path) { return nlohmann::json::parse(ReadFile(path)); }

// One prepared and trained experiment shared by the replay tests.
struct Trained {
  ExperimentConfig config;
  std::shared_ptr<const Baseline> baseline;
};

const Trained& SharedExperiment() {
  static const Trained trained = [] {
    const auto dir = testing::TempDir("harness_shared");
    auto config = LoadExperimentConfig(testing::WriteLoanExperiment(dir, {}));
    std::ostringstream out, err;
    if (RunPrepare(config, out, err) != 0 || RunTrainBaseline(config, out, err) != 0) {
      throw std::runtime_error(err.str());
    }
    auto baseline = std::make_shared<const Baseline>(LoadBaseline(config.output_dir / "baseline"));
    return Trained{config, baseline};
  }();
  return trained;
}

fs::path WriteFeedback(const std::string& name, const std::vector<FeedbackInstance>& fb,
                       const std::string& extra = {}) {
  const auto path = SharedExperiment().config.output_dir.parent_path() / name;
  WriteFileAtomic(path, integration::ToJsonl(fb) + extra);
  return path;
}

// Unfair judgements on every predicted Reject of one Gender value.
std::vector<FeedbackInstance> FlipGroup(const std::string& gender, int participants) {
  const auto& ctx = *SharedExperiment().baseline->context;
  const std::size_t col = ctx.app_pool.schema().RequireIndex("Gender");
  std::vector<FeedbackInstance> fb;
  for (std::size_t r = 0; r < ctx.app_pool.num_rows(); ++r) {
    if (std::get<std::string>(ctx.app_pool.cell(r, col)) != gender) continue;
    if (ctx.pool_predictions[r].label != gbdt::Outcome::kReject) continue;
    fb.push_back({"p" + std::to_string(fb.size() % participants), ctx.app_pool.id(r),
                  static_cast<std::int64_t>(1000 + r), FeedbackLabel::kUnfair, std::nullopt});
  }
  return fb;
}

TEST(Config, RoundTripsAndResolvesPaths) {
  const auto& config = SharedExperiment().config;
  EXPECT_TRUE(config.schema_config.is_absolute());
  EXPECT_EQ(config.gbdt.n_trees, 20);
  EXPECT_EQ(config.gbdt.seed, config.seed);
  const auto again = ParseExperimentConfig(ToJson(config), "/");
  EXPECT_EQ(again.labeled_csv, config.labeled_csv);
  EXPECT_EQ(again.prepare.n_train, config.prepare.n_train);
  EXPECT_THROW(ParseExperimentConfig(nlohmann::json::parse(R"({"seed": 1})"), "/"), Error);
}

TEST(Prepare, SeededRunsAreByteIdentical) {
  const auto dir = testing::TempDir("harness_prepare");
  auto config = LoadExperimentConfig(testing::WriteLoanExperiment(dir, {}));
  std::ostringstream out, err;
  ASSERT_EQ(RunPrepare(config, out, err), 0) << err.str();
  const auto first = Snapshot(config.output_dir / "prepared");
  EXPECT_TRUE(first.count("train.csv") && first.count("test.csv") && first.count("display.csv"));
  ASSERT_EQ(RunPrepare(config, out, err), 0) << err.str();
  EXPECT_EQ(Snapshot(config.output_dir / "prepared"), first);
  config.output_dir = dir / "other";
  ASSERT_EQ(RunPrepare(config, out, err), 0) << err.str();
  EXPECT_EQ(Snapshot(config.output_dir / "prepared"), first);
  const auto prepared = LoadPrepared(config.output_dir / "prepared");
  EXPECT_EQ(prepared.train.num_rows(), 160u);
  EXPECT_EQ(prepared.display.num_rows(), 60u);
}

TEST(Prepare, MissingSchemaFails) {
  const auto dir = testing::TempDir("harness_missing_schema");
  const auto path = testing::WriteLoanExperiment(dir, {});
  fs::remove(dir / "schema.json");
  try {
    auto config = LoadExperimentConfig(path);
    std::ostringstream out, err;
    EXPECT_NE(RunPrepare(config, out, err), 0);
  } catch (const Error&) {
    SUCCEED();
  }
}

TEST(Prepare, OversizedStratifiedRequestFails) {
  const auto dir = testing::TempDir("harness_stratified");
  testing::ExperimentFixture fixture;
  fixture.rows = 10;
  fixture.stratified = true;
  fixture.n_sample = 11000;
  fixture.n_train = 10000;
  auto config = LoadExperimentConfig(testing::WriteLoanExperiment(dir, fixture));
  std::ostringstream out, err;
  EXPECT_NE(RunPrepare(config, out, err), 0);
  EXPECT_NE(err.str().find("11000"), std::string::npos) << err.str();
}

TEST(TrainBaseline, RequiresPreparedData) {
  const auto dir = testing::TempDir("harness_no_prepared");
  auto config = LoadExperimentConfig(testing::WriteLoanExperiment(dir, {}));
  std::ostringstream out, err;
  EXPECT_NE(RunTrainBaseline(config, out, err), 0);
  EXPECT_FALSE(err.str().empty());
}

TEST(TrainBaseline, DeterministicWithAnnotatedReport) {
  const auto& shared = SharedExperiment();
  const auto dir = shared.config.output_dir / "baseline";
  const auto model = ReadFile(dir / "model.json");
  auto config = shared.config;
  config.output_dir = shared.config.output_dir.parent_path() / "rerun";
  fs::create_directories(config.output_dir);
  fs::copy(shared.config.output_dir / "prepared", config.output_dir / "prepared");
  std::ostringstream out, err;
  ASSERT_EQ(RunTrainBaseline(config, out, err), 0) << err.str();
  EXPECT_EQ(ReadFile(config.output_dir / "baseline" / "model.json"), model);
  const auto text = ReadFile(dir / "report.txt");
  EXPECT_NE(text.find("DPR (≈ 1) (↑)"), std::string::npos) << text;
  EXPECT_NE(text.find("CDD (≤ 0)"), std::string::npos) << text;
  const auto report = ReadJson(dir / "report.json");
  EXPECT_EQ(report.at("schema_version"), 1);
  // Composition check against the metric invariants.
  const auto rep = fairness::FairnessReportFromJson(report);
  for (const auto& block : rep.attributes) {
    for (const auto& [id, v] : block.metrics) {
      if (!v.defined()) continue;
      if (id == fairness::MetricId::kCdd) {
        EXPECT_GE(*v.value, -1.0);
        EXPECT_LE(*v.value, 1.0);
      } else {
        EXPECT_GE(*v.value, 0.0);
        EXPECT_LE(*v.value, 1.0);
      }
    }
  }
  EXPECT_NE(out.str().find(shared.baseline->context->baseline_model->fingerprint()),
            std::string::npos);
}

TEST(Replay, EmptyFeedbackGivesZeroDeltas) {
  const auto& shared = SharedExperiment();
  ReplayOptions options;
  options.feedback = WriteFeedback("empty.jsonl", {});
  std::ostringstream out, err;
  ASSERT_EQ(RunReplay(shared.config, options, out, err), 0) << err.str();
  const auto dir = shared.config.output_dir / "replay" / "global-labels-unfair";
  const auto rows = ReadRows(dir / "table.csv");
  ASSERT_FALSE(rows.empty());
  for (const auto& row : rows) {
    if (!row.at("percent_change").empty()) {
      EXPECT_EQ(std::stod(row.at("percent_change")), 0.0);
    }
    EXPECT_EQ(row.at("seed"), std::to_string(shared.config.seed));
  }
  const auto summary = ReadJson(dir / "summary.json");
  EXPECT_EQ(summary.at("effective_feedback"), false);
  EXPECT_EQ(summary.at("model_fingerprint"), summary.at("baseline_fingerprint"));
  EXPECT_TRUE(fs::exists(dir / "table.txt"));
}

TEST(Replay, DisadvantagedGroupFeedbackRaisesDpr) {
  // A strongly biased experiment so the baseline DPR is far from parity.
  const auto dir = testing::TempDir("harness_directional");
  testing::ExperimentFixture fixture;
  fixture.gender_bias = 2.5;
  fixture.display_count = 120;
  const auto config = LoadExperimentConfig(testing::WriteLoanExperiment(dir, fixture));
  std::ostringstream out, err;
  ASSERT_EQ(RunPrepare(config, out, err), 0) << err.str();
  ASSERT_EQ(RunTrainBaseline(config, out, err), 0) << err.str();
  const auto baseline = LoadBaseline(config.output_dir / "baseline");
  const auto* gender = baseline.report->FindAttribute("Gender");
  ASSERT_NE(gender, nullptr);
  const auto low = fairness::Extremes(gender->stats, fairness::Rate::kSelection).min_group;
  const auto& ctx = *baseline.context;
  const std::size_t col = ctx.app_pool.schema().RequireIndex("Gender");
  std::vector<FeedbackInstance> fb;
  for (std::size_t r = 0; r < ctx.app_pool.num_rows(); ++r) {
    if (std::get<std::string>(ctx.app_pool.cell(r, col)) != low) continue;
    if (ctx.pool_predictions[r].label != gbdt::Outcome::kReject) continue;
    fb.push_back({"p1", ctx.app_pool.id(r), static_cast<std::int64_t>(r),
                  FeedbackLabel::kUnfair, std::nullopt});
  }
  ASSERT_GE(fb.size(), 5u);
  WriteFileAtomic(dir / "fb.jsonl", integration::ToJsonl(fb));
  ReplayOptions options;
  options.feedback = dir / "fb.jsonl";
  const auto result = Replay(config, options);
  ASSERT_TRUE(result.errors.empty());
  ASSERT_TRUE(result.global.has_value());
  bool found = false;
  for (const auto& d : result.global->deltas) {
    if (d.metric != fairness::MetricId::kDpr || d.attribute != "Gender") continue;
    found = true;
    ASSERT_TRUE(d.change && d.change->percent);
    EXPECT_GT(*d.change->percent, 0.0) << "flipped " << fb.size() << " rows of " << low;
  }
  EXPECT_TRUE(found);
}

TEST(Replay, MalformedLinesReportedAndRunContinues) {
  const auto& shared = SharedExperiment();
  auto fb = FlipGroup("M", 1);
  fb.resize(2);
  ReplayOptions options;
  options.feedback = WriteFeedback(
      "malformed.jsonl", fb,
      "{oops\n"
      R"({"participant_id":"p0","application_id":"missing","timestamp_ms":1,"label":"unfair","weights":null})"
      "\n");
  std::ostringstream out, err;
  EXPECT_EQ(RunReplay(shared.config, options, out, err), 1);
  EXPECT_NE(err.str().find("malformed.jsonl:3:"), std::string::npos) << err.str();
  EXPECT_NE(err.str().find("malformed.jsonl:4:"), std::string::npos) << err.str();
  const auto summary =
      ReadJson(shared.config.output_dir / "replay" / "global-labels-unfair" / "summary.json");
  EXPECT_EQ(summary.at("errors").size(), 2u);
  EXPECT_EQ(summary.at("feedback_used"), 2);
  EXPECT_EQ(summary.at("added_rows"), 2);
}

TEST(Replay, PersonalizedTablesRecomputableFromSeries) {
  const auto& shared = SharedExperiment();
  auto fb = FlipGroup("M", 3);
  if (fb.size() > 9) fb.resize(9);
  ASSERT_GE(fb.size(), 3u);
  ReplayOptions options;
  options.mode = ReplayMode::kPersonalized;
  options.policy = integration::PolicyKind::kLabels;
  options.feedback = WriteFeedback("personal.jsonl", fb);
  auto config = shared.config;
  config.replay_threads = 2;
  std::ostringstream out, err;
  ASSERT_EQ(RunReplay(config, options, out, err), 0) << err.str();
  const auto dir = shared.config.output_dir / "replay" / "personalized-labels";
  const auto deltas = ReadRows(dir / "participant_deltas.csv");
  const auto averages = ReadRows(dir / "averages.csv");
  // Final CMA per (participant, metric, attribute) from the series files.
  std::map<std::string, std::string> last_cma;
  std::set<std::string> participants;
  for (const auto& entry : fs::directory_iterator(dir / "series")) {
    for (const auto& row : ReadRows(entry.path())) {
      participants.insert(row.at("participant_id"));
      last_cma[row.at("participant_id") + "|" + row.at("metric") + "|" + row.at("attribute")] =
          row.at("cma");
    }
  }
  EXPECT_EQ(participants.size(), 3u);
  std::map<std::string, std::pair<double, int>> mean_pct;
  for (const auto& row : deltas) {
    const auto key = row.at("participant_id") + "|" + row.at("metric") + "|" + row.at("attribute");
    EXPECT_EQ(row.at("final_cma"), last_cma.at(key)) << key;
    if (!row.at("percent_change").empty()) {
      auto& [sum, n] = mean_pct[row.at("metric") + "|" + row.at("attribute")];
      sum += std::stod(row.at("percent_change"));
      ++n;
    }
  }
  for (const auto& row : averages) {
    const auto key = row.at("metric") + "|" + row.at("attribute");
    if (row.at("mean_percent_change").empty()) continue;
    const auto& [sum, n] = mean_pct.at(key);
    EXPECT_NEAR(std::stod(row.at("mean_percent_change")), sum / n, 1e-9) << key;
  }
  const auto summary = ReadJson(dir / "summary.json");
  EXPECT_EQ(summary.at("participants"), 3);
  EXPECT_EQ(summary.at("model_fingerprints").size(), 3u);
}

TEST(Replay, ThreadCountDoesNotChangeOutputs) {
  const auto& shared = SharedExperiment();
  auto fb = FlipGroup("F", 4);
  if (fb.size() > 8) fb.resize(8);
  ReplayOptions options;
  options.mode = ReplayMode::kPersonalized;
  options.feedback = WriteFeedback("threads.jsonl", fb);
  auto config = shared.config;
  std::map<std::string, std::string> runs[2];
  for (int t : {1, 3}) {
    config.replay_threads = t;
    std::ostringstream out, err;
    ASSERT_EQ(RunReplay(config, options, out, err), 0) << err.str();
    runs[t == 3] = Snapshot(shared.config.output_dir / "replay" / "personalized-labels-unfair");
  }
  EXPECT_EQ(runs[0], runs[1]);
}

TEST(Replay, MappedCsvFeedback) {
  const auto& shared = SharedExperiment();
  auto config = shared.config;
  integration::FeedbackMapping mapping;
  mapping.participant_id = "Participant";
  mapping.application_id = "Application";
  mapping.timestamp = "Time";
  mapping.timestamp_scale = 1000;
  mapping.label = "Fairness";
  mapping.label_values = {{"Unfair", "unfair"}, {"Fair", "fair"}};
  mapping.weight_columns = {{"Age", "Age weight"}};
  config.feedback_mapping = mapping;
  const auto fb = FlipGroup("M", 2);
  std::string text = "Participant,Application,Time,Fairness,Age weight\n";
  for (std::size_t i = 0; i < std::min<std::size_t>(fb.size(), 4); ++i) {
    text += fb[i].participant_id + "," + fb[i].application_id + "," + std::to_string(i + 1) +
            (i % 2 ? ",Fair," : ",Unfair,2") + "\n";
  }
  const auto path = shared.config.output_dir.parent_path() / "mapped.csv";
  WriteFileAtomic(path, text);
  ReplayOptions options;
  options.policy = integration::PolicyKind::kLabelsPlusWeights;
  options.feedback = path;
  std::ostringstream out, err;
  ASSERT_EQ(RunReplay(config, options, out, err), 0) << err.str();
  const auto summary =
      ReadJson(shared.config.output_dir / "replay" / "global-labels-weights" / "summary.json");
  EXPECT_EQ(summary.at("added_rows"), 4);
}

TEST(Report, ReevaluatesStoredModel) {
  const auto& shared = SharedExperiment();
  std::ostringstream out, err;
  ASSERT_EQ(RunReport(shared.config, std::nullopt, out, err), 0) << err.str();
  const auto report = ReadJson(shared.config.output_dir / "report" / "report.json");
  EXPECT_EQ(report.at("metadata").at("model_fingerprint"),
            shared.baseline->context->baseline_model->fingerprint());
  for (const auto& row : ReadRows(shared.config.output_dir / "report" / "deltas.csv")) {
    if (!row.at("percent_change").empty()) {
      EXPECT_EQ(std::stod(row.at("percent_change")), 0.0);
    }
  }
  EXPECT_NE(RunReport(shared.config, shared.config.output_dir / "nope.json", out, err), 0);
}

}  // namespace
}  // namespace fairloop::harness
