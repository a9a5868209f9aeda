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

#include "fairloop/harness/config.h"

#include "fairloop/common/error.h"
#include "fairloop/common/files.h"

namespace fairloop::harness {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

fs::path Resolve(const fs::path& base, const std::string& value) {
  const fs::path p(value);
  return p.is_absolute() ? p : (base / p).lexically_normal();
}

}  // namespace

std::string_view PrepareModeName(PrepareConfig::Mode mode) {
  return mode == PrepareConfig::Mode::kUndersample ? "undersample" : "stratified";
}

ExperimentConfig ParseExperimentConfig(const json& j, const fs::path& base_dir) {
  ExperimentConfig c;
  try {
    c.schema_config = Resolve(base_dir, j.at("schema_config").get<std::string>());
    const json& data = j.at("data");
    c.labeled_csv = Resolve(base_dir, data.at("labeled_csv").get<std::string>());
    if (data.contains("display_csv") && !data.at("display_csv").is_null()) {
      c.display_csv = Resolve(base_dir, data.at("display_csv").get<std::string>());
    }
    const json& prep = j.at("prepare");
    const std::string mode = prep.at("mode").get<std::string>();
    if (mode == "undersample") {
      c.prepare.mode = PrepareConfig::Mode::kUndersample;
      c.prepare.n_train = prep.at("n_train").get<std::size_t>();
      c.prepare.n_holdout = prep.at("n_holdout").get<std::size_t>();
    } else if (mode == "stratified") {
      c.prepare.mode = PrepareConfig::Mode::kStratified;
      c.prepare.n_sample = prep.at("n_sample").get<std::size_t>();
      c.prepare.n_train = prep.at("n_train").get<std::size_t>();
      if (c.prepare.n_train >= c.prepare.n_sample) {
        Fail(ErrorCode::kInvalidArgument, "prepare.n_train must be below n_sample");
      }
    } else {
      Fail(ErrorCode::kInvalidArgument, "unknown prepare.mode '" + mode + "'");
    }
    c.prepare.display_count = prep.value("display_count", std::size_t{0});
    if (j.contains("gbdt")) c.gbdt = gbdt::GbdtParamsFromJson(j.at("gbdt"));
    if (j.contains("fairness")) {
      c.fairness = fairness::ReportConfigFromJson(j.at("fairness"));
    }
    if (j.contains("integration")) {
      const json& in = j.at("integration");
      c.alpha = in.value("alpha", 1.0);
      if (in.contains("flip_source")) {
        c.flip_source =
            integration::ParseFlipSource(in.at("flip_source").get<std::string>());
      }
    }
    if (!(c.alpha >= 0.0)) {
      Fail(ErrorCode::kInvalidArgument, "integration.alpha must be non-negative");
    }
    if (j.contains("feedback_mapping")) {
      c.feedback_mapping = integration::FeedbackMappingFromJson(j.at("feedback_mapping"));
    }
    c.seed = j.value("seed", std::uint64_t{0});
    if (!(j.contains("gbdt") && j.at("gbdt").contains("seed"))) c.gbdt.seed = c.seed;
    c.output_dir = Resolve(base_dir, j.value("output_dir", std::string("out")));
    c.replay_threads = j.value("replay_threads", 1);
    if (c.replay_threads < 1) {
      Fail(ErrorCode::kInvalidArgument, "replay_threads must be at least 1");
    }
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParse, std::string("malformed experiment config: ") + e.what());
  }
  return c;
}

ExperimentConfig LoadExperimentConfig(const fs::path& path) {
  const json j = ReadJsonFile(path);
  return ParseExperimentConfig(j, fs::absolute(path).parent_path());
}

json ToJson(const ExperimentConfig& c) {
  json prepare = {{"mode", PrepareModeName(c.prepare.mode)},
                  {"n_train", c.prepare.n_train},
                  {"display_count", c.prepare.display_count}};
  if (c.prepare.mode == PrepareConfig::Mode::kUndersample) {
    prepare["n_holdout"] = c.prepare.n_holdout;
  } else {
    prepare["n_sample"] = c.prepare.n_sample;
  }
  json data = {{"labeled_csv", c.labeled_csv.string()}};
  data["display_csv"] = c.display_csv ? json(c.display_csv->string()) : json(nullptr);
  json out = {{"schema_config", c.schema_config.string()},
              {"data", data},
              {"prepare", prepare},
              {"gbdt", gbdt::ToJson(c.gbdt)},
              {"fairness", fairness::ToJson(c.fairness)},
              {"integration",
               {{"alpha", c.alpha},
                {"flip_source", integration::FlipSourceName(c.flip_source)}}},
              {"seed", c.seed},
              {"output_dir", c.output_dir.string()},
              {"replay_threads", c.replay_threads}};
  if (c.feedback_mapping) out["feedback_mapping"] = integration::ToJson(*c.feedback_mapping);
  return out;
}

}  // namespace fairloop::harness
