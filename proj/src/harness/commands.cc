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

#include "fairloop/harness/commands.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <mutex>
#include <ostream>
#include <thread>

#include "fairloop/common/files.h"
#include "fairloop/gbdt/model.h"
#include "fairloop/harness/tables.h"

namespace fairloop::harness {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;
using integration::FeedbackInstance;

std::string SafeFileName(const std::string& name) {
  std::string out;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
    out += ok ? c : '_';
  }
  return out.empty() ? std::string("_") : out;
}

json ErrorsJson(const std::vector<integration::LineError>& errors) {
  json out = json::array();
  for (const auto& e : errors) out.push_back({{"line", e.line}, {"message", e.message}});
  return out;
}

int Report(const std::exception& e, std::ostream& err) {
  if (const auto* fe = dynamic_cast<const Error*>(&e)) {
    err << "error [" << ErrorCodeName(fe->code()) << "]: " << fe->what() << '\n';
  } else {
    err << "error: " << e.what() << '\n';
  }
  return 1;
}

void PrintWarnings(const Warnings& warnings, std::ostream& err) {
  for (const auto& w : warnings) err << "warning: " << w << '\n';
}

fs::path BaselineDir(const ExperimentConfig& config) {
  return config.output_dir / "baseline";
}

}  // namespace

std::string_view ReplayModeName(ReplayMode mode) {
  return mode == ReplayMode::kGlobal ? "global" : "personalized";
}

ReplayMode ParseReplayMode(std::string_view name) {
  if (name == "global") return ReplayMode::kGlobal;
  if (name == "personalized") return ReplayMode::kPersonalized;
  Fail(ErrorCode::kInvalidArgument, "unknown replay mode '" + std::string(name) + "'");
}

integration::FeedbackLog LoadFeedback(
    const fs::path& path, const std::optional<integration::FeedbackMapping>& mapping) {
  if (path.extension() == ".csv") {
    return integration::LoadMappedCsv(path, mapping.value_or(integration::FeedbackMapping{}));
  }
  return integration::LoadFeedbackJsonl(path);
}

ReplayResult Replay(const ExperimentConfig& config, const ReplayOptions& options) {
  ReplayResult result;
  const Baseline baseline =
      LoadBaseline(options.baseline_dir.value_or(BaselineDir(config)), &result.warnings);
  integration::FeedbackLog log = LoadFeedback(options.feedback, config.feedback_mapping);
  result.errors = log.errors;

  // Drop feedback that cannot be resolved, keeping its line for the report.
  std::vector<FeedbackInstance> feedback;
  for (std::size_t i = 0; i < log.instances.size(); ++i) {
    const auto& f = log.instances[i];
    std::string problem;
    if (!baseline.context->app_pool.IndexOfId(f.application_id)) {
      problem = "application '" + f.application_id + "' is not in the pool";
    } else if (f.weights) {
      for (const auto& [feature, value] : *f.weights) {
        if (!baseline.context->baseline_weights.contains(feature)) {
          problem = "weight for unknown feature '" + feature + "'";
          break;
        }
      }
    }
    if (problem.empty()) {
      feedback.push_back(f);
    } else {
      result.errors.push_back({log.lines[i], problem});
    }
  }
  std::sort(result.errors.begin(), result.errors.end(),
            [](const auto& a, const auto& b) { return a.line < b.line; });

  integration::IntegrationPolicy policy;
  policy.kind = options.policy;
  policy.alpha = baseline.alpha;
  policy.flip_source = baseline.flip_source;
  const std::string policy_name(integration::PolicyKindName(options.policy));
  const std::string mode_name(ReplayModeName(options.mode));
  result.output_dir = config.output_dir / "replay" / (mode_name + "-" + policy_name);
  const fs::path& dir = result.output_dir;

  json summary = {{"schema_version", 1},
                  {"seed", baseline.seed},
                  {"mode", mode_name},
                  {"policy", policy_name},
                  {"alpha", policy.alpha},
                  {"flip_source", integration::FlipSourceName(policy.flip_source)},
                  {"feedback_file", options.feedback.string()},
                  {"feedback_used", feedback.size()},
                  {"baseline_fingerprint", baseline.context->baseline_model->fingerprint()},
                  {"errors", ErrorsJson(result.errors)}};

  if (options.mode == ReplayMode::kGlobal) {
    result.global = integration::RetrainGlobal(*baseline.context, feedback, policy,
                                               *baseline.evaluator, *baseline.report,
                                               &result.warnings);
    const auto& outcome = *result.global;
    WriteFileAtomic(dir / "table.csv",
                    FormatCsv(DeltaTable(outcome.deltas, policy_name, mode_name,
                                         baseline.seed)));
    WriteFileAtomic(dir / "table.txt",
                    DeltaText(outcome.deltas, "Global model, policy " + policy_name +
                                                  ", seed " + std::to_string(baseline.seed)));
    WriteJsonFile(dir / "model.json", gbdt::ToJson(*outcome.model));
    json report = fairness::ToJson(outcome.report);
    report["seed"] = baseline.seed;
    WriteJsonFile(dir / "report.json", report);
    summary["model_fingerprint"] = outcome.model->fingerprint();
    summary["added_rows"] = outcome.added_rows;
    summary["effective_feedback"] = outcome.effective_feedback;
  } else {
    const auto by_participant = integration::ByParticipant(feedback);
    std::vector<const std::vector<FeedbackInstance>*> jobs;
    std::vector<std::string> ids;
    for (const auto& [pid, list] : by_participant) {
      ids.push_back(pid);
      jobs.push_back(&list);
    }
    std::vector<std::optional<integration::PersonalizedRun>> runs(jobs.size());
    std::vector<Warnings> job_warnings(jobs.size());
    std::vector<std::string> job_errors(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t j = next++; j < jobs.size(); j = next++) {
        try {
          runs[j] = integration::RetrainPersonalized(*baseline.context, *jobs[j], policy,
                                                     *baseline.evaluator, *baseline.report,
                                                     &job_warnings[j]);
        } catch (const Error& e) {
          job_errors[j] = e.what();
        }
      }
    };
    const std::size_t threads =
        std::min<std::size_t>(static_cast<std::size_t>(config.replay_threads),
                              std::max<std::size_t>(jobs.size(), 1));
    if (threads <= 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }
    json fingerprints = json::object();
    for (std::size_t j = 0; j < jobs.size(); ++j) {
      for (auto& w : job_warnings[j]) result.warnings.push_back(ids[j] + ": " + w);
      if (!runs[j]) {
        result.errors.push_back({0, "participant '" + ids[j] + "': " + job_errors[j]});
        continue;
      }
      const auto& run = *runs[j];
      WriteFileAtomic(dir / "series" / (SafeFileName(ids[j]) + ".csv"),
                      FormatCsv(SeriesTable(run, baseline.seed)));
      fingerprints[ids[j]] = run.steps.back().model->fingerprint();
      result.personalized.push_back(std::move(*runs[j]));
    }
    const Table averages = AveragesTable(result.personalized, baseline.seed);
    WriteFileAtomic(dir / "averages.csv", FormatCsv(averages));
    WriteFileAtomic(dir / "averages.txt",
                    "Personalized models, policy " + policy_name + ", seed " +
                        std::to_string(baseline.seed) + "\n\n" + FormatText(averages));
    WriteFileAtomic(dir / "participant_deltas.csv",
                    FormatCsv(ParticipantDeltaTable(result.personalized, baseline.seed)));
    summary["participants"] = ids.size();
    summary["model_fingerprints"] = fingerprints;
    summary["errors"] = ErrorsJson(result.errors);
  }
  summary["warnings"] = result.warnings;
  WriteJsonFile(dir / "summary.json", summary);
  return result;
}

int RunPrepare(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  try {
    Warnings warnings;
    const fs::path dir = Prepare(config, &warnings);
    PrintWarnings(warnings, err);
    out << "prepared splits written to " << dir.string() << '\n';
    return 0;
  } catch (const std::exception& e) {
    return Report(e, err);
  }
}

int RunTrainBaseline(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  try {
    Warnings warnings;
    const fs::path prepared = config.output_dir / "prepared";
    if (!fs::exists(prepared / "train.csv")) {
      Fail(ErrorCode::kFailedPrecondition,
           "no prepared train split in " + prepared.string() + "; run prepare first");
    }
    const Baseline baseline = BuildBaseline(prepared, config, &warnings);
    WriteBaseline(baseline, BaselineDir(config));
    PrintWarnings(warnings, err);
    out << ReportText(*baseline.report) << "model fingerprint "
        << baseline.context->baseline_model->fingerprint() << '\n';
    return 0;
  } catch (const std::exception& e) {
    return Report(e, err);
  }
}

int RunReplay(const ExperimentConfig& config, const ReplayOptions& options,
              std::ostream& out, std::ostream& err) {
  try {
    const ReplayResult result = Replay(config, options);
    PrintWarnings(result.warnings, err);
    for (const auto& e : result.errors) {
      err << options.feedback.string() << ":" << e.line << ": " << e.message << '\n';
    }
    if (result.global) {
      out << DeltaText(result.global->deltas, "Global model");
    } else {
      out << FormatText(AveragesTable(result.personalized, config.seed));
    }
    out << "outputs written to " << result.output_dir.string() << '\n';
    return result.errors.empty() ? 0 : 1;
  } catch (const std::exception& e) {
    return Report(e, err);
  }
}

int RunReport(const ExperimentConfig& config, const std::optional<fs::path>& model_path,
              std::ostream& out, std::ostream& err) {
  try {
    Warnings warnings;
    const Baseline baseline = LoadBaseline(BaselineDir(config), &warnings);
    const gbdt::Model model =
        model_path ? gbdt::ModelFromJson(ReadJsonFile(*model_path))
                   : *baseline.context->baseline_model;
    const fairness::FairnessReport report = baseline.evaluator->Evaluate(model);
    const auto deltas = integration::ComputeDeltas(*baseline.report, report);
    const fs::path dir = config.output_dir / "report";
    json report_json = fairness::ToJson(report);
    report_json["seed"] = baseline.seed;
    report_json["deltas"] = integration::ToJson(deltas);
    WriteJsonFile(dir / "report.json", report_json);
    WriteFileAtomic(dir / "report.csv", FormatCsv(ReportTable(report, baseline.seed)));
    WriteFileAtomic(dir / "report.txt", ReportText(report));
    WriteFileAtomic(dir / "deltas.csv",
                    FormatCsv(DeltaTable(deltas, "", "report", baseline.seed)));
    PrintWarnings(warnings, err);
    out << ReportText(report);
    return 0;
  } catch (const std::exception& e) {
    return Report(e, err);
  }
}

}  // namespace fairloop::harness
