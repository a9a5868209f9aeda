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

// fairloop: offline pipeline driver and feedback session server.

#include <csignal>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "fairloop/common/files.h"
#include "fairloop/harness/commands.h"
#include "fairloop/harness/config.h"
#include "fairloop/harness/pipeline.h"
#include "fairloop/service/service.h"

namespace {

namespace fs = std::filesystem;
using namespace fairloop;

struct GlobalFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
};

harness::ExperimentConfig LoadConfig(const GlobalFlags& flags) {
  if (flags.config.empty()) Fail(ErrorCode::kInvalidArgument, "--config is required");
  nlohmann::json j = ReadJsonFile(flags.config);
  if (flags.seed) j["seed"] = *flags.seed;
  auto config = harness::ParseExperimentConfig(j, fs::absolute(flags.config).parent_path());
  if (flags.out) config.output_dir = fs::absolute(*flags.out);
  return config;
}

service::HttpServer* g_server = nullptr;

void HandleSignal(int) {
  if (g_server != nullptr) g_server->Stop();
}

int Serve(const std::string& host, int port, const fs::path& baseline_dir,
          const std::optional<fs::path>& store_dir) {
  service::ServiceOptions options;
  options.session_store_dir = store_dir;
  service::Service svc(options);
  service::HttpServer server(svc);
  const int bound = server.Bind(host, port);
  g_server = &server;
  std::signal(SIGINT, HandleSignal);
  std::signal(SIGTERM, HandleSignal);
  std::cerr << "listening on " << host << ":" << bound << '\n';

  // Requests are answered with 503 until the baseline has been rebuilt.
  std::thread loader([&] {
    try {
      Warnings warnings;
      auto baseline = std::make_shared<const harness::Baseline>(
          harness::LoadBaseline(baseline_dir, &warnings));
      svc.SetBaseline(baseline, &warnings);
      for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
      std::cerr << "baseline loaded, " << svc.session_count() << " session(s) restored\n";
    } catch (const std::exception& e) {
      std::cerr << "error: cannot load baseline: " << e.what() << '\n';
      server.Stop();
    }
  });
  server.Run();
  loader.join();
  g_server = nullptr;
  return svc.ready() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fairness feedback loop: data preparation, baselines, replay and serving"};
  app.require_subcommand(1);
  GlobalFlags flags;
  app.add_option("--config", flags.config, "Experiment config JSON");
  app.add_option("--seed", flags.seed, "Override the experiment seed");
  app.add_option("--out", flags.out, "Override the output directory");

  auto* prepare = app.add_subcommand("prepare", "Split and preprocess the labeled data");
  auto* train = app.add_subcommand("train-baseline", "Train and evaluate the baseline model");

  auto* replay = app.add_subcommand("replay", "Retrain from a feedback log");
  std::string mode = "global";
  std::string policy = "labels";
  std::string feedback;
  std::optional<std::string> baseline_dir;
  replay->add_option("--mode", mode, "global or personalized")
      ->check(CLI::IsMember({"global", "personalized"}));
  replay->add_option("--policy", policy, "Integration policy")
      ->check(CLI::IsMember({"labels", "labels-unfair", "labels-weights", "labels-unfair-weights"}));
  replay->add_option("--feedback", feedback, "Feedback JSONL or mapped CSV")->required();
  replay->add_option("--baseline-dir", baseline_dir, "Baseline directory");

  auto* report = app.add_subcommand("report", "Evaluate a model against the baseline");
  std::optional<std::string> model_path;
  report->add_option("--model", model_path, "Model JSON; the baseline model if omitted");

  auto* serve = app.add_subcommand("serve", "Serve feedback sessions over HTTP");
  int port = 8080;
  std::string host = "127.0.0.1";
  std::string serve_baseline;
  std::optional<std::string> store_dir;
  serve->add_option("--port", port, "Port (0 picks a free one)");
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--baseline-dir", serve_baseline, "Baseline directory")->required();
  serve->add_option("--session-store-dir", store_dir, "Persist sessions here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (serve->parsed()) {
      return Serve(host, port, serve_baseline,
                   store_dir ? std::optional<fs::path>(*store_dir) : std::nullopt);
    }
    const auto config = LoadConfig(flags);
    if (prepare->parsed()) return harness::RunPrepare(config, std::cout, std::cerr);
    if (train->parsed()) return harness::RunTrainBaseline(config, std::cout, std::cerr);
    if (replay->parsed()) {
      harness::ReplayOptions options;
      options.mode = harness::ParseReplayMode(mode);
      options.policy = integration::ParsePolicyKind(policy);
      options.feedback = feedback;
      if (baseline_dir) options.baseline_dir = fs::path(*baseline_dir);
      return harness::RunReplay(config, options, std::cout, std::cerr);
    }
    return harness::RunReport(
        config, model_path ? std::optional<fs::path>(*model_path) : std::nullopt, std::cout,
        std::cerr);
  } catch (const Error& e) {
    std::cerr << "error [" << ErrorCodeName(e.code()) << "]: " << e.what();
    if (!e.detail().empty()) std::cerr << " (" << e.detail() << ")";
    std::cerr << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
