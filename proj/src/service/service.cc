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

#include "fairloop/service/service.h"

#include <chrono>
#include <cstdio>
#include <sstream>
#include <vector>

#include "fairloop/service/payloads.h"
#include "httplib.h"

namespace fairloop::service {
namespace {

using json = nlohmann::json;
using integration::FeedbackLabel;

std::vector<std::string> SplitPath(const std::string& path) {
  std::vector<std::string> parts;
  std::stringstream in(path);
  std::string part;
  while (std::getline(in, part, '/')) {
    if (!part.empty()) parts.push_back(part);
  }
  return parts;
}

std::optional<std::string> Param(const Request& request, const std::string& key) {
  const auto it = request.params.find(key);
  if (it == request.params.end()) return std::nullopt;
  return it->second;
}

Response JsonResponse(int status, const json& body) {
  return {status, body.dump(), "application/json"};
}

json ParseBody(const Request& request) {
  if (request.body.empty()) return json::object();
  try {
    json body = json::parse(request.body);
    if (!body.is_object()) Fail(ErrorCode::kInvalidArgument, "request body must be an object");
    return body;
  } catch (const json::parse_error& e) {
    Fail(ErrorCode::kParse, "request body is not valid JSON", e.what());
  }
}

std::int64_t SystemClock() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

}  // namespace

Service::Service(ServiceOptions options)
    : options_(std::move(options)), id_rng_(std::random_device{}()) {
  if (!options_.clock) options_.clock = SystemClock;
  if (options_.session_store_dir) {
    store_.emplace(*options_.session_store_dir, options_.snapshot_every);
  }
}

void Service::SetBaseline(std::shared_ptr<const harness::Baseline> baseline,
                          Warnings* warnings) {
  baseline_ = std::move(baseline);
  if (store_) {
    for (const auto& stored : store_->LoadAll(warnings)) {
      try {
        auto entry = std::make_shared<Entry>();
        entry->session = NewSession(stored.participant_id);
        SessionStore::Replay(stored, *entry->session);
        entry->events = stored.events.empty()
                            ? stored.snapshot_events
                            : stored.events.back().at("seq").get<std::size_t>();
        std::unique_lock lock(sessions_mutex_);
        sessions_[stored.session_id] = std::move(entry);
      } catch (const std::exception& e) {
        Warn(warnings, stored.session_id + ": not restored (" + e.what() + ")");
      }
    }
  }
  ready_ = true;
}

std::size_t Service::session_count() const {
  std::shared_lock lock(sessions_mutex_);
  return sessions_.size();
}

std::unique_ptr<integration::FeedbackSession> Service::NewSession(
    const std::string& participant_id) const {
  return std::make_unique<integration::FeedbackSession>(
      participant_id, baseline_->context, baseline_->evaluator, baseline_->report,
      baseline_->alpha, baseline_->flip_source);
}

std::shared_ptr<Service::Entry> Service::Find(const std::string& session_id) const {
  std::shared_lock lock(sessions_mutex_);
  const auto it = sessions_.find(session_id);
  if (it == sessions_.end()) Fail(ErrorCode::kNotFound, "unknown session '" + session_id + "'");
  return it->second;
}

std::string Service::NewSessionId() {
  std::lock_guard lock(id_mutex_);
  char buffer[33];
  std::snprintf(buffer, sizeof(buffer), "%016llx%016llx",
                static_cast<unsigned long long>(id_rng_()),
                static_cast<unsigned long long>(id_rng_()));
  return buffer;
}

Response Service::Handle(const Request& request) {
  try {
    if (!ready_) Fail(ErrorCode::kUnavailable, "baseline is not loaded yet");
    const auto parts = SplitPath(request.path);
    if (parts.empty() || parts[0] != "sessions" || parts.size() == 2 || parts.size() > 3) {
      Fail(ErrorCode::kNotFound, "no such endpoint: " + request.path);
    }
    if (parts.size() == 1) {
      if (request.method != "POST") {
        return JsonResponse(405, {{"schema_version", kApiSchemaVersion},
                                  {"code", "method_not_allowed"},
                                  {"message", "use POST /sessions"},
                                  {"detail", ""}});
      }
      return JsonResponse(201, CreateSession(request));
    }
    const std::string& id = parts[1];
    const std::string& action = parts[2];
    const bool get = request.method == "GET";
    static const std::map<std::string, bool> kGetActions = {
        {"applications", true}, {"metrics", true}, {"export", true},
        {"feedback", false},    {"undo", false}};
    const auto known = kGetActions.find(action);
    if (known == kGetActions.end()) Fail(ErrorCode::kNotFound, "no such endpoint: " + request.path);
    if (known->second != get) {
      return JsonResponse(405, {{"schema_version", kApiSchemaVersion},
                                {"code", "method_not_allowed"},
                                {"message", "wrong method for " + action},
                                {"detail", ""}});
    }
    const auto entry = Find(id);
    std::lock_guard lock(entry->mutex);
    if (action == "applications") return JsonResponse(200, Applications(*entry, request));
    if (action == "metrics") return JsonResponse(200, Metrics(*entry, request));
    if (action == "export") return Export(*entry, request);
    if (action == "feedback") return JsonResponse(200, Feedback(id, *entry, request));
    return JsonResponse(200, Undo(id, *entry, request));
  } catch (const Error& e) {
    return JsonResponse(HttpStatus(e.code()), ErrorBody(e));
  } catch (const std::exception& e) {
    return JsonResponse(500, ErrorBody(Error(ErrorCode::kIo, "internal error", e.what())));
  }
}

json Service::CreateSession(const Request& request) {
  const json body = ParseBody(request);
  const std::string id = NewSessionId();
  std::string participant = id;
  if (body.contains("participant_id")) {
    if (!body["participant_id"].is_string() ||
        body["participant_id"].get<std::string>().empty()) {
      Fail(ErrorCode::kInvalidArgument, "participant_id must be a non-empty string");
    }
    participant = body["participant_id"].get<std::string>();
  }
  auto entry = std::make_shared<Entry>();
  entry->session = NewSession(participant);
  if (store_) store_->RecordCreate(id, participant);
  json descriptor = SessionDescriptor(id, *entry->session, baseline_->prepared->schema_config);
  std::unique_lock lock(sessions_mutex_);
  sessions_[id] = std::move(entry);
  return descriptor;
}

json Service::Applications(Entry& entry, const Request& request) {
  const auto& config = baseline_->prepared->schema_config;
  const auto query = ParseApplicationQuery(request.params, config.schema);
  return ApplicationViews(*entry.session, config, query);
}

json Service::Metrics(Entry& entry, const Request& request) {
  const auto& config = baseline_->prepared->schema_config;
  return MetricsPayload(*entry.session, config,
                        ParseAttributeList(Param(request, "attributes"), config.schema));
}

json Service::Feedback(const std::string& id, Entry& entry, const Request& request) {
  const auto& config = baseline_->prepared->schema_config;
  const auto attributes = ParseAttributeList(Param(request, "attributes"), config.schema);
  const json body = ParseBody(request);
  for (const auto& [key, value] : body.items()) {
    if (key != "application_id" && key != "label" && key != "weights") {
      Fail(ErrorCode::kUnprocessable, "unknown field '" + key + "'", key);
    }
  }
  if (!body.contains("application_id") || !body["application_id"].is_string()) {
    Fail(ErrorCode::kInvalidArgument, "application_id must be a string");
  }
  if (!body.contains("label") || !body["label"].is_string()) {
    Fail(ErrorCode::kInvalidArgument, "label must be unfair or weights_only");
  }
  const std::string label_name = body["label"].get<std::string>();
  FeedbackLabel label;
  if (label_name == "unfair") {
    label = FeedbackLabel::kUnfair;
  } else if (label_name == "weights_only") {
    label = FeedbackLabel::kWeightsOnly;
  } else {
    Fail(ErrorCode::kInvalidArgument, "label must be unfair or weights_only", label_name);
  }
  std::optional<integration::RawWeights> weights;
  if (body.contains("weights") && !body["weights"].is_null()) {
    if (!body["weights"].is_object()) {
      Fail(ErrorCode::kUnprocessable, "weights must be an object of numbers");
    }
    weights.emplace();
    for (const auto& [feature, value] : body["weights"].items()) {
      if (!value.is_number()) {
        Fail(ErrorCode::kUnprocessable, "weight for '" + feature + "' is not a number");
      }
      (*weights)[feature] = value.get<double>();
    }
  }

  auto& session = *entry.session;
  const auto step = session.Submit(body["application_id"].get<std::string>(), label,
                                   std::move(weights), options_.clock());
  ++entry.events;
  if (store_) {
    store_->RecordFeedback(id, entry.events, step.feedback);
    store_->MaybeSnapshot(id, entry.events, session);
  }
  return {{"schema_version", kApiSchemaVersion},
          {"feedback", ToJson(step.feedback)},
          {"added_rows", step.added_rows},
          {"training_rows", session.state().training_rows},
          {"undo_depth", session.undo_depth()},
          {"deltas", integration::ToJson(step.deltas)},
          {"feature_weights", session.CurrentFeatureWeights().values()},
          {"metrics", MetricsPayload(session, config, attributes)}};
}

json Service::Undo(const std::string& id, Entry& entry, const Request& request) {
  const auto& config = baseline_->prepared->schema_config;
  const auto attributes = ParseAttributeList(Param(request, "attributes"), config.schema);
  auto& session = *entry.session;
  if (session.log().empty()) Fail(ErrorCode::kConflict, "nothing to undo");
  const auto undone = session.log().back().feedback;
  const auto deltas = session.Undo();
  ++entry.events;
  if (store_) {
    store_->RecordUndo(id, entry.events);
    store_->MaybeSnapshot(id, entry.events, session);
  }
  return {{"schema_version", kApiSchemaVersion},
          {"undone", ToJson(undone)},
          {"undo_depth", session.undo_depth()},
          {"deltas", integration::ToJson(deltas)},
          {"feature_weights", session.CurrentFeatureWeights().values()},
          {"metrics", MetricsPayload(session, config, attributes)}};
}

Response Service::Export(Entry& entry, const Request& request) {
  const auto& session = *entry.session;
  const std::string jsonl = integration::ToJsonl(session.FeedbackLog());
  const auto format = Param(request, "format").value_or("json");
  if (format == "jsonl") return {200, jsonl, "application/x-ndjson"};
  if (format != "json") Fail(ErrorCode::kInvalidArgument, "format must be json or jsonl");
  const auto& state = session.state();
  json body = {{"schema_version", kApiSchemaVersion},
               {"participant_id", session.participant_id()},
               {"feedback_count", session.log().size()},
               {"feedback_jsonl", jsonl},
               {"model_fingerprint", state.model->fingerprint()},
               {"model", gbdt::ToJson(*state.model)},
               {"report", fairness::ToJson(*state.report)}};
  return JsonResponse(200, body);
}

struct HttpServer::Impl {
  httplib::Server server;
};

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>()) {
  auto handler = [&service](const httplib::Request& req, httplib::Response& res) {
    Request request{req.method, req.path, {}, req.body};
    for (const auto& [key, value] : req.params) request.params.emplace(key, value);
    const Response response = service.Handle(request);
    res.status = response.status;
    res.set_content(response.body, response.content_type);
  };
  impl_->server.Get(".*", handler);
  impl_->server.Post(".*", handler);
  impl_->server.Put(".*", handler);
  impl_->server.Patch(".*", handler);
  impl_->server.Delete(".*", handler);
}

HttpServer::~HttpServer() { Stop(); }

int HttpServer::Bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) Fail(ErrorCode::kUnavailable, "cannot bind " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) {
    Fail(ErrorCode::kUnavailable, "cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void HttpServer::Run() { impl_->server.listen_after_bind(); }

void HttpServer::Stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace fairloop::service
