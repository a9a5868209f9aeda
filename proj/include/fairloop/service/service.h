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

#ifndef FAIRLOOP_SERVICE_SERVICE_H_
#define FAIRLOOP_SERVICE_SERVICE_H_

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <string>

#include "fairloop/harness/pipeline.h"
#include "fairloop/integration/session.h"
#include "fairloop/service/session_store.h"

namespace fairloop::service {

struct Request {
  std::string method;  // "GET" or "POST"
  std::string path;
  std::multimap<std::string, std::string> params;
  std::string body;
};

struct Response {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

struct ServiceOptions {
  std::optional<std::filesystem::path> session_store_dir;
  std::size_t snapshot_every = 5;
  // Milliseconds since the epoch; the system clock when empty.
  std::function<std::int64_t()> clock;
};

// Transport-independent request handling. Requests for different sessions
// run concurrently; requests within a session are serialized.
class Service {
 public:
  explicit Service(ServiceOptions options = {});

  // Makes the baseline available and restores persisted sessions. Until
  // this returns every endpoint answers 503.
  void SetBaseline(std::shared_ptr<const harness::Baseline> baseline,
                   Warnings* warnings = nullptr);
  bool ready() const { return ready_.load(); }
  std::size_t session_count() const;

  Response Handle(const Request& request);

 private:
  struct Entry {
    std::mutex mutex;
    std::unique_ptr<integration::FeedbackSession> session;
    std::size_t events = 0;
  };

  std::unique_ptr<integration::FeedbackSession> NewSession(
      const std::string& participant_id) const;
  std::shared_ptr<Entry> Find(const std::string& session_id) const;
  std::string NewSessionId();

  nlohmann::json CreateSession(const Request& request);
  nlohmann::json Applications(Entry& entry, const Request& request);
  nlohmann::json Metrics(Entry& entry, const Request& request);
  nlohmann::json Feedback(const std::string& id, Entry& entry, const Request& request);
  nlohmann::json Undo(const std::string& id, Entry& entry, const Request& request);
  Response Export(Entry& entry, const Request& request);

  ServiceOptions options_;
  std::optional<SessionStore> store_;
  std::shared_ptr<const harness::Baseline> baseline_;
  std::atomic<bool> ready_{false};

  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::mutex id_mutex_;
  std::mt19937_64 id_rng_;
};

// Serves a Service over HTTP with cpp-httplib.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();

  // Returns the bound port (port 0 picks a free one); throws kUnavailable.
  int Bind(const std::string& host, int port);
  // Blocks until Stop().
  void Run();
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace fairloop::service

#endif  // FAIRLOOP_SERVICE_SERVICE_H_
