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

#ifndef FAIRLOOP_SERVICE_SESSION_STORE_H_
#define FAIRLOOP_SERVICE_SESSION_STORE_H_

#include <filesystem>
#include <string>
#include <vector>

#include "fairloop/common/error.h"
#include "fairloop/integration/feedback.h"
#include "fairloop/integration/session.h"
#include "json.hpp"

namespace fairloop::service {

// Append-only event log per session with a snapshot every few events:
//   <dir>/<session_id>/events.jsonl   {"seq", "type": create|feedback|undo, ...}
//   <dir>/<session_id>/snapshot.json  {"schema_version", "events", "session"}
// A session is rebuilt from its snapshot plus the events logged after it.
class SessionStore {
 public:
  explicit SessionStore(std::filesystem::path dir, std::size_t snapshot_every = 5);

  const std::filesystem::path& dir() const { return dir_; }

  void RecordCreate(const std::string& session_id, const std::string& participant_id);
  void RecordFeedback(const std::string& session_id, std::size_t seq,
                      const integration::FeedbackInstance& feedback);
  void RecordUndo(const std::string& session_id, std::size_t seq);
  // Writes a snapshot when seq is a multiple of the snapshot interval.
  void MaybeSnapshot(const std::string& session_id, std::size_t seq,
                     const integration::FeedbackSession& session);

  struct StoredSession {
    std::string session_id;
    std::string participant_id;
    std::size_t snapshot_events = 0;  // events covered by the snapshot
    nlohmann::json snapshot;          // null when absent
    std::vector<nlohmann::json> events;
  };
  // Every stored session; a torn trailing line is dropped with a warning.
  std::vector<StoredSession> LoadAll(Warnings* warnings = nullptr) const;

  // Applies the events after the snapshot to a session built from the same
  // baseline.
  static void Replay(const StoredSession& stored, integration::FeedbackSession& session);

 private:
  void Append(const std::string& session_id, const nlohmann::json& event);

  std::filesystem::path dir_;
  std::size_t snapshot_every_;
};

}  // namespace fairloop::service

#endif  // FAIRLOOP_SERVICE_SESSION_STORE_H_
