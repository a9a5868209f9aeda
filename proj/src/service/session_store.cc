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

#include "fairloop/service/session_store.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "fairloop/common/files.h"

namespace fairloop::service {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

constexpr int kSnapshotSchemaVersion = 1;

}  // namespace

SessionStore::SessionStore(fs::path dir, std::size_t snapshot_every)
    : dir_(std::move(dir)), snapshot_every_(snapshot_every == 0 ? 1 : snapshot_every) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) Fail(ErrorCode::kIo, "cannot create session store " + dir_.string(), ec.message());
}

void SessionStore::Append(const std::string& session_id, const json& event) {
  const fs::path path = dir_ / session_id / "events.jsonl";
  std::ofstream out(path, std::ios::app | std::ios::binary);
  out << event.dump() << '\n';
  out.flush();
  if (!out) Fail(ErrorCode::kIo, "cannot append to " + path.string());
}

void SessionStore::RecordCreate(const std::string& session_id,
                                const std::string& participant_id) {
  std::error_code ec;
  fs::create_directories(dir_ / session_id, ec);
  if (ec) Fail(ErrorCode::kIo, "cannot create session directory", ec.message());
  Append(session_id, {{"seq", 0}, {"type", "create"}, {"participant_id", participant_id}});
}

void SessionStore::RecordFeedback(const std::string& session_id, std::size_t seq,
                                  const integration::FeedbackInstance& feedback) {
  Append(session_id, {{"seq", seq}, {"type", "feedback"}, {"feedback", ToJson(feedback)}});
}

void SessionStore::RecordUndo(const std::string& session_id, std::size_t seq) {
  Append(session_id, {{"seq", seq}, {"type", "undo"}});
}

void SessionStore::MaybeSnapshot(const std::string& session_id, std::size_t seq,
                                 const integration::FeedbackSession& session) {
  if (seq % snapshot_every_ != 0) return;
  WriteJsonFile(dir_ / session_id / "snapshot.json",
                {{"schema_version", kSnapshotSchemaVersion},
                 {"events", seq},
                 {"session", session.SnapshotJson()}});
}

std::vector<SessionStore::StoredSession> SessionStore::LoadAll(Warnings* warnings) const {
  std::vector<StoredSession> out;
  if (!fs::is_directory(dir_)) return out;
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(dir_)) {
    if (entry.is_directory() && fs::exists(entry.path() / "events.jsonl")) {
      dirs.push_back(entry.path());
    }
  }
  std::sort(dirs.begin(), dirs.end());
  for (const auto& path : dirs) {
    StoredSession stored;
    stored.session_id = path.filename().string();
    std::istringstream lines(ReadFile(path / "events.jsonl"));
    std::vector<json> events;
    std::string line;
    std::size_t number = 0;
    while (std::getline(lines, line)) {
      ++number;
      if (line.empty()) continue;
      try {
        events.push_back(json::parse(line));
      } catch (const json::exception&) {
        Warn(warnings, stored.session_id + ": dropping unreadable event on line " +
                           std::to_string(number));
        break;
      }
    }
    if (events.empty() || events.front().value("type", "") != "create") {
      Warn(warnings, stored.session_id + ": no create event, skipped");
      continue;
    }
    stored.participant_id = events.front().at("participant_id").get<std::string>();
    const fs::path snapshot_path = path / "snapshot.json";
    if (fs::exists(snapshot_path)) {
      try {
        json snapshot = ReadJsonFile(snapshot_path);
        stored.snapshot_events = snapshot.at("events").get<std::size_t>();
        stored.snapshot = std::move(snapshot.at("session"));
      } catch (const std::exception& e) {
        Warn(warnings, stored.session_id + ": ignoring snapshot (" + e.what() + ")");
        stored.snapshot_events = 0;
        stored.snapshot = nullptr;
      }
    }
    for (auto& event : events) {
      if (event.at("seq").get<std::size_t>() > stored.snapshot_events) {
        stored.events.push_back(std::move(event));
      }
    }
    out.push_back(std::move(stored));
  }
  return out;
}

void SessionStore::Replay(const StoredSession& stored, integration::FeedbackSession& session) {
  if (!stored.snapshot.is_null()) session.RestoreSnapshot(stored.snapshot);
  for (const auto& event : stored.events) {
    const std::string type = event.at("type").get<std::string>();
    if (type == "feedback") {
      const auto f = integration::FeedbackFromJson(event.at("feedback"));
      session.Submit(f.application_id, f.label, f.weights, f.timestamp_ms);
    } else if (type == "undo") {
      session.Undo();
    }
  }
}

}  // namespace fairloop::service
