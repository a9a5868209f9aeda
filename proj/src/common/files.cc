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

#include "fairloop/common/files.h"

#include <fstream>
#include <random>
#include <sstream>

#include "fairloop/common/error.h"

namespace fairloop {

namespace fs = std::filesystem;

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kNotFound, "cannot open file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteFileAtomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::random_device device;
  fs::path tmp = path;
  tmp += ".tmp" + std::to_string(device());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) Fail(ErrorCode::kIo, "cannot write file: " + tmp.string());
    out << content;
    out.flush();
    if (!out) Fail(ErrorCode::kIo, "short write: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    Fail(ErrorCode::kIo, "cannot rename onto " + path.string(), ec.message());
  }
}

nlohmann::json ReadJsonFile(const fs::path& path) {
  const std::string text = ReadFile(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    Fail(ErrorCode::kParse, "invalid JSON in " + path.string(), e.what());
  }
}

void WriteJsonFile(const fs::path& path, const nlohmann::json& value) {
  WriteFileAtomic(path, value.dump(2) + "\n");
}

}  // namespace fairloop
