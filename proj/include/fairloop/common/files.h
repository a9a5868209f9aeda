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

#ifndef FAIRLOOP_COMMON_FILES_H_
#define FAIRLOOP_COMMON_FILES_H_

#include <filesystem>
#include <string>

#include "json.hpp"

namespace fairloop {

std::string ReadFile(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it over the target, creating
// parent directories as needed.
void WriteFileAtomic(const std::filesystem::path& path,
                     const std::string& content);

nlohmann::json ReadJsonFile(const std::filesystem::path& path);
void WriteJsonFile(const std::filesystem::path& path,
                   const nlohmann::json& value);

}  // namespace fairloop

#endif  // FAIRLOOP_COMMON_FILES_H_
