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

#ifndef FAIRLOOP_DATA_SCHEMA_H_
#define FAIRLOOP_DATA_SCHEMA_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

namespace fairloop::data {

enum class FeatureKind { kCategorical, kNumeric };

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::kNumeric;
  bool is_protected = false;
  std::string display_label;

  bool operator==(const FeatureSpec&) const = default;
};

// Ordered feature list plus the names of the id and target columns in the
// raw CSV. Feature names are unique.
class Schema {
 public:
  Schema(std::vector<FeatureSpec> features, std::string id_column = "id",
         std::string target_column = "target");

  const std::vector<FeatureSpec>& features() const { return features_; }
  std::size_t size() const { return features_.size(); }
  const FeatureSpec& feature(std::size_t index) const {
    return features_[index];
  }
  const std::string& id_column() const { return id_column_; }
  const std::string& target_column() const { return target_column_; }

  std::optional<std::size_t> IndexOf(const std::string& name) const;
  // Throws kInvalidArgument for an unknown name.
  std::size_t RequireIndex(const std::string& name) const;

  std::vector<std::string> ProtectedFeatureNames() const;

  bool operator==(const Schema& other) const {
    return features_ == other.features_ && id_column_ == other.id_column_ &&
           target_column_ == other.target_column_;
  }

 private:
  std::vector<FeatureSpec> features_;
  std::string id_column_;
  std::string target_column_;
  std::unordered_map<std::string, std::size_t> index_;
};

// The JSON schema + binning config file:
//   {"features": [{"name", "kind", "protected", "display_label"}],
//    "bins": {"Age": [35, 50]}, "amount_features": ["Income"], "seed": 7,
//    "id_column": "id", "target_column": "target",
//    "value_labels": {"Gender": {"M": "Male"}}}
// id_column, target_column and value_labels are optional.
struct SchemaConfig {
  Schema schema{{}};
  std::map<std::string, std::vector<double>> bins;
  std::set<std::string> amount_features;
  std::uint64_t seed = 0;
  std::map<std::string, std::map<std::string, std::string>> value_labels;
};

SchemaConfig ParseSchemaConfig(const nlohmann::json& json);
SchemaConfig LoadSchemaConfig(const std::filesystem::path& path);
nlohmann::json ToJson(const SchemaConfig& config);

std::string_view FeatureKindName(FeatureKind kind);

}  // namespace fairloop::data

#endif  // FAIRLOOP_DATA_SCHEMA_H_
