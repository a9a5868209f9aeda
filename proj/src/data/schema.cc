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

#include "fairloop/data/schema.h"

#include "fairloop/common/error.h"
#include "fairloop/common/files.h"

namespace fairloop::data {

using nlohmann::json;

Schema::Schema(std::vector<FeatureSpec> features, std::string id_column,
               std::string target_column)
    : features_(std::move(features)),
      id_column_(std::move(id_column)),
      target_column_(std::move(target_column)) {
  for (std::size_t i = 0; i < features_.size(); ++i) {
    const std::string& name = features_[i].name;
    if (name.empty()) Fail(ErrorCode::kInvalidArgument, "empty feature name");
    if (name == id_column_ || name == target_column_) {
      Fail(ErrorCode::kInvalidArgument,
           "feature name collides with id/target column: " + name);
    }
    if (!index_.emplace(name, i).second) {
      Fail(ErrorCode::kInvalidArgument, "duplicate feature name: " + name);
    }
    if (features_[i].display_label.empty()) features_[i].display_label = name;
  }
}

std::optional<std::size_t> Schema::IndexOf(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Schema::RequireIndex(const std::string& name) const {
  auto index = IndexOf(name);
  if (!index) Fail(ErrorCode::kInvalidArgument, "unknown feature: " + name);
  return *index;
}

std::vector<std::string> Schema::ProtectedFeatureNames() const {
  std::vector<std::string> names;
  for (const auto& f : features_) {
    if (f.is_protected) names.push_back(f.name);
  }
  return names;
}

std::string_view FeatureKindName(FeatureKind kind) {
  return kind == FeatureKind::kCategorical ? "categorical" : "numeric";
}

SchemaConfig ParseSchemaConfig(const json& j) {
  try {
    std::vector<FeatureSpec> features;
    for (const auto& f : j.at("features")) {
      FeatureSpec spec;
      spec.name = f.at("name").get<std::string>();
      const std::string kind = f.at("kind").get<std::string>();
      if (kind == "categorical") {
        spec.kind = FeatureKind::kCategorical;
      } else if (kind == "numeric") {
        spec.kind = FeatureKind::kNumeric;
      } else {
        Fail(ErrorCode::kInvalidArgument,
             "feature " + spec.name + ": unknown kind '" + kind + "'");
      }
      spec.is_protected = f.value("protected", false);
      spec.display_label = f.value("display_label", spec.name);
      features.push_back(std::move(spec));
    }
    SchemaConfig config;
    config.schema = Schema(std::move(features), j.value("id_column", "id"),
                           j.value("target_column", "target"));
    if (j.contains("bins")) {
      for (const auto& [name, edges] : j.at("bins").items()) {
        config.schema.RequireIndex(name);
        config.bins[name] = edges.get<std::vector<double>>();
      }
    }
    if (j.contains("amount_features")) {
      for (const auto& name : j.at("amount_features")) {
        const std::size_t index =
            config.schema.RequireIndex(name.get<std::string>());
        if (config.schema.feature(index).kind != FeatureKind::kNumeric) {
          Fail(ErrorCode::kInvalidArgument,
               "amount feature must be numeric: " + name.get<std::string>());
        }
        config.amount_features.insert(name.get<std::string>());
      }
    }
    config.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("value_labels")) {
      config.value_labels = j.at("value_labels")
                                .get<std::map<std::string,
                                              std::map<std::string, std::string>>>();
    }
    return config;
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParse, "malformed schema config", e.what());
  }
}

SchemaConfig LoadSchemaConfig(const std::filesystem::path& path) {
  return ParseSchemaConfig(ReadJsonFile(path));
}

json ToJson(const SchemaConfig& config) {
  json features = json::array();
  for (const auto& f : config.schema.features()) {
    features.push_back({{"name", f.name},
                        {"kind", FeatureKindName(f.kind)},
                        {"protected", f.is_protected},
                        {"display_label", f.display_label}});
  }
  return {{"features", features},
          {"id_column", config.schema.id_column()},
          {"target_column", config.schema.target_column()},
          {"bins", config.bins},
          {"amount_features", config.amount_features},
          {"seed", config.seed},
          {"value_labels", config.value_labels}};
}

}  // namespace fairloop::data
