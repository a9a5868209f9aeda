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

#ifndef FAIRLOOP_DATA_PREPROCESS_H_
#define FAIRLOOP_DATA_PREPROCESS_H_

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "fairloop/common/error.h"
#include "fairloop/data/dataset.h"
#include "json.hpp"

namespace fairloop::data {

inline constexpr const char* kUnknownCategory = "Unknown";

// Numeric medians learned from one dataset, applied to any dataset with the
// same schema. Categorical gaps always become kUnknownCategory.
struct ImputationRule {
  std::map<std::string, double> medians;
};

ImputationRule FitImputation(const Dataset& dataset);
Dataset ApplyImputation(const Dataset& dataset, const ImputationRule& rule);
// FitImputation + ApplyImputation on the same dataset.
Dataset Impute(const Dataset& dataset);

nlohmann::json ToJson(const ImputationRule& rule);
ImputationRule ImputationRuleFromJson(const nlohmann::json& json);

// One encoded column. category is empty for numeric features.
struct EncodedColumn {
  std::size_t feature_index = 0;
  std::string feature;
  std::optional<std::string> category;

  std::string Name() const;
};

// Column-major numeric matrix. Row order and ids follow the source Dataset.
class EncodedMatrix {
 public:
  EncodedMatrix() = default;
  EncodedMatrix(std::size_t rows, std::vector<EncodedColumn> columns,
                std::vector<std::string> ids, std::vector<int> target);

  std::size_t num_rows() const { return num_rows_; }
  std::size_t num_columns() const { return columns_.size(); }
  const std::vector<EncodedColumn>& columns() const { return columns_; }
  const std::vector<std::string>& ids() const { return ids_; }
  // Empty when the source dataset was unlabeled.
  const std::vector<int>& target() const { return target_; }
  bool has_target() const { return !target_.empty(); }

  double at(std::size_t row, std::size_t column) const {
    return values_[column * num_rows_ + row];
  }
  double& at(std::size_t row, std::size_t column) {
    return values_[column * num_rows_ + row];
  }
  std::span<const double> column(std::size_t index) const {
    return {values_.data() + index * num_rows_, num_rows_};
  }
  std::vector<double> Row(std::size_t row) const;

  // Feature-group names in schema order (one per source feature).
  std::vector<std::string> GroupNames() const;

  // Rows of this matrix followed by the selected rows of `tail`, the latter
  // with replacement targets.
  EncodedMatrix AppendRows(const EncodedMatrix& tail,
                           std::span<const std::size_t> tail_rows,
                           std::span<const int> tail_targets) const;

 private:
  std::size_t num_rows_ = 0;
  std::vector<EncodedColumn> columns_;
  std::vector<double> values_;
  std::vector<std::string> ids_;
  std::vector<int> target_;
};

// Learned encoding: one-hot categories per categorical feature and min-max
// bounds per numeric feature (after log1p for amount features).
class Encoder {
 public:
  struct NumericScale {
    bool log1p = false;
    double min = 0.0;
    double max = 0.0;
    bool constant() const { return !(max > min); }
  };

  static Encoder Fit(const Dataset& dataset,
                     const std::set<std::string>& amount_features,
                     Warnings* warnings = nullptr);

  // Requires an imputed dataset. Unseen categories encode as an all-zero
  // group with a warning.
  EncodedMatrix Transform(const Dataset& dataset,
                          Warnings* warnings = nullptr) const;

  // Overwrites the columns of one feature in an encoded row.
  void EncodeFeature(std::size_t feature, const Cell& value,
                     std::span<double> row, Warnings* warnings = nullptr) const;

  const Schema& schema() const { return *schema_; }
  const std::shared_ptr<const Schema>& schema_ptr() const { return schema_; }
  const std::vector<EncodedColumn>& columns() const { return columns_; }
  std::size_t num_columns() const { return columns_.size(); }
  const std::vector<std::size_t>& ColumnsOfFeature(std::size_t feature) const {
    return feature_columns_[feature];
  }
  const std::vector<std::string>& Categories(std::size_t feature) const {
    return categories_[feature];
  }
  const NumericScale& Scale(std::size_t feature) const {
    return scales_[feature];
  }

  nlohmann::json ToJson() const;
  static Encoder FromJson(const nlohmann::json& json,
                          std::shared_ptr<const Schema> schema);

 private:
  void BuildColumns();

  std::shared_ptr<const Schema> schema_;
  std::vector<std::vector<std::string>> categories_;  // per feature, sorted
  std::vector<NumericScale> scales_;                  // per feature
  std::vector<EncodedColumn> columns_;
  std::vector<std::vector<std::size_t>> feature_columns_;
};

// Encoder::Fit + Transform on the same dataset.
EncodedMatrix Encode(const Dataset& dataset,
                     const std::set<std::string>& amount_features,
                     Warnings* warnings = nullptr);

}  // namespace fairloop::data

#endif  // FAIRLOOP_DATA_PREPROCESS_H_
