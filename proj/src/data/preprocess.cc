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

#include "fairloop/data/preprocess.h"

#include <algorithm>
#include <cmath>

namespace fairloop::data {

using nlohmann::json;

namespace {

double Median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

ImputationRule FitImputation(const Dataset& dataset) {
  ImputationRule rule;
  const Schema& schema = dataset.schema();
  for (std::size_t f = 0; f < schema.size(); ++f) {
    if (schema.feature(f).kind != FeatureKind::kNumeric) continue;
    std::vector<double> observed;
    observed.reserve(dataset.num_rows());
    for (std::size_t r = 0; r < dataset.num_rows(); ++r) {
      if (const auto* v = std::get_if<double>(&dataset.cell(r, f))) {
        observed.push_back(*v);
      }
    }
    if (observed.empty()) {
      Fail(ErrorCode::kFailedPrecondition,
           "cannot impute numeric feature '" + schema.feature(f).name +
               "': every value is missing");
    }
    rule.medians[schema.feature(f).name] = Median(std::move(observed));
  }
  return rule;
}

Dataset ApplyImputation(const Dataset& dataset, const ImputationRule& rule) {
  const Schema& schema = dataset.schema();
  std::vector<std::vector<Cell>> rows;
  rows.reserve(dataset.num_rows());
  for (std::size_t r = 0; r < dataset.num_rows(); ++r) {
    std::vector<Cell> row(dataset.row(r).begin(), dataset.row(r).end());
    for (std::size_t f = 0; f < row.size(); ++f) {
      if (!IsMissing(row[f])) continue;
      const FeatureSpec& spec = schema.feature(f);
      if (spec.kind == FeatureKind::kCategorical) {
        row[f] = std::string(kUnknownCategory);
        continue;
      }
      auto it = rule.medians.find(spec.name);
      if (it == rule.medians.end()) {
        Fail(ErrorCode::kFailedPrecondition,
             "no imputation median for feature " + spec.name);
      }
      row[f] = it->second;
    }
    rows.push_back(std::move(row));
  }
  return dataset.WithRows(std::move(rows));
}

Dataset Impute(const Dataset& dataset) {
  return ApplyImputation(dataset, FitImputation(dataset));
}

json ToJson(const ImputationRule& rule) { return {{"medians", rule.medians}}; }

ImputationRule ImputationRuleFromJson(const json& j) {
  ImputationRule rule;
  rule.medians = j.at("medians").get<std::map<std::string, double>>();
  return rule;
}

std::string EncodedColumn::Name() const {
  return category ? feature + "=" + *category : feature;
}

EncodedMatrix::EncodedMatrix(std::size_t rows, std::vector<EncodedColumn> columns,
                             std::vector<std::string> ids,
                             std::vector<int> target)
    : num_rows_(rows),
      columns_(std::move(columns)),
      values_(rows * columns_.size(), 0.0),
      ids_(std::move(ids)),
      target_(std::move(target)) {
  if (ids_.size() != rows) {
    Fail(ErrorCode::kInvalidArgument, "encoded matrix id count mismatch");
  }
  if (!target_.empty() && target_.size() != rows) {
    Fail(ErrorCode::kInvalidArgument, "encoded matrix target size mismatch");
  }
}

std::vector<double> EncodedMatrix::Row(std::size_t row) const {
  std::vector<double> out(columns_.size());
  for (std::size_t c = 0; c < columns_.size(); ++c) out[c] = at(row, c);
  return out;
}

std::vector<std::string> EncodedMatrix::GroupNames() const {
  std::vector<std::string> names;
  for (const auto& c : columns_) {
    if (names.empty() || names.back() != c.feature) names.push_back(c.feature);
  }
  return names;
}

EncodedMatrix EncodedMatrix::AppendRows(const EncodedMatrix& tail,
                                        std::span<const std::size_t> tail_rows,
                                        std::span<const int> tail_targets) const {
  if (tail.num_columns() != num_columns()) {
    Fail(ErrorCode::kInvalidArgument, "append of matrices with different columns");
  }
  for (std::size_t c = 0; c < num_columns(); ++c) {
    if (tail.columns_[c].Name() != columns_[c].Name()) {
      Fail(ErrorCode::kInvalidArgument,
           "append of matrices with different columns: " + columns_[c].Name());
    }
  }
  if (tail_rows.size() != tail_targets.size()) {
    Fail(ErrorCode::kInvalidArgument, "append rows/targets size mismatch");
  }
  if (!has_target()) {
    Fail(ErrorCode::kFailedPrecondition, "append onto an unlabeled matrix");
  }
  const std::size_t n = num_rows_ + tail_rows.size();
  std::vector<std::string> ids = ids_;
  std::vector<int> target = target_;
  for (std::size_t k = 0; k < tail_rows.size(); ++k) {
    ids.push_back(tail.ids_.at(tail_rows[k]));
    target.push_back(tail_targets[k]);
  }
  EncodedMatrix out(n, columns_, std::move(ids), std::move(target));
  for (std::size_t c = 0; c < num_columns(); ++c) {
    std::copy(values_.begin() + c * num_rows_,
              values_.begin() + (c + 1) * num_rows_,
              out.values_.begin() + c * n);
    for (std::size_t k = 0; k < tail_rows.size(); ++k) {
      out.values_[c * n + num_rows_ + k] = tail.at(tail_rows[k], c);
    }
  }
  return out;
}

Encoder Encoder::Fit(const Dataset& dataset,
                     const std::set<std::string>& amount_features,
                     Warnings* warnings) {
  Encoder enc;
  enc.schema_ = dataset.schema_ptr();
  const Schema& schema = dataset.schema();
  enc.categories_.resize(schema.size());
  enc.scales_.resize(schema.size());
  for (const auto& name : amount_features) schema.RequireIndex(name);

  for (std::size_t f = 0; f < schema.size(); ++f) {
    const FeatureSpec& spec = schema.feature(f);
    if (spec.kind == FeatureKind::kCategorical) {
      std::set<std::string> levels;
      for (std::size_t r = 0; r < dataset.num_rows(); ++r) {
        if (const auto* s = std::get_if<std::string>(&dataset.cell(r, f))) {
          levels.insert(*s);
        }
      }
      enc.categories_[f].assign(levels.begin(), levels.end());
      continue;
    }
    NumericScale scale;
    scale.log1p = amount_features.count(spec.name) > 0;
    bool seen = false;
    for (std::size_t r = 0; r < dataset.num_rows(); ++r) {
      const auto* v = std::get_if<double>(&dataset.cell(r, f));
      if (v == nullptr) continue;
      double x = *v;
      if (scale.log1p) {
        if (x <= -1.0) {
          Fail(ErrorCode::kInvalidArgument,
               "amount feature " + spec.name + " has value <= -1 for " +
                   dataset.id(r));
        }
        x = std::log1p(x);
      }
      if (!seen || x < scale.min) scale.min = x;
      if (!seen || x > scale.max) scale.max = x;
      seen = true;
    }
    if (scale.constant()) {
      Warn(warnings, "constant numeric feature '" + spec.name +
                         "' is encoded as all zeros");
    }
    enc.scales_[f] = scale;
  }
  enc.BuildColumns();
  return enc;
}

void Encoder::BuildColumns() {
  columns_.clear();
  feature_columns_.assign(schema_->size(), {});
  for (std::size_t f = 0; f < schema_->size(); ++f) {
    const FeatureSpec& spec = schema_->feature(f);
    if (spec.kind == FeatureKind::kCategorical) {
      for (const auto& level : categories_[f]) {
        feature_columns_[f].push_back(columns_.size());
        columns_.push_back({f, spec.name, level});
      }
    } else {
      feature_columns_[f].push_back(columns_.size());
      columns_.push_back({f, spec.name, std::nullopt});
    }
  }
}

void Encoder::EncodeFeature(std::size_t feature, const Cell& value,
                            std::span<double> row, Warnings* warnings) const {
  const FeatureSpec& spec = schema_->feature(feature);
  const auto& cols = feature_columns_[feature];
  if (IsMissing(value)) {
    Fail(ErrorCode::kFailedPrecondition,
         "encode requires imputed data; missing value for " + spec.name);
  }
  if (spec.kind == FeatureKind::kCategorical) {
    const std::string& level = std::get<std::string>(value);
    const auto& levels = categories_[feature];
    auto it = std::lower_bound(levels.begin(), levels.end(), level);
    const bool known = it != levels.end() && *it == level;
    for (std::size_t k = 0; k < cols.size(); ++k) row[cols[k]] = 0.0;
    if (known) {
      row[cols[static_cast<std::size_t>(it - levels.begin())]] = 1.0;
    } else {
      Warn(warnings, "unseen category '" + level + "' for " + spec.name);
    }
    return;
  }
  const NumericScale& scale = scales_[feature];
  double x = std::get<double>(value);
  if (scale.log1p) x = std::log1p(std::max(x, -1.0 + 1e-12));
  row[cols.front()] = scale.constant() ? 0.0 : (x - scale.min) / (scale.max - scale.min);
}

EncodedMatrix Encoder::Transform(const Dataset& dataset,
                                 Warnings* warnings) const {
  if (!(dataset.schema() == *schema_)) {
    Fail(ErrorCode::kInvalidArgument, "encoder schema does not match dataset");
  }
  std::vector<int> target;
  if (dataset.HasCompleteTargets() && !dataset.empty()) {
    target = dataset.RequireTargets();
  }
  EncodedMatrix out(dataset.num_rows(), columns_, dataset.ids(),
                    std::move(target));
  std::vector<double> row(columns_.size());
  for (std::size_t r = 0; r < dataset.num_rows(); ++r) {
    for (std::size_t f = 0; f < schema_->size(); ++f) {
      EncodeFeature(f, dataset.cell(r, f), row, warnings);
    }
    for (std::size_t c = 0; c < columns_.size(); ++c) out.at(r, c) = row[c];
  }
  return out;
}

json Encoder::ToJson() const {
  json features = json::array();
  for (std::size_t f = 0; f < schema_->size(); ++f) {
    const FeatureSpec& spec = schema_->feature(f);
    if (spec.kind == FeatureKind::kCategorical) {
      features.push_back({{"name", spec.name}, {"categories", categories_[f]}});
    } else {
      const NumericScale& s = scales_[f];
      features.push_back({{"name", spec.name},
                          {"log1p", s.log1p},
                          {"min", s.min},
                          {"max", s.max}});
    }
  }
  return {{"features", features}};
}

Encoder Encoder::FromJson(const json& j, std::shared_ptr<const Schema> schema) {
  Encoder enc;
  enc.schema_ = std::move(schema);
  enc.categories_.resize(enc.schema_->size());
  enc.scales_.resize(enc.schema_->size());
  const auto& features = j.at("features");
  if (features.size() != enc.schema_->size()) {
    Fail(ErrorCode::kInvalidArgument, "encoder metadata does not match schema");
  }
  for (std::size_t f = 0; f < features.size(); ++f) {
    const auto& fj = features[f];
    if (fj.at("name").get<std::string>() != enc.schema_->feature(f).name) {
      Fail(ErrorCode::kInvalidArgument,
           "encoder metadata feature order does not match schema");
    }
    if (enc.schema_->feature(f).kind == FeatureKind::kCategorical) {
      enc.categories_[f] = fj.at("categories").get<std::vector<std::string>>();
    } else {
      enc.scales_[f] = {fj.at("log1p").get<bool>(), fj.at("min").get<double>(),
                        fj.at("max").get<double>()};
    }
  }
  enc.BuildColumns();
  return enc;
}

EncodedMatrix Encode(const Dataset& dataset,
                     const std::set<std::string>& amount_features,
                     Warnings* warnings) {
  return Encoder::Fit(dataset, amount_features, warnings)
      .Transform(dataset, warnings);
}

}  // namespace fairloop::data
