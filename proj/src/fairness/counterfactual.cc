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

#include "fairloop/fairness/counterfactual.h"

#include <algorithm>
#include <map>

#include "fairloop/common/error.h"

namespace fairloop::fairness {
namespace {

double Median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

CounterfactualPlan::CounterfactualPlan(const data::Dataset& dataset,
                                       const std::string& attribute,
                                       const data::BinningRule* rule)
    : attribute_(attribute),
      feature_(dataset.schema().RequireIndex(attribute)),
      value_of_row_(dataset.num_rows()) {
  const auto& spec = dataset.schema().feature(feature_);
  if (spec.kind == data::FeatureKind::kCategorical) {
    std::map<std::string, std::vector<std::size_t>> rows_by_level;
    for (std::size_t r = 0; r < dataset.num_rows(); ++r) {
      const data::Cell& cell = dataset.cell(r, feature_);
      if (data::IsMissing(cell)) {
        Fail(ErrorCode::kFailedPrecondition,
             "counterfactual requires imputed data; '" + attribute +
                 "' has a missing value");
      }
      rows_by_level[std::get<std::string>(cell)].push_back(r);
    }
    for (auto& [level, rows] : rows_by_level) {
      for (std::size_t r : rows) value_of_row_[r] = substitutes_.size();
      substitutes_.emplace_back(level);
    }
  } else {
    if (rule == nullptr) {
      Fail(ErrorCode::kInvalidArgument,
           "numeric attribute '" + attribute + "' needs a binning rule");
    }
    std::map<std::size_t, std::vector<std::size_t>> rows_by_bin;
    for (std::size_t r = 0; r < dataset.num_rows(); ++r) {
      const data::Cell& cell = dataset.cell(r, feature_);
      if (data::IsMissing(cell)) {
        Fail(ErrorCode::kFailedPrecondition,
             "counterfactual requires imputed data; '" + attribute +
                 "' has a missing value");
      }
      rows_by_bin[rule->BinOf(std::get<double>(cell))].push_back(r);
    }
    for (auto& [bin, rows] : rows_by_bin) {
      std::vector<double> values;
      values.reserve(rows.size());
      for (std::size_t r : rows) {
        values.push_back(std::get<double>(dataset.cell(r, feature_)));
        value_of_row_[r] = substitutes_.size();
      }
      substitutes_.emplace_back(Median(std::move(values)));
    }
  }
  if (substitutes_.size() < 2) {
    Fail(ErrorCode::kInvalidArgument,
         "attribute '" + attribute + "' has a single observed value");
  }
}

double CounterfactualInvariance(const gbdt::Model& model,
                                const data::Encoder& encoder,
                                const data::EncodedMatrix& encoded,
                                const CounterfactualPlan& plan) {
  const std::size_t n = encoded.num_rows();
  if (n == 0) Fail(ErrorCode::kInvalidArgument, "counterfactual on an empty set");
  if (model.num_columns() != encoded.num_columns()) {
    Fail(ErrorCode::kInvalidArgument,
         "model was not trained on this encoding");
  }
  std::size_t invariant = 0;
  std::vector<double> patched;
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<double> row = encoded.Row(i);
    const gbdt::Outcome base = model.Predict(row).label;
    bool same = true;
    for (std::size_t v = 0; v < plan.substitutes().size() && same; ++v) {
      if (v == plan.ValueOf(i)) continue;
      patched = row;
      encoder.EncodeFeature(plan.feature(), plan.substitutes()[v], patched);
      same = model.Predict(patched).label == base;
    }
    if (same) ++invariant;
  }
  return static_cast<double>(invariant) / static_cast<double>(n);
}

double CounterfactualInvariance(const gbdt::Model& model,
                                const data::Encoder& encoder,
                                const data::Dataset& dataset,
                                const std::string& attribute,
                                const data::BinningRule* rule) {
  const CounterfactualPlan plan(dataset, attribute, rule);
  return CounterfactualInvariance(model, encoder, encoder.Transform(dataset), plan);
}

}  // namespace fairloop::fairness
