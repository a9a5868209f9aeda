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

#include "fairloop/gbdt/model.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <utility>

#include "fairloop/common/error.h"
#include "fairloop/data/preprocess.h"
#include "fairloop/gbdt/trainer.h"

namespace fairloop::gbdt {

using nlohmann::json;

std::string_view OutcomeName(Outcome outcome) {
  return outcome == Outcome::kAccept ? "Accept" : "Reject";
}

Prediction MakePrediction(double probability) {
  Prediction p;
  p.probability = probability;
  p.label = probability >= 0.5 ? Outcome::kReject : Outcome::kAccept;
  p.confidence = std::max(probability, 1.0 - probability);
  return p;
}

double RegressionTree::Predict(std::span<const double> row) const {
  std::size_t node = 0;
  while (!nodes[node].is_leaf()) {
    const TreeNode& n = nodes[node];
    node = static_cast<std::size_t>(
        row[static_cast<std::size_t>(n.column)] < n.threshold ? n.left : n.right);
  }
  return nodes[node].value;
}

int RegressionTree::Depth() const {
  // Nodes are stored breadth first, so parents precede children.
  std::vector<int> depth(nodes.size(), 0);
  int max_depth = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].is_leaf()) continue;
    for (auto child : {nodes[i].left, nodes[i].right}) {
      depth[static_cast<std::size_t>(child)] = depth[i] + 1;
      max_depth = std::max(max_depth, depth[i] + 1);
    }
  }
  return max_depth;
}

bool RegressionTree::UsesColumn(std::size_t column) const {
  return std::any_of(nodes.begin(), nodes.end(), [&](const TreeNode& n) {
    return !n.is_leaf() && static_cast<std::size_t>(n.column) == column;
  });
}

Model::Model(std::vector<RegressionTree> trees, double base_score,
             GbdtParams params, FeatureWeights feature_weights,
             std::vector<std::string> column_names, std::string fingerprint)
    : trees_(std::move(trees)),
      base_score_(base_score),
      params_(params),
      feature_weights_(std::move(feature_weights)),
      column_names_(std::move(column_names)),
      fingerprint_(std::move(fingerprint)) {}

double Model::Margin(std::span<const double> row, std::size_t max_trees) const {
  double margin = base_score_;
  const std::size_t n = std::min(max_trees, trees_.size());
  for (std::size_t t = 0; t < n; ++t) margin += trees_[t].Predict(row);
  return margin;
}

Prediction Model::Predict(std::span<const double> row) const {
  if (row.size() != column_names_.size()) {
    Fail(ErrorCode::kInvalidArgument,
         "row has " + std::to_string(row.size()) + " columns, model expects " +
             std::to_string(column_names_.size()));
  }
  return MakePrediction(Sigmoid(Margin(row)));
}

std::vector<Prediction> Model::PredictAll(const data::EncodedMatrix& matrix) const {
  if (matrix.num_columns() != column_names_.size()) {
    Fail(ErrorCode::kInvalidArgument,
         "matrix has " + std::to_string(matrix.num_columns()) +
             " columns, model expects " + std::to_string(column_names_.size()));
  }
  std::vector<Prediction> out;
  out.reserve(matrix.num_rows());
  std::vector<double> row(matrix.num_columns());
  for (std::size_t r = 0; r < matrix.num_rows(); ++r) {
    for (std::size_t c = 0; c < row.size(); ++c) row[c] = matrix.at(r, c);
    out.push_back(MakePrediction(Sigmoid(Margin(row))));
  }
  return out;
}

bool Model::operator==(const Model& other) const {
  return trees_ == other.trees_ && base_score_ == other.base_score_ &&
         feature_weights_ == other.feature_weights_ &&
         column_names_ == other.column_names_ &&
         fingerprint_ == other.fingerprint_ &&
         ToJson(params_) == ToJson(other.params_);
}

namespace {

json NodeToJson(const RegressionTree& tree, std::size_t index,
                const std::vector<std::string>& names) {
  const TreeNode& n = tree.nodes[index];
  if (n.is_leaf()) return {{"leaf", n.value}};
  return {{"column", n.column},
          {"name", names.at(static_cast<std::size_t>(n.column))},
          {"threshold", n.threshold},
          {"left", NodeToJson(tree, static_cast<std::size_t>(n.left), names)},
          {"right", NodeToJson(tree, static_cast<std::size_t>(n.right), names)}};
}

// Rebuilds the breadth-first node order used by the trainer.
RegressionTree TreeFromJson(const json& root, std::size_t num_columns) {
  RegressionTree tree;
  std::deque<std::pair<const json*, std::size_t>> queue;
  tree.nodes.emplace_back();
  queue.emplace_back(&root, 0);
  while (!queue.empty()) {
    auto [node_json, index] = queue.front();
    queue.pop_front();
    if (node_json->contains("leaf")) {
      tree.nodes[index].value = node_json->at("leaf").get<double>();
      continue;
    }
    const int column = node_json->at("column").get<int>();
    if (column < 0 || static_cast<std::size_t>(column) >= num_columns) {
      Fail(ErrorCode::kParse, "tree node references unknown column");
    }
    const auto left = static_cast<std::int32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    TreeNode& n = tree.nodes[index];
    n.column = column;
    n.threshold = node_json->at("threshold").get<double>();
    n.left = left;
    n.right = left + 1;
    queue.emplace_back(&node_json->at("left"), static_cast<std::size_t>(left));
    queue.emplace_back(&node_json->at("right"), static_cast<std::size_t>(left + 1));
  }
  return tree;
}

}  // namespace

json ToJson(const Model& model) {
  json trees = json::array();
  for (const auto& tree : model.trees()) {
    trees.push_back(NodeToJson(tree, 0, model.column_names()));
  }
  return {{"schema_version", kModelSchemaVersion},
          {"kind", "fairloop.gbdt.model"},
          {"base_score", model.base_score()},
          {"params", ToJson(model.params())},
          {"feature_weights", ToJson(model.feature_weights())},
          {"columns", model.column_names()},
          {"fingerprint", model.fingerprint()},
          {"trees", trees}};
}

Model ModelFromJson(const json& j) {
  try {
    const int version = j.at("schema_version").get<int>();
    if (version != kModelSchemaVersion) {
      Fail(ErrorCode::kParse,
           "unsupported model schema_version " + std::to_string(version));
    }
    auto columns = j.at("columns").get<std::vector<std::string>>();
    std::vector<RegressionTree> trees;
    for (const auto& t : j.at("trees")) trees.push_back(TreeFromJson(t, columns.size()));
    return Model(std::move(trees), j.at("base_score").get<double>(),
                 GbdtParamsFromJson(j.at("params")),
                 FeatureWeightsFromJson(j.at("feature_weights")),
                 std::move(columns), j.at("fingerprint").get<std::string>());
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParse, "malformed model snapshot", e.what());
  }
}

}  // namespace fairloop::gbdt
