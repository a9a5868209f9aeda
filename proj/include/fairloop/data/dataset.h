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

#ifndef FAIRLOOP_DATA_DATASET_H_
#define FAIRLOOP_DATA_DATASET_H_

#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "fairloop/data/schema.h"

namespace fairloop::data {

// A raw cell: missing, numeric, or a categorical level.
using Cell = std::variant<std::monostate, double, std::string>;

inline bool IsMissing(const Cell& cell) {
  return std::holds_alternative<std::monostate>(cell);
}
std::string CellToString(const Cell& cell);

// Target polarity: 1 means payment difficulty, which the model reports as
// Reject. Accept is the favorable outcome everywhere downstream.
inline constexpr int kTargetReject = 1;
inline constexpr int kTargetAccept = 0;

// Immutable, instance-id indexed table of raw values.
class Dataset {
 public:
  Dataset(std::shared_ptr<const Schema> schema, std::vector<std::string> ids,
          std::vector<std::vector<Cell>> rows,
          std::vector<std::optional<int>> targets);

  const Schema& schema() const { return *schema_; }
  const std::shared_ptr<const Schema>& schema_ptr() const { return schema_; }

  std::size_t num_rows() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  const std::vector<std::string>& ids() const { return ids_; }
  const std::string& id(std::size_t row) const { return ids_[row]; }
  std::span<const Cell> row(std::size_t index) const { return rows_[index]; }
  const Cell& cell(std::size_t row, std::size_t feature) const {
    return rows_[row][feature];
  }
  const std::optional<int>& target(std::size_t row) const {
    return targets_[row];
  }
  const std::vector<std::optional<int>>& targets() const { return targets_; }

  std::optional<std::size_t> IndexOfId(const std::string& id) const;
  bool HasCompleteTargets() const;
  bool HasMissingValues() const;
  // Targets as plain ints; throws kFailedPrecondition if any is missing.
  std::vector<int> RequireTargets() const;

  Dataset Select(std::span<const std::size_t> indices) const;
  Dataset WithTargets(std::vector<std::optional<int>> targets) const;
  Dataset WithRows(std::vector<std::vector<Cell>> rows) const;
  // Rows of `tail` appended after this dataset's rows; schemas must match.
  Dataset Concat(const Dataset& tail) const;

  bool operator==(const Dataset& other) const;

 private:
  std::shared_ptr<const Schema> schema_;
  std::vector<std::string> ids_;
  std::vector<std::vector<Cell>> rows_;
  std::vector<std::optional<int>> targets_;
  std::unordered_map<std::string, std::size_t> id_index_;
};

// Reads an RFC-4180 CSV. The header must contain the schema's id column and
// every schema feature; the target column is optional (an unlabeled set).
// Columns outside the schema are ignored. Empty or unparseable numeric cells
// become missing.
Dataset LoadCsv(const std::filesystem::path& path,
                std::shared_ptr<const Schema> schema);
Dataset ParseCsv(const std::string& text, std::shared_ptr<const Schema> schema);

// Writes id, target (when any row is labeled), then features in schema order.
std::string ToCsv(const Dataset& dataset);

}  // namespace fairloop::data

#endif  // FAIRLOOP_DATA_DATASET_H_
