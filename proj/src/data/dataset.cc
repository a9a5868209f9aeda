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

#include "fairloop/data/dataset.h"

#include <charconv>
#include <cmath>
#include <sstream>

#include "fairloop/common/csv.h"
#include "fairloop/common/error.h"
#include "fairloop/common/files.h"

namespace fairloop::data {

std::string CellToString(const Cell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) return csv::FormatDouble(*d);
  if (const auto* s = std::get_if<std::string>(&cell)) return *s;
  return "";
}

Dataset::Dataset(std::shared_ptr<const Schema> schema,
                 std::vector<std::string> ids,
                 std::vector<std::vector<Cell>> rows,
                 std::vector<std::optional<int>> targets)
    : schema_(std::move(schema)),
      ids_(std::move(ids)),
      rows_(std::move(rows)),
      targets_(std::move(targets)) {
  if (!schema_) Fail(ErrorCode::kInvalidArgument, "dataset without schema");
  if (rows_.size() != ids_.size() || targets_.size() != ids_.size()) {
    Fail(ErrorCode::kInvalidArgument, "dataset ids/rows/targets size mismatch");
  }
  id_index_.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (rows_[i].size() != schema_->size()) {
      Fail(ErrorCode::kInvalidArgument,
           "row " + ids_[i] + " has " + std::to_string(rows_[i].size()) +
               " values, schema has " + std::to_string(schema_->size()));
    }
    if (!id_index_.emplace(ids_[i], i).second) {
      Fail(ErrorCode::kInvalidArgument, "duplicate instance id: " + ids_[i]);
    }
    if (targets_[i] && *targets_[i] != 0 && *targets_[i] != 1) {
      Fail(ErrorCode::kInvalidArgument, "non-binary target for " + ids_[i]);
    }
    for (std::size_t f = 0; f < rows_[i].size(); ++f) {
      const Cell& c = rows_[i][f];
      const bool numeric = schema_->feature(f).kind == FeatureKind::kNumeric;
      if (IsMissing(c)) continue;
      if (numeric != std::holds_alternative<double>(c)) {
        Fail(ErrorCode::kInvalidArgument,
             "row " + ids_[i] + ": value type does not match feature " +
                 schema_->feature(f).name);
      }
      if (numeric && !std::isfinite(std::get<double>(c))) {
        Fail(ErrorCode::kInvalidArgument, "row " + ids_[i] +
                                              ": non-finite value for " +
                                              schema_->feature(f).name);
      }
    }
  }
}

std::optional<std::size_t> Dataset::IndexOfId(const std::string& id) const {
  auto it = id_index_.find(id);
  if (it == id_index_.end()) return std::nullopt;
  return it->second;
}

bool Dataset::HasCompleteTargets() const {
  for (const auto& t : targets_) {
    if (!t) return false;
  }
  return true;
}

bool Dataset::HasMissingValues() const {
  for (const auto& row : rows_) {
    for (const auto& c : row) {
      if (IsMissing(c)) return true;
    }
  }
  return false;
}

std::vector<int> Dataset::RequireTargets() const {
  std::vector<int> out;
  out.reserve(targets_.size());
  for (std::size_t i = 0; i < targets_.size(); ++i) {
    if (!targets_[i]) {
      Fail(ErrorCode::kFailedPrecondition, "missing target for " + ids_[i]);
    }
    out.push_back(*targets_[i]);
  }
  return out;
}

Dataset Dataset::Select(std::span<const std::size_t> indices) const {
  std::vector<std::string> ids;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::optional<int>> targets;
  ids.reserve(indices.size());
  rows.reserve(indices.size());
  targets.reserve(indices.size());
  for (std::size_t i : indices) {
    ids.push_back(ids_.at(i));
    rows.push_back(rows_[i]);
    targets.push_back(targets_[i]);
  }
  return Dataset(schema_, std::move(ids), std::move(rows), std::move(targets));
}

Dataset Dataset::WithTargets(std::vector<std::optional<int>> targets) const {
  return Dataset(schema_, ids_, rows_, std::move(targets));
}

Dataset Dataset::WithRows(std::vector<std::vector<Cell>> rows) const {
  return Dataset(schema_, ids_, std::move(rows), targets_);
}

Dataset Dataset::Concat(const Dataset& tail) const {
  if (!(*schema_ == tail.schema())) {
    Fail(ErrorCode::kInvalidArgument, "concat of datasets with different schemas");
  }
  std::vector<std::string> ids = ids_;
  std::vector<std::vector<Cell>> rows = rows_;
  std::vector<std::optional<int>> targets = targets_;
  ids.insert(ids.end(), tail.ids_.begin(), tail.ids_.end());
  rows.insert(rows.end(), tail.rows_.begin(), tail.rows_.end());
  targets.insert(targets.end(), tail.targets_.begin(), tail.targets_.end());
  return Dataset(schema_, std::move(ids), std::move(rows), std::move(targets));
}

bool Dataset::operator==(const Dataset& other) const {
  return *schema_ == *other.schema_ && ids_ == other.ids_ &&
         rows_ == other.rows_ && targets_ == other.targets_;
}

namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::optional<double> ParseNumber(std::string_view text) {
  text = Trim(text);
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  if (!std::isfinite(value)) return std::nullopt;
  return value;
}

}  // namespace

Dataset ParseCsv(const std::string& text, std::shared_ptr<const Schema> schema) {
  const auto records = csv::ParseString(text);
  if (records.empty()) Fail(ErrorCode::kParse, "csv: missing header row");
  const csv::Record& header = records.front();

  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < header.size(); ++i) {
    position.emplace(std::string(Trim(header[i])), i);
  }
  std::vector<std::string> missing;
  auto find = [&](const std::string& name) -> std::optional<std::size_t> {
    auto it = position.find(name);
    if (it == position.end()) return std::nullopt;
    return it->second;
  };
  const auto id_col = find(schema->id_column());
  if (!id_col) missing.push_back(schema->id_column());
  std::vector<std::size_t> feature_col(schema->size());
  for (std::size_t f = 0; f < schema->size(); ++f) {
    auto col = find(schema->feature(f).name);
    if (!col) {
      missing.push_back(schema->feature(f).name);
    } else {
      feature_col[f] = *col;
    }
  }
  if (!missing.empty()) {
    std::string names;
    for (const auto& m : missing) names += (names.empty() ? "" : ", ") + m;
    Fail(ErrorCode::kInvalidArgument, "csv header is missing columns: " + names,
         names);
  }
  const auto target_col = find(schema->target_column());

  std::vector<std::string> ids;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::optional<int>> targets;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const csv::Record& rec = records[r];
    auto field = [&](std::size_t col) -> std::string_view {
      return col < rec.size() ? std::string_view(rec[col]) : std::string_view();
    };
    std::string id(Trim(field(*id_col)));
    if (id.empty()) {
      Fail(ErrorCode::kParse, "csv record " + std::to_string(r) + " has no id");
    }
    std::vector<Cell> row(schema->size());
    for (std::size_t f = 0; f < schema->size(); ++f) {
      const std::string_view raw = field(feature_col[f]);
      if (schema->feature(f).kind == FeatureKind::kNumeric) {
        if (auto v = ParseNumber(raw)) row[f] = *v;
      } else if (!Trim(raw).empty()) {
        row[f] = std::string(Trim(raw));
      }
    }
    std::optional<int> target;
    if (target_col) {
      if (auto v = ParseNumber(field(*target_col)); v && (*v == 0 || *v == 1)) {
        target = static_cast<int>(*v);
      }
    }
    ids.push_back(std::move(id));
    rows.push_back(std::move(row));
    targets.push_back(target);
  }
  return Dataset(std::move(schema), std::move(ids), std::move(rows),
                 std::move(targets));
}

Dataset LoadCsv(const std::filesystem::path& path,
                std::shared_ptr<const Schema> schema) {
  return ParseCsv(ReadFile(path), std::move(schema));
}

std::string ToCsv(const Dataset& dataset) {
  std::ostringstream out;
  const Schema& schema = dataset.schema();
  bool labeled = false;
  for (const auto& t : dataset.targets()) labeled = labeled || t.has_value();
  std::vector<std::string> fields;
  fields.push_back(schema.id_column());
  if (labeled) fields.push_back(schema.target_column());
  for (const auto& f : schema.features()) fields.push_back(f.name);
  csv::WriteRecord(out, fields);
  for (std::size_t r = 0; r < dataset.num_rows(); ++r) {
    fields.clear();
    fields.push_back(dataset.id(r));
    if (labeled) {
      const auto& t = dataset.target(r);
      fields.push_back(t ? std::to_string(*t) : "");
    }
    for (const Cell& c : dataset.row(r)) fields.push_back(CellToString(c));
    csv::WriteRecord(out, fields);
  }
  return out.str();
}

}  // namespace fairloop::data
