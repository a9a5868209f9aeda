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

#include "fairloop/common/csv.h"

#include <charconv>
#include <sstream>

#include "fairloop/common/error.h"

namespace fairloop::csv {

std::vector<Record> Parse(std::istream& in) {
  std::vector<Record> records;
  Record current;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;  // distinguishes "" (empty record) from ,
  bool first_field = true;
  std::size_t line = 1;

  auto end_field = [&] {
    if (first_field && records.empty() && current.empty() &&
        field.rfind("\xEF\xBB\xBF", 0) == 0) {
      field.erase(0, 3);
    }
    first_field = false;
    current.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    if (current.empty() && !field_started && field.empty()) return;
    end_field();
    records.push_back(std::move(current));
    current.clear();
  };

  char c;
  while (in.get(c)) {
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty()) {
          Fail(ErrorCode::kParse,
               "csv: unexpected quote inside unquoted field on line " +
                   std::to_string(line));
        }
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        field_started = true;
        end_field();
        field_started = true;
        break;
      case '\r':
        if (in.peek() == '\n') break;
        [[fallthrough]];
      case '\n':
        end_record();
        ++line;
        break;
      default:
        field_started = true;
        field.push_back(c);
    }
  }
  if (in_quotes) {
    Fail(ErrorCode::kParse, "csv: unterminated quoted field at end of input");
  }
  end_record();
  return records;
}

std::vector<Record> ParseString(const std::string& text) {
  std::istringstream in(text);
  return Parse(in);
}

std::string Escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void WriteRecord(std::ostream& out, std::span<const std::string> fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out << ',';
    out << Escape(fields[i]);
  }
  out << '\n';
}

std::string FormatDouble(double value) {
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) return std::to_string(value);
  return std::string(buffer, end);
}

}  // namespace fairloop::csv
