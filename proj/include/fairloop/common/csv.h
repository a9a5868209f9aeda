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

#ifndef FAIRLOOP_COMMON_CSV_H_
#define FAIRLOOP_COMMON_CSV_H_

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace fairloop::csv {

using Record = std::vector<std::string>;

// RFC-4180 reader: quoted fields may contain commas, doubled quotes and line
// breaks. Both CRLF and LF line endings are accepted. A trailing empty line is
// not a record. A UTF-8 byte order mark on the first field is dropped.
std::vector<Record> Parse(std::istream& in);
std::vector<Record> ParseString(const std::string& text);

// Quotes a field only when it contains a comma, quote or line break.
std::string Escape(const std::string& field);
void WriteRecord(std::ostream& out, std::span<const std::string> fields);

// Shortest decimal form that parses back to the same double.
std::string FormatDouble(double value);

}  // namespace fairloop::csv

#endif  // FAIRLOOP_COMMON_CSV_H_
