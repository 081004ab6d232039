// Copyright 2026 The NOMAD Authors. All Rights Reserved.
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

#include "nomad/csv.h"

#include <charconv>
#include <fstream>
#include <sstream>

#include "nomad/error.h"

namespace nomad {

std::vector<std::string> SplitFields(std::string_view line, char sep) {
  std::vector<std::string> fields;
  size_t start = 0;
  while (true) {
    const size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      break;
    }
    fields.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

std::string JoinFields(const std::vector<std::string>& fields, char sep) {
  std::string out;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out.push_back(sep);
    out += fields[i];
  }
  return out;
}

CsvTable ReadCsv(const std::filesystem::path& path,
                 std::string_view expected_header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, path.string());
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::kDataError, path.string() + ": empty file");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected_header) {
    throw Error(ErrorCode::kDataError,
                path.string() + ": expected header '" +
                    std::string(expected_header) + "', got '" + line + "'");
  }
  table.header = SplitFields(line);
  size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = SplitFields(line);
    if (fields.size() != table.header.size()) {
      throw Error(ErrorCode::kDataError,
                  path.string() + ":" + std::to_string(line_number) +
                      ": expected " + std::to_string(table.header.size()) +
                      " fields");
    }
    table.rows.push_back(std::move(fields));
  }
  return table;
}

void WriteCsv(const std::filesystem::path& path, const CsvTable& table) {
  std::ostringstream out;
  out << JoinFields(table.header) << '\n';
  for (const auto& row : table.rows) out << JoinFields(row) << '\n';
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  file << out.str();
  if (!file) throw Error(ErrorCode::kIo, "short write to " + path.string());
}

std::string FormatDouble(double value) {
  char buffer[64];
  auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

double ParseDouble(std::string_view text) {
  double value = 0.0;
  auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc() || result.ptr != text.data() + text.size()) {
    throw Error(ErrorCode::kDataError,
                "not a number: '" + std::string(text) + "'");
  }
  return value;
}

long long ParseInt(std::string_view text) {
  long long value = 0;
  auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc() || result.ptr != text.data() + text.size()) {
    throw Error(ErrorCode::kDataError,
                "not an integer: '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace nomad
