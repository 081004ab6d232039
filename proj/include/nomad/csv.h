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

#ifndef NOMAD_CSV_H_
#define NOMAD_CSV_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace nomad {

// Minimal comma-separated tables: UTF-8, LF line endings, no quoting. Fields
// written by this project never contain commas or newlines.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Reads a table and checks that its header matches `expected_header`
// exactly. Throws Error(kNotFound) / Error(kDataError).
CsvTable ReadCsv(const std::filesystem::path& path,
                 std::string_view expected_header);
void WriteCsv(const std::filesystem::path& path, const CsvTable& table);

std::vector<std::string> SplitFields(std::string_view line, char sep = ',');
std::string JoinFields(const std::vector<std::string>& fields, char sep = ',');

// Shortest representation that parses back to the same double.
std::string FormatDouble(double value);
double ParseDouble(std::string_view text);
long long ParseInt(std::string_view text);

}  // namespace nomad

#endif  // NOMAD_CSV_H_
