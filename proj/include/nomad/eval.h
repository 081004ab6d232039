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

#ifndef NOMAD_EVAL_H_
#define NOMAD_EVAL_H_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nomad/dataset.h"
#include "nomad/scorer.h"

namespace nomad {

// Fractional ranks (1-based); tied values share the average of their ranks.
std::vector<double> FractionalRanks(std::span<const double> values);

// Sample Pearson correlation. std::nullopt when either input is constant.
// Throws kInvalidArgument for unequal lengths or fewer than two points.
std::optional<double> Pearson(std::span<const double> x, std::span<const double> y);
// Pearson correlation of fractional ranks.
std::optional<double> Spearman(std::span<const double> x, std::span<const double> y);

struct MosRecord {
  std::string clip_path;
  std::string condition_id;
  double mos = 0.0;
};

inline constexpr std::string_view kMosHeader = "clip_path,condition_id,mos";
std::vector<MosRecord> ReadMos(const std::filesystem::path& path);

struct ConditionRow {
  std::string condition_id;
  double mean_score = 0.0;
  double mean_mos = 0.0;
  size_t clips = 0;
};

struct EvalReport {
  double pc = 0.0;
  double sc = 0.0;
  size_t n_conditions = 0;
  std::vector<ConditionRow> conditions;  // sorted by condition_id
  size_t unmatched = 0;                  // MOS rows without a score
};

// Joins scores and MOS on clip_path (falling back to the file name), averages
// per condition, then correlates the condition means. Throws kJoinEmpty when
// nothing joins and kDegenerateInput when a correlation is undefined.
EvalReport AggregatePerCondition(const ScoreReport& scores,
                                 std::span<const MosRecord> mos);

struct FamilyMonotonicity {
  std::string family;
  std::optional<double> sc;  // Spearman of score against level_param
  size_t clips = 0;
  // Sign of SC expected for a distance-type score: +1 when level_param grows
  // with degradation intensity, -1 when it shrinks.
  int expected_sign = 1;
  bool flagged = false;  // |sc| below threshold or undefined
};

// Per-family Spearman of each clip's score against its level_param, joining
// on clip_path (falling back to the file name). Signs are reported raw.
std::vector<FamilyMonotonicity> MonotonicityReport(const ScoreReport& scores,
                                                   const DatasetManifest& manifest,
                                                   double threshold = 0.8);

}  // namespace nomad

#endif  // NOMAD_EVAL_H_
