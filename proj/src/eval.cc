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

#include "nomad/eval.h"

#include <glog/logging.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "nomad/csv.h"
#include "nomad/error.h"

namespace nomad {
namespace {

void CheckPair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kInvalidArgument, "correlation inputs differ in length");
  }
  if (x.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "correlation needs at least two points");
  }
}

std::string FileName(const std::string& path) {
  return std::filesystem::path(path).filename().string();
}

// Looks a score path up by exact path, then by file name.
class ScoreIndex {
 public:
  explicit ScoreIndex(const ScoreReport& scores) {
    for (const auto& row : scores.rows) {
      by_path_.emplace(row.clip_path, row.nomad);
      by_name_.emplace(FileName(row.clip_path), row.nomad);
    }
  }
  std::optional<double> Find(const std::string& path) const {
    if (auto it = by_path_.find(path); it != by_path_.end()) return it->second;
    if (auto it = by_name_.find(FileName(path)); it != by_name_.end()) return it->second;
    return std::nullopt;
  }

 private:
  std::map<std::string, double> by_path_;
  std::map<std::string, double> by_name_;
};

}  // namespace

std::vector<double> FractionalRanks(std::span<const double> values) {
  std::vector<size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  size_t i = 0;
  while (i < order.size()) {
    size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

std::optional<double> Pearson(std::span<const double> x, std::span<const double> y) {
  CheckPair(x, y);
  const double n = static_cast<double>(x.size());
  const double mean_x = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double mean_y = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mean_x;
    const double dy = y[i] - mean_y;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::optional<double> Spearman(std::span<const double> x, std::span<const double> y) {
  CheckPair(x, y);
  const auto rx = FractionalRanks(x);
  const auto ry = FractionalRanks(y);
  return Pearson(rx, ry);
}

std::vector<MosRecord> ReadMos(const std::filesystem::path& path) {
  const CsvTable table = ReadCsv(path, kMosHeader);
  std::vector<MosRecord> records;
  for (const auto& f : table.rows) {
    MosRecord r{f[0], f[1], ParseDouble(f[2])};
    if (r.condition_id.empty() || !std::isfinite(r.mos)) {
      throw Error(ErrorCode::kDataError, path.string() + ": invalid row for " + r.clip_path);
    }
    records.push_back(std::move(r));
  }
  return records;
}

EvalReport AggregatePerCondition(const ScoreReport& scores,
                                 std::span<const MosRecord> mos) {
  const ScoreIndex index(scores);
  struct Sums {
    double score = 0.0, mos = 0.0;
    size_t n = 0;
  };
  std::map<std::string, Sums> sums;
  EvalReport report;
  for (const auto& record : mos) {
    const auto score = index.Find(record.clip_path);
    if (!score) {
      ++report.unmatched;
      continue;
    }
    Sums& s = sums[record.condition_id];
    s.score += *score;
    s.mos += record.mos;
    ++s.n;
  }
  if (report.unmatched > 0) {
    LOG(WARNING) << report.unmatched << " MOS rows had no matching score";
  }
  if (sums.empty()) throw Error(ErrorCode::kJoinEmpty, "no MOS row matched a score");
  std::vector<double> mean_scores, mean_mos;
  for (const auto& [id, s] : sums) {
    const double n = static_cast<double>(s.n);
    report.conditions.push_back({id, s.score / n, s.mos / n, s.n});
    mean_scores.push_back(s.score / n);
    mean_mos.push_back(s.mos / n);
  }
  report.n_conditions = report.conditions.size();
  if (report.n_conditions < 2) {
    throw Error(ErrorCode::kDegenerateInput, "need at least two conditions");
  }
  const auto pc = Pearson(mean_scores, mean_mos);
  const auto sc = Spearman(mean_scores, mean_mos);
  if (!pc || !sc) {
    throw Error(ErrorCode::kDegenerateInput, "condition means are constant");
  }
  report.pc = *pc;
  report.sc = *sc;
  return report;
}

std::vector<FamilyMonotonicity> MonotonicityReport(const ScoreReport& scores,
                                                   const DatasetManifest& manifest,
                                                   double threshold) {
  const ScoreIndex index(scores);
  std::vector<std::string> order;
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> data;
  for (const auto& row : manifest.rows) {
    if (row.family == kCleanFamily) continue;
    const auto score = index.Find(row.clip_path);
    if (!score) continue;
    auto [it, inserted] = data.try_emplace(row.family);
    if (inserted) order.push_back(row.family);
    it->second.first.push_back(row.level_param);
    it->second.second.push_back(*score);
  }
  if (data.empty()) {
    throw Error(ErrorCode::kJoinEmpty, "no manifest clip has a score");
  }
  std::vector<FamilyMonotonicity> report;
  for (const auto& family : order) {
    const auto& [levels, values] = data.at(family);
    FamilyMonotonicity entry;
    entry.family = family;
    entry.clips = levels.size();
    try {
      entry.expected_sign = IntensityDirection(ParseFamily(family));
    } catch (const Error&) {
      entry.expected_sign = 1;
    }
    if (levels.size() >= 2) entry.sc = Spearman(levels, values);
    entry.flagged = !entry.sc || std::abs(*entry.sc) < threshold;
    report.push_back(std::move(entry));
  }
  return report;
}

}  // namespace nomad
