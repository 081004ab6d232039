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

#include "nomad/triplets.h"

#include <glog/logging.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "nomad/csv.h"
#include "nomad/error.h"

namespace nomad {
namespace {

constexpr int kAttemptsPerTriplet = 100;

void CheckIndex(const SampleSet& set, size_t index) {
  if (index >= set.entries.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "entry index " + std::to_string(index) + " out of range");
  }
}

}  // namespace

std::string_view StrategyName(Strategy strategy) {
  return strategy == Strategy::kEasy ? "easy" : "hard";
}

std::vector<SampleSet> BuildSampleSets(const DatasetManifest& manifest) {
  std::vector<SampleSet> sets;
  std::map<std::string, size_t> index;
  for (const auto& row : manifest.rows) {
    if (row.family == kCleanFamily) continue;
    auto [it, inserted] = index.emplace(row.source_id, sets.size());
    if (inserted) sets.push_back({row.source_id, {}});
    sets[it->second].entries.push_back({row.clip_path, row.nsim});
  }
  std::vector<SampleSet> kept;
  for (auto& set : sets) {
    if (set.entries.size() < 3) {
      LOG(WARNING) << "source " << set.source_id << " has "
                   << set.entries.size()
                   << " degraded clips; at least 3 are needed for triplets";
      continue;
    }
    kept.push_back(std::move(set));
  }
  return kept;
}

size_t PickPositive(const SampleSet& set, size_t anchor) {
  CheckIndex(set, anchor);
  if (set.entries.size() < 2) {
    throw Error(ErrorCode::kTooFewEntries, "positive needs at least 2 entries");
  }
  const double q_a = set.entries[anchor].q;
  size_t best = anchor;
  double best_distance = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < set.entries.size(); ++i) {
    if (i == anchor) continue;
    const double d = std::abs(set.entries[i].q - q_a);
    if (d < best_distance) {
      best = i;
      best_distance = d;
    }
  }
  return best;
}

std::vector<size_t> EasyNegativeCandidates(const SampleSet& set, size_t anchor,
                                           size_t positive, double s) {
  CheckIndex(set, anchor);
  CheckIndex(set, positive);
  const double q_a = set.entries[anchor].q;
  const double bound = std::abs(q_a - set.entries[positive].q) + s;
  std::vector<size_t> candidates;
  for (size_t i = 0; i < set.entries.size(); ++i) {
    if (i == anchor || i == positive) continue;
    if (std::abs(set.entries[i].q - q_a) > bound) candidates.push_back(i);
  }
  return candidates;
}

size_t SampleEasyNegative(const SampleSet& set, size_t anchor, size_t positive,
                          double s, Rng& rng) {
  const auto candidates = EasyNegativeCandidates(set, anchor, positive, s);
  if (candidates.empty()) {
    throw Error(ErrorCode::kEmptyNegativeSet,
                "no easy negative for anchor " + std::to_string(anchor) +
                    " of " + set.source_id);
  }
  return candidates[rng.UniformIndex(candidates.size())];
}

size_t SampleHardNegative(const SampleSet& set, size_t anchor, size_t positive) {
  CheckIndex(set, anchor);
  CheckIndex(set, positive);
  const double q_a = set.entries[anchor].q;
  const double positive_distance = std::abs(set.entries[positive].q - q_a);
  size_t best = set.entries.size();
  double best_distance = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < set.entries.size(); ++i) {
    if (i == anchor || i == positive) continue;
    const double d = std::abs(set.entries[i].q - q_a);
    if (d > positive_distance && d < best_distance) {
      best = i;
      best_distance = d;
    }
  }
  if (best == set.entries.size()) {
    throw Error(ErrorCode::kEmptyNegativeSet,
                "no hard negative for anchor " + std::to_string(anchor) +
                    " of " + set.source_id);
  }
  return best;
}

std::vector<TripletRecord> GenerateTriplets(std::span<const SampleSet> sets,
                                            const SamplerConfig& config,
                                            size_t count) {
  if (!(config.s >= 0.0) || !(config.strategy_mix >= 0.0 && config.strategy_mix <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "sampler needs s >= 0 and mix in [0, 1]");
  }
  std::vector<const SampleSet*> usable;
  for (const auto& set : sets) {
    if (set.entries.size() >= 3) usable.push_back(&set);
  }
  if (usable.empty()) {
    throw Error(ErrorCode::kTooFewEntries, "no sample set has 3 or more entries");
  }
  Rng rng(config.rng_seed);
  std::vector<TripletRecord> triplets;
  triplets.reserve(count);
  for (size_t k = 0; k < count; ++k) {
    const Strategy strategy =
        rng.Uniform() < config.strategy_mix ? Strategy::kEasy : Strategy::kHard;
    bool found = false;
    for (int attempt = 0; attempt < kAttemptsPerTriplet && !found; ++attempt) {
      const SampleSet& set = *usable[rng.UniformIndex(usable.size())];
      const size_t anchor = rng.UniformIndex(set.entries.size());
      const size_t positive = PickPositive(set, anchor);
      size_t negative = 0;
      try {
        negative = strategy == Strategy::kEasy
                       ? SampleEasyNegative(set, anchor, positive, config.s, rng)
                       : SampleHardNegative(set, anchor, positive);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kEmptyNegativeSet) throw;
        continue;
      }
      const auto& a = set.entries[anchor];
      const auto& p = set.entries[positive];
      const auto& n = set.entries[negative];
      triplets.push_back({set.source_id, a.clip_path, p.clip_path, n.clip_path,
                          a.q, p.q, n.q, strategy});
      found = true;
    }
    if (!found) {
      throw Error(ErrorCode::kExhaustedSampler,
                  "found " + std::to_string(triplets.size()) + " of " +
                      std::to_string(count) + " triplets");
    }
  }
  return triplets;
}

TripletSplit GenerateSplitTriplets(std::span<const SampleSet> sets,
                                   const SamplerConfig& config, size_t count,
                                   double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "train fraction must be in (0, 1)");
  }
  if (sets.size() < 2) {
    throw Error(ErrorCode::kTooFewEntries,
                "a source-disjoint split needs at least 2 sources");
  }
  std::vector<size_t> order(sets.size());
  std::iota(order.begin(), order.end(), 0);
  Rng shuffle_rng(SeedBuilder(config.rng_seed).Add("split").Build());
  for (size_t i = order.size() - 1; i > 0; --i) {
    std::swap(order[i], order[shuffle_rng.UniformIndex(i + 1)]);
  }
  const size_t train_sources = std::clamp<size_t>(
      static_cast<size_t>(std::lround(train_fraction * sets.size())), 1,
      sets.size() - 1);
  std::vector<SampleSet> train_sets, val_sets;
  for (size_t i = 0; i < order.size(); ++i) {
    (i < train_sources ? train_sets : val_sets).push_back(sets[order[i]]);
  }
  const auto by_id = [](const SampleSet& a, const SampleSet& b) {
    return a.source_id < b.source_id;
  };
  std::sort(train_sets.begin(), train_sets.end(), by_id);
  std::sort(val_sets.begin(), val_sets.end(), by_id);

  const size_t train_count = std::clamp<size_t>(
      static_cast<size_t>(std::lround(train_fraction * count)), 1,
      std::max<size_t>(count, 2) - 1);
  TripletSplit split;
  SamplerConfig train_config = config;
  train_config.rng_seed = SeedBuilder(config.rng_seed).Add("train").Build();
  SamplerConfig val_config = config;
  val_config.rng_seed = SeedBuilder(config.rng_seed).Add("validation").Build();
  split.train = GenerateTriplets(train_sets, train_config, train_count);
  split.validation =
      GenerateTriplets(val_sets, val_config, std::max<size_t>(count, 2) - train_count);
  for (const auto& set : train_sets) split.train_sources.push_back(set.source_id);
  for (const auto& set : val_sets) split.validation_sources.push_back(set.source_id);
  return split;
}

std::string ValidateTriplet(const TripletRecord& record, double s) {
  const double dp = std::abs(record.q_p - record.q_a);
  const double dn = std::abs(record.q_n - record.q_a);
  for (double q : {record.q_a, record.q_p, record.q_n}) {
    if (!(q >= 0.0 && q <= 1.0)) return "NSIM outside [0, 1]";
  }
  if (record.anchor_path == record.positive_path ||
      record.anchor_path == record.negative_path ||
      record.positive_path == record.negative_path) {
    return "triplet reuses a clip";
  }
  if (!(dp <= dn)) return "positive farther from anchor than negative";
  if (record.strategy == Strategy::kEasy && !(dn > dp + s)) {
    return "easy negative inside the margin";
  }
  if (record.strategy == Strategy::kHard && !(dn > dp)) {
    return "hard negative not beyond the positive";
  }
  return {};
}

void WriteTriplets(std::span<const TripletRecord> triplets,
                   const std::filesystem::path& path) {
  CsvTable table;
  table.header = SplitFields(kTripletHeader);
  for (const auto& t : triplets) {
    table.rows.push_back({t.source_id, t.anchor_path, t.positive_path,
                          t.negative_path, FormatDouble(t.q_a), FormatDouble(t.q_p),
                          FormatDouble(t.q_n), std::string(StrategyName(t.strategy))});
  }
  WriteCsv(path, table);
}

std::vector<TripletRecord> ReadTriplets(const std::filesystem::path& path) {
  const CsvTable table = ReadCsv(path, kTripletHeader);
  std::vector<TripletRecord> triplets;
  for (const auto& f : table.rows) {
    TripletRecord t{f[0], f[1], f[2], f[3], ParseDouble(f[4]), ParseDouble(f[5]),
                    ParseDouble(f[6]), Strategy::kEasy};
    if (f[7] == "hard") {
      t.strategy = Strategy::kHard;
    } else if (f[7] != "easy") {
      throw Error(ErrorCode::kDataError, path.string() + ": unknown strategy " + f[7]);
    }
    triplets.push_back(std::move(t));
  }
  return triplets;
}

}  // namespace nomad
