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

#ifndef NOMAD_TRIPLETS_H_
#define NOMAD_TRIPLETS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nomad/dataset.h"
#include "nomad/rng.h"

namespace nomad {

struct SampleEntry {
  std::string clip_path;
  double q = 0.0;  // NSIM against the source's clean recording
};

// All degraded versions of one clean source.
struct SampleSet {
  std::string source_id;
  std::vector<SampleEntry> entries;
};

enum class Strategy { kEasy, kHard };
std::string_view StrategyName(Strategy strategy);

struct TripletRecord {
  std::string source_id;
  std::string anchor_path;
  std::string positive_path;
  std::string negative_path;
  double q_a = 0.0;
  double q_p = 0.0;
  double q_n = 0.0;
  Strategy strategy = Strategy::kEasy;
};

struct SamplerConfig {
  double s = 0.05;             // easy-negative margin in NSIM units
  double strategy_mix = 0.5;   // probability of the easy strategy
  uint64_t rng_seed = 0;
};

// One set per source_id in first-appearance order, clean rows excluded.
// Sources with fewer than three degraded rows are skipped with a warning.
std::vector<SampleSet> BuildSampleSets(const DatasetManifest& manifest);

// argmin over entries other than the anchor of |Q - Q_a|; ties go to the
// lower index.
size_t PickPositive(const SampleSet& set, size_t anchor);

// Uniform draw from {i : |Q_i - Q_a| > |Q_a - Q_p| + s}. Throws
// kEmptyNegativeSet when no entry qualifies.
size_t SampleEasyNegative(const SampleSet& set, size_t anchor, size_t positive,
                          double s, Rng& rng);
// The candidates SampleEasyNegative draws from, in index order.
std::vector<size_t> EasyNegativeCandidates(const SampleSet& set, size_t anchor,
                                           size_t positive, double s);

// argmin of |Q - Q_a| over entries with |Q - Q_a| > |Q_p - Q_a|; ties go to
// the lower index. Throws kEmptyNegativeSet when no entry qualifies.
size_t SampleHardNegative(const SampleSet& set, size_t anchor, size_t positive);

// Draws `count` triplets: a source uniformly, an anchor uniformly inside it,
// and a strategy (easy with probability strategy_mix). Each requested
// triplet gets 100 attempts before kExhaustedSampler is thrown.
std::vector<TripletRecord> GenerateTriplets(std::span<const SampleSet> sets,
                                            const SamplerConfig& config,
                                            size_t count);

struct TripletSplit {
  std::vector<TripletRecord> train;
  std::vector<TripletRecord> validation;
  std::vector<std::string> train_sources;
  std::vector<std::string> validation_sources;
};

// Splits sources (not triplets) into train and validation by a seeded
// shuffle, then draws round(count * train_fraction) training triplets from
// the training sources and the rest from the validation sources.
TripletSplit GenerateSplitTriplets(std::span<const SampleSet> sets,
                                   const SamplerConfig& config, size_t count,
                                   double train_fraction);

// Checks every TripletRecord invariant; returns a description of the first
// violation or an empty string.
std::string ValidateTriplet(const TripletRecord& record, double s);

inline constexpr std::string_view kTripletHeader =
    "source_id,anchor_path,positive_path,negative_path,q_a,q_p,q_n,strategy";

void WriteTriplets(std::span<const TripletRecord> triplets,
                   const std::filesystem::path& path);
std::vector<TripletRecord> ReadTriplets(const std::filesystem::path& path);

}  // namespace nomad

#endif  // NOMAD_TRIPLETS_H_
