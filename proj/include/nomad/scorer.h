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

#ifndef NOMAD_SCORER_H_
#define NOMAD_SCORER_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nomad/audio.h"
#include "nomad/embed_net.h"

namespace nomad {

// Euclidean distance between embeddings; within [0, 2] for unit vectors.
double EmbeddingDistance(const Embedding& a, const Embedding& b);

Embedding EmbedWaveform(const EmbeddingModel& model, const Waveform& wave);

// NOMAD(a, b) = |f(a) - f(b)|_2
double NomadDistance(const EmbeddingModel& model, const Waveform& a,
                     const Waveform& b);

// Non-matching clean references, stored as embeddings.
struct ReferencePool {
  std::string pool_id;
  std::vector<Embedding> embeddings;
};

ReferencePool MakeReferencePool(const EmbeddingModel& model,
                                std::span<const Waveform> references,
                                std::string pool_id);

// Mean distance from the test embedding to every pool member. Throws
// kEmptyPool.
double PooledScore(const Embedding& test, const ReferencePool& pool);
double PooledScore(const EmbeddingModel& model, const Waveform& test,
                   const ReferencePool& pool);

// Distance to the clip's own clean counterpart.
double FullReferenceScore(const EmbeddingModel& model, const Waveform& test,
                          const Waveform& clean);

// Frame-wise L1 feature loss between a clean signal and an estimate:
//
//   sum over conv layers of (1/T_l) sum_t |a_l(clean)[t] - a_l(est)[t]|_1
//   + |f(clean) - f(est)|_1
//
// with each layer truncated to the shorter activation length. Gradients are
// taken with respect to the estimate; the subgradient of |0| is 0.
struct FeatureLossResult {
  double loss = 0.0;
  Spectrogram estimate_grad;                     // d loss / d estimate spectrogram
  std::vector<std::vector<double>> layer_grads;  // d loss / d estimate conv maps
  std::vector<double> embedding_grad;            // d loss / d f(estimate)
};

FeatureLossResult FeatureLoss(const EmbeddingModel& model, const Spectrogram& clean,
                              const Spectrogram& estimate);
// Trims both waveforms to the shorter duration first.
FeatureLossResult FeatureLoss(const EmbeddingModel& model, const Waveform& clean,
                              const Waveform& estimate);

// Embeddings of files keyed by (model fingerprint, path). Thread-safe.
class EmbeddingCache {
 public:
  Embedding Get(const EmbeddingModel& model, const std::filesystem::path& path);
  size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::map<std::pair<uint64_t, std::string>, Embedding> entries_;
};

enum class ScoreMode { kNmr, kFr };
std::string_view ScoreModeName(ScoreMode mode);

struct ScoreRow {
  std::string clip_path;
  double nomad = 0.0;
  ScoreMode mode = ScoreMode::kNmr;
  std::string pool_id;  // pool id (nmr) or reference path (fr)
};

struct ScoreReport {
  std::vector<ScoreRow> rows;
};

inline constexpr std::string_view kScoreHeader = "clip_path,nomad,mode,pool_id";
void WriteScoreReport(const ScoreReport& report, const std::filesystem::path& path);
ScoreReport ReadScoreReport(const std::filesystem::path& path);

}  // namespace nomad

#endif  // NOMAD_SCORER_H_
