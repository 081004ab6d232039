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

#include "nomad/scorer.h"

#include <algorithm>
#include <cmath>

#include "nomad/csv.h"
#include "nomad/error.h"

namespace nomad {

double EmbeddingDistance(const Embedding& a, const Embedding& b) {
  return std::sqrt(SquaredDistance(a, b));
}

Embedding EmbedWaveform(const EmbeddingModel& model, const Waveform& wave) {
  return Embed(model, LogBandSpectrogram(wave));
}

double NomadDistance(const EmbeddingModel& model, const Waveform& a,
                     const Waveform& b) {
  return EmbeddingDistance(EmbedWaveform(model, a), EmbedWaveform(model, b));
}

ReferencePool MakeReferencePool(const EmbeddingModel& model,
                                std::span<const Waveform> references,
                                std::string pool_id) {
  ReferencePool pool{std::move(pool_id), {}};
  for (const auto& ref : references) pool.embeddings.push_back(EmbedWaveform(model, ref));
  return pool;
}

double PooledScore(const Embedding& test, const ReferencePool& pool) {
  if (pool.embeddings.empty()) {
    throw Error(ErrorCode::kEmptyPool, "reference pool '" + pool.pool_id + "' is empty");
  }
  double sum = 0.0;
  for (const auto& ref : pool.embeddings) sum += EmbeddingDistance(test, ref);
  return sum / static_cast<double>(pool.embeddings.size());
}

double PooledScore(const EmbeddingModel& model, const Waveform& test,
                   const ReferencePool& pool) {
  if (pool.embeddings.empty()) {
    throw Error(ErrorCode::kEmptyPool, "reference pool '" + pool.pool_id + "' is empty");
  }
  return PooledScore(EmbedWaveform(model, test), pool);
}

double FullReferenceScore(const EmbeddingModel& model, const Waveform& test,
                          const Waveform& clean) {
  return NomadDistance(model, test, clean);
}

FeatureLossResult FeatureLoss(const EmbeddingModel& model, const Spectrogram& clean,
                              const Spectrogram& estimate) {
  const Activations ca = Forward(model, clean);
  const Activations ea = Forward(model, estimate);
  FeatureLossResult result;
  ActivationGradients grads;
  const size_t layers = model.config().channels.size();
  grads.layers.resize(layers);
  for (size_t l = 0; l < layers; ++l) {
    const Matrix& c = ca.maps[l + 1];
    const Matrix& e = ea.maps[l + 1];
    const size_t frames = std::min(c.rows, e.rows);
    const double inv = 1.0 / static_cast<double>(frames);
    auto& g = grads.layers[l];
    g.assign(e.rows * e.cols, 0.0);
    double sum = 0.0;
    for (size_t t = 0; t < frames; ++t) {
      for (size_t k = 0; k < e.cols; ++k) {
        const double diff = e.row(t)[k] - c.row(t)[k];
        sum += std::abs(diff);
        g[t * e.cols + k] = diff > 0.0 ? inv : (diff < 0.0 ? -inv : 0.0);
      }
    }
    result.loss += sum * inv;
  }
  const auto& ce = ca.embedding.values;
  const auto& ee = ea.embedding.values;
  grads.embedding.resize(ee.size());
  for (size_t k = 0; k < ee.size(); ++k) {
    const double diff = ee[k] - ce[k];
    result.loss += std::abs(diff);
    grads.embedding[k] = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
  }
  Backward(model, ea, grads, {}, &result.estimate_grad);
  result.layer_grads = std::move(grads.layers);
  result.embedding_grad = std::move(grads.embedding);
  return result;
}

FeatureLossResult FeatureLoss(const EmbeddingModel& model, const Waveform& clean,
                              const Waveform& estimate) {
  Waveform c = ToCanonicalRate(clean);
  Waveform e = ToCanonicalRate(estimate);
  const size_t length = std::min(c.samples.size(), e.samples.size());
  c.samples.resize(length);
  e.samples.resize(length);
  return FeatureLoss(model, LogBandSpectrogram(c), LogBandSpectrogram(e));
}

Embedding EmbeddingCache::Get(const EmbeddingModel& model,
                              const std::filesystem::path& path) {
  const auto key = std::make_pair(model.Fingerprint(), path.lexically_normal().string());
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = entries_.find(key);
    if (it != entries_.end()) return it->second;
  }
  Embedding embedding = EmbedWaveform(model, LoadWav(path));
  std::lock_guard<std::mutex> lock(mutex_);
  return entries_.emplace(key, std::move(embedding)).first->second;
}

size_t EmbeddingCache::size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return entries_.size();
}

std::string_view ScoreModeName(ScoreMode mode) {
  return mode == ScoreMode::kNmr ? "nmr" : "fr";
}

void WriteScoreReport(const ScoreReport& report, const std::filesystem::path& path) {
  CsvTable table;
  table.header = SplitFields(kScoreHeader);
  for (const auto& row : report.rows) {
    table.rows.push_back({row.clip_path, FormatDouble(row.nomad),
                          std::string(ScoreModeName(row.mode)), row.pool_id});
  }
  WriteCsv(path, table);
}

ScoreReport ReadScoreReport(const std::filesystem::path& path) {
  const CsvTable table = ReadCsv(path, kScoreHeader);
  ScoreReport report;
  for (const auto& f : table.rows) {
    ScoreRow row{f[0], ParseDouble(f[1]), ScoreMode::kNmr, f[3]};
    if (f[2] == "fr") {
      row.mode = ScoreMode::kFr;
    } else if (f[2] != "nmr") {
      throw Error(ErrorCode::kDataError, path.string() + ": unknown mode " + f[2]);
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace nomad
