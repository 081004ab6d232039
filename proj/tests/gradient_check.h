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

#ifndef NOMAD_TESTS_GRADIENT_CHECK_H_
#define NOMAD_TESTS_GRADIENT_CHECK_H_

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "nomad/embed_net.h"
#include "nomad/rng.h"
#include "nomad/scorer.h"

namespace nomad::testing {

inline constexpr double kFiniteDifferenceStep = 1e-4;
// Gradient entries smaller than this are compared in absolute terms.
inline constexpr double kRelativeErrorFloor = 1e-6;

inline double RelativeError(double analytic, double numeric) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), kRelativeErrorFloor});
  return std::abs(analytic - numeric) / scale;
}

inline Spectrogram RandomSpectrogram(size_t frames, size_t bands, Rng& rng) {
  Spectrogram s(frames, bands, 0.01);
  for (double& v : s.values()) v = rng.Uniform(-8.0, 0.0);
  return s;
}

// Two bands, one conv layer, 8-dimensional embedding.
inline EncoderConfig TinyEncoder(uint64_t seed) {
  EncoderConfig config;
  config.bands = 2;
  config.channels = {16};
  config.kernel = 5;
  config.stride = 2;
  config.embed_dim = 8;
  config.init_seed = seed;
  return config;
}

inline EncoderConfig TwoLayerEncoder(uint64_t seed) {
  EncoderConfig config;
  config.bands = 4;
  config.channels = {6, 8};
  config.kernel = 3;
  config.stride = 2;
  config.embed_dim = 8;
  config.init_seed = seed;
  return config;
}

// `count` distinct indices below `size` (all of them when size <= count).
inline std::vector<size_t> SampleCoordinates(size_t size, size_t count, Rng& rng) {
  std::vector<size_t> all(size);
  std::iota(all.begin(), all.end(), size_t{0});
  for (size_t i = 0; i + 1 < size; ++i) {
    std::swap(all[i], all[i + rng.UniformIndex(size - i)]);
  }
  all.resize(std::min(size, count));
  return all;
}

struct GradientCheck {
  size_t coordinates = 0;
  double max_relative_error = 0.0;
};

// Analytic parameter gradient of the mean triplet loss against central
// differences on a batch of random spectrogram triplets.
inline GradientCheck CheckTripletGradient(const EncoderConfig& config, size_t frames,
                                          size_t batch_size, double margin,
                                          size_t coordinates, uint64_t seed) {
  Rng rng(seed);
  EmbeddingModel model = InitModel(config);
  std::vector<Spectrogram> specs;
  for (size_t i = 0; i < 3 * batch_size; ++i) {
    specs.push_back(RandomSpectrogram(frames, config.bands, rng));
  }
  std::vector<SpectrogramTriplet> batch;
  for (size_t i = 0; i < batch_size; ++i) {
    batch.push_back({&specs[3 * i], &specs[3 * i + 1], &specs[3 * i + 2]});
  }
  const LossAndGradient analytic = LossAndGradients(model, batch, margin);
  GradientCheck result;
  for (size_t k : SampleCoordinates(model.params().size(), coordinates, rng)) {
    const double saved = model.params()[k];
    model.mutable_params()[k] = saved + kFiniteDifferenceStep;
    const double up = MeanTripletLoss(model, batch, margin);
    model.mutable_params()[k] = saved - kFiniteDifferenceStep;
    const double down = MeanTripletLoss(model, batch, margin);
    model.mutable_params()[k] = saved;
    const double numeric = (up - down) / (2.0 * kFiniteDifferenceStep);
    result.max_relative_error =
        std::max(result.max_relative_error, RelativeError(analytic.grad[k], numeric));
    ++result.coordinates;
  }
  return result;
}

// Analytic gradient of the feature loss with respect to the estimate
// spectrogram against central differences.
inline GradientCheck CheckFeatureLossGradient(const EncoderConfig& config, size_t frames,
                                              size_t coordinates, uint64_t seed) {
  Rng rng(seed);
  const EmbeddingModel model = InitModel(config);
  const Spectrogram clean = RandomSpectrogram(frames, config.bands, rng);
  Spectrogram estimate = RandomSpectrogram(frames, config.bands, rng);
  const FeatureLossResult analytic = FeatureLoss(model, clean, estimate);
  GradientCheck result;
  for (size_t k : SampleCoordinates(estimate.values().size(), coordinates, rng)) {
    const double saved = estimate.values()[k];
    estimate.values()[k] = saved + kFiniteDifferenceStep;
    const double up = FeatureLoss(model, clean, estimate).loss;
    estimate.values()[k] = saved - kFiniteDifferenceStep;
    const double down = FeatureLoss(model, clean, estimate).loss;
    estimate.values()[k] = saved;
    const double numeric = (up - down) / (2.0 * kFiniteDifferenceStep);
    result.max_relative_error = std::max(
        result.max_relative_error, RelativeError(analytic.estimate_grad.values()[k], numeric));
    ++result.coordinates;
  }
  return result;
}

}  // namespace nomad::testing

#endif  // NOMAD_TESTS_GRADIENT_CHECK_H_
