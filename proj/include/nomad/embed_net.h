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

#ifndef NOMAD_EMBED_NET_H_
#define NOMAD_EMBED_NET_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "nomad/audio.h"

namespace nomad {

// Temporal convolutional encoder over log-band spectrograms:
//
//   x' = (x + input_shift) * input_scale, zero-padded to MinFrames()
//   for each layer: valid 1-D conv over time (bands/channels as features),
//                   kernel `kernel`, stride `stride`, ReLU
//   mean over remaining frames -> ReLU -> affine -> L2 normalisation
//
// Parameter layout, in order: for each conv layer the weights indexed
// [out][tap][in] followed by [out] biases; then the head weights
// [embed][hidden] followed by [embed] biases.
struct EncoderConfig {
  int bands = 32;
  std::vector<int> channels = {32, 64, 64, 128};
  int kernel = 5;
  int stride = 2;
  int embed_dim = 256;
  double input_shift = 5.0;
  double input_scale = 0.2;
  uint64_t init_seed = 0;

  // Throws kInvalidArgument on inconsistent dimensions.
  void Validate() const;
  size_t ParameterCount() const;
  // Smallest input length that leaves one frame after the last layer.
  size_t MinFrames() const;
  // Frames produced by conv layer `layer` for `input_frames` (padded) input.
  size_t OutputFrames(size_t layer, size_t input_frames) const;

  bool operator==(const EncoderConfig&) const = default;
};

struct LayerLayout {
  size_t weight_offset;
  size_t bias_offset;
  int in;
  int out;
};

// Offsets of every conv layer followed by the head.
std::vector<LayerLayout> ParameterLayout(const EncoderConfig& config);

class EmbeddingModel {
 public:
  // Throws kInvalidArgument when the vector does not match the config.
  EmbeddingModel(EncoderConfig config, std::vector<double> params);

  const EncoderConfig& config() const { return config_; }
  std::span<const double> params() const { return params_; }
  std::span<double> mutable_params() { return params_; }

  // Rounds every parameter to the nearest float so that 32-bit checkpoints
  // store the model exactly.
  void RoundToFloat();
  // Hash of the config and parameter bytes.
  uint64_t Fingerprint() const;

 private:
  EncoderConfig config_;
  std::vector<double> params_;
};

struct Embedding {
  std::vector<double> values;
};

// Glorot-uniform weights, zero biases, seeded by config.init_seed.
EmbeddingModel InitModel(const EncoderConfig& config);

struct Matrix {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<double> data;

  double* row(size_t r) { return data.data() + r * cols; }
  const double* row(size_t r) const { return data.data() + r * cols; }
};

// Everything the backward pass needs from one forward pass.
struct Activations {
  size_t input_frames = 0;   // before padding
  std::vector<Matrix> maps;  // maps[0] padded scaled input; maps[l+1] layer l
  std::vector<double> pooled;
  std::vector<double> projected;  // pre-normalisation head output
  double norm = 0.0;
  Embedding embedding;
};

// Throws kBandMismatch when the band count differs from the config.
Activations Forward(const EmbeddingModel& model, const Spectrogram& spec);
Embedding Embed(const EmbeddingModel& model, const Spectrogram& spec);

// Gradients injected into a forward pass. Empty vectors mean zero.
struct ActivationGradients {
  std::vector<std::vector<double>> layers;  // same shapes as maps[1..]
  std::vector<double> embedding;
};

// Reverse-mode pass. Accumulates into param_grad when it is non-empty and
// writes the gradient with respect to the unpadded input spectrogram into
// input_grad when it is non-null.
void Backward(const EmbeddingModel& model, const Activations& acts,
              const ActivationGradients& grads, std::span<double> param_grad,
              Spectrogram* input_grad);

double SquaredDistance(const Embedding& a, const Embedding& b);

// max(0, |a - p|^2 - |a - n|^2 + margin)
double TripletLoss(const Embedding& anchor, const Embedding& positive,
                   const Embedding& negative, double margin);

struct SpectrogramTriplet {
  const Spectrogram* anchor;
  const Spectrogram* positive;
  const Spectrogram* negative;
};

struct LossAndGradient {
  double loss = 0.0;
  std::vector<double> grad;
};

// Mean triplet loss over the batch and its gradient in parameter layout.
// Inactive hinges contribute zero gradient. Per-triplet work may run on
// `jobs` threads; the reduction order is fixed.
LossAndGradient LossAndGradients(const EmbeddingModel& model,
                                 std::span<const SpectrogramTriplet> batch,
                                 double margin, int jobs = 1);

// Mean loss only.
double MeanTripletLoss(const EmbeddingModel& model,
                       std::span<const SpectrogramTriplet> batch, double margin,
                       int jobs = 1);

}  // namespace nomad

#endif  // NOMAD_EMBED_NET_H_
