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

#include "nomad/embed_net.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "nomad/error.h"
#include "nomad/parallel.h"
#include "nomad/rng.h"

namespace nomad {
namespace {

constexpr double kNormEpsilon = 1e-12;

// Valid strided 1-D convolution followed by ReLU.
void ConvForward(const Matrix& in, std::span<const double> params,
                 const LayerLayout& layer, int kernel, int stride, Matrix& out) {
  const size_t cin = static_cast<size_t>(layer.in);
  const size_t cout = static_cast<size_t>(layer.out);
  const size_t frames = (in.rows - kernel) / stride + 1;
  out.rows = frames;
  out.cols = cout;
  out.data.assign(frames * cout, 0.0);
  const double* weights = params.data() + layer.weight_offset;
  const double* bias = params.data() + layer.bias_offset;
  for (size_t t = 0; t < frames; ++t) {
    double* y = out.row(t);
    for (size_t o = 0; o < cout; ++o) {
      double acc = bias[o];
      const double* w = weights + o * kernel * cin;
      for (int k = 0; k < kernel; ++k) {
        const double* x = in.row(t * stride + k);
        const double* wk = w + k * cin;
#pragma omp simd reduction(+ : acc)
        for (size_t c = 0; c < cin; ++c) acc += wk[c] * x[c];
      }
      y[o] = acc > 0.0 ? acc : 0.0;
    }
  }
}

// grad_out holds dL/d(post-ReLU output) and is overwritten with the
// pre-activation gradient.
void ConvBackward(const Matrix& in, const Matrix& out, std::vector<double>& grad_out,
                  std::span<const double> params, const LayerLayout& layer,
                  int kernel, int stride, double* param_grad,
                  std::vector<double>* grad_in) {
  const size_t cin = static_cast<size_t>(layer.in);
  const size_t cout = static_cast<size_t>(layer.out);
  for (size_t i = 0; i < grad_out.size(); ++i) {
    if (!(out.data[i] > 0.0)) grad_out[i] = 0.0;
  }
  const double* weights = params.data() + layer.weight_offset;
  if (grad_in) grad_in->assign(in.rows * cin, 0.0);
  for (size_t t = 0; t < out.rows; ++t) {
    const double* g = grad_out.data() + t * cout;
    for (size_t o = 0; o < cout; ++o) {
      const double go = g[o];
      if (go == 0.0) continue;
      if (param_grad) {
        double* gw = param_grad + layer.weight_offset + o * kernel * cin;
        for (int k = 0; k < kernel; ++k) {
          const double* x = in.row(t * stride + k);
          double* gwk = gw + k * cin;
          for (size_t c = 0; c < cin; ++c) gwk[c] += go * x[c];
        }
        param_grad[layer.bias_offset + o] += go;
      }
      if (grad_in) {
        const double* w = weights + o * kernel * cin;
        for (int k = 0; k < kernel; ++k) {
          double* gx = grad_in->data() + (t * stride + k) * cin;
          const double* wk = w + k * cin;
          for (size_t c = 0; c < cin; ++c) gx[c] += go * wk[c];
        }
      }
    }
  }
}

}  // namespace

void EncoderConfig::Validate() const {
  if (bands < 1 || kernel < 1 || stride < 1 || embed_dim < 1 || channels.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "encoder dimensions must be positive");
  }
  for (int c : channels) {
    if (c < 1) throw Error(ErrorCode::kInvalidArgument, "channel counts must be positive");
  }
  if (!(input_scale > 0.0) || !std::isfinite(input_shift)) {
    throw Error(ErrorCode::kInvalidArgument, "input scaling must be finite and positive");
  }
}

std::vector<LayerLayout> ParameterLayout(const EncoderConfig& config) {
  std::vector<LayerLayout> layout;
  size_t offset = 0;
  int in = config.bands;
  for (int out : config.channels) {
    const size_t weights = static_cast<size_t>(out) * config.kernel * in;
    layout.push_back({offset, offset + weights, in, out});
    offset += weights + out;
    in = out;
  }
  const size_t head = static_cast<size_t>(config.embed_dim) * in;
  layout.push_back({offset, offset + head, in, config.embed_dim});
  return layout;
}

size_t EncoderConfig::ParameterCount() const {
  const auto layout = ParameterLayout(*this);
  return layout.back().bias_offset + layout.back().out;
}

size_t EncoderConfig::MinFrames() const {
  size_t frames = 1;
  for (size_t i = 0; i < channels.size(); ++i) {
    frames = (frames - 1) * stride + kernel;
  }
  return frames;
}

size_t EncoderConfig::OutputFrames(size_t layer, size_t input_frames) const {
  size_t frames = input_frames;
  for (size_t i = 0; i <= layer; ++i) frames = (frames - kernel) / stride + 1;
  return frames;
}

EmbeddingModel::EmbeddingModel(EncoderConfig config, std::vector<double> params)
    : config_(std::move(config)), params_(std::move(params)) {
  config_.Validate();
  if (params_.size() != config_.ParameterCount()) {
    throw Error(ErrorCode::kInvalidArgument,
                "parameter vector has " + std::to_string(params_.size()) +
                    " entries, config needs " +
                    std::to_string(config_.ParameterCount()));
  }
}

void EmbeddingModel::RoundToFloat() {
  for (double& p : params_) p = static_cast<double>(static_cast<float>(p));
}

uint64_t EmbeddingModel::Fingerprint() const {
  uint64_t hash = Fnv1a64(params_.data(), params_.size() * sizeof(double));
  const int64_t dims[] = {config_.bands, config_.kernel, config_.stride,
                          config_.embed_dim};
  hash = Fnv1a64(dims, sizeof(dims), hash);
  hash = Fnv1a64(config_.channels.data(), config_.channels.size() * sizeof(int), hash);
  const double scaling[] = {config_.input_shift, config_.input_scale};
  return Fnv1a64(scaling, sizeof(scaling), hash);
}

EmbeddingModel InitModel(const EncoderConfig& config) {
  config.Validate();
  std::vector<double> params(config.ParameterCount(), 0.0);
  Rng rng(SeedBuilder(config.init_seed).Add("init").Build());
  const auto layout = ParameterLayout(config);
  for (size_t l = 0; l < layout.size(); ++l) {
    const bool head = l + 1 == layout.size();
    const int taps = head ? 1 : config.kernel;
    const double fan_in = static_cast<double>(layout[l].in) * taps;
    const double fan_out = static_cast<double>(layout[l].out) * taps;
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    for (size_t i = layout[l].weight_offset; i < layout[l].bias_offset; ++i) {
      params[i] = rng.Uniform(-limit, limit);
    }
  }
  EmbeddingModel model(config, std::move(params));
  model.RoundToFloat();
  return model;
}

Activations Forward(const EmbeddingModel& model, const Spectrogram& spec) {
  const EncoderConfig& config = model.config();
  if (spec.bands() != static_cast<size_t>(config.bands)) {
    throw Error(ErrorCode::kBandMismatch,
                "spectrogram has " + std::to_string(spec.bands()) +
                    " bands, model expects " + std::to_string(config.bands));
  }
  const auto layout = ParameterLayout(config);
  const auto params = model.params();
  Activations acts;
  acts.input_frames = spec.frames();
  acts.maps.resize(config.channels.size() + 1);

  Matrix& input = acts.maps[0];
  input.rows = std::max(spec.frames(), config.MinFrames());
  input.cols = spec.bands();
  input.data.assign(input.rows * input.cols, 0.0);
  for (size_t i = 0; i < spec.values().size(); ++i) {
    input.data[i] = (spec.values()[i] + config.input_shift) * config.input_scale;
  }
  for (size_t l = 0; l < config.channels.size(); ++l) {
    ConvForward(acts.maps[l], params, layout[l], config.kernel, config.stride,
                acts.maps[l + 1]);
  }

  const Matrix& last = acts.maps.back();
  acts.pooled.assign(last.cols, 0.0);
  for (size_t t = 0; t < last.rows; ++t) {
    for (size_t c = 0; c < last.cols; ++c) acts.pooled[c] += last.row(t)[c];
  }
  for (double& v : acts.pooled) v /= static_cast<double>(last.rows);

  const LayerLayout& head = layout.back();
  acts.projected.assign(head.out, 0.0);
  double squared = 0.0;
  for (int e = 0; e < head.out; ++e) {
    const double* w = params.data() + head.weight_offset + static_cast<size_t>(e) * head.in;
    double acc = params[head.bias_offset + e];
    for (int h = 0; h < head.in; ++h) {
      const double hidden = acts.pooled[h] > 0.0 ? acts.pooled[h] : 0.0;
      acc += w[h] * hidden;
    }
    acts.projected[e] = acc;
    squared += acc * acc;
  }
  acts.norm = std::sqrt(squared);
  const double divisor = std::max(acts.norm, kNormEpsilon);
  acts.embedding.values.resize(head.out);
  for (int e = 0; e < head.out; ++e) {
    acts.embedding.values[e] = acts.projected[e] / divisor;
  }
  return acts;
}

Embedding Embed(const EmbeddingModel& model, const Spectrogram& spec) {
  return Forward(model, spec).embedding;
}

void Backward(const EmbeddingModel& model, const Activations& acts,
              const ActivationGradients& grads, std::span<double> param_grad,
              Spectrogram* input_grad) {
  const EncoderConfig& config = model.config();
  const auto layout = ParameterLayout(config);
  const auto params = model.params();
  double* pgrad = param_grad.empty() ? nullptr : param_grad.data();
  if (pgrad && param_grad.size() != params.size()) {
    throw Error(ErrorCode::kInvalidArgument, "gradient buffer has the wrong size");
  }
  const size_t layers = config.channels.size();
  const LayerLayout& head = layout.back();

  // Normalisation: e = z / max(|z|, eps).
  std::vector<double> grad_projected(head.out, 0.0);
  if (!grads.embedding.empty()) {
    const auto& e = acts.embedding.values;
    if (acts.norm > kNormEpsilon) {
      double dot = 0.0;
      for (int i = 0; i < head.out; ++i) dot += e[i] * grads.embedding[i];
      for (int i = 0; i < head.out; ++i) {
        grad_projected[i] = (grads.embedding[i] - e[i] * dot) / acts.norm;
      }
    } else {
      for (int i = 0; i < head.out; ++i) {
        grad_projected[i] = grads.embedding[i] / kNormEpsilon;
      }
    }
  }

  // Head: z = W relu(pooled) + b.
  std::vector<double> grad_pooled(head.in, 0.0);
  for (int e = 0; e < head.out; ++e) {
    const double g = grad_projected[e];
    if (g == 0.0) continue;
    const double* w = params.data() + head.weight_offset + static_cast<size_t>(e) * head.in;
    if (pgrad) {
      double* gw = pgrad + head.weight_offset + static_cast<size_t>(e) * head.in;
      for (int h = 0; h < head.in; ++h) {
        if (acts.pooled[h] > 0.0) gw[h] += g * acts.pooled[h];
      }
      pgrad[head.bias_offset + e] += g;
    }
    for (int h = 0; h < head.in; ++h) {
      if (acts.pooled[h] > 0.0) grad_pooled[h] += g * w[h];
    }
  }

  // Mean pooling spreads the gradient evenly over the last map.
  const Matrix& last = acts.maps.back();
  std::vector<double> grad_map(last.rows * last.cols, 0.0);
  const double inv_frames = 1.0 / static_cast<double>(last.rows);
  for (size_t t = 0; t < last.rows; ++t) {
    for (size_t c = 0; c < last.cols; ++c) {
      grad_map[t * last.cols + c] = grad_pooled[c] * inv_frames;
    }
  }

  std::vector<double> grad_below;
  for (size_t l = layers; l-- > 0;) {
    if (l < grads.layers.size() && !grads.layers[l].empty()) {
      const auto& injected = grads.layers[l];
      if (injected.size() != grad_map.size()) {
        throw Error(ErrorCode::kInvalidArgument, "injected gradient has the wrong shape");
      }
      for (size_t i = 0; i < grad_map.size(); ++i) grad_map[i] += injected[i];
    }
    const bool need_input = l > 0 || input_grad != nullptr;
    ConvBackward(acts.maps[l], acts.maps[l + 1], grad_map, params, layout[l],
                 config.kernel, config.stride, pgrad, need_input ? &grad_below : nullptr);
    if (need_input) grad_map.swap(grad_below);
  }

  if (input_grad) {
    const size_t bands = static_cast<size_t>(config.bands);
    *input_grad = Spectrogram(acts.input_frames, bands, 0.0);
    auto out = input_grad->values();
    for (size_t i = 0; i < out.size(); ++i) out[i] = grad_map[i] * config.input_scale;
  }
}

double SquaredDistance(const Embedding& a, const Embedding& b) {
  if (a.values.size() != b.values.size()) {
    throw Error(ErrorCode::kShapeMismatch, "embedding sizes differ");
  }
  double sum = 0.0;
  for (size_t i = 0; i < a.values.size(); ++i) {
    const double d = a.values[i] - b.values[i];
    sum += d * d;
  }
  return sum;
}

double TripletLoss(const Embedding& anchor, const Embedding& positive,
                   const Embedding& negative, double margin) {
  if (!(margin >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "margin must be non-negative");
  }
  return std::max(0.0, SquaredDistance(anchor, positive) -
                           SquaredDistance(anchor, negative) + margin);
}

LossAndGradient LossAndGradients(const EmbeddingModel& model,
                                 std::span<const SpectrogramTriplet> batch,
                                 double margin, int jobs) {
  if (batch.empty()) throw Error(ErrorCode::kInvalidArgument, "empty batch");
  const size_t count = model.params().size();
  std::vector<double> losses(batch.size(), 0.0);
  std::vector<std::vector<double>> grads(batch.size());
  ParallelFor(batch.size(), jobs, [&](size_t i) {
    const Activations a = Forward(model, *batch[i].anchor);
    const Activations p = Forward(model, *batch[i].positive);
    const Activations n = Forward(model, *batch[i].negative);
    const auto& ea = a.embedding.values;
    const auto& ep = p.embedding.values;
    const auto& en = n.embedding.values;
    losses[i] = TripletLoss(a.embedding, p.embedding, n.embedding, margin);
    if (losses[i] <= 0.0) return;
    grads[i].assign(count, 0.0);
    const size_t dim = ea.size();
    ActivationGradients ga, gp, gn;
    ga.embedding.resize(dim);
    gp.embedding.resize(dim);
    gn.embedding.resize(dim);
    for (size_t d = 0; d < dim; ++d) {
      ga.embedding[d] = 2.0 * (en[d] - ep[d]);
      gp.embedding[d] = -2.0 * (ea[d] - ep[d]);
      gn.embedding[d] = 2.0 * (ea[d] - en[d]);
    }
    Backward(model, a, ga, grads[i], nullptr);
    Backward(model, p, gp, grads[i], nullptr);
    Backward(model, n, gn, grads[i], nullptr);
  });

  LossAndGradient result;
  result.grad.assign(count, 0.0);
  const double scale = 1.0 / static_cast<double>(batch.size());
  for (size_t i = 0; i < batch.size(); ++i) {
    result.loss += losses[i];
    if (grads[i].empty()) continue;
    for (size_t k = 0; k < count; ++k) result.grad[k] += grads[i][k];
  }
  result.loss *= scale;
  for (double& g : result.grad) g *= scale;
  return result;
}

double MeanTripletLoss(const EmbeddingModel& model,
                       std::span<const SpectrogramTriplet> batch, double margin,
                       int jobs) {
  if (batch.empty()) throw Error(ErrorCode::kInvalidArgument, "empty batch");
  std::vector<double> losses(batch.size(), 0.0);
  ParallelFor(batch.size(), jobs, [&](size_t i) {
    losses[i] = TripletLoss(Embed(model, *batch[i].anchor),
                            Embed(model, *batch[i].positive),
                            Embed(model, *batch[i].negative), margin);
  });
  double sum = 0.0;
  for (double l : losses) sum += l;
  return sum / static_cast<double>(batch.size());
}

}  // namespace nomad
