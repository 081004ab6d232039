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

#include "nomad/degradation.h"

#include <fftw3.h>
#include <unistd.h>
#include <glog/logging.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <mutex>
#include <numbers>
#include <string>

#include "nomad/error.h"
#include "nomad/rng.h"
#include "fftw_util.h"

namespace nomad {
namespace {

constexpr std::array<double, 5> kClipPercent = {5, 10, 25, 40, 60};
constexpr std::array<double, 5> kSnrDb = {0, 8, 15, 25, 40};
constexpr std::array<double, 5> kBitrates = {8, 16, 32, 64, 128};
constexpr std::array<double, 5> kRt60 = {0.1, 0.3, 0.6, 1.0, 1.5};

using internal::FftwPlannerMutex;

double KaiserWindow(double x, double beta) {
  if (std::abs(x) > 1.0) return 0.0;
  return std::cyl_bessel_i(0.0, beta * std::sqrt(1.0 - x * x)) /
         std::cyl_bessel_i(0.0, beta);
}

std::vector<double> LowpassTaps(double cutoff_hz, int sample_rate, int taps) {
  const int half = taps / 2;
  const double fc = cutoff_hz / sample_rate;
  std::vector<double> h(taps);
  double sum = 0.0;
  for (int i = 0; i < taps; ++i) {
    const double n = i - half;
    const double sinc = n == 0 ? 2.0 * fc
                               : std::sin(2.0 * std::numbers::pi * fc * n) /
                                     (std::numbers::pi * n);
    h[i] = sinc * KaiserWindow(n / half, 8.0);
    sum += h[i];
  }
  for (double& v : h) v /= sum;
  return h;
}

// Linear convolution of x with h via FFT, keeping output[offset, offset+|x|).
std::vector<double> FftConvolve(std::span<const double> x,
                                std::span<const double> h, size_t offset) {
  const size_t full = x.size() + h.size() - 1;
  size_t n = 1;
  while (n < full) n <<= 1;
  const size_t bins = n / 2 + 1;
  double* buf = fftw_alloc_real(n);
  fftw_complex* spec_x = fftw_alloc_complex(bins);
  fftw_complex* spec_h = fftw_alloc_complex(bins);
  fftw_plan forward_x, forward_h, inverse;
  {
    std::lock_guard<std::mutex> lock(FftwPlannerMutex());
    forward_x = fftw_plan_dft_r2c_1d(static_cast<int>(n), buf, spec_x, FFTW_ESTIMATE);
    forward_h = fftw_plan_dft_r2c_1d(static_cast<int>(n), buf, spec_h, FFTW_ESTIMATE);
    inverse = fftw_plan_dft_c2r_1d(static_cast<int>(n), spec_x, buf, FFTW_ESTIMATE);
  }
  std::fill_n(buf, n, 0.0);
  std::copy(x.begin(), x.end(), buf);
  fftw_execute(forward_x);
  std::fill_n(buf, n, 0.0);
  std::copy(h.begin(), h.end(), buf);
  fftw_execute(forward_h);
  for (size_t k = 0; k < bins; ++k) {
    const double re = spec_x[k][0] * spec_h[k][0] - spec_x[k][1] * spec_h[k][1];
    const double im = spec_x[k][0] * spec_h[k][1] + spec_x[k][1] * spec_h[k][0];
    spec_x[k][0] = re;
    spec_x[k][1] = im;
  }
  fftw_execute(inverse);
  std::vector<double> out(x.size());
  for (size_t i = 0; i < x.size(); ++i) out[i] = buf[i + offset] / static_cast<double>(n);
  {
    std::lock_guard<std::mutex> lock(FftwPlannerMutex());
    fftw_destroy_plan(forward_x);
    fftw_destroy_plan(forward_h);
    fftw_destroy_plan(inverse);
  }
  fftw_free(buf);
  fftw_free(spec_x);
  fftw_free(spec_h);
  return out;
}

void NormalizeOnOverflow(Waveform& wave) {
  double peak = 0.0;
  for (double x : wave.samples) peak = std::max(peak, std::abs(x));
  if (peak > 1.0) {
    const double gain = 0.99 / peak;
    for (double& x : wave.samples) x *= gain;
  }
}

void ReplaceAll(std::string& text, std::string_view from, const std::string& to) {
  for (size_t pos = text.find(from); pos != std::string::npos;
       pos = text.find(from, pos + to.size())) {
    text.replace(pos, from.size(), to);
  }
}

Waveform ExternalCodec(const Waveform& wave, double kbps, uint64_t stream_seed,
                       const std::string& command_template) {
  if (command_template.empty()) {
    throw Error(ErrorCode::kMissingEncoder,
                "external_codec requires a configured encoder command");
  }
  const auto dir = std::filesystem::temp_directory_path() /
                   ("nomad_codec_" + std::to_string(::getpid()) + "_" +
                    std::to_string(stream_seed));
  std::filesystem::create_directories(dir);
  const auto in_path = dir / "in.wav";
  const auto out_path = dir / "out.wav";
  WriteWav(wave, in_path);
  std::string command = command_template;
  ReplaceAll(command, "{in}", in_path.string());
  ReplaceAll(command, "{out}", out_path.string());
  ReplaceAll(command, "{kbps}", std::to_string(static_cast<int>(kbps)));
  const int status = std::system(command.c_str());
  if (status != 0) {
    std::filesystem::remove_all(dir);
    throw Error(ErrorCode::kEncoderFailed,
                "'" + command + "' exited with status " + std::to_string(status));
  }
  Waveform decoded = ToCanonicalRate(LoadWav(out_path));
  std::filesystem::remove_all(dir);
  decoded.samples.resize(wave.samples.size(), 0.0);
  return decoded;
}

}  // namespace

std::string_view FamilyName(Family family) {
  switch (family) {
    case Family::kClip: return "clip";
    case Family::kNoise: return "noise";
    case Family::kMp3Like: return "codec_proxy_mp3like";
    case Family::kOpusLike: return "codec_proxy_opuslike";
    case Family::kReverbProbe: return "reverb_probe";
    case Family::kExternalCodec: return "external_codec";
  }
  return "unknown";
}

Family ParseFamily(std::string_view name) {
  for (Family f : {Family::kClip, Family::kNoise, Family::kMp3Like,
                   Family::kOpusLike, Family::kReverbProbe,
                   Family::kExternalCodec}) {
    if (name == FamilyName(f)) return f;
  }
  if (name == "mp3like" || name == "mp3") return Family::kMp3Like;
  if (name == "opuslike" || name == "opus") return Family::kOpusLike;
  if (name == "reverb") return Family::kReverbProbe;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown degradation family '" + std::string(name) + "'");
}

std::vector<Family> DefaultFamilies() {
  return {Family::kClip, Family::kNoise, Family::kMp3Like, Family::kOpusLike};
}

std::span<const double> LevelTable(Family family) {
  switch (family) {
    case Family::kClip: return kClipPercent;
    case Family::kNoise: return kSnrDb;
    case Family::kMp3Like:
    case Family::kOpusLike:
    case Family::kExternalCodec: return kBitrates;
    case Family::kReverbProbe: return kRt60;
  }
  return {};
}

int IntensityDirection(Family family) {
  switch (family) {
    case Family::kClip:
    case Family::kReverbProbe: return 1;
    default: return -1;
  }
}

DegradationCondition DegradationCondition::Make(Family family, int level_index) {
  const auto table = LevelTable(family);
  if (level_index < 0 || static_cast<size_t>(level_index) >= table.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "level index " + std::to_string(level_index) + " out of range for " +
                    std::string(FamilyName(family)));
  }
  return {family, level_index, table[level_index]};
}

double ClipThreshold(const Waveform& wave, double percent) {
  if (wave.samples.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "cannot clip an empty signal");
  }
  if (!(percent > 0.0 && percent < 100.0)) {
    throw Error(ErrorCode::kInvalidArgument, "clip percent must be in (0, 100)");
  }
  std::vector<double> magnitudes(wave.samples.size());
  std::transform(wave.samples.begin(), wave.samples.end(), magnitudes.begin(),
                 [](double x) { return std::abs(x); });
  const auto [lo, hi] = std::minmax_element(wave.samples.begin(), wave.samples.end());
  if (*lo == *hi) {
    throw Error(ErrorCode::kDegenerateSignal, "all samples are equal");
  }
  std::sort(magnitudes.begin(), magnitudes.end());
  const double q = 1.0 - percent / 100.0;
  // Tolerance keeps exact fractions such as 2/11 from rounding up a rank.
  const double position = q * static_cast<double>(magnitudes.size() - 1);
  const size_t rank = std::min(magnitudes.size() - 1,
                               static_cast<size_t>(std::ceil(position - 1e-9)));
  return magnitudes[rank];
}

Waveform ClipSignal(const Waveform& wave, double percent) {
  const double threshold = ClipThreshold(wave, percent);
  Waveform out = wave;
  for (double& x : out.samples) x = std::clamp(x, -threshold, threshold);
  return out;
}

double MeanPower(std::span<const double> samples) {
  if (samples.empty()) return 0.0;
  double sum = 0.0;
  for (double x : samples) sum += x * x;
  return sum / static_cast<double>(samples.size());
}

double NoiseGainForSnr(double clean_power, double noise_power, double snr_db) {
  if (!(clean_power > 0.0) || !(noise_power > 0.0)) {
    throw Error(ErrorCode::kSilentInput, "clean and noise power must be positive");
  }
  return std::sqrt(clean_power / (noise_power * std::pow(10.0, snr_db / 10.0)));
}

Waveform MixNoiseAtSnr(const Waveform& clean, const Waveform& noise,
                       double snr_db) {
  if (clean.sample_rate != noise.sample_rate) {
    throw Error(ErrorCode::kInvalidArgument, "clean and noise sample rates differ");
  }
  if (noise.samples.empty()) throw Error(ErrorCode::kSilentInput, "empty noise");
  std::vector<double> fitted(clean.samples.size());
  for (size_t i = 0; i < fitted.size(); ++i) {
    fitted[i] = noise.samples[i % noise.samples.size()];
  }
  const double gain =
      NoiseGainForSnr(MeanPower(clean.samples), MeanPower(fitted), snr_db);
  Waveform out = clean;
  for (size_t i = 0; i < fitted.size(); ++i) out.samples[i] += gain * fitted[i];
  NormalizeOnOverflow(out);
  return out;
}

CodecProxyParams CodecProxyParamsFor(double kbps, CodecFlavor flavor) {
  if (std::find(kBitrates.begin(), kBitrates.end(), kbps) == kBitrates.end()) {
    throw Error(ErrorCode::kUnsupportedBitrate,
                std::to_string(kbps) + " kbps is not one of 8, 16, 32, 64, 128");
  }
  const double slope = flavor == CodecFlavor::kMp3Like ? 280.0 : 340.0;
  CodecProxyParams params;
  params.cutoff_hz = std::min(7600.0, slope * std::sqrt(kbps));
  const double bits = 3.0 + 1.5 * std::log2(kbps);
  params.bits = std::clamp(static_cast<int>(std::ceil(bits - 0.5)), 4, 14);
  return params;
}

Waveform CodecProxy(const Waveform& input, double kbps, CodecFlavor flavor) {
  const CodecProxyParams params = CodecProxyParamsFor(kbps, flavor);
  const Waveform wave = ToCanonicalRate(input);
  constexpr int kTaps = 255;
  const auto taps = LowpassTaps(params.cutoff_hz, wave.sample_rate, kTaps);
  Waveform out = wave;
  out.samples = FftConvolve(wave.samples, taps, kTaps / 2);
  const double step = std::ldexp(1.0, 1 - params.bits);
  const double top = 1.0 - step;
  for (double& x : out.samples) x = std::clamp(std::round(x / step) * step, -1.0, top);
  return out;
}

double ReverbEnvelope(double t_s, double rt60_s) {
  return std::pow(10.0, -3.0 * t_s / rt60_s);
}

std::vector<double> ReverbImpulseResponse(double rt60_s, int sample_rate,
                                          uint64_t seed) {
  if (!(rt60_s > 0.0 && rt60_s <= 3.0)) {
    throw Error(ErrorCode::kInvalidArgument, "RT60 must be in (0, 3] seconds");
  }
  const size_t length = std::max<size_t>(
      1, static_cast<size_t>(std::lround(0.8 * rt60_s * sample_rate)));
  Rng rng(seed);
  std::vector<double> ir(length);
  ir[0] = 1.0;
  for (size_t i = 1; i < length; ++i) {
    ir[i] = rng.Normal() * ReverbEnvelope(static_cast<double>(i) / sample_rate, rt60_s);
  }
  double energy = 0.0;
  for (double v : ir) energy += v * v;
  const double norm = 1.0 / std::sqrt(energy);
  for (double& v : ir) v *= norm;
  return ir;
}

Waveform ReverbProbe(const Waveform& input, double rt60_s, uint64_t seed) {
  const Waveform wave = ToCanonicalRate(input);
  const auto ir = ReverbImpulseResponse(rt60_s, wave.sample_rate, seed);
  Waveform out = wave;
  if (ir.size() == 1) {
    for (double& x : out.samples) x *= ir[0];
  } else {
    out.samples = FftConvolve(wave.samples, ir, 0);
  }
  NormalizeOnOverflow(out);
  return out;
}

Waveform WhiteNoise(size_t length, uint64_t seed) {
  Rng rng(seed);
  Waveform out;
  out.samples.resize(length);
  for (double& x : out.samples) x = rng.Normal();
  return out;
}

Waveform PinkNoise(size_t length, uint64_t seed) {
  constexpr int kRows = 16;
  Rng rng(seed);
  std::array<double, kRows> rows{};
  double running = 0.0;
  for (double& r : rows) {
    r = rng.Uniform(-1.0, 1.0);
    running += r;
  }
  Waveform out;
  out.samples.resize(length);
  for (size_t i = 0; i < length; ++i) {
    // The row to refresh is the number of trailing zeros of the counter.
    const uint64_t counter = i + 1;
    const int row = std::min(kRows - 1, std::countr_zero(counter));
    running -= rows[row];
    rows[row] = rng.Uniform(-1.0, 1.0);
    running += rows[row];
    out.samples[i] = (running + rng.Uniform(-1.0, 1.0)) / (kRows + 1);
  }
  return out;
}

uint64_t ConditionSeed(uint64_t seed, std::string_view source_id,
                       const DegradationCondition& condition) {
  return SeedBuilder(seed)
      .Add(source_id)
      .Add(FamilyName(condition.family))
      .Add(int64_t{condition.level_index})
      .Build();
}

Waveform ApplyCondition(const Waveform& input,
                        const DegradationCondition& condition, uint64_t seed,
                        std::string_view source_id,
                        const DegradationOptions& options) {
  const auto table = LevelTable(condition.family);
  if (condition.level_index < 0 ||
      static_cast<size_t>(condition.level_index) >= table.size() ||
      table[condition.level_index] != condition.level_param) {
    throw Error(ErrorCode::kInvalidArgument,
                "condition does not match the level table of " +
                    std::string(FamilyName(condition.family)));
  }
  const Waveform wave = ToCanonicalRate(input);
  const uint64_t stream = ConditionSeed(seed, source_id, condition);
  Rng rng(stream);
  switch (condition.family) {
    case Family::kClip:
      return ClipSignal(wave, condition.level_param);
    case Family::kNoise: {
      Waveform noise;
      if (!options.noise_bank.empty()) {
        const Waveform& chosen =
            options.noise_bank[rng.UniformIndex(options.noise_bank.size())];
        const Waveform resampled = ToCanonicalRate(chosen);
        const size_t offset = rng.UniformIndex(resampled.samples.size());
        noise.samples.resize(resampled.samples.size());
        for (size_t i = 0; i < noise.samples.size(); ++i) {
          noise.samples[i] =
              resampled.samples[(offset + i) % resampled.samples.size()];
        }
      } else if (rng.Uniform() < 0.5) {
        noise = WhiteNoise(wave.samples.size(), rng.NextU64());
      } else {
        noise = PinkNoise(wave.samples.size(), rng.NextU64());
      }
      return MixNoiseAtSnr(wave, noise, condition.level_param);
    }
    case Family::kMp3Like:
      return CodecProxy(wave, condition.level_param, CodecFlavor::kMp3Like);
    case Family::kOpusLike:
      return CodecProxy(wave, condition.level_param, CodecFlavor::kOpusLike);
    case Family::kReverbProbe:
      return ReverbProbe(wave, condition.level_param, rng.NextU64());
    case Family::kExternalCodec:
      return ExternalCodec(wave, condition.level_param, stream,
                           options.external_codec_command);
  }
  throw Error(ErrorCode::kInvalidArgument, "unhandled family");
}

}  // namespace nomad
