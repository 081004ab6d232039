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

#include "nomad/audio.h"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <mutex>
#include <numbers>
#include <numeric>
#include <string>

#include "nomad/error.h"
#include "fftw_util.h"

namespace nomad {

std::mutex& internal::FftwPlannerMutex() {
  static std::mutex mutex;
  return mutex;
}

namespace {

using internal::FftwPlannerMutex;

class RealFft {
 public:
  explicit RealFft(int size) : size_(size) {
    input_ = fftw_alloc_real(size);
    output_ = fftw_alloc_complex(size / 2 + 1);
    std::lock_guard<std::mutex> lock(FftwPlannerMutex());
    plan_ = fftw_plan_dft_r2c_1d(size, input_, output_, FFTW_ESTIMATE);
  }
  ~RealFft() {
    {
      std::lock_guard<std::mutex> lock(FftwPlannerMutex());
      fftw_destroy_plan(plan_);
    }
    fftw_free(input_);
    fftw_free(output_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  double* input() { return input_; }
  const fftw_complex* Execute() {
    fftw_execute(plan_);
    return output_;
  }
  int size() const { return size_; }

 private:
  int size_;
  double* input_;
  fftw_complex* output_;
  fftw_plan plan_;
};

uint32_t ReadU32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) |
         (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t ReadU16(const unsigned char* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

void PutU32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void PutU16(std::string& out, uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

int16_t ToPcm16(double x) {
  const double scaled = std::round(x * 32768.0);
  return static_cast<int16_t>(std::clamp(scaled, -32768.0, 32767.0));
}

double KaiserWindow(double x, double beta) {
  if (std::abs(x) > 1.0) return 0.0;
  return std::cyl_bessel_i(0.0, beta * std::sqrt(1.0 - x * x)) /
         std::cyl_bessel_i(0.0, beta);
}

double Sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

}  // namespace

Spectrogram Spectrogram::Truncated(size_t frames) const {
  frames = std::min(frames, frames_);
  Spectrogram out(frames, bands_, frame_hop_s_);
  std::copy_n(values_.begin(), frames * bands_, out.values_.begin());
  return out;
}

Waveform LoadWav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, path.string());
  const std::vector<unsigned char> bytes(
      (std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::string name = path.string();
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw Error(ErrorCode::kCorruptHeader, name + ": not a RIFF/WAVE file");
  }
  bool have_format = false;
  uint16_t channels = 0;
  uint16_t bits = 0;
  uint32_t rate = 0;
  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const uint32_t chunk_size = ReadU32(chunk + 4);
    const size_t body = pos + 8;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (chunk_size < 16 || body + 16 > bytes.size()) {
        throw Error(ErrorCode::kCorruptHeader, name + ": short fmt chunk");
      }
      const uint16_t format = ReadU16(bytes.data() + body);
      channels = ReadU16(bytes.data() + body + 2);
      rate = ReadU32(bytes.data() + body + 4);
      bits = ReadU16(bytes.data() + body + 14);
      if (format != 1) {
        throw Error(ErrorCode::kUnsupportedFormat,
                    name + ": audio format " + std::to_string(format) +
                        " is not PCM");
      }
      if (channels != 1) {
        throw Error(ErrorCode::kUnsupportedFormat,
                    name + ": " + std::to_string(channels) +
                        " channels, only mono is supported");
      }
      if (bits != 16) {
        throw Error(ErrorCode::kUnsupportedFormat,
                    name + ": " + std::to_string(bits) +
                        "-bit samples, only 16-bit is supported");
      }
      if (rate == 0) {
        throw Error(ErrorCode::kCorruptHeader, name + ": zero sample rate");
      }
      have_format = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (!have_format) {
        throw Error(ErrorCode::kCorruptHeader, name + ": data before fmt");
      }
      if (body + chunk_size > bytes.size() || chunk_size % 2 != 0) {
        throw Error(ErrorCode::kCorruptHeader, name + ": truncated data chunk");
      }
      Waveform wave;
      wave.sample_rate = static_cast<int>(rate);
      wave.samples.resize(chunk_size / 2);
      for (size_t i = 0; i < wave.samples.size(); ++i) {
        const auto raw = static_cast<int16_t>(ReadU16(bytes.data() + body + 2 * i));
        wave.samples[i] = raw / 32768.0;
      }
      if (wave.samples.empty()) {
        throw Error(ErrorCode::kCorruptHeader, name + ": empty data chunk");
      }
      return wave;
    }
    pos = body + chunk_size + (chunk_size & 1u);
  }
  throw Error(ErrorCode::kCorruptHeader, name + ": missing fmt or data chunk");
}

void WriteWav(const Waveform& wave, const std::filesystem::path& path) {
  const uint32_t data_bytes = static_cast<uint32_t>(wave.samples.size() * 2);
  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  PutU32(out, 36 + data_bytes);
  out += "WAVEfmt ";
  PutU32(out, 16);
  PutU16(out, 1);
  PutU16(out, 1);
  PutU32(out, static_cast<uint32_t>(wave.sample_rate));
  PutU32(out, static_cast<uint32_t>(wave.sample_rate) * 2);
  PutU16(out, 2);
  PutU16(out, 16);
  out += "data";
  PutU32(out, data_bytes);
  for (double x : wave.samples) PutU16(out, static_cast<uint16_t>(ToPcm16(x)));
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw Error(ErrorCode::kIo, "short write to " + path.string());
}

Waveform QuantizeTo16Bit(const Waveform& wave) {
  Waveform out = wave;
  for (double& x : out.samples) x = ToPcm16(x) / 32768.0;
  return out;
}

Waveform Resample(const Waveform& wave, int target_rate) {
  if (target_rate <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "target rate must be positive");
  }
  if (target_rate == wave.sample_rate) return wave;

  constexpr int kTaps = 64;
  constexpr int kHalf = kTaps / 2;
  constexpr double kBeta = 8.0;
  const int64_t divisor = std::gcd(target_rate, wave.sample_rate);
  const int64_t up = target_rate / divisor;
  const int64_t down = wave.sample_rate / divisor;
  // Cutoff in cycles per input sample, slightly inside Nyquist of the
  // slower rate.
  const double cutoff = 0.5 * std::min(1.0, static_cast<double>(up) / down) * 0.96;

  // One row of taps per output phase; tap j covers input index base + j - kHalf + 1.
  std::vector<double> table(static_cast<size_t>(up) * kTaps);
  for (int64_t phase = 0; phase < up; ++phase) {
    const double offset = static_cast<double>(phase) / up;
    double sum = 0.0;
    for (int j = 0; j < kTaps; ++j) {
      const double distance = (j - kHalf + 1) - offset;
      const double w = 2.0 * cutoff * Sinc(2.0 * cutoff * distance) *
                       KaiserWindow(distance / kHalf, kBeta);
      table[phase * kTaps + j] = w;
      sum += w;
    }
    for (int j = 0; j < kTaps; ++j) table[phase * kTaps + j] /= sum;
  }

  const int64_t in_len = static_cast<int64_t>(wave.samples.size());
  const int64_t out_len = (in_len * up + down - 1) / down;
  Waveform out;
  out.sample_rate = target_rate;
  out.samples.resize(static_cast<size_t>(out_len));
  for (int64_t n = 0; n < out_len; ++n) {
    const int64_t position = n * down;
    const int64_t base = position / up;
    const int64_t phase = position % up;
    const double* taps = &table[phase * kTaps];
    double acc = 0.0;
    for (int j = 0; j < kTaps; ++j) {
      const int64_t index = base + j - kHalf + 1;
      if (index < 0 || index >= in_len) continue;
      acc += taps[j] * wave.samples[index];
    }
    out.samples[n] = acc;
  }
  return out;
}

Waveform ToCanonicalRate(const Waveform& wave) {
  return Resample(wave, kCanonicalRate);
}

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

std::vector<double> MelFilterbank(const SpectrogramConfig& config,
                                  int sample_rate) {
  const int bins = config.fft_size / 2 + 1;
  const double max_hz = std::min(config.max_hz, sample_rate / 2.0);
  const double mel_lo = HzToMel(config.min_hz);
  const double mel_hi = HzToMel(max_hz);
  std::vector<double> edges(config.bands + 2);
  for (int i = 0; i < config.bands + 2; ++i) {
    edges[i] = MelToHz(mel_lo + (mel_hi - mel_lo) * i / (config.bands + 1));
  }
  std::vector<double> weights(static_cast<size_t>(config.bands) * bins, 0.0);
  for (int band = 0; band < config.bands; ++band) {
    const double left = edges[band];
    const double center = edges[band + 1];
    const double right = edges[band + 2];
    for (int k = 0; k < bins; ++k) {
      const double hz = static_cast<double>(k) * sample_rate / config.fft_size;
      double w = 0.0;
      if (hz > left && hz <= center) {
        w = (hz - left) / (center - left);
      } else if (hz > center && hz < right) {
        w = (right - hz) / (right - center);
      }
      weights[static_cast<size_t>(band) * bins + k] = w;
    }
  }
  return weights;
}

Spectrogram LogBandSpectrogram(const Waveform& input,
                               const SpectrogramConfig& config) {
  const Waveform wave = ToCanonicalRate(input);
  const size_t n = wave.samples.size();
  const size_t window = static_cast<size_t>(config.window);
  const size_t hop = static_cast<size_t>(config.hop);
  if (n < window) {
    throw Error(ErrorCode::kSignalTooShort,
                std::to_string(n) + " samples, window is " +
                    std::to_string(window));
  }
  const size_t frames = (n - window) / hop + 1;
  const int bins = config.fft_size / 2 + 1;
  const std::vector<double> filters = MelFilterbank(config, wave.sample_rate);

  std::vector<double> hann(window);
  for (size_t i = 0; i < window; ++i) {
    hann[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / window);
  }

  Spectrogram spec(frames, static_cast<size_t>(config.bands),
                   static_cast<double>(hop) / wave.sample_rate);
  RealFft fft(config.fft_size);
  std::vector<double> power(bins);
  const double log_floor = std::log10(config.power_floor);
  for (size_t t = 0; t < frames; ++t) {
    double* in = fft.input();
    std::fill_n(in, config.fft_size, 0.0);
    for (size_t i = 0; i < window; ++i) in[i] = wave.samples[t * hop + i] * hann[i];
    const fftw_complex* bins_out = fft.Execute();
    for (int k = 0; k < bins; ++k) {
      power[k] = bins_out[k][0] * bins_out[k][0] + bins_out[k][1] * bins_out[k][1];
    }
    for (int band = 0; band < config.bands; ++band) {
      const double* w = &filters[static_cast<size_t>(band) * bins];
      double energy = 0.0;
      for (int k = 0; k < bins; ++k) energy += w[k] * power[k];
      spec.at(t, band) = energy > config.power_floor ? std::log10(energy) : log_floor;
    }
  }
  return spec;
}

}  // namespace nomad
