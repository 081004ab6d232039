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

#ifndef NOMAD_AUDIO_H_
#define NOMAD_AUDIO_H_

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace nomad {

// Every analysis in this project runs at 16 kHz; public entry points resample
// other rates on entry.
inline constexpr int kCanonicalRate = 16000;

// Mono PCM signal. Amplitudes are nominally in [-1, 1].
struct Waveform {
  std::vector<double> samples;
  int sample_rate = kCanonicalRate;

  size_t size() const { return samples.size(); }
  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

// Log10 band power, stored frame-major (T rows of B bands).
class Spectrogram {
 public:
  Spectrogram() = default;
  Spectrogram(size_t frames, size_t bands, double frame_hop_s,
              double fill = 0.0)
      : frames_(frames),
        bands_(bands),
        frame_hop_s_(frame_hop_s),
        values_(frames * bands, fill) {}

  size_t frames() const { return frames_; }
  size_t bands() const { return bands_; }
  double frame_hop_s() const { return frame_hop_s_; }

  double& at(size_t frame, size_t band) { return values_[frame * bands_ + band]; }
  double at(size_t frame, size_t band) const {
    return values_[frame * bands_ + band];
  }
  std::span<const double> frame(size_t t) const {
    return {values_.data() + t * bands_, bands_};
  }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  // First `frames` frames.
  Spectrogram Truncated(size_t frames) const;

 private:
  size_t frames_ = 0;
  size_t bands_ = 0;
  double frame_hop_s_ = 0.0;
  std::vector<double> values_;
};

struct SpectrogramConfig {
  int window = 400;     // 25 ms Hann
  int hop = 160;        // 10 ms
  int fft_size = 512;
  int bands = 32;       // mel-spaced triangles
  double min_hz = 0.0;
  double max_hz = 8000.0;
  double power_floor = 1e-10;  // log10 floor of -10
};

// Reads RIFF/WAVE, 16-bit PCM, mono. Samples are divided by 32768.
Waveform LoadWav(const std::filesystem::path& path);
// Writes 16-bit PCM mono. Amplitudes are clamped to the 16-bit range.
void WriteWav(const Waveform& wave, const std::filesystem::path& path);
// The waveform that WriteWav followed by LoadWav would produce.
Waveform QuantizeTo16Bit(const Waveform& wave);

// Windowed-sinc polyphase resampler (Kaiser beta 8, 64 taps per phase).
// Equal rates return an exact copy.
Waveform Resample(const Waveform& wave, int target_rate);
Waveform ToCanonicalRate(const Waveform& wave);

// Frames T = floor((N - window) / hop) + 1. Throws kSignalTooShort when the
// signal is shorter than one window.
Spectrogram LogBandSpectrogram(const Waveform& wave,
                               const SpectrogramConfig& config = {});

// B x (fft_size/2 + 1) triangular weights, row-major.
std::vector<double> MelFilterbank(const SpectrogramConfig& config,
                                  int sample_rate);
double HzToMel(double hz);
double MelToHz(double mel);

}  // namespace nomad

#endif  // NOMAD_AUDIO_H_
