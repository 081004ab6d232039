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

#ifndef NOMAD_DEGRADATION_H_
#define NOMAD_DEGRADATION_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nomad/audio.h"

namespace nomad {

enum class Family {
  kClip,
  kNoise,
  kMp3Like,
  kOpusLike,
  kReverbProbe,
  kExternalCodec,
};

std::string_view FamilyName(Family family);
// Throws kInvalidArgument for unknown names.
Family ParseFamily(std::string_view name);
// The four training families: clip, noise, mp3like, opuslike.
std::vector<Family> DefaultFamilies();

// Level parameters per family, indexed by level_index:
//   clip            percent of samples clipped   5 10 25 40 60
//   noise           SNR dB                       0 8 15 25 40
//   mp3like/opuslike/external_codec  kbps        8 16 32 64 128
//   reverb_probe    RT60 s                       0.1 0.3 0.6 1.0 1.5
std::span<const double> LevelTable(Family family);

// +1 when a larger level_param means a stronger degradation (clip, reverb),
// -1 when it means a milder one (SNR, bitrate).
int IntensityDirection(Family family);

struct DegradationCondition {
  Family family = Family::kNoise;
  int level_index = 0;
  double level_param = 0.0;

  // Looks the parameter up in LevelTable. Throws kInvalidArgument when the
  // index is out of range.
  static DegradationCondition Make(Family family, int level_index);
};

// Hard clip at the (1 - percent/100) quantile of |x| (nearest rank, rounded
// up). The output is not renormalised. Throws kDegenerateSignal when all
// samples are equal.
Waveform ClipSignal(const Waveform& wave, double percent);
double ClipThreshold(const Waveform& wave, double percent);

// y = x + g s with g = sqrt(P_x / (P_s 10^(snr/10))), noise looped or
// truncated to the length of x. y is scaled to a 0.99 peak only if it
// overflows. Throws kSilentInput when either power is zero.
Waveform MixNoiseAtSnr(const Waveform& clean, const Waveform& noise,
                       double snr_db);
double NoiseGainForSnr(double clean_power, double noise_power, double snr_db);
double MeanPower(std::span<const double> samples);

enum class CodecFlavor { kMp3Like, kOpusLike };

struct CodecProxyParams {
  double cutoff_hz = 0.0;
  int bits = 0;
};

// cutoff = min(7600, k sqrt(kbps)) with k = 280 (mp3like) or 340 (opuslike);
// bits = clamp(round(3 + 1.5 log2(kbps)), 4, 14), halves rounded down.
// Throws kUnsupportedBitrate outside {8, 16, 32, 64, 128}.
CodecProxyParams CodecProxyParamsFor(double kbps, CodecFlavor flavor);

// Zero-phase Kaiser-windowed sinc lowpass followed by uniform quantisation.
Waveform CodecProxy(const Waveform& wave, double kbps, CodecFlavor flavor);

// Amplitude envelope of the synthetic reverb tail: 60 dB down at rt60_s.
double ReverbEnvelope(double t_s, double rt60_s);
// Unit-energy impulse response: a direct path followed by decaying white
// noise, 0.8 rt60_s long.
std::vector<double> ReverbImpulseResponse(double rt60_s, int sample_rate,
                                          uint64_t seed);
// Convolution with ReverbImpulseResponse, truncated to the input length.
Waveform ReverbProbe(const Waveform& wave, double rt60_s, uint64_t seed);

struct DegradationOptions {
  // Optional noise recordings; when empty, seeded white or pink noise is
  // generated.
  std::vector<Waveform> noise_bank;
  // Shell command with {in}, {out} and {kbps} placeholders used by the
  // external_codec family.
  std::string external_codec_command;
};

Waveform WhiteNoise(size_t length, uint64_t seed);
// Voss-McCartney pink noise.
Waveform PinkNoise(size_t length, uint64_t seed);

// Seed of the random stream for one (source, condition) pair.
uint64_t ConditionSeed(uint64_t seed, std::string_view source_id,
                       const DegradationCondition& condition);

// h(x, alpha): dispatches to the family operation at the canonical rate. All
// randomness is drawn from ConditionSeed(seed, source_id, condition).
Waveform ApplyCondition(const Waveform& wave,
                        const DegradationCondition& condition, uint64_t seed,
                        std::string_view source_id,
                        const DegradationOptions& options = {});

}  // namespace nomad

#endif  // NOMAD_DEGRADATION_H_
