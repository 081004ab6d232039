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

#include "nomad/speech_synth.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "nomad/error.h"
#include "nomad/rng.h"

namespace nomad {
namespace {

struct VowelTarget {
  double f1, f2, f3;
};

// Adult male formant averages; speakers rescale them.
constexpr std::array<VowelTarget, 10> kVowels = {{
    {280, 2250, 2890},  // i
    {400, 1920, 2560},  // I
    {530, 1840, 2480},  // E
    {660, 1720, 2410},  // ae
    {730, 1090, 2440},  // a
    {570, 840, 2410},   // O
    {440, 1020, 2240},  // U
    {300, 870, 2240},   // u
    {640, 1190, 2390},  // V
    {490, 1350, 1690},  // 3
}};

enum class SegmentKind { kSilence, kVowel, kFricative, kPlosive };

struct Segment {
  SegmentKind kind;
  size_t length;
  VowelTarget formants{};
  double noise_center = 0.0;
  double gain = 1.0;
};

// Two-pole resonator with unity gain at DC.
class Resonator {
 public:
  double Process(double x, double freq, double bandwidth, double rate) {
    const double r = std::exp(-std::numbers::pi * bandwidth / rate);
    const double c = -r * r;
    const double b = 2.0 * r * std::cos(2.0 * std::numbers::pi * freq / rate);
    const double a = 1.0 - b - c;
    const double y = a * x + b * y1_ + c * y2_;
    y2_ = y1_;
    y1_ = y;
    return y;
  }

 private:
  double y1_ = 0.0;
  double y2_ = 0.0;
};

std::vector<Segment> PlanSegments(Rng& rng, size_t total, double rate) {
  auto ms = [rate](double v) { return static_cast<size_t>(v * rate / 1000.0); };
  std::vector<Segment> plan;
  size_t used = 0;
  plan.push_back({SegmentKind::kSilence, ms(rng.Uniform(80, 200))});
  used += plan.back().length;
  while (used < total) {
    const size_t syllables = 1 + rng.UniformIndex(3);
    for (size_t s = 0; s < syllables; ++s) {
      const double onset = rng.Uniform();
      if (onset < 0.35) {
        plan.push_back({SegmentKind::kFricative, ms(rng.Uniform(50, 120)), {},
                        rng.Uniform(2500, 6500), rng.Uniform(0.15, 0.35)});
      } else if (onset < 0.6) {
        plan.push_back({SegmentKind::kPlosive, ms(rng.Uniform(10, 25)), {},
                        rng.Uniform(1200, 4500), rng.Uniform(0.3, 0.6)});
      }
      const VowelTarget& v = kVowels[rng.UniformIndex(kVowels.size())];
      plan.push_back({SegmentKind::kVowel, ms(rng.Uniform(90, 230)), v, 0.0,
                      rng.Uniform(0.6, 1.0)});
    }
    plan.push_back({SegmentKind::kSilence, ms(rng.Uniform(40, 260))});
    used = 0;
    for (const auto& seg : plan) used += seg.length;
  }
  return plan;
}

}  // namespace

Waveform SynthesizeUtterance(uint64_t seed, const SpeechSynthConfig& config) {
  if (!(config.duration_s > 0.0) || config.sample_rate <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "invalid synthesis config");
  }
  Rng rng(SeedBuilder(seed).Add("utterance").Build());
  const double rate = config.sample_rate;
  const size_t total = static_cast<size_t>(config.duration_s * rate);

  const bool high_voice = rng.Uniform() < 0.5;
  const double f0_base = high_voice ? rng.Uniform(170, 240) : rng.Uniform(90, 140);
  const double tract_scale = high_voice ? rng.Uniform(1.08, 1.2) : rng.Uniform(0.92, 1.05);
  const double bandwidth_scale = rng.Uniform(0.8, 1.3);
  const double breathiness = rng.Uniform(0.01, 0.06);
  const double peak = rng.Uniform(0.35, 0.8);

  const std::vector<Segment> plan = PlanSegments(rng, total, rate);

  Waveform wave;
  wave.sample_rate = config.sample_rate;
  wave.samples.assign(total, 0.0);

  Resonator f1, f2, f3, f4, noise_filter;
  double phase = 0.0;
  double glottal_lp = 0.0;
  double cur_f1 = kVowels[4].f1 * tract_scale;
  double cur_f2 = kVowels[4].f2 * tract_scale;
  double cur_f3 = kVowels[4].f3 * tract_scale;
  double voicing = 0.0;
  double jitter = 0.0;
  const double glide = 1.0 - std::exp(-1.0 / (0.025 * rate));
  const double voicing_rate = 1.0 - std::exp(-1.0 / (0.012 * rate));

  size_t n = 0;
  for (const Segment& seg : plan) {
    for (size_t i = 0; i < seg.length && n < total; ++i, ++n) {
      const double progress = static_cast<double>(i) / std::max<size_t>(seg.length, 1);
      const double envelope = std::sin(std::numbers::pi * progress);
      const double time = n / rate;
      double voiced_target = 0.0;
      double noise_amp = 0.0;
      switch (seg.kind) {
        case SegmentKind::kVowel:
          voiced_target = seg.gain * std::sqrt(envelope);
          cur_f1 += glide * (seg.formants.f1 * tract_scale - cur_f1);
          cur_f2 += glide * (seg.formants.f2 * tract_scale - cur_f2);
          cur_f3 += glide * (seg.formants.f3 * tract_scale - cur_f3);
          break;
        case SegmentKind::kFricative:
          noise_amp = seg.gain * envelope;
          break;
        case SegmentKind::kPlosive:
          noise_amp = seg.gain * std::exp(-6.0 * progress);
          break;
        case SegmentKind::kSilence:
          break;
      }
      voicing += voicing_rate * (voiced_target - voicing);

      // Pitch: declination over the utterance, slow vibrato, cycle jitter.
      const double f0 = f0_base * (1.1 - 0.2 * time / config.duration_s) *
                        (1.0 + 0.03 * std::sin(2.0 * std::numbers::pi * 3.1 * time)) *
                        (1.0 + jitter);
      phase += f0 / rate;
      if (phase >= 1.0) {
        phase -= 1.0;
        jitter = 0.01 * rng.Normal();
      }
      // Sawtooth glottal flow derivative, softened by a one-pole lowpass.
      const double pulse = 1.0 - 2.0 * phase;
      glottal_lp += 0.3 * (pulse - glottal_lp);
      const double source =
          voicing * (glottal_lp + breathiness * rng.Normal());

      double voiced = f1.Process(source, cur_f1, 80 * bandwidth_scale, rate);
      voiced = f2.Process(voiced, cur_f2, 100 * bandwidth_scale, rate);
      voiced = f3.Process(voiced, cur_f3, 140 * bandwidth_scale, rate);
      voiced = f4.Process(voiced, 3500 * tract_scale, 250 * bandwidth_scale, rate);

      double unvoiced = 0.0;
      if (noise_amp > 0.0) {
        unvoiced = noise_amp * noise_filter.Process(rng.Normal(), seg.noise_center,
                                                    1500, rate);
      }
      wave.samples[n] = voiced + unvoiced;
    }
  }

  // Remove DC, normalise to the speaker's peak level, add a faint noise floor.
  double mean = 0.0;
  for (double x : wave.samples) mean += x;
  mean /= static_cast<double>(total);
  double max_abs = 0.0;
  for (double& x : wave.samples) {
    x -= mean;
    max_abs = std::max(max_abs, std::abs(x));
  }
  const double gain = max_abs > 0.0 ? peak / max_abs : 0.0;
  for (double& x : wave.samples) x = x * gain + 1e-4 * rng.Normal();
  return wave;
}

std::vector<std::filesystem::path> WriteSyntheticCorpus(
    const std::filesystem::path& dir, int count, uint64_t seed,
    const SpeechSynthConfig& config) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> paths;
  for (int i = 0; i < count; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "utt_%03d.wav", i);
    const auto path = dir / name;
    WriteWav(SynthesizeUtterance(SeedBuilder(seed).Add(int64_t{i}).Build(), config),
             path);
    paths.push_back(path);
  }
  return paths;
}

}  // namespace nomad
