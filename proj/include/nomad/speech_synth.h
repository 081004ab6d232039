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

#ifndef NOMAD_SPEECH_SYNTH_H_
#define NOMAD_SPEECH_SYNTH_H_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "nomad/audio.h"

namespace nomad {

// Source-filter speech-like utterances used as a stand-in clean corpus: a
// glottal pulse train with pitch declination and jitter drives a cascade of
// formant resonators that glide between vowel targets, interleaved with
// fricative noise bursts, plosive bursts and inter-word pauses. Each seed
// gives a different speaker (pitch range, vocal tract scaling, loudness) and
// a different syllable sequence.
struct SpeechSynthConfig {
  double duration_s = 3.2;
  int sample_rate = kCanonicalRate;
};

Waveform SynthesizeUtterance(uint64_t seed, const SpeechSynthConfig& config = {});

// Writes `count` utterances as <dir>/utt_000.wav, ... and returns the paths.
std::vector<std::filesystem::path> WriteSyntheticCorpus(
    const std::filesystem::path& dir, int count, uint64_t seed,
    const SpeechSynthConfig& config = {});

}  // namespace nomad

#endif  // NOMAD_SPEECH_SYNTH_H_
