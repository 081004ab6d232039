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

#ifndef NOMAD_NSIM_H_
#define NOMAD_NSIM_H_

#include <cstddef>
#include <optional>
#include <vector>

#include "nomad/audio.h"

namespace nomad {

// Neurogram similarity over log-band spectrograms.
//
// For every valid patch of patch_t frames by patch_b bands (stride 1):
//
//   Q = (2 mu_r mu_d + C1) / (mu_r^2 + mu_d^2 + C1)
//     * (sigma_rd + C3) / (sigma_r sigma_d + C3)
//
// with population statistics over the patch, C1 = c1_scale * L and
// C3 = (c23_scale * L)^2, where L is the intensity range max - min of the
// reference spectrogram. C1 appears in both numerator and denominator of the
// luminance term so that identical inputs score exactly 1.
struct NsimConfig {
  int patch_t = 3;
  int patch_b = 3;
  double c1_scale = 0.01;
  double c23_scale = 0.03;
  // Overrides the reference intensity range L when set.
  std::optional<double> intensity_range;
};

struct NsimScore {
  double utterance = 0.0;  // mean of patch_scores
  size_t patch_rows = 0;   // patch positions along time
  size_t patch_cols = 0;   // patch positions along bands
  std::vector<double> patch_scores;  // clamped to [0, 1], row-major
  // Mean of the unclamped patch values and the largest distance any single
  // unclamped patch value fell outside [0, 1].
  double raw_utterance = 0.0;
  double max_patch_excursion = 0.0;
};

// Throws kShapeMismatch when shapes differ and kPatchTooLarge when the
// spectrogram is smaller than one patch.
NsimScore Nsim(const Spectrogram& ref, const Spectrogram& deg,
               const NsimConfig& config = {});

// Utterance-level NSIM of two waveforms. Frame counts may differ by at most
// one; the longer spectrogram is truncated.
double UtteranceNsim(const Waveform& ref, const Waveform& deg,
                     const NsimConfig& config = {},
                     const SpectrogramConfig& spectrogram = {});

}  // namespace nomad

#endif  // NOMAD_NSIM_H_
