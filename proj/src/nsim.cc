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

#include "nomad/nsim.h"

#include <glog/logging.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "nomad/error.h"

namespace nomad {
namespace {

void ValidateConfig(const NsimConfig& config) {
  if (config.patch_t < 1 || config.patch_b < 1 || config.patch_t % 2 == 0 ||
      config.patch_b % 2 == 0) {
    throw Error(ErrorCode::kInvalidArgument, "patch dimensions must be odd and >= 1");
  }
  if (!(config.c1_scale > 0.0) || !(config.c23_scale > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "NSIM constant scales must be positive");
  }
  if (config.intensity_range && !(*config.intensity_range >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "intensity range must be >= 0");
  }
}

}  // namespace

NsimScore Nsim(const Spectrogram& ref, const Spectrogram& deg,
               const NsimConfig& config) {
  ValidateConfig(config);
  if (ref.frames() != deg.frames() || ref.bands() != deg.bands()) {
    throw Error(ErrorCode::kShapeMismatch,
                std::to_string(ref.frames()) + "x" + std::to_string(ref.bands()) +
                    " vs " + std::to_string(deg.frames()) + "x" +
                    std::to_string(deg.bands()));
  }
  const size_t pt = static_cast<size_t>(config.patch_t);
  const size_t pb = static_cast<size_t>(config.patch_b);
  if (ref.frames() < pt || ref.bands() < pb) {
    throw Error(ErrorCode::kPatchTooLarge,
                "spectrogram " + std::to_string(ref.frames()) + "x" +
                    std::to_string(ref.bands()) + " smaller than patch");
  }

  NsimScore score;
  score.patch_rows = ref.frames() - pt + 1;
  score.patch_cols = ref.bands() - pb + 1;
  score.patch_scores.resize(score.patch_rows * score.patch_cols);

  double range = 0.0;
  if (config.intensity_range) {
    range = *config.intensity_range;
  } else {
    const auto [lo, hi] = std::minmax_element(ref.values().begin(), ref.values().end());
    range = *hi - *lo;
  }

  if (range == 0.0) {
    // Constant reference: the constants vanish, so the ratio is undefined.
    const bool equal = std::equal(ref.values().begin(), ref.values().end(),
                                  deg.values().begin());
    LOG(WARNING) << "NSIM reference has zero intensity range; scoring "
                 << (equal ? "identical input as 1" : "as 0");
    const double q = equal ? 1.0 : 0.0;
    std::fill(score.patch_scores.begin(), score.patch_scores.end(), q);
    score.utterance = q;
    score.raw_utterance = q;
    return score;
  }

  const double c1 = config.c1_scale * range;
  const double c3 = std::pow(config.c23_scale * range, 2);
  const double count = static_cast<double>(pt * pb);

  double clamped_sum = 0.0;
  double raw_sum = 0.0;
  for (size_t row = 0; row < score.patch_rows; ++row) {
    for (size_t col = 0; col < score.patch_cols; ++col) {
      double sum_r = 0.0, sum_d = 0.0;
      for (size_t t = row; t < row + pt; ++t) {
        for (size_t b = col; b < col + pb; ++b) {
          sum_r += ref.at(t, b);
          sum_d += deg.at(t, b);
        }
      }
      const double mu_r = sum_r / count;
      const double mu_d = sum_d / count;
      double var_r = 0.0, var_d = 0.0, cov = 0.0;
      for (size_t t = row; t < row + pt; ++t) {
        for (size_t b = col; b < col + pb; ++b) {
          const double dr = ref.at(t, b) - mu_r;
          const double dd = deg.at(t, b) - mu_d;
          var_r += dr * dr;
          var_d += dd * dd;
          cov += dr * dd;
        }
      }
      var_r /= count;
      var_d /= count;
      cov /= count;
      const double luminance =
          (2.0 * mu_r * mu_d + c1) / (mu_r * mu_r + mu_d * mu_d + c1);
      const double structure =
          (cov + c3) / (std::sqrt(var_r) * std::sqrt(var_d) + c3);
      const double q = luminance * structure;
      const double clamped = std::clamp(q, 0.0, 1.0);
      score.max_patch_excursion =
          std::max(score.max_patch_excursion, std::abs(q - clamped));
      score.patch_scores[row * score.patch_cols + col] = clamped;
      clamped_sum += clamped;
      raw_sum += q;
    }
  }
  const double patches = static_cast<double>(score.patch_scores.size());
  score.utterance = clamped_sum / patches;
  score.raw_utterance = raw_sum / patches;
  VLOG(1) << "NSIM " << score.utterance << " (unclamped " << score.raw_utterance
          << ", largest patch excursion " << score.max_patch_excursion << ")";
  return score;
}

double UtteranceNsim(const Waveform& ref, const Waveform& deg,
                     const NsimConfig& config,
                     const SpectrogramConfig& spectrogram) {
  const Spectrogram ref_spec = LogBandSpectrogram(ref, spectrogram);
  const Spectrogram deg_spec = LogBandSpectrogram(deg, spectrogram);
  const size_t frames = std::min(ref_spec.frames(), deg_spec.frames());
  const size_t longest = std::max(ref_spec.frames(), deg_spec.frames());
  if (longest - frames > 1) {
    throw Error(ErrorCode::kShapeMismatch,
                "utterance lengths differ by more than one hop (" +
                    std::to_string(ref_spec.frames()) + " vs " +
                    std::to_string(deg_spec.frames()) + " frames)");
  }
  return Nsim(ref_spec.Truncated(frames), deg_spec.Truncated(frames), config)
      .utterance;
}

}  // namespace nomad
