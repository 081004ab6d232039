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

#ifndef NOMAD_DATASET_H_
#define NOMAD_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "nomad/degradation.h"

namespace nomad {

inline constexpr std::string_view kManifestHeader =
    "clip_path,source_id,family,level_index,level_param,nsim";
// Family name used for the clean row of every source.
inline constexpr std::string_view kCleanFamily = "clean";

struct ManifestRow {
  std::string clip_path;  // relative to the manifest's directory
  std::string source_id;
  std::string family;
  int level_index = 0;
  double level_param = 0.0;
  double nsim = 1.0;
};

struct DatasetManifest {
  std::vector<ManifestRow> rows;
};

void WriteManifest(const DatasetManifest& manifest,
                   const std::filesystem::path& path);
DatasetManifest ReadManifest(const std::filesystem::path& path);

struct SynthOptions {
  uint64_t seed = 0;
  std::vector<Family> families = DefaultFamilies();
  DegradationOptions degradation;
  int jobs = 1;
};

// Degrades every WAV in clean_dir (lexicographic order) under every level of
// every family, writing
//   out_dir/clean/<source>.wav
//   out_dir/degraded/<source>__<family>_<level>.wav
//   out_dir/manifest.csv
// Rows are grouped by source: the clean row (nsim 1) followed by the
// degraded rows in family then level order. Sources that fail are skipped
// and logged; kEmptyCorpus is thrown when nothing usable remains.
DatasetManifest SynthDataset(const std::filesystem::path& clean_dir,
                             const std::filesystem::path& out_dir,
                             const SynthOptions& options);

// Sorted *.wav files directly inside `dir`.
std::vector<std::filesystem::path> ListWavFiles(const std::filesystem::path& dir);

}  // namespace nomad

#endif  // NOMAD_DATASET_H_
