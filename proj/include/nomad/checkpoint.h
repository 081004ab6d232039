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

#ifndef NOMAD_CHECKPOINT_H_
#define NOMAD_CHECKPOINT_H_

#include <filesystem>

#include "nomad/embed_net.h"

namespace nomad {

// Checkpoint layout:
//   "NOMAD1\n"
//   u32 little-endian length of the JSON header
//   JSON header {"format_version", "parameter_count", "config": {...}}
//   parameter_count little-endian float32 values in parameter layout order
//
// Models are kept float-representable (EmbeddingModel::RoundToFloat), so a
// save/load round trip is exact.
inline constexpr int kCheckpointFormatVersion = 1;

void SaveCheckpoint(const EmbeddingModel& model, const std::filesystem::path& path);
// Throws kNotFound or kCorruptCheckpoint (bad magic, malformed header,
// length mismatch, non-finite weight).
EmbeddingModel LoadCheckpoint(const std::filesystem::path& path);

}  // namespace nomad

#endif  // NOMAD_CHECKPOINT_H_
