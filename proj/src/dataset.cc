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

#include "nomad/dataset.h"

#include <glog/logging.h>

#include <algorithm>
#include <optional>

#include "nomad/csv.h"
#include "nomad/error.h"
#include "nomad/nsim.h"
#include "nomad/parallel.h"

namespace nomad {

void WriteManifest(const DatasetManifest& manifest,
                   const std::filesystem::path& path) {
  CsvTable table;
  table.header = SplitFields(kManifestHeader);
  for (const auto& row : manifest.rows) {
    table.rows.push_back({row.clip_path, row.source_id, row.family,
                          std::to_string(row.level_index),
                          FormatDouble(row.level_param), FormatDouble(row.nsim)});
  }
  WriteCsv(path, table);
}

DatasetManifest ReadManifest(const std::filesystem::path& path) {
  const CsvTable table = ReadCsv(path, kManifestHeader);
  DatasetManifest manifest;
  for (const auto& fields : table.rows) {
    ManifestRow row;
    row.clip_path = fields[0];
    row.source_id = fields[1];
    row.family = fields[2];
    row.level_index = static_cast<int>(ParseInt(fields[3]));
    row.level_param = ParseDouble(fields[4]);
    row.nsim = ParseDouble(fields[5]);
    if (!(row.nsim >= 0.0 && row.nsim <= 1.0)) {
      throw Error(ErrorCode::kDataError,
                  path.string() + ": nsim out of [0, 1] for " + row.clip_path);
    }
    manifest.rows.push_back(std::move(row));
  }
  return manifest;
}

std::vector<std::filesystem::path> ListWavFiles(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::kNotFound, dir.string() + " is not a directory");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".wav") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

DatasetManifest SynthDataset(const std::filesystem::path& clean_dir,
                             const std::filesystem::path& out_dir,
                             const SynthOptions& options) {
  const auto sources = ListWavFiles(clean_dir);
  if (sources.empty()) {
    throw Error(ErrorCode::kEmptyCorpus, "no WAV files in " + clean_dir.string());
  }
  if (options.families.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no degradation families selected");
  }
  std::filesystem::create_directories(out_dir / "clean");
  std::filesystem::create_directories(out_dir / "degraded");

  // One slot per source so the manifest order never depends on scheduling.
  std::vector<std::optional<std::vector<ManifestRow>>> per_source(sources.size());
  ParallelFor(sources.size(), options.jobs, [&](size_t index) {
    const auto& path = sources[index];
    const std::string source_id = path.stem().string();
    try {
      const Waveform clean = QuantizeTo16Bit(ToCanonicalRate(LoadWav(path)));
      std::vector<ManifestRow> rows;
      const std::string clean_rel = "clean/" + source_id + ".wav";
      WriteWav(clean, out_dir / clean_rel);
      rows.push_back({clean_rel, source_id, std::string(kCleanFamily), 0, 0.0, 1.0});
      for (Family family : options.families) {
        const auto levels = LevelTable(family);
        for (size_t level = 0; level < levels.size(); ++level) {
          const auto condition =
              DegradationCondition::Make(family, static_cast<int>(level));
          const Waveform degraded = QuantizeTo16Bit(ApplyCondition(
              clean, condition, options.seed, source_id, options.degradation));
          const std::string rel = "degraded/" + source_id + "__" +
                                  std::string(FamilyName(family)) + "_" +
                                  std::to_string(level) + ".wav";
          WriteWav(degraded, out_dir / rel);
          rows.push_back({rel, source_id, std::string(FamilyName(family)),
                          condition.level_index, condition.level_param,
                          UtteranceNsim(clean, degraded)});
        }
      }
      per_source[index] = std::move(rows);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kMissingEncoder) throw;
      LOG(WARNING) << "skipping " << path << ": " << e.what();
    }
  });

  DatasetManifest manifest;
  for (auto& rows : per_source) {
    if (!rows) continue;
    for (auto& row : *rows) manifest.rows.push_back(std::move(row));
  }
  if (manifest.rows.empty()) {
    throw Error(ErrorCode::kEmptyCorpus,
                "every source in " + clean_dir.string() + " failed");
  }
  WriteManifest(manifest, out_dir / "manifest.csv");
  return manifest;
}

}  // namespace nomad
