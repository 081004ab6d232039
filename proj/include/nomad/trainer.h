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

#ifndef NOMAD_TRAINER_H_
#define NOMAD_TRAINER_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "nomad/embed_net.h"
#include "nomad/rng.h"
#include "nomad/triplets.h"

namespace nomad {

struct TrainConfig {
  double margin = 0.2;
  int batch_size = 8;
  double lr = 1e-3;
  double decay = 0.9;     // lr factor per stagnant stretch
  int decay_every = 20;   // stagnant epochs per decay
  int patience = 50;      // stagnant epochs before stopping
  int max_epochs = 200;
  uint64_t seed = 0;
  int jobs = 1;

  void Validate() const;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double lr = 0.0;
  bool decayed = false;  // lr was multiplied by decay after this epoch
};

struct TrainReport {
  double initial_train_loss = 0.0;  // evaluation only, before any update
  double initial_val_loss = 0.0;
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;  // 0 means the initial model
  double best_val_loss = 0.0;
  double wall_time_s = 0.0;
};

// Shuffles with `rng`, then takes one plain gradient step per batch:
// theta <- theta - lr * grad. Parameters stay float-representable. Returns
// the mean of the pre-update batch losses.
double TrainEpoch(EmbeddingModel& model, std::span<const SpectrogramTriplet> train,
                  const TrainConfig& config, double lr, Rng& rng);

// Mean triplet loss; never mutates the model.
double Validate(const EmbeddingModel& model,
                std::span<const SpectrogramTriplet> validation, double margin,
                int jobs = 1);

struct FitResult {
  EmbeddingModel model;
  TrainReport report;
};

// Trains until max_epochs or `patience` epochs without a strict validation
// improvement. The learning rate is multiplied by `decay` each time the
// stagnant streak reaches a multiple of `decay_every`. Returns the model of
// the best validation epoch (the initial model if none improved).
FitResult Fit(EmbeddingModel initial, std::span<const SpectrogramTriplet> train,
              std::span<const SpectrogramTriplet> validation,
              const TrainConfig& config);

// Spectrograms for the clips referenced by triplet records, keyed by the
// resolved path. Paths are resolved against `base_dir`.
class SpectrogramStore {
 public:
  const Spectrogram& Load(const std::filesystem::path& base_dir,
                          const std::string& clip_path);
  // Builds pointer triplets into this store; the store must outlive them.
  std::vector<SpectrogramTriplet> Resolve(std::span<const TripletRecord> records,
                                          const std::filesystem::path& base_dir);
  size_t size() const { return cache_.size(); }

 private:
  std::map<std::string, Spectrogram> cache_;
};

// Triplet-file front end: reads train/validation triplets (paths relative to
// each file's directory), checks that they share no source_id, and trains a
// freshly initialised encoder.
FitResult FitFromFiles(const std::filesystem::path& train_path,
                       const std::filesystem::path& validation_path,
                       const EncoderConfig& encoder, const TrainConfig& config);

inline constexpr std::string_view kTrainReportHeader = "epoch,train_loss,val_loss,lr";
// Epoch 0 row holds the initial evaluation.
void WriteTrainReport(const TrainReport& report, double initial_lr,
                      const std::filesystem::path& path);

}  // namespace nomad

#endif  // NOMAD_TRAINER_H_
