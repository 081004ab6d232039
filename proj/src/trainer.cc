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

#include "nomad/trainer.h"

#include <glog/logging.h>

#include <algorithm>
#include <chrono>
#include <set>

#include "nomad/csv.h"
#include "nomad/error.h"

namespace nomad {

void TrainConfig::Validate() const {
  if (!(margin >= 0.0) || batch_size < 1 || !(lr >= 0.0) || !(decay > 0.0) ||
      decay_every < 1 || patience < 1 || max_epochs < 0) {
    throw Error(ErrorCode::kInvalidArgument, "invalid training configuration");
  }
}

double TrainEpoch(EmbeddingModel& model, std::span<const SpectrogramTriplet> train,
                  const TrainConfig& config, double lr, Rng& rng) {
  if (train.empty()) throw Error(ErrorCode::kDataError, "no training triplets");
  std::vector<SpectrogramTriplet> order(train.begin(), train.end());
  for (size_t i = order.size() - 1; i > 0; --i) {
    std::swap(order[i], order[rng.UniformIndex(i + 1)]);
  }
  double loss_sum = 0.0;
  size_t batches = 0;
  const size_t batch = static_cast<size_t>(config.batch_size);
  for (size_t start = 0; start < order.size(); start += batch) {
    const size_t end = std::min(order.size(), start + batch);
    const auto result = LossAndGradients(
        model, std::span(order).subspan(start, end - start), config.margin,
        config.jobs);
    loss_sum += result.loss;
    ++batches;
    if (lr != 0.0) {
      auto params = model.mutable_params();
      for (size_t k = 0; k < params.size(); ++k) params[k] -= lr * result.grad[k];
      model.RoundToFloat();
    }
  }
  return loss_sum / static_cast<double>(batches);
}

double Validate(const EmbeddingModel& model,
                std::span<const SpectrogramTriplet> validation, double margin,
                int jobs) {
  if (validation.empty()) throw Error(ErrorCode::kDataError, "no validation triplets");
  return MeanTripletLoss(model, validation, margin, jobs);
}

FitResult Fit(EmbeddingModel initial, std::span<const SpectrogramTriplet> train,
              std::span<const SpectrogramTriplet> validation,
              const TrainConfig& config) {
  config.Validate();
  const auto start = std::chrono::steady_clock::now();
  FitResult result{initial, {}};
  TrainReport& report = result.report;
  report.initial_train_loss = Validate(initial, train, config.margin, config.jobs);
  report.initial_val_loss = Validate(initial, validation, config.margin, config.jobs);
  report.best_val_loss = report.initial_val_loss;
  LOG(INFO) << "epoch 0 train " << report.initial_train_loss << " val "
            << report.initial_val_loss;

  EmbeddingModel model = std::move(initial);
  Rng rng(SeedBuilder(config.seed).Add("shuffle").Build());
  double lr = config.lr;
  int stagnant = 0;
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    EpochRecord record;
    record.epoch = epoch;
    record.lr = lr;
    record.train_loss = TrainEpoch(model, train, config, lr, rng);
    record.val_loss = Validate(model, validation, config.margin, config.jobs);
    if (record.val_loss < report.best_val_loss) {
      report.best_val_loss = record.val_loss;
      report.best_epoch = epoch;
      result.model = model;
      stagnant = 0;
    } else {
      ++stagnant;
      if (stagnant % config.decay_every == 0) {
        lr *= config.decay;
        record.decayed = true;
      }
    }
    LOG(INFO) << "epoch " << epoch << " train " << record.train_loss << " val "
              << record.val_loss << " lr " << record.lr;
    report.epochs.push_back(record);
    if (stagnant >= config.patience) {
      LOG(INFO) << "stopping: no validation improvement for " << stagnant
                << " epochs";
      break;
    }
  }
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

const Spectrogram& SpectrogramStore::Load(const std::filesystem::path& base_dir,
                                          const std::string& clip_path) {
  const std::string key = (base_dir / clip_path).lexically_normal().string();
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  return cache_.emplace(key, LogBandSpectrogram(LoadWav(key))).first->second;
}

std::vector<SpectrogramTriplet> SpectrogramStore::Resolve(
    std::span<const TripletRecord> records, const std::filesystem::path& base_dir) {
  std::vector<SpectrogramTriplet> triplets;
  triplets.reserve(records.size());
  for (const auto& r : records) {
    triplets.push_back({&Load(base_dir, r.anchor_path), &Load(base_dir, r.positive_path),
                        &Load(base_dir, r.negative_path)});
  }
  return triplets;
}

FitResult FitFromFiles(const std::filesystem::path& train_path,
                       const std::filesystem::path& validation_path,
                       const EncoderConfig& encoder, const TrainConfig& config) {
  const auto train_records = ReadTriplets(train_path);
  const auto val_records = ReadTriplets(validation_path);
  if (train_records.empty() || val_records.empty()) {
    throw Error(ErrorCode::kDataError, "training and validation files must be nonempty");
  }
  std::set<std::string> train_sources;
  for (const auto& r : train_records) train_sources.insert(r.source_id);
  for (const auto& r : val_records) {
    if (train_sources.count(r.source_id)) {
      throw Error(ErrorCode::kDataError,
                  "source " + r.source_id + " appears in both training and validation");
    }
  }
  // std::map nodes are stable, so pointers survive later insertions.
  SpectrogramStore store;
  const auto train = store.Resolve(train_records, train_path.parent_path());
  const auto validation = store.Resolve(val_records, validation_path.parent_path());
  LOG(INFO) << "loaded " << store.size() << " clips for " << train.size()
            << " training and " << validation.size() << " validation triplets";
  return Fit(InitModel(encoder), train, validation, config);
}

void WriteTrainReport(const TrainReport& report, double initial_lr,
                      const std::filesystem::path& path) {
  CsvTable table;
  table.header = SplitFields(kTrainReportHeader);
  table.rows.push_back({"0", FormatDouble(report.initial_train_loss),
                        FormatDouble(report.initial_val_loss), FormatDouble(initial_lr)});
  for (const auto& e : report.epochs) {
    table.rows.push_back({std::to_string(e.epoch), FormatDouble(e.train_loss),
                          FormatDouble(e.val_loss), FormatDouble(e.lr)});
  }
  WriteCsv(path, table);
}

}  // namespace nomad
