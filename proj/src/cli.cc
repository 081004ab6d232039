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

#include "nomad/cli.h"

#include <glog/logging.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "nomad/checkpoint.h"
#include "nomad/csv.h"
#include "nomad/dataset.h"
#include "nomad/error.h"
#include "nomad/eval.h"
#include "nomad/nsim.h"
#include "nomad/parallel.h"
#include "nomad/scorer.h"
#include "nomad/trainer.h"
#include "nomad/triplets.h"

namespace nomad::cli {
namespace {

namespace fs = std::filesystem;

struct GlobalOptions {
  uint64_t seed = 0;
  std::string config_path;
  bool quiet = false;
};

struct SynthArgs {
  std::string clean_dir, out, noise_dir, encoder_cmd;
  std::string families = "clip,noise,mp3like,opuslike";
  int jobs = 1;
};

struct NsimArgs {
  std::string ref, deg;
};

struct TripletArgs {
  std::string manifest, out;
  size_t count = 8000;
  double s = 0.05, mix = 0.5, split = 0.8;
};

struct TrainArgs {
  std::string triplets, val, out, report;
  TrainConfig config;
};

struct ScoreArgs {
  std::string model, input_dir, pool_dir, out, pool_id;
  std::string mode = "nmr";
  int jobs = 1;
};

struct EvalMosArgs {
  std::string scores, mos, out;
};

struct EvalRankArgs {
  std::string scores, manifest, out;
  double threshold = 0.8;
};

struct FeatureLossArgs {
  std::string model, clean, estimate;
};

// Reads flat key=value lines (# comments allowed) into "--key value" pairs.
std::vector<std::string> ConfigArguments(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kNotFound, "config file " + path);
  std::vector<std::string> args;
  std::string line;
  while (std::getline(in, line)) {
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kInvalidArgument, "config line without '=': " + line);
    }
    std::string key = trim(line.substr(0, eq));
    std::replace(key.begin(), key.end(), '_', '-');
    args.push_back("--" + key);
    args.push_back(trim(line.substr(eq + 1)));
  }
  return args;
}

std::string RelativeTo(const fs::path& target, const fs::path& base) {
  return fs::absolute(target).lexically_normal().lexically_relative(
      fs::absolute(base).lexically_normal()).generic_string();
}

std::vector<Family> ParseFamilies(const std::string& list) {
  std::vector<Family> families;
  for (const auto& name : SplitFields(list)) {
    if (!name.empty()) families.push_back(ParseFamily(name));
  }
  if (families.empty()) throw Error(ErrorCode::kInvalidArgument, "--families is empty");
  return families;
}

int RunSynth(const SynthArgs& args, const GlobalOptions& global) {
  SynthOptions options;
  options.seed = global.seed;
  options.families = ParseFamilies(args.families);
  options.jobs = args.jobs;
  options.degradation.external_codec_command = args.encoder_cmd;
  if (!args.noise_dir.empty()) {
    for (const auto& path : ListWavFiles(args.noise_dir)) {
      options.degradation.noise_bank.push_back(LoadWav(path));
    }
  }
  const auto manifest = SynthDataset(args.clean_dir, args.out, options);
  LOG(INFO) << "wrote " << manifest.rows.size() << " manifest rows to "
            << (fs::path(args.out) / "manifest.csv");
  return kOk;
}

int RunNsim(const NsimArgs& args) {
  const double value = UtteranceNsim(LoadWav(args.ref), LoadWav(args.deg));
  std::printf("%.6f\n", value);
  return kOk;
}

int RunTriplets(const TripletArgs& args, const GlobalOptions& global) {
  const fs::path manifest_path(args.manifest);
  const auto manifest = ReadManifest(manifest_path);
  const auto sets = BuildSampleSets(manifest);
  SamplerConfig config{args.s, args.mix, global.seed};
  auto split = GenerateSplitTriplets(sets, config, args.count, args.split);
  const fs::path out(args.out);
  fs::create_directories(out);
  // Clip paths become relative to the directory holding the triplet files.
  const fs::path manifest_dir = manifest_path.parent_path();
  for (auto* list : {&split.train, &split.validation}) {
    for (auto& t : *list) {
      t.anchor_path = RelativeTo(manifest_dir / t.anchor_path, out);
      t.positive_path = RelativeTo(manifest_dir / t.positive_path, out);
      t.negative_path = RelativeTo(manifest_dir / t.negative_path, out);
    }
  }
  WriteTriplets(split.train, out / "train.csv");
  WriteTriplets(split.validation, out / "val.csv");
  LOG(INFO) << split.train.size() << " training triplets from "
            << split.train_sources.size() << " sources, " << split.validation.size()
            << " validation triplets from " << split.validation_sources.size()
            << " sources";
  return kOk;
}

int RunTrain(TrainArgs args, const GlobalOptions& global) {
  args.config.seed = global.seed;
  EncoderConfig encoder;
  encoder.init_seed = global.seed;
  const auto result = FitFromFiles(args.triplets, args.val, encoder, args.config);
  SaveCheckpoint(result.model, args.out);
  const std::string report = args.report.empty() ? args.out + ".report.csv" : args.report;
  WriteTrainReport(result.report, args.config.lr, report);
  LOG(INFO) << "best epoch " << result.report.best_epoch << " validation loss "
            << result.report.best_val_loss << " (initial "
            << result.report.initial_val_loss << ")";
  return kOk;
}

int RunScore(const ScoreArgs& args) {
  const EmbeddingModel model = LoadCheckpoint(args.model);
  const auto inputs = ListWavFiles(args.input_dir);
  if (inputs.empty()) throw Error(ErrorCode::kEmptyCorpus, "no WAV files in " + args.input_dir);
  EmbeddingCache cache;
  ScoreReport report;
  report.rows.resize(inputs.size());
  if (args.mode == "nmr") {
    const auto refs = ListWavFiles(args.pool_dir);
    if (refs.empty()) throw Error(ErrorCode::kEmptyPool, "no WAV files in " + args.pool_dir);
    ReferencePool pool;
    pool.pool_id = args.pool_id.empty()
                       ? fs::path(args.pool_dir).lexically_normal().filename().string()
                       : args.pool_id;
    if (pool.pool_id.empty()) pool.pool_id = "pool";
    pool.embeddings.resize(refs.size());
    ParallelFor(refs.size(), args.jobs,
                [&](size_t i) { pool.embeddings[i] = cache.Get(model, refs[i]); });
    ParallelFor(inputs.size(), args.jobs, [&](size_t i) {
      report.rows[i] = {inputs[i].generic_string(),
                        PooledScore(cache.Get(model, inputs[i]), pool), ScoreMode::kNmr,
                        pool.pool_id};
    });
  } else if (args.mode == "fr") {
    ParallelFor(inputs.size(), args.jobs, [&](size_t i) {
      // <source>__<condition>.wav is scored against <pool-dir>/<source>.wav.
      const std::string stem = inputs[i].stem().string();
      const std::string source = stem.substr(0, stem.find("__"));
      const fs::path ref = fs::path(args.pool_dir) / (source + ".wav");
      if (!fs::exists(ref)) {
        throw Error(ErrorCode::kNotFound, "clean counterpart " + ref.string());
      }
      report.rows[i] = {inputs[i].generic_string(),
                        EmbeddingDistance(cache.Get(model, inputs[i]), cache.Get(model, ref)),
                        ScoreMode::kFr, ref.generic_string()};
    });
  } else {
    throw Error(ErrorCode::kInvalidArgument, "--mode must be nmr or fr");
  }
  WriteScoreReport(report, args.out);
  LOG(INFO) << "scored " << report.rows.size() << " clips";
  return kOk;
}

int RunEvalMos(const EvalMosArgs& args) {
  const auto report =
      AggregatePerCondition(ReadScoreReport(args.scores), ReadMos(args.mos));
  std::printf("%-24s %12s %10s %6s\n", "condition", "mean_score", "mean_mos", "clips");
  for (const auto& c : report.conditions) {
    std::printf("%-24s %12.6f %10.4f %6zu\n", c.condition_id.c_str(), c.mean_score,
                c.mean_mos, c.clips);
  }
  std::printf("conditions %zu  PC %.4f  SC %.4f\n", report.n_conditions, report.pc,
              report.sc);
  if (!args.out.empty()) {
    CsvTable table;
    table.header = {"condition_id", "mean_score", "mean_mos", "clips"};
    for (const auto& c : report.conditions) {
      table.rows.push_back({c.condition_id, FormatDouble(c.mean_score),
                            FormatDouble(c.mean_mos), std::to_string(c.clips)});
    }
    WriteCsv(args.out, table);
  }
  return kOk;
}

int RunEvalRank(const EvalRankArgs& args) {
  const auto report = MonotonicityReport(ReadScoreReport(args.scores),
                                         ReadManifest(args.manifest), args.threshold);
  std::printf("%-24s %8s %6s %9s %s\n", "family", "SC", "clips", "expected", "flag");
  CsvTable table;
  table.header = {"family", "sc", "clips", "expected_sign", "flagged"};
  for (const auto& f : report) {
    const std::string sc = f.sc ? FormatDouble(*f.sc) : "undefined";
    std::printf("%-24s %8s %6zu %9s %s\n", f.family.c_str(),
                f.sc ? std::to_string(*f.sc).substr(0, 7).c_str() : "n/a", f.clips,
                f.expected_sign > 0 ? "+" : "-", f.flagged ? "LOW" : "");
    table.rows.push_back({f.family, sc, std::to_string(f.clips),
                          std::to_string(f.expected_sign), f.flagged ? "1" : "0"});
  }
  if (!args.out.empty()) WriteCsv(args.out, table);
  return kOk;
}

int RunFeatureLoss(const FeatureLossArgs& args) {
  const EmbeddingModel model = LoadCheckpoint(args.model);
  const auto result = FeatureLoss(model, LoadWav(args.clean), LoadWav(args.estimate));
  std::printf("%.6f\n", result.loss);
  return kOk;
}

}  // namespace

int Run(const std::vector<std::string>& raw_args) {
  FLAGS_logtostderr = true;
  GlobalOptions global;
  CLI::App app{"NOMAD: non-matching-reference perceptual audio distance", "nomad"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.add_option("--seed", global.seed, "Seed for every random stream")
      ->capture_default_str();
  app.add_option("--config", global.config_path,
                 "Flat key=value file of subcommand flag defaults");
  app.add_flag("--quiet", global.quiet, "Only log errors");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Synthesize the degraded dataset and manifest");
  synth_cmd->add_option("--clean-dir", synth.clean_dir, "Directory of clean WAVs")->required();
  synth_cmd->add_option("--out", synth.out, "Output directory")->required();
  synth_cmd->add_option("--families", synth.families, "Comma-separated degradation families")
      ->capture_default_str();
  synth_cmd->add_option("--noise-dir", synth.noise_dir, "Optional directory of noise WAVs");
  synth_cmd->add_option("--encoder-cmd", synth.encoder_cmd,
                        "external_codec command template with {in} {out} {kbps}");
  synth_cmd->add_option("--jobs", synth.jobs, "Worker threads")->capture_default_str();

  NsimArgs nsim;
  auto* nsim_cmd = app.add_subcommand("nsim", "Print the utterance NSIM of a degraded file");
  nsim_cmd->add_option("--ref", nsim.ref, "Clean reference WAV")->required();
  nsim_cmd->add_option("--deg", nsim.deg, "Degraded WAV")->required();

  TripletArgs triplets;
  auto* triplets_cmd = app.add_subcommand("triplets", "Sample train/validation triplets");
  triplets_cmd->add_option("--manifest", triplets.manifest, "Dataset manifest CSV")->required();
  triplets_cmd->add_option("--count", triplets.count, "Total triplets")->capture_default_str();
  triplets_cmd->add_option("--s", triplets.s, "Easy-negative NSIM margin")->capture_default_str();
  triplets_cmd->add_option("--mix", triplets.mix, "Fraction of easy triplets")
      ->capture_default_str();
  triplets_cmd->add_option("--split", triplets.split, "Training fraction (by source)")
      ->capture_default_str();
  triplets_cmd->add_option("--out", triplets.out, "Output directory for train.csv and val.csv")
      ->required();

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train the embedding network");
  train_cmd->add_option("--triplets", train.triplets, "Training triplet CSV")->required();
  train_cmd->add_option("--val", train.val, "Validation triplet CSV")->required();
  train_cmd->add_option("--out", train.out, "Checkpoint path")->required();
  train_cmd->add_option("--report", train.report, "Report CSV (default <out>.report.csv)");
  train_cmd->add_option("--margin", train.config.margin, "Triplet margin")->capture_default_str();
  train_cmd->add_option("--batch", train.config.batch_size, "Batch size")->capture_default_str();
  train_cmd->add_option("--lr", train.config.lr, "Learning rate")->capture_default_str();
  train_cmd->add_option("--decay", train.config.decay, "Learning-rate decay factor")
      ->capture_default_str();
  train_cmd->add_option("--decay-every", train.config.decay_every,
                        "Stagnant epochs per decay")->capture_default_str();
  train_cmd->add_option("--patience", train.config.patience,
                        "Stagnant epochs before stopping")->capture_default_str();
  train_cmd->add_option("--max-epochs", train.config.max_epochs, "Epoch limit")
      ->capture_default_str();
  train_cmd->add_option("--jobs", train.config.jobs, "Worker threads")->capture_default_str();

  ScoreArgs score;
  auto* score_cmd = app.add_subcommand("score", "Score clips with a trained model");
  score_cmd->add_option("--model", score.model, "Checkpoint")->required();
  score_cmd->add_option("--input-dir", score.input_dir, "Directory of clips to score")->required();
  score_cmd->add_option("--pool-dir", score.pool_dir,
                        "Clean references (nmr) or clean counterparts (fr)")->required();
  score_cmd->add_option("--mode", score.mode, "nmr or fr")
      ->check(CLI::IsMember({"nmr", "fr"}))->capture_default_str();
  score_cmd->add_option("--out", score.out, "Score CSV")->required();
  score_cmd->add_option("--pool-id", score.pool_id, "Pool name (default: pool dir name)");
  score_cmd->add_option("--jobs", score.jobs, "Worker threads")->capture_default_str();

  EvalMosArgs eval_mos;
  auto* eval_mos_cmd = app.add_subcommand("eval-mos", "Correlate scores with MOS per condition");
  eval_mos_cmd->add_option("--scores", eval_mos.scores, "Score CSV")->required();
  eval_mos_cmd->add_option("--mos", eval_mos.mos, "MOS CSV")->required();
  eval_mos_cmd->add_option("--out", eval_mos.out, "Optional per-condition CSV");

  EvalRankArgs eval_rank;
  auto* eval_rank_cmd =
      app.add_subcommand("eval-rank", "Per-family Spearman of scores against intensity");
  eval_rank_cmd->add_option("--scores", eval_rank.scores, "Score CSV")->required();
  eval_rank_cmd->add_option("--manifest", eval_rank.manifest, "Dataset manifest")->required();
  eval_rank_cmd->add_option("--threshold", eval_rank.threshold, "Flag |SC| below this")
      ->capture_default_str();
  eval_rank_cmd->add_option("--out", eval_rank.out, "Optional per-family CSV");

  FeatureLossArgs feature;
  auto* feature_cmd = app.add_subcommand("feature-loss", "Print the frame-wise feature loss");
  feature_cmd->add_option("--model", feature.model, "Checkpoint")->required();
  feature_cmd->add_option("--clean", feature.clean, "Clean WAV")->required();
  feature_cmd->add_option("--estimate", feature.estimate, "Estimated WAV")->required();

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    // Config-file entries are spliced in right after the subcommand name so
    // that explicit flags, which come later, take precedence.
    std::vector<std::string> args(raw_args.begin(), raw_args.end());
    for (size_t i = 1; i + 1 < args.size(); ++i) {
      if (args[i] == "--config") {
        auto extra = ConfigArguments(args[i + 1]);
        auto sub = std::find_if(args.begin() + 1, args.end(), [&](const std::string& a) {
          return app.get_subcommand_no_throw(a) != nullptr;
        });
        args.insert(sub == args.end() ? sub : sub + 1, extra.begin(), extra.end());
        break;
      }
    }
    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  } catch (const Error& e) {
    std::cerr << "nomad: " << e.what() << "\n";
    return kInputError;
  }

  FLAGS_minloglevel = global.quiet ? google::GLOG_ERROR : google::GLOG_INFO;
  CLI::App* selected = app.get_subcommands().front();
  if (!global.quiet) {
    std::cerr << "# nomad " << selected->get_name() << " seed=" << global.seed << "\n"
              << selected->config_to_str(true, false);
  }

  try {
    const std::string& name = selected->get_name();
    if (name == "synth") return RunSynth(synth, global);
    if (name == "nsim") return RunNsim(nsim);
    if (name == "triplets") return RunTriplets(triplets, global);
    if (name == "train") return RunTrain(train, global);
    if (name == "score") return RunScore(score);
    if (name == "eval-mos") return RunEvalMos(eval_mos);
    if (name == "eval-rank") return RunEvalRank(eval_rank);
    if (name == "feature-loss") return RunFeatureLoss(feature);
  } catch (const Error& e) {
    LOG(ERROR) << e.what();
    switch (e.code()) {
      case ErrorCode::kIo:
        return kInternalError;
      default:
        return kInputError;
    }
  } catch (const std::exception& e) {
    LOG(ERROR) << "internal error: " << e.what();
    return kInternalError;
  }
  return kInternalError;
}

}  // namespace nomad::cli
