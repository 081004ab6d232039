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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only when
// every criterion passes.

#include <glog/logging.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gradient_check.h"
#include "nomad/audio.h"
#include "nomad/dataset.h"
#include "nomad/degradation.h"
#include "nomad/embed_net.h"
#include "nomad/error.h"
#include "nomad/eval.h"
#include "nomad/nsim.h"
#include "nomad/scorer.h"
#include "nomad/speech_synth.h"
#include "nomad/trainer.h"
#include "nomad/triplets.h"
#include "sampler_oracle.h"

namespace nomad {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// Desk-scale end-to-end settings.
constexpr int kDeskSources = 20;
constexpr size_t kDeskTriplets = 800;
constexpr double kTrainFraction = 0.8;
constexpr double kDeskLearningRate = 0.05;
constexpr int kDeskMaxEpochs = 60;
constexpr int kHeldOutSources = 8;
constexpr int kPoolSize = 10;
constexpr uint64_t kTrainCorpusSeed = 101;
constexpr uint64_t kHeldOutCorpusSeed = 202;
constexpr uint64_t kPoolACorpusSeed = 303;
constexpr uint64_t kPoolBCorpusSeed = 404;
constexpr uint64_t kSynthSeed = 7;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string Fmt(const char* format, double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, value);
  return buf;
}

std::vector<Waveform> Utterances(int count, uint64_t seed) {
  std::vector<Waveform> out;
  for (int i = 0; i < count; ++i) {
    out.push_back(SynthesizeUtterance(SeedBuilder(seed).Add(int64_t{i}).Build()));
  }
  return out;
}

Outcome NsimIdentityAndBounds() {
  const auto start = Clock::now();
  const std::vector<Waveform> utterances = Utterances(50, 1);
  double worst_identity = 0.0;
  double lowest = 1.0, highest = 0.0;
  for (size_t i = 0; i < utterances.size(); ++i) {
    const Waveform& u = utterances[i];
    worst_identity = std::max(worst_identity, std::abs(UtteranceNsim(u, u) - 1.0));
    const Waveform noisy =
        ApplyCondition(u, DegradationCondition::Make(Family::kNoise, 1), 3, "u");
    const Waveform& other = utterances[(i + 1) % utterances.size()];
    for (double q : {UtteranceNsim(u, noisy), UtteranceNsim(u, other)}) {
      lowest = std::min(lowest, q);
      highest = std::max(highest, q);
    }
  }
  const double elapsed = Seconds(start);
  Outcome o;
  o.pass = worst_identity <= 1e-9 && lowest >= 0.0 && highest <= 1.0 && elapsed < 60.0;
  o.detail = "max |Q(s,s)-1| " + Fmt("%.2e", worst_identity) + ", scores in [" +
             Fmt("%.4f", lowest) + ", " + Fmt("%.4f", highest) + "], " +
             Fmt("%.1f s", elapsed);
  return o;
}

Outcome NsimMonotonicity() {
  const auto start = Clock::now();
  const std::vector<Waveform> utterances = Utterances(10, 2);
  bool pass = true;
  std::string detail;
  for (Family family : DefaultFamilies()) {
    std::vector<double> means(LevelTable(family).size(), 0.0);
    for (size_t u = 0; u < utterances.size(); ++u) {
      for (size_t level = 0; level < means.size(); ++level) {
        const auto condition = DegradationCondition::Make(family, static_cast<int>(level));
        const Waveform deg = ApplyCondition(utterances[u], condition, 11,
                                            "utt" + std::to_string(u));
        means[level] += UtteranceNsim(utterances[u], deg) / utterances.size();
      }
    }
    // NSIM must fall as the degradation gets stronger.
    const int direction = IntensityDirection(family);
    bool strict = true;
    for (size_t i = 1; i < means.size(); ++i) {
      strict &= direction > 0 ? means[i] < means[i - 1] : means[i] > means[i - 1];
    }
    pass &= strict;
    detail += std::string(FamilyName(family)) + (strict ? " ok" : " NOT monotone") + " [";
    for (size_t i = 0; i < means.size(); ++i) detail += (i ? " " : "") + Fmt("%.3f", means[i]);
    detail += "]; ";
  }
  const double elapsed = Seconds(start);
  pass &= elapsed < 300.0;
  return {pass, detail + Fmt("%.1f s", elapsed)};
}

bool Contains(const std::vector<size_t>& v, size_t x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

Outcome SamplerVersusBruteForce() {
  const auto start = Clock::now();
  size_t checks = 0, violations = 0;
  Rng gen(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const size_t n = 3 + gen.UniformIndex(10);
    testing::SamplerOracle oracle;
    SampleSet set{"s" + std::to_string(trial), {}};
    for (size_t i = 0; i < n; ++i) {
      oracle.q.push_back(std::round(gen.Uniform() * 40.0) / 40.0);
      set.entries.push_back({"clip" + std::to_string(i), oracle.q.back()});
    }
    const double s = 0.05;
    Rng rng(trial);
    for (size_t a = 0; a < n; ++a) {
      const size_t p = PickPositive(set, a);
      ++checks;
      violations += !Contains(oracle.PositiveCandidates(a), p);
      const auto easy = oracle.EasyCandidates(a, p, s);
      if (!easy.empty()) {
        ++checks;
        violations += !Contains(easy, SampleEasyNegative(set, a, p, s, rng));
      }
      const auto hard = oracle.HardCandidates(a, p);
      if (!hard.empty()) {
        ++checks;
        violations += !Contains(hard, SampleHardNegative(set, a, p));
      }
    }
    // Whole-generator output, mapped back to entry indices.
    std::vector<SampleSet> sets = {set};
    SamplerConfig config;
    config.rng_seed = trial;
    try {
      for (const TripletRecord& t : GenerateTriplets(sets, config, 5)) {
        auto index = [&](const std::string& path) {
          return static_cast<size_t>(std::stoul(path.substr(4)));
        };
        const size_t a = index(t.anchor_path), p = index(t.positive_path);
        const size_t neg = index(t.negative_path);
        ++checks;
        const auto candidates = t.strategy == Strategy::kEasy ? oracle.EasyCandidates(a, p, s)
                                                              : oracle.HardCandidates(a, p);
        violations += !Contains(oracle.PositiveCandidates(a), p) || !Contains(candidates, neg) ||
                      !ValidateTriplet(t, s).empty();
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kExhaustedSampler) throw;
    }
  }
  // Anchor 0.80 in {0.78, 0.70, 0.83, 0.95} with s = 0.05.
  const SampleSet hand{"hand", {{"a", 0.80}, {"b", 0.78}, {"c", 0.70}, {"d", 0.83}, {"e", 0.95}}};
  const size_t positive = PickPositive(hand, 0);
  const auto easy = EasyNegativeCandidates(hand, 0, positive, 0.05);
  const size_t hard = SampleHardNegative(hand, 0, positive);
  const bool hand_ok = hand.entries[positive].q == 0.78 && easy.size() == 2 &&
                       hand.entries[easy[0]].q == 0.70 && hand.entries[easy[1]].q == 0.95 &&
                       hand.entries[hard].q == 0.83;
  const double elapsed = Seconds(start);
  Outcome o;
  o.pass = violations == 0 && hand_ok && elapsed < 60.0;
  o.detail = std::to_string(checks) + " selections checked, " + std::to_string(violations) +
             " outside the oracle sets; hand example " + (hand_ok ? "reproduced" : "WRONG") +
             "; " + Fmt("%.1f s", elapsed);
  return o;
}

Outcome GradientGate() {
  const auto start = Clock::now();
  const auto triplet_tiny =
      testing::CheckTripletGradient(testing::TinyEncoder(11), 12, 4, 0.2, 200, 11);
  const auto triplet_two =
      testing::CheckTripletGradient(testing::TwoLayerEncoder(12), 20, 4, 0.5, 200, 12);
  const auto feature_tiny =
      testing::CheckFeatureLossGradient(testing::TinyEncoder(13), 110, 200, 13);
  const auto feature_two =
      testing::CheckFeatureLossGradient(testing::TwoLayerEncoder(14), 60, 200, 14);
  const double elapsed = Seconds(start);
  bool pass = elapsed < 120.0;
  std::string detail;
  for (const auto& [name, check] :
       std::vector<std::pair<std::string, testing::GradientCheck>>{
           {"triplet/1-layer", triplet_tiny},
           {"triplet/2-layer", triplet_two},
           {"feature/1-layer", feature_tiny},
           {"feature/2-layer", feature_two}}) {
    pass &= check.coordinates >= 200 && check.max_relative_error < 1e-4;
    detail += name + " " + Fmt("%.1e", check.max_relative_error) + " over " +
              std::to_string(check.coordinates) + "; ";
  }
  return {pass, detail + Fmt("%.1f s", elapsed)};
}

// State shared by the desk-scale criteria.
struct DeskRun {
  std::optional<EmbeddingModel> model;
  fs::path held_out_dir;
  DatasetManifest held_out;
  std::vector<Waveform> pool_a;
  std::vector<Waveform> pool_b;
};

Outcome DeskTraining(const fs::path& work, DeskRun& run) {
  const auto start = Clock::now();
  WriteSyntheticCorpus(work / "train_clean", kDeskSources, kTrainCorpusSeed);
  SynthOptions synth;
  synth.seed = kSynthSeed;
  const DatasetManifest manifest = SynthDataset(work / "train_clean", work / "train_ds", synth);
  const std::vector<SampleSet> sets = BuildSampleSets(manifest);
  SamplerConfig sampler;  // s = 0.05, mix = 0.5
  sampler.rng_seed = kSynthSeed;
  const TripletSplit split = GenerateSplitTriplets(sets, sampler, kDeskTriplets, kTrainFraction);
  WriteTriplets(split.train, work / "train_ds" / "train.csv");
  WriteTriplets(split.validation, work / "train_ds" / "val.csv");
  const double prep_s = Seconds(start);

  TrainConfig config;  // margin 0.2, batch 8
  config.lr = kDeskLearningRate;
  config.max_epochs = kDeskMaxEpochs;
  config.seed = kSynthSeed;
  FitResult fit = FitFromFiles(work / "train_ds" / "train.csv", work / "train_ds" / "val.csv",
                               EncoderConfig{}, config);
  const TrainReport& report = fit.report;
  run.model = std::move(fit.model);

  const double ratio = report.best_val_loss / report.initial_val_loss;
  Outcome o;
  o.pass = config.margin == 0.2 && sampler.s == 0.05 && config.batch_size == 8 &&
           ratio < 0.5 && report.wall_time_s <= 1800.0;
  o.detail = std::to_string(sets.size()) + " sources (" +
             std::to_string(split.train_sources.size()) + " train / " +
             std::to_string(split.validation_sources.size()) + " val), " +
             std::to_string(split.train.size()) + "+" + std::to_string(split.validation.size()) +
             " triplets; val loss " + Fmt("%.4f", report.initial_val_loss) + " -> best " +
             Fmt("%.4f", report.best_val_loss) + " at epoch " +
             std::to_string(report.best_epoch) + " (ratio " + Fmt("%.3f", ratio) +
             "); training " + Fmt("%.0f s", report.wall_time_s) + ", data prep " +
             Fmt("%.0f s", prep_s);

  // Held-out sources and two disjoint reference pools for criteria 6 and 7.
  WriteSyntheticCorpus(work / "held_clean", kHeldOutSources, kHeldOutCorpusSeed);
  run.held_out_dir = work / "held_ds";
  run.held_out = SynthDataset(work / "held_clean", run.held_out_dir, synth);
  run.pool_a = Utterances(kPoolSize, kPoolACorpusSeed);
  run.pool_b = Utterances(kPoolSize, kPoolBCorpusSeed);
  return o;
}

struct HeldOutScores {
  ScoreReport nmr_a;
  std::vector<double> a, b, fr;
  std::vector<std::string> condition;  // family_level per degraded clip
};

HeldOutScores ScoreHeldOut(const DeskRun& run) {
  const EmbeddingModel& model = *run.model;
  const ReferencePool pool_a = MakeReferencePool(model, run.pool_a, "pool_a");
  const ReferencePool pool_b = MakeReferencePool(model, run.pool_b, "pool_b");
  std::map<std::string, Embedding> clean;
  HeldOutScores out;
  for (const ManifestRow& row : run.held_out.rows) {
    const Waveform wave = LoadWav(run.held_out_dir / row.clip_path);
    const Embedding e = EmbedWaveform(model, wave);
    if (row.family == kCleanFamily) {
      clean[row.source_id] = e;
      continue;
    }
    out.a.push_back(PooledScore(e, pool_a));
    out.b.push_back(PooledScore(e, pool_b));
    out.fr.push_back(EmbeddingDistance(e, clean.at(row.source_id)));
    out.condition.push_back(row.family + "_" + std::to_string(row.level_index));
    out.nmr_a.rows.push_back({row.clip_path, out.a.back(), ScoreMode::kNmr, "pool_a"});
  }
  return out;
}

Outcome LearnedMonotonicity(const DeskRun& run, const HeldOutScores& scores) {
  const auto report = MonotonicityReport(scores.nmr_a, run.held_out, 0.8);
  bool noise_ok = false;
  int others_ok = 0;
  std::string detail;
  for (const FamilyMonotonicity& f : report) {
    const bool ok = f.sc && std::abs(*f.sc) >= 0.8;
    if (f.family == "noise") noise_ok = ok;
    else if (ok) ++others_ok;
    detail += f.family + " " + (f.sc ? Fmt("%+.3f", *f.sc) : std::string("undefined")) + " (" +
              std::to_string(f.clips) + " clips); ";
  }
  return {noise_ok && others_ok >= 1, detail + "need |SC| >= 0.8 on noise and one more family"};
}

Outcome ReferenceInvariance(const HeldOutScores& scores) {
  const auto [lo, hi] = std::minmax_element(scores.a.begin(), scores.a.end());
  const double range = *hi - *lo;
  double worst = 0.0;
  for (size_t i = 0; i < scores.a.size(); ++i) {
    worst = std::max(worst, std::abs(scores.a[i] - scores.b[i]));
  }
  std::map<std::string, std::pair<double, double>> sums;
  std::map<std::string, int> counts;
  for (size_t i = 0; i < scores.a.size(); ++i) {
    sums[scores.condition[i]].first += scores.fr[i];
    sums[scores.condition[i]].second += scores.a[i];
    ++counts[scores.condition[i]];
  }
  std::vector<double> fr_means, nmr_means;
  for (const auto& [condition, sum] : sums) {
    fr_means.push_back(sum.first / counts[condition]);
    nmr_means.push_back(sum.second / counts[condition]);
  }
  const std::optional<double> sc = Spearman(fr_means, nmr_means);
  Outcome o;
  o.pass = range > 0.0 && worst < 0.1 * range && sc && *sc >= 0.9;
  o.detail = "max per-clip pool difference " + Fmt("%.4f", worst) + " vs 10% of range " +
             Fmt("%.4f", 0.1 * range) + "; FR vs NMR condition SC " +
             (sc ? Fmt("%.3f", *sc) : std::string("undefined")) + " over " +
             std::to_string(fr_means.size()) + " conditions";
  return o;
}

Outcome CorrelationFixtures() {
  const std::vector<double> x = {1, 2, 3}, y = {3, 1, 2};
  const bool spearman_ok = Spearman(x, y) == -0.5;
  Rng rng(8);
  std::vector<double> u, v, au, av;
  for (int i = 0; i < 100; ++i) {
    u.push_back(rng.Normal());
    v.push_back(u.back() + rng.Normal());
    au.push_back(4.0 * u.back() - 2.0);
    av.push_back(0.25 * v.back() + 9.0);
  }
  const double affine_error = std::abs(*Pearson(u, v) - *Pearson(au, av));
  ScoreReport scores;
  for (const auto& [path, s] : std::vector<std::pair<std::string, double>>{
           {"a1", 0.1}, {"a2", 0.3}, {"b1", 0.5}, {"b2", 0.7}, {"c1", 1.0}, {"c2", 1.4}}) {
    scores.rows.push_back({path, s, ScoreMode::kNmr, "p"});
  }
  const std::vector<MosRecord> mos = {{"a1", "A", 4.0}, {"a2", "A", 4.4}, {"b1", "B", 3.0},
                                      {"b2", "B", 3.5}, {"c1", "C", 1.0}, {"c2", "C", 2.0}};
  const EvalReport report = AggregatePerCondition(scores, mos);
  // Hand-computed condition means: A (0.2, 4.2), B (0.6, 3.25), C (1.2, 1.5).
  const double expected[3][2] = {{0.2, 4.2}, {0.6, 3.25}, {1.2, 1.5}};
  bool table_ok = report.n_conditions == 3;
  for (size_t i = 0; table_ok && i < 3; ++i) {
    table_ok &= std::abs(report.conditions[i].mean_score - expected[i][0]) < 1e-12 &&
                std::abs(report.conditions[i].mean_mos - expected[i][1]) < 1e-12;
  }
  Outcome o;
  o.pass = spearman_ok && affine_error < 1e-12 && table_ok;
  o.detail = std::string("spearman([1,2,3],[3,1,2]) ") + (spearman_ok ? "= -0.5" : "WRONG") +
             "; Pearson affine deviation " + Fmt("%.1e", affine_error) +
             "; 6-row aggregation " + (table_ok ? "matches" : "MISMATCH");
  return o;
}

int Shell(const std::string& command) {
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string Bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "<missing>";
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

Outcome CliDeterminism(const fs::path& work) {
  const fs::path root = work / "determinism";
  SpeechSynthConfig short_clips;
  short_clips.duration_s = 1.5;
  WriteSyntheticCorpus(root / "clean", 3, 55, short_clips);
  WriteSyntheticCorpus(root / "pool", 2, 66, short_clips);
  const std::string cli = NOMAD_CLI_PATH;
  const std::vector<std::string> steps = {
      "--seed 9 synth --clean-dir ../clean --out ds --jobs 2",
      "--seed 9 triplets --manifest ds/manifest.csv --count 60 --out trip",
      "--seed 9 train --triplets trip/train.csv --val trip/val.csv --out model.ckpt "
      "--max-epochs 2 --lr 0.05",
      "--seed 9 score --model model.ckpt --input-dir ds/degraded --pool-dir ../pool "
      "--mode nmr --out nmr.csv --jobs 2",
      "--seed 9 score --model model.ckpt --input-dir ds/degraded --pool-dir ds/clean "
      "--mode fr --out fr.csv",
  };
  for (const char* run : {"run1", "run2"}) {
    fs::create_directories(root / run);
    for (const std::string& step : steps) {
      const std::string command =
          "cd '" + (root / run).string() + "' && '" + cli + "' --quiet " + step;
      if (const int code = Shell(command); code != 0) {
        return {false, std::string(run) + ": '" + step + "' exited with " + std::to_string(code)};
      }
    }
  }
  const std::vector<std::string> outputs = {"ds/manifest.csv", "trip/train.csv",
                                            "trip/val.csv",    "model.ckpt",
                                            "model.ckpt.report.csv", "nmr.csv", "fr.csv"};
  std::vector<std::string> differing;
  for (const std::string& file : outputs) {
    const std::string a = Bytes(root / "run1" / file);
    if (a == "<missing>" || a != Bytes(root / "run2" / file)) differing.push_back(file);
  }
  std::string detail = std::to_string(outputs.size() - differing.size()) + "/" +
                       std::to_string(outputs.size()) + " outputs byte-identical";
  for (const auto& f : differing) detail += "; differs: " + f;
  return {differing.empty(), detail};
}

struct Criterion {
  int id;
  std::string name;
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace nomad

int main(int argc, char** argv) {
  using namespace nomad;
  google::InitGoogleLogging(argv[0]);
  FLAGS_logtostderr = true;
  FLAGS_minloglevel = google::GLOG_WARNING;

  const fs::path work =
      fs::temp_directory_path() / ("nomad_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(work);
  fs::create_directories(work);

  DeskRun desk;
  std::optional<HeldOutScores> held_out;
  auto held_out_scores = [&]() -> const HeldOutScores& {
    if (!desk.model) throw std::runtime_error("no model from the desk training run");
    if (!held_out) held_out = ScoreHeldOut(desk);
    return *held_out;
  };

  const std::vector<Criterion> criteria = {
      {1, "NSIM identity and bounds", NsimIdentityAndBounds},
      {2, "NSIM monotonicity", NsimMonotonicity},
      {3, "sampler vs brute force", SamplerVersusBruteForce},
      {4, "gradient gate", GradientGate},
      {5, "desk training", [&] { return DeskTraining(work, desk); }},
      {6, "learned-metric monotonicity",
       [&] { return LearnedMonotonicity(desk, held_out_scores()); }},
      {7, "reference invariance", [&] { return ReferenceInvariance(held_out_scores()); }},
      {8, "correlation fixtures", CorrelationFixtures},
      {9, "CLI determinism", [&] { return CliDeterminism(work); }},
  };

  int passed = 0;
  for (const Criterion& c : criteria) {
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("error: ") + e.what()};
    }
    passed += outcome.pass;
    std::printf("%s [%d] %s: %s\n", outcome.pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                outcome.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu acceptance criteria passed\n", passed, criteria.size());
  fs::remove_all(work);
  return passed == static_cast<int>(criteria.size()) ? 0 : 1;
}
