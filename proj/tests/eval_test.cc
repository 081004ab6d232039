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

#include "nomad/eval.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>

#include "test_util.h"

namespace nomad {
namespace {

using testing::CodeOf;
using testing::TempDir;

using Vec = std::vector<double>;

TEST(Spearman, HandExample) {
  EXPECT_EQ(Spearman(Vec{1, 2, 3}, Vec{3, 1, 2}).value(), -0.5);
}

TEST(Spearman, PerfectOrders) {
  EXPECT_NEAR(Spearman(Vec{1, 2, 3, 4}, Vec{0.1, 5, 6, 100}).value(), 1.0, 1e-15);
  const Vec x = {0.3, -1, 2, 7, 4};
  Vec neg;
  for (double v : x) neg.push_back(-v);
  EXPECT_NEAR(Spearman(x, neg).value(), -1.0, 1e-15);
}

TEST(Spearman, InvariantUnderMonotoneTransforms) {
  Rng rng(1);
  Vec x, y;
  for (int i = 0; i < 50; ++i) {
    x.push_back(rng.Uniform(0.1, 3.0));
    y.push_back(x.back() + rng.Normal());
  }
  const double base = Spearman(x, y).value();
  Vec ex, ly, ax;
  for (double v : x) ex.push_back(std::exp(v));
  for (double v : y) ly.push_back(std::log(v + 10.0));
  for (double v : x) ax.push_back(3.0 * v - 7.0);
  EXPECT_NEAR(Spearman(ex, y).value(), base, 1e-12);
  EXPECT_NEAR(Spearman(x, ly).value(), base, 1e-12);
  EXPECT_NEAR(Spearman(ax, ly).value(), base, 1e-12);
  EXPECT_NEAR(Spearman(y, x).value(), base, 1e-15);
}

TEST(Spearman, TiesUseAverageRanks) {
  EXPECT_EQ(FractionalRanks(Vec{10, 20, 20, 30}), (Vec{1, 2.5, 2.5, 4}));
  EXPECT_EQ(FractionalRanks(Vec{5, 5, 5}), (Vec{2, 2, 2}));
}

TEST(Pearson, AffineInvarianceAndSymmetry) {
  Rng rng(2);
  Vec x, y;
  for (int i = 0; i < 40; ++i) {
    x.push_back(rng.Normal());
    y.push_back(0.5 * x.back() + rng.Normal());
  }
  const double base = Pearson(x, y).value();
  Vec ax, ay;
  for (double v : x) ax.push_back(2.5 * v + 1.0);
  for (double v : y) ay.push_back(0.01 * v - 3.0);
  EXPECT_NEAR(Pearson(ax, ay).value(), base, 1e-12);
  EXPECT_NEAR(Pearson(y, x).value(), base, 1e-15);
  EXPECT_NEAR(Pearson(x, x).value(), 1.0, 1e-12);
}

TEST(Pearson, Fixtures) {
  Vec x = {1, 2, 3, 4};
  Vec y;
  for (double v : x) y.push_back(2 * v + 1);
  EXPECT_NEAR(Pearson(x, y).value(), 1.0, 1e-15);
  // Symmetric data with the last value's sign flipped.
  EXPECT_NEAR(Pearson(Vec{-2, -1, 0, 1, 2}, Vec{-2, -1, 0, 1, -2}).value(),
              0.24253562503633302, 1e-12);
}

TEST(Correlation, UndefinedAndInvalid) {
  EXPECT_FALSE(Pearson(Vec{1, 1, 1}, Vec{1, 2, 3}).has_value());
  EXPECT_FALSE(Spearman(Vec{1, 2, 3}, Vec{4, 4, 4}).has_value());
  EXPECT_EQ(CodeOf([] { Pearson(Vec{1, 2}, Vec{1, 2, 3}); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([] { Spearman(Vec{1}, Vec{1}); }), ErrorCode::kInvalidArgument);
}

ScoreReport Scores(const std::vector<std::pair<std::string, double>>& rows) {
  ScoreReport report;
  for (const auto& [path, score] : rows) report.rows.push_back({path, score, ScoreMode::kNmr, "p"});
  return report;
}

TEST(AggregatePerCondition, SixRowFixture) {
  const ScoreReport scores = Scores({{"a1.wav", 0.1}, {"a2.wav", 0.3}, {"b1.wav", 0.5},
                                     {"b2.wav", 0.7}, {"c1.wav", 1.0}, {"c2.wav", 1.4},
                                     {"stray.wav", 9.0}});
  const std::vector<MosRecord> mos = {{"a1.wav", "A", 4.0}, {"a2.wav", "A", 4.4},
                                      {"b1.wav", "B", 3.0}, {"b2.wav", "B", 3.5},
                                      {"c1.wav", "C", 1.0}, {"c2.wav", "C", 2.0},
                                      {"unscored.wav", "A", 1.0}};
  const EvalReport report = AggregatePerCondition(scores, mos);
  ASSERT_EQ(report.n_conditions, 3u);
  EXPECT_EQ(report.conditions[0].condition_id, "A");
  EXPECT_NEAR(report.conditions[0].mean_score, 0.2, 1e-15);
  EXPECT_NEAR(report.conditions[0].mean_mos, 4.2, 1e-15);
  EXPECT_NEAR(report.conditions[1].mean_score, 0.6, 1e-15);
  EXPECT_NEAR(report.conditions[1].mean_mos, 3.25, 1e-15);
  EXPECT_NEAR(report.conditions[2].mean_score, 1.2, 1e-15);
  EXPECT_NEAR(report.conditions[2].mean_mos, 1.5, 1e-15);
  EXPECT_EQ(report.conditions[2].clips, 2u);
  EXPECT_EQ(report.sc, -1.0);
  EXPECT_NEAR(report.pc, -0.9985171029445055, 1e-12);
  EXPECT_EQ(report.unmatched, 1u);

  std::vector<MosRecord> shuffled(mos.rbegin(), mos.rend());
  ScoreReport reversed = scores;
  std::reverse(reversed.rows.begin(), reversed.rows.end());
  const EvalReport again = AggregatePerCondition(reversed, shuffled);
  EXPECT_EQ(again.pc, report.pc);
  EXPECT_EQ(again.sc, report.sc);
}

TEST(AggregatePerCondition, TwoConditions) {
  const EvalReport report =
      AggregatePerCondition(Scores({{"a", 1}, {"b", 1}, {"c", 3}, {"d", 3}}),
                            std::vector<MosRecord>{{"a", "x", 4.5}, {"b", "x", 4.5},
                                                   {"c", "y", 2.0}, {"d", "y", 2.0}});
  EXPECT_EQ(report.sc, -1.0);
  EXPECT_EQ(report.n_conditions, 2u);
}

TEST(AggregatePerCondition, JoinFallsBackToFileName) {
  const EvalReport report = AggregatePerCondition(
      Scores({{"deg/a.wav", 1}, {"deg/b.wav", 2}}),
      std::vector<MosRecord>{{"other/a.wav", "x", 4}, {"other/b.wav", "y", 3}});
  EXPECT_EQ(report.n_conditions, 2u);
  EXPECT_EQ(report.unmatched, 0u);
}

TEST(AggregatePerCondition, Errors) {
  EXPECT_EQ(CodeOf([] {
              AggregatePerCondition(Scores({{"a", 1}}),
                                    std::vector<MosRecord>{{"z", "x", 1}});
            }),
            ErrorCode::kJoinEmpty);
  EXPECT_EQ(CodeOf([] {
              AggregatePerCondition(Scores({{"a", 1}, {"b", 1}}),
                                    std::vector<MosRecord>{{"a", "x", 1}, {"b", "y", 2}});
            }),
            ErrorCode::kDegenerateInput);
}

TEST(ReadMos, ParsesFile) {
  TempDir dir;
  std::ofstream(dir / "mos.csv") << "clip_path,condition_id,mos\na.wav,c1,4.5\n";
  const auto mos = ReadMos(dir / "mos.csv");
  ASSERT_EQ(mos.size(), 1u);
  EXPECT_EQ(mos[0].condition_id, "c1");
  EXPECT_EQ(mos[0].mos, 4.5);
}

DatasetManifest NoiseManifest(int sources) {
  DatasetManifest manifest;
  Rng rng(5);
  for (int s = 0; s < sources; ++s) {
    const std::string src = "s" + std::to_string(s);
    manifest.rows.push_back({src + ".wav", src, "clean", 0, 0.0, 1.0});
    double q = 0.2 + 0.1 * rng.Uniform();
    for (int level = 0; level < 5; ++level) {
      q += 0.05 + 0.1 * rng.Uniform();
      manifest.rows.push_back({src + "_noise_" + std::to_string(level) + ".wav", src, "noise",
                               level, LevelTable(Family::kNoise)[level], q});
    }
  }
  return manifest;
}

TEST(MonotonicityReport, NsimAsScore) {
  const DatasetManifest manifest = NoiseManifest(1);
  ScoreReport similarity, distance;
  for (const auto& row : manifest.rows) {
    similarity.rows.push_back({row.clip_path, row.nsim, ScoreMode::kNmr, "p"});
    distance.rows.push_back({row.clip_path, 1.0 - row.nsim, ScoreMode::kNmr, "p"});
  }
  // Scores are correlated with level_param (SNR) and reported unflipped.
  const auto up = MonotonicityReport(similarity, manifest);
  ASSERT_EQ(up.size(), 1u);
  EXPECT_EQ(up[0].family, "noise");
  EXPECT_EQ(up[0].sc.value(), 1.0);
  EXPECT_EQ(up[0].expected_sign, -1);
  EXPECT_FALSE(up[0].flagged);
  const auto down = MonotonicityReport(distance, manifest);
  EXPECT_EQ(down[0].sc.value(), -1.0);
  EXPECT_EQ(down[0].clips, 5u);
}

TEST(MonotonicityReport, RandomScoresAreFlagged) {
  const DatasetManifest manifest = NoiseManifest(40);
  Rng rng(6);
  ScoreReport scores;
  for (const auto& row : manifest.rows) {
    scores.rows.push_back({row.clip_path, rng.Uniform(), ScoreMode::kNmr, "p"});
  }
  const auto report = MonotonicityReport(scores, manifest);
  EXPECT_LT(std::abs(report[0].sc.value()), 0.3);
  EXPECT_TRUE(report[0].flagged);
}

}  // namespace
}  // namespace nomad
