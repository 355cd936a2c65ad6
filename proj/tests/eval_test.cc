/* Copyright 2026 The Boxforge Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "boxforge/eval.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>
#include "boxforge/error.h"
#include "instances.h"
#include "oracles.h"

namespace boxforge {
namespace {

Detection Det(const Box& b, double score, const std::string& image = "a", int cls = 1,
              const std::string& patient = "p") {
  Detection d;
  d.box = b;
  d.score = score;
  d.image_id = image;
  d.class_id = cls;
  d.patient_id = patient;
  return d;
}

GroundTruthObject Gt(const Box& b, const std::string& image = "a", int cls = 1) {
  GroundTruthObject g;
  g.box = b;
  g.image_id = image;
  g.class_id = cls;
  return g;
}

const Box kA = Box::Make2D(0, 0, 10, 10);
const Box kFar = Box::Make2D(50, 50, 60, 60);

TEST(MatchTest, SingleClaim) {
  const auto m = match_predictions({Det(kA, 0.4), Det(kA, 0.9)}, {Gt(kA)}, 0.1);
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[0].detection, 1u);
  EXPECT_EQ(m[0].gt, 0u);
  EXPECT_FALSE(m[1].gt.has_value());
}

TEST(MatchTest, ThresholdIsInclusiveAndClassAware) {
  // iou exactly 1/3.
  const Box b = Box::Make2D(0, 0, 1, 1);
  const Box c = Box::Make2D(0.5, 0, 1.5, 1);
  EXPECT_TRUE(match_predictions({Det(c, 0.5)}, {Gt(b)}, 1.0 / 3.0)[0].gt.has_value());
  EXPECT_FALSE(match_predictions({Det(b, 0.5, "a", 2)}, {Gt(b)}, 0.1)[0].gt.has_value());
  EXPECT_FALSE(match_predictions({Det(b, 0.5, "x")}, {Gt(b)}, 0.1)[0].gt.has_value());
}

TEST(ApTest, Examples) {
  // All gts found first.
  auto r = mean_ap({Det(kA, 0.9), Det(kFar, 0.8)}, {Gt(kA), Gt(kFar)});
  EXPECT_DOUBLE_EQ(r.map_value, 1.0);
  // FP ranked above the only TP.
  r = mean_ap({Det(kFar, 0.9), Det(kA, 0.8)}, {Gt(kA)});
  EXPECT_DOUBLE_EQ(r.per_class_ap.at(1), 0.5);
  // No predictions at all.
  r = mean_ap({}, {Gt(kA)});
  EXPECT_DOUBLE_EQ(r.per_class_ap.at(1), 0.0);
  // Predictions for a class without gt count as AP 0.
  r = mean_ap({Det(kA, 0.9), Det(kA, 0.9, "a", 2)}, {Gt(kA)});
  EXPECT_DOUBLE_EQ(r.per_class_ap.at(2), 0.0);
  EXPECT_DOUBLE_EQ(r.map_value, 0.5);
  EXPECT_THROW(mean_ap({}, {}), UsageError);
}

TEST(ApTest, UndefinedWithoutEitherSide) {
  EXPECT_FALSE(average_precision({}, 0).has_value());
  EXPECT_EQ(average_precision({MatchRecord{}}, 0), 0.0);
}

TEST(ApTest, PrCurvePoints) {
  const auto r = mean_ap({Det(kFar, 0.9), Det(kA, 0.8)}, {Gt(kA)});
  const auto& c = r.pr_curves.at(1);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_DOUBLE_EQ(c[0].precision, 0.0);
  EXPECT_DOUBLE_EQ(c[1].precision, 0.5);
  EXPECT_DOUBLE_EQ(c[1].recall, 1.0);
  EXPECT_DOUBLE_EQ(c[1].score, 0.8);
}

TEST(ApTest, MatchesDirectComputation) {
  std::mt19937_64 rng(61);
  for (int t = 0; t < 60; ++t) {
    const auto inst = testing::random_eval_instance(rng);
    for (const double thr : {0.1, 0.5}) {
      const auto want = oracle::direct_class_aps(inst.dets, inst.gts, thr);
      const auto got = mean_ap(inst.dets, inst.gts, thr);
      ASSERT_EQ(got.per_class_ap.size(), want.size());
      double sum = 0;
      for (const auto& [c, ap] : want) {
        EXPECT_NEAR(got.per_class_ap.at(c), ap, 1e-12);
        sum += ap;
      }
      EXPECT_NEAR(got.map_value, sum / want.size(), 1e-12);
    }
  }
}

TEST(ApPropertyTest, RankInvarianceAndBounds) {
  std::mt19937_64 rng(67);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  for (int t = 0; t < 30; ++t) {
    auto inst = testing::random_eval_instance(rng);
    const auto base = mean_ap(inst.dets, inst.gts);
    EXPECT_GE(base.map_value, 0.0);
    EXPECT_LE(base.map_value, 1.0);
    const double c = u(rng);
    const double p = u(rng);
    for (auto& d : inst.dets) d.score = c * std::pow(d.score, p);
    const auto moved = mean_ap(inst.dets, inst.gts);
    for (const auto& [cls, ap] : base.per_class_ap) EXPECT_EQ(moved.per_class_ap.at(cls), ap);
  }
}

TEST(ApPropertyTest, LowestRankedFalsePositiveNeverHelps) {
  std::mt19937_64 rng(71);
  for (int t = 0; t < 50; ++t) {
    auto inst = testing::random_eval_instance(rng);
    const auto base = mean_ap(inst.dets, inst.gts);
    inst.dets.push_back(Det(Box::Make2D(900, 900, 901, 901), 0.0, "im0", 1));
    const auto more = mean_ap(inst.dets, inst.gts);
    EXPECT_LE(more.per_class_ap.at(1), base.per_class_ap.at(1) + 1e-15);
  }
}

TEST(ApPropertyTest, StricterThresholdNeverAddsTruePositives) {
  std::mt19937_64 rng(73);
  for (int t = 0; t < 50; ++t) {
    const auto inst = testing::random_eval_instance(rng);
    std::size_t prev = SIZE_MAX;
    for (const double thr : {0.05, 0.1, 0.3, 0.5, 0.7, 0.9}) {
      std::size_t tp = 0;
      for (const auto& m : match_predictions(inst.dets, inst.gts, thr)) tp += m.gt.has_value();
      EXPECT_LE(tp, prev);
      prev = tp;
    }
  }
}

TEST(PatientApTest, SixPatients) {
  PatientLabels labels;
  const char* ids[] = {"P1", "P2", "P3", "P4", "P5", "P6"};
  const int positive[] = {1, 0, 1, 0, 1, 0};
  for (int i = 0; i < 6; ++i) labels[{ids[i], 1}] = positive[i];
  const std::vector<Detection> dets = {
      Det(kA, 0.9, "i1", 1, "P1"), Det(kA, 0.3, "i1", 1, "P1"), Det(kA, 0.8, "i2", 1, "P2"),
      Det(kA, 0.7, "i3", 1, "P3"), Det(kA, 0.6, "i4", 1, "P4"), Det(kA, 0.5, "i6", 1, "P6")};
  // Ranking P1+ P2- P3+ P4- P6- P5+(0): precisions at the hits 1, 2/3, 1/2.
  const auto ap = patient_level_ap(dets, labels);
  EXPECT_NEAR(ap.at(1), (1.0 + 2.0 / 3.0 + 0.5) / 3.0, 1e-15);
}

TEST(PatientApTest, SeparatedScoresAndUnknownPatient) {
  PatientLabels labels = {{{"a", 1}, 1}, {{"b", 1}, 0}, {{"a", 2}, 0}, {{"b", 2}, 0}};
  const auto ap = patient_level_ap({Det(kA, 0.9, "x", 1, "a"), Det(kA, 0.2, "y", 1, "b")}, labels);
  EXPECT_DOUBLE_EQ(ap.at(1), 1.0);
  EXPECT_FALSE(ap.count(2));
  EXPECT_THROW(patient_level_ap({Det(kA, 0.9, "x", 1, "zz")}, labels), UsageError);
}

TEST(PatientApTest, RightForTheWrongReasons) {
  // The positive patient gets a confident box in the wrong place.
  PatientLabels labels = {{{"sick", 1}, 1}, {{"healthy", 1}, 0}};
  const std::vector<Detection> dets = {Det(kFar, 0.95, "s", 1, "sick")};
  const std::vector<GroundTruthObject> gts = {Gt(kA, "s", 1)};
  EXPECT_DOUBLE_EQ(patient_level_ap(dets, labels).at(1), 1.0);
  EXPECT_DOUBLE_EQ(mean_ap(dets, gts).map_value, 0.0);
}

}  // namespace
}  // namespace boxforge
