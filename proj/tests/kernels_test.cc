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

#include "boxforge/kernels.h"

#include <random>
#include <vector>

#include <gtest/gtest.h>
#include "boxforge/consolidate.h"
#include "boxforge/error.h"
#include "boxforge/losses.h"
#include "instances.h"

namespace boxforge {
namespace {

class ThreadCountTest : public ::testing::TestWithParam<int> {
 protected:
  void SetUp() override { set_num_threads(GetParam()); }
  void TearDown() override { set_num_threads(0); }
};

TEST_P(ThreadCountTest, IouMatrixMatchesSerial) {
  testing::Rng rng(89);
  std::vector<Box> a, b;
  for (const auto& d : testing::random_nms_instance(rng, 300)) a.push_back(d.box);
  for (const auto& d : testing::random_nms_instance(rng, 300)) b.push_back(d.box);
  EXPECT_EQ(iou_matrix(a, b), serial::iou_matrix(a, b));
}

TEST_P(ThreadCountTest, IouMatrixRethrowsDimensionErrors) {
  const std::vector<Box> a = {Box::Make2D(0, 0, 1, 1)};
  const std::vector<Box> b = {Box::Make3D(0, 0, 0, 1, 1, 1)};
  EXPECT_THROW(iou_matrix(a, b), UsageError);
}

TEST_P(ThreadCountTest, PerImageWbcMatchesSerial) {
  testing::Rng rng(97);
  std::vector<Detection> dets;
  for (int img = 0; img < 40; ++img) {
    auto inst = testing::random_wbc_instance(rng, 30);
    for (auto& d : inst.dets) {
      d.image_id = "img" + std::to_string(img);
      d.patch_center.reset();
      dets.push_back(d);
    }
  }
  WbcConfig cfg;
  cfg.expected_views = 3;
  const auto job = [&cfg](const std::vector<Detection>& d) { return wbc(d, cfg); };
  const auto par = for_each_image(dets, job);
  const auto ser = serial::for_each_image(dets, job);
  ASSERT_EQ(par.size(), ser.size());
  for (std::size_t i = 0; i < par.size(); ++i) {
    EXPECT_EQ(par[i].image_id, ser[i].image_id);
    EXPECT_EQ(par[i].box, ser[i].box);
    EXPECT_EQ(par[i].score, ser[i].score);
  }
  // Outputs come grouped in image_id order.
  for (std::size_t i = 1; i < par.size(); ++i) EXPECT_LE(par[i - 1].image_id, par[i].image_id);
}

TEST_P(ThreadCountTest, PerImageJobErrorsPropagate) {
  Detection d;
  d.image_id = "x";
  EXPECT_THROW(for_each_image({d}, [](const std::vector<Detection>&) -> std::vector<Detection> {
                 throw UsageError("boom");
               }),
               UsageError);
}

TEST_P(ThreadCountTest, LossMatchesSerialAndIsReproducible) {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  const int pixels = 50000, classes = 3;
  std::vector<double> probs(pixels * classes);
  std::vector<int> labels(pixels);
  for (int i = 0; i < pixels; ++i) {
    double s = 0;
    for (int k = 0; k < classes; ++k) s += probs[i * classes + k] = u(rng);
    for (int k = 0; k < classes; ++k) probs[i * classes + k] /= s;
    labels[i] = i % classes;
  }
  const auto batch = LossBatch::FromLabels(probs, classes, labels);
  const auto par = dice_ce_parts(batch);
  const auto ser = serial::dice_ce_parts(batch);
  EXPECT_NEAR(par.total(), ser.total(), 1e-12);
  set_num_threads(1);
  EXPECT_EQ(dice_ce_parts(batch).total(), par.total());
  const auto g1 = dice_ce_grad(batch);
  set_num_threads(GetParam());
  EXPECT_EQ(dice_ce_grad(batch), g1);
  const auto gs = serial::dice_ce_grad(batch);
  for (std::size_t e = 0; e < gs.size(); e += 97) EXPECT_NEAR(g1[e], gs[e], 1e-15);
}

INSTANTIATE_TEST_SUITE_P(Threads, ThreadCountTest, ::testing::Values(1, 2, 4));

}  // namespace
}  // namespace boxforge
