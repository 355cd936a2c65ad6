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

#ifndef BOXFORGE_LOSSES_H_
#define BOXFORGE_LOSSES_H_

#include <cstdint>
#include <vector>

namespace boxforge {

// Softmax outputs u and one-hot targets v over every pixel of a batch
// (the images concatenated into one pseudo-volume), row-major I x K.
struct LossBatch {
  int num_pixels = 0;
  int num_classes = 0;
  std::vector<double> u;
  std::vector<double> v;

  double u_at(int i, int k) const { return u[static_cast<std::size_t>(i) * num_classes + k]; }
  double v_at(int i, int k) const { return v[static_cast<std::size_t>(i) * num_classes + k]; }

  // Throws UsageError unless every u row is a distribution (sum 1 +- 1e-6)
  // and every v row is one-hot.
  void validate() const;

  // Builds v from integer labels in [0, K).
  static LossBatch FromLabels(std::vector<double> u, int num_classes,
                              const std::vector<int>& labels);
};

struct LossOptions {
  // Added to each Dice denominator; 0 keeps the plain soft Dice.
  double dice_epsilon = 0.0;
  // Pixels per reduction block. Partial sums are combined in block order,
  // so results do not depend on the thread count.
  int block_size = 4096;
};

struct LossParts {
  double cross_entropy = 0.0;  // mean over pixels
  double dice = 0.0;           // (2/K) sum_k overlap_k / (|u_k| + |v_k|)
  double total() const { return cross_entropy - dice; }
};

// Pixel-mean cross-entropy minus the soft Dice term over the whole batch.
LossParts dice_ce_parts(const LossBatch& batch, const LossOptions& opts = {});
double dice_ce_loss(const LossBatch& batch, const LossOptions& opts = {});

// Analytic dL/du, I x K row-major.
std::vector<double> dice_ce_grad(const LossBatch& batch,
                                 const LossOptions& opts = {});

// Chains dL/du through the softmax: dL/dz_ik = u_ik (g_ik - sum_j u_ij g_ij).
std::vector<double> softmax_backward(const std::vector<double>& u,
                                     const std::vector<double>& grad_u,
                                     int num_classes);

// Stochastic hard-negative mining: the top ceil(pool_factor * n_select)
// negatives by score form the pool, n_select of them are drawn uniformly
// without replacement. Returned indices are sorted ascending. When n_select
// reaches the candidate count all indices are returned.
std::vector<std::size_t> mine_hard_negatives(const std::vector<double>& neg_scores,
                                             std::size_t n_select,
                                             double pool_factor,
                                             std::uint64_t rng_seed);

inline constexpr double kDefaultPoolFactor = 2.0;

namespace serial {

LossParts dice_ce_parts(const LossBatch& batch, const LossOptions& opts = {});
std::vector<double> dice_ce_grad(const LossBatch& batch,
                                 const LossOptions& opts = {});

}  // namespace serial
}  // namespace boxforge

#endif  // BOXFORGE_LOSSES_H_
