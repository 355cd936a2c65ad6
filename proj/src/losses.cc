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

#include "boxforge/losses.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "boxforge/error.h"

namespace boxforge {
namespace {

// Per-class sums needed by the loss and its gradient.
struct ClassSums {
  std::vector<double> overlap;  // sum_i u v
  std::vector<double> u_sum;
  std::vector<double> v_sum;
  double ce = 0.0;  // sum_i sum_k -v log u

  explicit ClassSums(int k) : overlap(k), u_sum(k), v_sum(k) {}

  void add(const ClassSums& o) {
    for (std::size_t k = 0; k < overlap.size(); ++k) {
      overlap[k] += o.overlap[k];
      u_sum[k] += o.u_sum[k];
      v_sum[k] += o.v_sum[k];
    }
    ce += o.ce;
  }
};

void accumulate(const LossBatch& b, int first, int last, ClassSums& s) {
  for (int i = first; i < last; ++i) {
    for (int k = 0; k < b.num_classes; ++k) {
      const double u = b.u_at(i, k);
      const double v = b.v_at(i, k);
      s.overlap[k] += u * v;
      s.u_sum[k] += u;
      s.v_sum[k] += v;
      if (v != 0.0) s.ce -= v * std::log(u);
    }
  }
}

ClassSums blocked_sums(const LossBatch& b, int block) {
  if (block < 1) throw UsageError("loss: block_size must be >= 1");
  const int n_blocks = (b.num_pixels + block - 1) / block;
  std::vector<ClassSums> partial(n_blocks, ClassSums(b.num_classes));
#pragma omp parallel for schedule(static)
  for (int blk = 0; blk < n_blocks; ++blk) {
    accumulate(b, blk * block, std::min(b.num_pixels, (blk + 1) * block),
               partial[blk]);
  }
  ClassSums total(b.num_classes);
  for (const auto& p : partial) total.add(p);
  return total;
}

LossParts finish(const LossBatch& b, const ClassSums& s, double eps) {
  LossParts parts;
  parts.cross_entropy = s.ce / b.num_pixels;
  double dice = 0.0;
  for (int k = 0; k < b.num_classes; ++k) {
    const double denom = s.u_sum[k] + s.v_sum[k] + eps;
    if (denom > 0.0) dice += s.overlap[k] / denom;
  }
  parts.dice = 2.0 / b.num_classes * dice;
  return parts;
}

void grad_rows(const LossBatch& b, const ClassSums& s, double eps, int first,
               int last, std::vector<double>& g) {
  const double inv_n = 1.0 / b.num_pixels;
  const double dice_scale = 2.0 / b.num_classes;
  for (int i = first; i < last; ++i) {
    for (int k = 0; k < b.num_classes; ++k) {
      const double u = b.u_at(i, k);
      const double v = b.v_at(i, k);
      double val = v != 0.0 ? -v * inv_n / u : 0.0;
      const double denom = s.u_sum[k] + s.v_sum[k] + eps;
      if (denom > 0.0) {
        val -= dice_scale * (v * denom - s.overlap[k]) / (denom * denom);
      }
      g[static_cast<std::size_t>(i) * b.num_classes + k] = val;
    }
  }
}

}  // namespace

void LossBatch::validate() const {
  if (num_pixels < 1 || num_classes < 2) {
    throw UsageError("LossBatch: need >= 1 pixel and >= 2 classes");
  }
  const std::size_t n = static_cast<std::size_t>(num_pixels) * num_classes;
  if (u.size() != n || v.size() != n) {
    throw UsageError("LossBatch: u and v must hold num_pixels * num_classes values");
  }
  for (int i = 0; i < num_pixels; ++i) {
    double row = 0.0;
    int ones = 0;
    for (int k = 0; k < num_classes; ++k) {
      const double uk = u_at(i, k);
      const double vk = v_at(i, k);
      if (!(uk >= 0.0)) {
        throw UsageError("LossBatch: u has a negative entry at pixel " + std::to_string(i));
      }
      row += uk;
      if (vk == 1.0) {
        ++ones;
      } else if (vk != 0.0) {
        throw UsageError("LossBatch: v is not one-hot at pixel " + std::to_string(i));
      }
    }
    if (std::abs(row - 1.0) > 1e-6) {
      throw UsageError("LossBatch: u row does not sum to 1 at pixel " + std::to_string(i));
    }
    if (ones != 1) {
      throw UsageError("LossBatch: v is not one-hot at pixel " + std::to_string(i));
    }
  }
}

LossBatch LossBatch::FromLabels(std::vector<double> u, int num_classes,
                                const std::vector<int>& labels) {
  LossBatch b;
  b.num_pixels = static_cast<int>(labels.size());
  b.num_classes = num_classes;
  b.u = std::move(u);
  b.v.assign(labels.size() * num_classes, 0.0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= num_classes) {
      throw UsageError("LossBatch: label out of range");
    }
    b.v[i * num_classes + labels[i]] = 1.0;
  }
  return b;
}

LossParts dice_ce_parts(const LossBatch& batch, const LossOptions& opts) {
  batch.validate();
  return finish(batch, blocked_sums(batch, opts.block_size), opts.dice_epsilon);
}

double dice_ce_loss(const LossBatch& batch, const LossOptions& opts) {
  return dice_ce_parts(batch, opts).total();
}

std::vector<double> dice_ce_grad(const LossBatch& batch, const LossOptions& opts) {
  batch.validate();
  const ClassSums sums = blocked_sums(batch, opts.block_size);
  std::vector<double> g(batch.u.size());
  const int block = opts.block_size;
  const int n_blocks = (batch.num_pixels + block - 1) / block;
#pragma omp parallel for schedule(static)
  for (int blk = 0; blk < n_blocks; ++blk) {
    grad_rows(batch, sums, opts.dice_epsilon, blk * block,
              std::min(batch.num_pixels, (blk + 1) * block), g);
  }
  return g;
}

std::vector<double> softmax_backward(const std::vector<double>& u,
                                     const std::vector<double>& grad_u,
                                     int num_classes) {
  if (num_classes < 1 || u.size() != grad_u.size() || u.size() % num_classes) {
    throw UsageError("softmax_backward: shape mismatch");
  }
  std::vector<double> out(u.size());
  for (std::size_t row = 0; row < u.size(); row += num_classes) {
    double dot = 0.0;
    for (int k = 0; k < num_classes; ++k) dot += u[row + k] * grad_u[row + k];
    for (int k = 0; k < num_classes; ++k) {
      out[row + k] = u[row + k] * (grad_u[row + k] - dot);
    }
  }
  return out;
}

std::vector<std::size_t> mine_hard_negatives(const std::vector<double>& neg_scores,
                                             std::size_t n_select,
                                             double pool_factor,
                                             std::uint64_t rng_seed) {
  if (!(pool_factor >= 1.0)) {
    throw UsageError("mine_hard_negatives: pool_factor must be >= 1");
  }
  std::vector<std::size_t> order(neg_scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Too few candidates to sample from: every negative is used.
  if (n_select >= neg_scores.size()) return order;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return neg_scores[a] > neg_scores[b];
  });
  const auto pool = std::min(
      neg_scores.size(),
      static_cast<std::size_t>(std::ceil(pool_factor * static_cast<double>(n_select))));
  order.resize(pool);
  if (pool > n_select) {
    // Partial Fisher-Yates: the first n_select slots become the sample.
    std::mt19937_64 rng(rng_seed);
    for (std::size_t i = 0; i < n_select; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, pool - 1);
      std::swap(order[i], order[pick(rng)]);
    }
    order.resize(n_select);
  }
  std::sort(order.begin(), order.end());
  return order;
}

namespace serial {

LossParts dice_ce_parts(const LossBatch& batch, const LossOptions& opts) {
  batch.validate();
  ClassSums sums(batch.num_classes);
  accumulate(batch, 0, batch.num_pixels, sums);
  return finish(batch, sums, opts.dice_epsilon);
}

std::vector<double> dice_ce_grad(const LossBatch& batch, const LossOptions& opts) {
  batch.validate();
  ClassSums sums(batch.num_classes);
  accumulate(batch, 0, batch.num_pixels, sums);
  std::vector<double> g(batch.u.size());
  grad_rows(batch, sums, opts.dice_epsilon, 0, batch.num_pixels, g);
  return g;
}

}  // namespace serial
}  // namespace boxforge
