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

#ifndef BOXFORGE_CONSOLIDATE_H_
#define BOXFORGE_CONSOLIDATE_H_

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "boxforge/detection.h"

namespace boxforge {

inline constexpr double kDefaultIouThreshold = 0.1;

// A group of same-class detections absorbed by one greedy seed.
struct Cluster {
  std::vector<Detection> members;
  // Position of each member in the input list handed to greedy_cluster.
  std::vector<std::size_t> source_indices;
  // Index into members of the highest-ranked member.
  std::size_t seed_index = 0;

  const Detection& seed() const { return members[seed_index]; }
};

// Number of views expected to predict at a position (image coordinates).
using ExpectedViewsFn = std::function<int(std::span<const double> position)>;

struct WbcConfig {
  double iou_threshold = kDefaultIouThreshold;
  // Std-dev in pixels of the patch-center Gaussian. Infinity disables the
  // patch-center factor.
  double sigma_patch = std::numeric_limits<double>::infinity();
  int expected_views = 1;
  // When set, overrides expected_views with a lookup at the seed-box center.
  ExpectedViewsFn expected_views_at;
};

// Per-class greedy clustering: the highest-ranked unassigned detection seeds
// a cluster and absorbs every unassigned same-class detection with
// iou(seed, d) > iou_threshold. Clusters are returned in seed order.
std::vector<Cluster> greedy_cluster(const std::vector<Detection>& dets,
                                    double iou_threshold);

// Weighting factor w = f * a * p of one cluster member.
struct MemberWeight {
  double overlap = 1.0;       // iou with the seed
  double area = 1.0;          // measure relative to the seed measure
  double patch_center = 1.0;  // Gaussian falloff from the patch center
  double value() const { return overlap * area * patch_center; }
};

std::vector<MemberWeight> member_weights(const Cluster& cluster,
                                         const WbcConfig& cfg);

// Views expected at the cluster's seed center minus distinct contributing
// view_ids, floored at 0.
int missing_views(const Cluster& cluster, const WbcConfig& cfg);

// Consolidated confidence:
//   o_s = sum(s_i w_i) / (sum(w_i) + n_missing * mean(w)).
double wbc_score(const Cluster& cluster, const WbcConfig& cfg);

// Per-coordinate average with weights s_i * w_i. Falls back to the seed box
// when every weight is zero.
Box wbc_coords(const Cluster& cluster, const WbcConfig& cfg);

struct WbcOutput {
  Detection detection;
  Cluster cluster;
  int distinct_views = 0;
  int missing_views = 0;
};

// Weighted box clustering with cluster provenance, sorted by descending
// consolidated score.
std::vector<WbcOutput> wbc_detailed(const std::vector<Detection>& dets,
                                    const WbcConfig& cfg);

// One detection per cluster, sorted by descending consolidated score.
std::vector<Detection> wbc(const std::vector<Detection>& dets,
                           const WbcConfig& cfg);

// Classical per-class greedy non-maximum suppression. Survivors are returned
// in greedy order with their original box and score.
std::vector<Detection> nms(const std::vector<Detection>& dets,
                           double iou_threshold);

struct SliceMergeResult {
  std::vector<Detection> cubes;
  // For each cube, the input indices of the 2D boxes it consumed.
  std::vector<std::vector<std::size_t>> groups;
};

// Consolidates 2D slice detections of one volume into 3D cubes. Each seed
// consumes the same-class boxes overlapping it in the projected plane whose
// slices connect to the seed slice through a chain of slices at most
// slice_gap apart. The cube keeps the seed's in-plane extent and spans
// [min slice, max slice + 1) along axis 2.
SliceMergeResult merge_slices_grouped(const std::vector<Detection>& dets_2d,
                                      double iou_threshold, int slice_gap = 1);

std::vector<Detection> merge_slices_to_cubes(
    const std::vector<Detection>& dets_2d, double iou_threshold,
    int slice_gap = 1);

}  // namespace boxforge

#endif  // BOXFORGE_CONSOLIDATE_H_
