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

#include "boxforge/consolidate.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "boxforge/error.h"
#include "boxforge/log.h"

namespace boxforge {
namespace {

void check_threshold(double t, const char* who) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw UsageError(std::string(who) + ": iou threshold must lie in [0,1]");
  }
}

void check_same_dim(const std::vector<Detection>& dets, const char* who) {
  for (const auto& d : dets) {
    if (d.box.dim() != dets.front().box.dim()) {
      throw UsageError(std::string(who) + ": mixed box dimensionality");
    }
  }
}

std::vector<double> box_center(const Box& b) {
  std::vector<double> c(b.dim());
  for (int k = 0; k < b.dim(); ++k) c[k] = b.center(k);
  return c;
}

}  // namespace

std::vector<Cluster> greedy_cluster(const std::vector<Detection>& dets,
                                    double iou_threshold) {
  check_threshold(iou_threshold, "greedy_cluster");
  std::vector<Cluster> clusters;
  if (dets.empty()) return clusters;
  check_same_dim(dets, "greedy_cluster");

  const auto order = greedy_order(dets);
  std::vector<bool> assigned(dets.size(), false);
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const std::size_t seed = order[pos];
    if (assigned[seed]) continue;
    Cluster c;
    for (std::size_t q = pos; q < order.size(); ++q) {
      const std::size_t j = order[q];
      if (assigned[j] || dets[j].class_id != dets[seed].class_id) continue;
      if (j != seed && !(iou(dets[seed].box, dets[j].box) > iou_threshold)) {
        continue;
      }
      assigned[j] = true;
      c.members.push_back(dets[j]);
      c.source_indices.push_back(j);
    }
    c.seed_index = 0;
    clusters.push_back(std::move(c));
  }
  return clusters;
}

std::vector<MemberWeight> member_weights(const Cluster& cluster,
                                         const WbcConfig& cfg) {
  if (!(cfg.sigma_patch > 0.0)) {
    throw UsageError("wbc: sigma_patch must be positive");
  }
  const Box& seed_box = cluster.seed().box;
  const double seed_measure = measure(seed_box);
  const double two_var = 2.0 * cfg.sigma_patch * cfg.sigma_patch;

  std::vector<MemberWeight> weights;
  weights.reserve(cluster.members.size());
  for (const auto& m : cluster.members) {
    MemberWeight w;
    w.overlap = iou(m.box, seed_box);
    // A degenerate seed has no scale to normalize by.
    w.area = seed_measure > 0.0 ? measure(m.box) / seed_measure : 1.0;
    if (m.patch_center) {
      const auto& pc = *m.patch_center;
      if (static_cast<int>(pc.size()) != m.box.dim()) {
        throw UsageError("wbc: patch_center length does not match box dim");
      }
      double d2 = 0.0;
      for (int k = 0; k < m.box.dim(); ++k) {
        const double diff = m.box.center(k) - pc[k];
        d2 += diff * diff;
      }
      w.patch_center = std::exp(-d2 / two_var);
    }
    weights.push_back(w);
  }
  // The seed always overlaps itself fully, even when degenerate.
  weights[cluster.seed_index].overlap = 1.0;
  return weights;
}

int missing_views(const Cluster& cluster, const WbcConfig& cfg) {
  int expected = cfg.expected_views;
  if (cfg.expected_views_at) {
    expected = cfg.expected_views_at(box_center(cluster.seed().box));
  }
  if (expected < 1) throw UsageError("wbc: expected_views must be >= 1");
  std::set<std::string> views;
  for (const auto& m : cluster.members) views.insert(m.view_id);
  return std::max(0, expected - static_cast<int>(views.size()));
}

double wbc_score(const Cluster& cluster, const WbcConfig& cfg) {
  if (cluster.members.empty()) throw UsageError("wbc_score: empty cluster");
  const auto weights = member_weights(cluster, cfg);
  const int n_missing = missing_views(cluster, cfg);

  double sum_w = 0.0;
  for (const auto& w : weights) sum_w += w.value();
  const bool degenerate = !(sum_w > 0.0);
  if (degenerate) {
    log::warn("wbc_score: all member weights are zero, using equal weights");
    sum_w = static_cast<double>(weights.size());
  }
  double sum_sw = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double w = degenerate ? 1.0 : weights[i].value();
    sum_sw += cluster.members[i].score * w;
  }
  const double mean_w = sum_w / static_cast<double>(weights.size());
  return sum_sw / (sum_w + n_missing * mean_w);
}

Box wbc_coords(const Cluster& cluster, const WbcConfig& cfg) {
  if (cluster.members.empty()) throw UsageError("wbc_coords: empty cluster");
  const auto weights = member_weights(cluster, cfg);
  const int dim = cluster.seed().box.dim();

  double total = 0.0;
  std::array<double, 2 * kMaxDim> acc{};
  std::array<double, 2 * kMaxDim> lo_bound;
  std::array<double, 2 * kMaxDim> hi_bound;
  lo_bound.fill(std::numeric_limits<double>::infinity());
  hi_bound.fill(-std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double sw = cluster.members[i].score * weights[i].value();
    const auto flat = cluster.members[i].box.flat();
    for (int c = 0; c < 2 * dim; ++c) {
      acc[c] += flat[c] * sw;
      lo_bound[c] = std::min(lo_bound[c], flat[c]);
      hi_bound[c] = std::max(hi_bound[c], flat[c]);
    }
    total += sw;
  }
  // Routine for clusters whose scores were all clipped to zero.
  if (!(total > 0.0)) {
    log::debug("wbc_coords: all score weights are zero, keeping seed box");
    return cluster.seed().box;
  }
  std::array<double, 2 * kMaxDim> out{};
  for (int c = 0; c < 2 * dim; ++c) {
    // Rounding must not push the average outside the member range.
    out[c] = std::clamp(acc[c] / total, lo_bound[c], hi_bound[c]);
  }
  return Box::FromFlat(std::span<const double>(out.data(), 2 * dim));
}

std::vector<WbcOutput> wbc_detailed(const std::vector<Detection>& dets,
                                    const WbcConfig& cfg) {
  std::vector<WbcOutput> out;
  for (auto& cluster : greedy_cluster(dets, cfg.iou_threshold)) {
    WbcOutput o;
    const Detection& seed = cluster.seed();
    o.detection.box = wbc_coords(cluster, cfg);
    o.detection.score = wbc_score(cluster, cfg);
    o.detection.class_id = seed.class_id;
    o.detection.image_id = seed.image_id;
    o.detection.patient_id = seed.patient_id;
    o.detection.slice_id = seed.slice_id;
    std::set<std::string> views;
    for (const auto& m : cluster.members) views.insert(m.view_id);
    o.distinct_views = static_cast<int>(views.size());
    o.missing_views = missing_views(cluster, cfg);
    o.cluster = std::move(cluster);
    out.push_back(std::move(o));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const WbcOutput& a, const WbcOutput& b) {
                     return a.detection.score > b.detection.score;
                   });
  return out;
}

std::vector<Detection> wbc(const std::vector<Detection>& dets,
                           const WbcConfig& cfg) {
  std::vector<Detection> out;
  for (auto& o : wbc_detailed(dets, cfg)) out.push_back(std::move(o.detection));
  return out;
}

std::vector<Detection> nms(const std::vector<Detection>& dets,
                           double iou_threshold) {
  check_threshold(iou_threshold, "nms");
  std::vector<Detection> kept;
  if (dets.empty()) return kept;
  check_same_dim(dets, "nms");

  const auto order = greedy_order(dets);
  std::vector<bool> suppressed(dets.size(), false);
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const std::size_t i = order[pos];
    if (suppressed[i]) continue;
    kept.push_back(dets[i]);
    for (std::size_t q = pos + 1; q < order.size(); ++q) {
      const std::size_t j = order[q];
      if (suppressed[j] || dets[j].class_id != dets[i].class_id) continue;
      if (iou(dets[i].box, dets[j].box) > iou_threshold) suppressed[j] = true;
    }
  }
  return kept;
}

SliceMergeResult merge_slices_grouped(const std::vector<Detection>& dets_2d,
                                      double iou_threshold, int slice_gap) {
  check_threshold(iou_threshold, "merge_slices_to_cubes");
  if (slice_gap < 0) {
    throw UsageError("merge_slices_to_cubes: slice_gap must be >= 0");
  }
  for (std::size_t i = 0; i < dets_2d.size(); ++i) {
    if (!dets_2d[i].slice_id) {
      throw UsageError("merge_slices_to_cubes: detection " +
                       std::to_string(i) + " has no slice_id");
    }
    if (dets_2d[i].box.dim() != 2) {
      throw UsageError("merge_slices_to_cubes: detection " +
                       std::to_string(i) + " is not a 2D box");
    }
  }

  SliceMergeResult result;
  const auto order = greedy_order(dets_2d);
  std::vector<bool> consumed(dets_2d.size(), false);
  for (const std::size_t seed : order) {
    if (consumed[seed]) continue;
    const Detection& s = dets_2d[seed];

    std::vector<std::size_t> candidates;
    std::vector<int> slices;
    for (const std::size_t j : order) {
      if (consumed[j] || dets_2d[j].class_id != s.class_id) continue;
      if (j != seed && !(iou(s.box, dets_2d[j].box) > iou_threshold)) continue;
      candidates.push_back(j);
      slices.push_back(*dets_2d[j].slice_id);
    }
    std::sort(slices.begin(), slices.end());
    slices.erase(std::unique(slices.begin(), slices.end()), slices.end());

    // Slices are 1D, so the reachable set is the run of sorted candidate
    // slices around the seed with no step wider than slice_gap.
    const auto at = std::lower_bound(slices.begin(), slices.end(), *s.slice_id);
    auto first = at;
    auto last = at;
    while (first != slices.begin() && *first - *(first - 1) <= slice_gap) --first;
    while (last + 1 != slices.end() && *(last + 1) - *last <= slice_gap) ++last;
    const int z_min = *first;
    const int z_max = *last;

    std::vector<std::size_t> group;
    for (const std::size_t j : candidates) {
      const int z = *dets_2d[j].slice_id;
      if (z < z_min || z > z_max) continue;
      consumed[j] = true;
      group.push_back(j);
    }
    std::sort(group.begin(), group.end());

    Detection cube;
    cube.box = Box::Make3D(s.box.lo(0), s.box.lo(1), z_min, s.box.hi(0),
                           s.box.hi(1), z_max + 1);
    cube.class_id = s.class_id;
    cube.score = s.score;
    cube.image_id = s.image_id;
    cube.patient_id = s.patient_id;
    cube.view_id = s.view_id;
    result.cubes.push_back(std::move(cube));
    result.groups.push_back(std::move(group));
  }
  return result;
}

std::vector<Detection> merge_slices_to_cubes(
    const std::vector<Detection>& dets_2d, double iou_threshold,
    int slice_gap) {
  return merge_slices_grouped(dets_2d, iou_threshold, slice_gap).cubes;
}

}  // namespace boxforge
