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

#ifndef BOXFORGE_TILING_H_
#define BOXFORGE_TILING_H_

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "boxforge/detection.h"

namespace boxforge {

inline constexpr int kDefaultMinOverlap = 32;

struct Patch {
  std::vector<int> origin;     // may be negative for a degenerate plan
  std::vector<double> center;  // image coordinates
};

// One inference view: a patch crop seen under a set of mirrored axes.
struct View {
  std::vector<int> origin;
  std::vector<int> patch_shape;
  std::vector<int> mirror_axes;
};

struct TilingPlan {
  std::vector<int> image_shape;
  std::vector<int> patch_shape;
  std::vector<double> stride;  // effective spacing between origins
  std::vector<Patch> patches;  // row-major over the per-axis origins
  std::vector<std::vector<int>> mirror_axes_sets;
  int n_models = 1;

  int views_per_patch() const {
    return static_cast<int>(mirror_axes_sets.size()) * n_models;
  }
  int total_views() const {
    return static_cast<int>(patches.size()) * views_per_patch();
  }
};

// Every subset of {0, ..., dim-1}, the empty set first.
std::vector<std::vector<int>> all_mirror_sets(int dim);

// Evenly spaced patches per axis with the last patch flush to the image
// border and neighbors overlapping by at least min_overlap. An axis whose
// patch is at least as large as the image gets one centered patch.
TilingPlan plan(const std::vector<int>& image_shape,
                const std::vector<int>& patch_shape, int min_overlap,
                std::vector<std::vector<int>> mirror_axes_sets = {},
                int n_models = 1);

// Patches containing position, times mirror settings, times models.
// Throws UsageError when position lies outside the image.
int expected_views(const TilingPlan& plan, std::span<const double> position);

// Same as expected_views after clamping position into the image.
int expected_views_clamped(const TilingPlan& plan, std::span<const double> position);

// Reflects b inside a patch of the given shape along each listed axis.
Box unmirror(const Box& b, const std::vector<int>& patch_shape,
             const std::vector<int>& mirror_axes);

// Patch-frame detections to image coordinates: unmirror inside the patch,
// then translate by the origin. Sets patch_center to the patch center.
std::vector<Detection> map_boxes(const std::vector<Detection>& dets,
                                 const View& view);

// Axis-aligned cells of the patch arrangement and their view counts.
struct ViewRegion {
  std::vector<int> lo;
  std::vector<int> hi;
  int views = 0;
};
std::vector<ViewRegion> view_regions(const TilingPlan& plan);

nlohmann::json plan_to_json(const TilingPlan& plan);
// Throws SchemaError on malformed input.
TilingPlan plan_from_json(const nlohmann::json& j);

std::string plan_text(const TilingPlan& plan);

}  // namespace boxforge

#endif  // BOXFORGE_TILING_H_
