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

#ifndef BOXFORGE_ANCHORS_H_
#define BOXFORGE_ANCHORS_H_

#include <optional>
#include <string>
#include <vector>

#include "boxforge/detection.h"
#include "boxforge/geometry.h"

namespace boxforge {

struct PyramidLevel {
  int level = 2;          // P_j
  double side = 4.0;      // in-plane anchor side, pixels
  double z_scale = 1.0;   // anchor depth and z-stride in 3D

  int stride() const { return 1 << level; }
};

// Anchor configuration of the detection heads. The default places square
// anchors of side {4, 8, 16, 32} on P2-P5 with depths {1, 2, 4, 8}.
struct PyramidSpec {
  std::vector<PyramidLevel> levels = {
      {2, 4.0, 1.0}, {3, 8.0, 2.0}, {4, 16.0, 4.0}, {5, 32.0, 8.0}};
  // width:height, i.e. extent(axis 1) / extent(axis 0).
  std::vector<double> aspect_ratios = {1.0};
  // Clamp anchors to the image at generation time.
  bool clip = false;
};

struct Anchor {
  Box box;
  int level = 0;
};

// Grid cells per axis at one level: ceil(extent / stride) in-plane and
// ceil(depth / z_scale) along z.
std::vector<long> anchor_grid(const PyramidLevel& level,
                              const std::vector<int>& image_shape);

// Closed-form anchor count of one level.
long anchor_count(const PyramidSpec& spec, const PyramidLevel& level,
                  const std::vector<int>& image_shape);

// One anchor per (cell, aspect ratio), centered on the cell center, levels in
// level order, cells row-major, ratios innermost. image_shape has 2 or 3
// entries. Throws UsageError for empty images.
std::vector<Anchor> generate_anchors(const PyramidSpec& spec,
                                     const std::vector<int>& image_shape);

enum class AnchorLabel { kNegative, kIgnore, kPositive };

struct AnchorAssignment {
  std::size_t anchor_index = 0;
  AnchorLabel label = AnchorLabel::kNegative;
  int class_id = 0;  // set for positives
  std::optional<std::size_t> matched_gt;
  std::vector<double> regression_target;  // set for positives
  double max_iou = 0.0;
};

inline constexpr double kPositiveIou3D = 0.3;
inline constexpr double kPositiveIou2D = 0.5;
inline constexpr double kNegativeIou = 0.1;

// Positive if the best gt IoU exceeds pos_iou or the anchor is the forced
// best anchor of some gt, negative below neg_iou, ignored otherwise.
std::vector<AnchorAssignment> match_anchors(
    const std::vector<Box>& anchors, const std::vector<GroundTruthObject>& gts,
    double pos_iou, double neg_iou);

// Center / log-size parameterization: (c_g - c_a) / size_a per axis, then
// log(size_g / size_a) per axis. Throws UsageError for zero-extent boxes.
std::vector<double> encode_deltas(const Box& anchor, const Box& gt);
Box decode_deltas(const Box& anchor, const std::vector<double>& deltas);

struct PyramidRow {
  int level = 0;
  int stride = 1;
  std::vector<long> grid;
  bool detection = false;  // false: segmentation-only level
  double anchor_side = 0.0;
  double z_scale = 0.0;
  long anchors = 0;
};

struct PyramidReport {
  std::vector<PyramidRow> rows;  // P0 first
  long total_anchors = 0;
};

// Resolutions of P0..P_max (P0 is the input resolution) with per-level
// anchor counts for the detection levels.
PyramidReport pyramid_report(const PyramidSpec& spec,
                             const std::vector<int>& image_shape);

std::string pyramid_report_csv(const PyramidReport& report);
std::string pyramid_report_text(const PyramidReport& report);

}  // namespace boxforge

#endif  // BOXFORGE_ANCHORS_H_
