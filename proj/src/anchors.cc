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

#include "boxforge/anchors.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "boxforge/error.h"
#include "boxforge/kernels.h"

namespace boxforge {
namespace {

long ceil_div(long a, long b) { return (a + b - 1) / b; }

void check_shape(const std::vector<int>& image_shape) {
  if (image_shape.size() != 2 && image_shape.size() != 3) {
    throw UsageError("image shape must have 2 or 3 axes");
  }
  for (const int s : image_shape) {
    if (s <= 0) throw UsageError("image shape must be positive (empty image)");
  }
}

void check_level(const PyramidLevel& level) {
  if (level.level < 0 || level.level > 16) {
    throw UsageError("pyramid level index out of range");
  }
  if (!(level.side > 0.0) || !(level.z_scale > 0.0)) {
    throw UsageError("anchor side and z_scale must be positive");
  }
  if (level.z_scale != std::floor(level.z_scale)) {
    throw UsageError("z_scale must be integral (it doubles as the z-stride)");
  }
}

}  // namespace

std::vector<long> anchor_grid(const PyramidLevel& level,
                              const std::vector<int>& image_shape) {
  check_shape(image_shape);
  check_level(level);
  std::vector<long> grid;
  grid.push_back(ceil_div(image_shape[0], level.stride()));
  grid.push_back(ceil_div(image_shape[1], level.stride()));
  if (image_shape.size() == 3) {
    grid.push_back(ceil_div(image_shape[2], static_cast<long>(level.z_scale)));
  }
  return grid;
}

long anchor_count(const PyramidSpec& spec, const PyramidLevel& level,
                  const std::vector<int>& image_shape) {
  long n = static_cast<long>(spec.aspect_ratios.size());
  for (const long g : anchor_grid(level, image_shape)) n *= g;
  return n;
}

std::vector<Anchor> generate_anchors(const PyramidSpec& spec,
                                     const std::vector<int>& image_shape) {
  check_shape(image_shape);
  if (spec.aspect_ratios.empty()) throw UsageError("no aspect ratios given");
  for (const double r : spec.aspect_ratios) {
    if (!(r > 0.0)) throw UsageError("aspect ratios must be positive");
  }
  const int dim = static_cast<int>(image_shape.size());
  std::vector<double> zero(dim, 0.0);
  std::vector<double> extent(image_shape.begin(), image_shape.end());
  const Box bounds(zero, extent);

  std::vector<Anchor> out;
  for (const auto& level : spec.levels) {
    const auto grid = anchor_grid(level, image_shape);
    const double stride = level.stride();
    const long depth_cells = dim == 3 ? grid[2] : 1;
    out.reserve(out.size() + anchor_count(spec, level, image_shape));
    for (long r = 0; r < grid[0]; ++r) {
      for (long c = 0; c < grid[1]; ++c) {
        for (long z = 0; z < depth_cells; ++z) {
          for (const double ratio : spec.aspect_ratios) {
            const double h = level.side / std::sqrt(ratio);
            const double w = level.side * std::sqrt(ratio);
            const double cy = (r + 0.5) * stride;
            const double cx = (c + 0.5) * stride;
            Box b;
            if (dim == 2) {
              b = Box::Make2D(cy - h / 2, cx - w / 2, cy + h / 2, cx + w / 2);
            } else {
              const double cz = (z + 0.5) * level.z_scale;
              const double d = level.z_scale;
              b = Box::Make3D(cy - h / 2, cx - w / 2, cz - d / 2, cy + h / 2,
                              cx + w / 2, cz + d / 2);
            }
            if (spec.clip) b = clip(b, bounds);
            out.push_back({b, level.level});
          }
        }
      }
    }
  }
  return out;
}

std::vector<AnchorAssignment> match_anchors(
    const std::vector<Box>& anchors, const std::vector<GroundTruthObject>& gts,
    double pos_iou, double neg_iou) {
  if (!(pos_iou >= neg_iou)) {
    throw UsageError("match_anchors: pos_iou must be >= neg_iou");
  }
  std::vector<Box> gt_boxes;
  gt_boxes.reserve(gts.size());
  for (const auto& g : gts) gt_boxes.push_back(g.box);
  const auto table = iou_matrix(anchors, gt_boxes);
  const std::size_t ng = gts.size();

  std::vector<AnchorAssignment> out(anchors.size());
  for (std::size_t a = 0; a < anchors.size(); ++a) {
    auto& asg = out[a];
    asg.anchor_index = a;
    std::optional<std::size_t> best;
    for (std::size_t g = 0; g < ng; ++g) {
      if (!best || table[a * ng + g] > table[a * ng + *best]) best = g;
    }
    asg.max_iou = best ? table[a * ng + *best] : 0.0;
    if (best && asg.max_iou > pos_iou) {
      asg.label = AnchorLabel::kPositive;
      asg.matched_gt = best;
    } else if (asg.max_iou < neg_iou) {
      asg.label = AnchorLabel::kNegative;
    } else {
      asg.label = AnchorLabel::kIgnore;
    }
  }

  // Every gt keeps at least one positive: its best anchor, skipping anchors
  // already forced by an earlier gt.
  std::vector<bool> forced(anchors.size(), false);
  for (std::size_t g = 0; g < ng; ++g) {
    std::optional<std::size_t> best;
    for (std::size_t a = 0; a < anchors.size(); ++a) {
      if (forced[a]) continue;
      if (!best || table[a * ng + g] > table[*best * ng + g]) best = a;
    }
    if (!best) break;
    forced[*best] = true;
    out[*best].label = AnchorLabel::kPositive;
    out[*best].matched_gt = g;
  }

  for (auto& asg : out) {
    if (asg.label != AnchorLabel::kPositive) continue;
    const auto& gt = gts[*asg.matched_gt];
    asg.class_id = gt.class_id;
    asg.regression_target = encode_deltas(anchors[asg.anchor_index], gt.box);
  }
  return out;
}

std::vector<double> encode_deltas(const Box& anchor, const Box& gt) {
  if (anchor.dim() != gt.dim()) {
    throw UsageError("encode_deltas: dimension mismatch");
  }
  const int dim = anchor.dim();
  std::vector<double> d(2 * dim);
  for (int k = 0; k < dim; ++k) {
    if (!(anchor.extent(k) > 0.0)) {
      throw UsageError("encode_deltas: zero-extent anchor");
    }
    if (!(gt.extent(k) > 0.0)) {
      throw UsageError("encode_deltas: zero-extent target box");
    }
    d[k] = (gt.center(k) - anchor.center(k)) / anchor.extent(k);
    d[k + dim] = std::log(gt.extent(k) / anchor.extent(k));
  }
  return d;
}

Box decode_deltas(const Box& anchor, const std::vector<double>& deltas) {
  const int dim = anchor.dim();
  if (static_cast<int>(deltas.size()) != 2 * dim) {
    throw UsageError("decode_deltas: expected 2*dim deltas");
  }
  Box out = anchor;
  for (int k = 0; k < dim; ++k) {
    if (!(anchor.extent(k) > 0.0)) {
      throw UsageError("decode_deltas: zero-extent anchor");
    }
    const double c = anchor.center(k) + deltas[k] * anchor.extent(k);
    const double size = anchor.extent(k) * std::exp(deltas[k + dim]);
    out.set_axis(k, c - size / 2, c + size / 2);
  }
  return out;
}

PyramidReport pyramid_report(const PyramidSpec& spec,
                             const std::vector<int>& image_shape) {
  check_shape(image_shape);
  int top = 0;
  for (const auto& l : spec.levels) top = std::max(top, l.level);

  PyramidReport report;
  for (int j = 0; j <= top; ++j) {
    PyramidRow row;
    row.level = j;
    row.stride = 1 << j;
    const auto it = std::find_if(spec.levels.begin(), spec.levels.end(),
                                 [j](const PyramidLevel& l) { return l.level == j; });
    if (it != spec.levels.end()) {
      row.detection = true;
      row.anchor_side = it->side;
      row.z_scale = image_shape.size() == 3 ? it->z_scale : 0.0;
      row.grid = anchor_grid(*it, image_shape);
      row.anchors = anchor_count(spec, *it, image_shape);
      report.total_anchors += row.anchors;
    } else {
      row.grid = {ceil_div(image_shape[0], row.stride),
                  ceil_div(image_shape[1], row.stride)};
      if (image_shape.size() == 3) row.grid.push_back(image_shape[2]);
    }
    report.rows.push_back(row);
  }
  return report;
}

namespace {

std::string grid_string(const std::vector<long>& grid) {
  std::ostringstream out;
  for (std::size_t i = 0; i < grid.size(); ++i) out << (i ? "x" : "") << grid[i];
  return out.str();
}

}  // namespace

std::string pyramid_report_csv(const PyramidReport& report) {
  std::ostringstream out;
  out << "level,stride,grid,role,anchor_side,z_scale,anchors\n";
  for (const auto& r : report.rows) {
    out << "P" << r.level << "," << r.stride << "," << grid_string(r.grid)
        << "," << (r.detection ? "detection" : "segmentation") << ","
        << r.anchor_side << "," << r.z_scale << "," << r.anchors << "\n";
  }
  out << "total,,,,,," << report.total_anchors << "\n";
  return out.str();
}

std::string pyramid_report_text(const PyramidReport& report) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-6s %6s %-14s %-13s %6s %7s %9s\n",
                "level", "stride", "grid", "role", "side", "z_scale",
                "anchors");
  out << line;
  for (const auto& r : report.rows) {
    std::snprintf(line, sizeof line, "P%-5d %6d %-14s %-13s %6g %7g %9ld\n",
                  r.level, r.stride, grid_string(r.grid).c_str(),
                  r.detection ? "detection" : "segmentation", r.anchor_side,
                  r.z_scale, r.anchors);
    out << line;
  }
  std::snprintf(line, sizeof line, "%-6s %54ld\n", "total", report.total_anchors);
  out << line;
  return out.str();
}

}  // namespace boxforge
