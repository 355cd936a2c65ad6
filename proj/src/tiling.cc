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

#include "boxforge/tiling.h"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <sstream>

#include "boxforge/error.h"

namespace boxforge {
namespace {

struct AxisTiling {
  std::vector<int> origins;
  double stride = 0.0;
};

AxisTiling tile_axis(int image, int patch, int min_overlap) {
  AxisTiling t;
  if (patch >= image) {
    t.origins.push_back(static_cast<int>(std::floor((image - patch) / 2.0)));
    t.stride = patch;
    return t;
  }
  const int max_stride = patch - min_overlap;
  if (max_stride < 1) {
    throw UsageError("plan: min_overlap must be smaller than the patch size");
  }
  const int span = image - patch;
  const int n = 1 + (span + max_stride - 1) / max_stride;
  for (int i = 0; i < n; ++i) {
    // Rounded even spacing; the last origin is exactly image - patch.
    t.origins.push_back(static_cast<int>((static_cast<long>(i) * span * 2 + (n - 1)) /
                                         (2L * (n - 1))));
  }
  t.stride = static_cast<double>(span) / (n - 1);
  return t;
}

void check_position(const TilingPlan& p, std::span<const double> pos) {
  if (pos.size() != p.image_shape.size()) {
    throw UsageError("expected_views: position has wrong dimensionality");
  }
  for (std::size_t k = 0; k < pos.size(); ++k) {
    if (!(pos[k] >= 0.0 && pos[k] < p.image_shape[k])) {
      throw UsageError("expected_views: position outside the image");
    }
  }
}

template <typename T>
std::vector<T> get_vec(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw SchemaError(std::string("plan: missing '") + key + "'");
  return j.at(key).get<std::vector<T>>();
}

}  // namespace

std::vector<std::vector<int>> all_mirror_sets(int dim) {
  std::vector<std::vector<int>> sets;
  for (int mask = 0; mask < (1 << dim); ++mask) {
    std::vector<int> s;
    for (int k = 0; k < dim; ++k) {
      if (mask & (1 << k)) s.push_back(k);
    }
    sets.push_back(s);
  }
  return sets;
}

TilingPlan plan(const std::vector<int>& image_shape,
                const std::vector<int>& patch_shape, int min_overlap,
                std::vector<std::vector<int>> mirror_axes_sets, int n_models) {
  const std::size_t dim = image_shape.size();
  if (dim != 2 && dim != 3) throw UsageError("plan: image must have 2 or 3 axes");
  if (patch_shape.size() != dim) {
    throw UsageError("plan: patch and image dimensionality differ");
  }
  for (std::size_t k = 0; k < dim; ++k) {
    if (image_shape[k] <= 0 || patch_shape[k] <= 0) {
      throw UsageError("plan: shapes must be positive");
    }
  }
  if (min_overlap < 0) throw UsageError("plan: min_overlap must be >= 0");
  if (n_models < 1) throw UsageError("plan: n_models must be >= 1");
  if (mirror_axes_sets.empty()) mirror_axes_sets = all_mirror_sets(static_cast<int>(dim));
  for (const auto& s : mirror_axes_sets) {
    for (const int a : s) {
      if (a < 0 || a >= static_cast<int>(dim)) {
        throw UsageError("plan: mirror axis out of range");
      }
    }
  }

  TilingPlan p;
  p.image_shape = image_shape;
  p.patch_shape = patch_shape;
  p.mirror_axes_sets = std::move(mirror_axes_sets);
  p.n_models = n_models;
  std::vector<AxisTiling> axes;
  for (std::size_t k = 0; k < dim; ++k) {
    axes.push_back(tile_axis(image_shape[k], patch_shape[k], min_overlap));
    p.stride.push_back(axes.back().stride);
  }

  std::vector<std::size_t> idx(dim, 0);
  while (true) {
    Patch patch;
    for (std::size_t k = 0; k < dim; ++k) {
      patch.origin.push_back(axes[k].origins[idx[k]]);
      patch.center.push_back(patch.origin[k] + patch_shape[k] / 2.0);
    }
    p.patches.push_back(std::move(patch));
    std::size_t k = dim;
    while (k-- > 0) {
      if (++idx[k] < axes[k].origins.size()) break;
      idx[k] = 0;
    }
    if (k == static_cast<std::size_t>(-1)) break;
  }
  return p;
}

int expected_views(const TilingPlan& p, std::span<const double> position) {
  check_position(p, position);
  int containing = 0;
  for (const auto& patch : p.patches) {
    bool inside = true;
    for (std::size_t k = 0; k < position.size() && inside; ++k) {
      inside = position[k] >= patch.origin[k] &&
               position[k] < patch.origin[k] + p.patch_shape[k];
    }
    if (inside) ++containing;
  }
  return containing * p.views_per_patch();
}

int expected_views_clamped(const TilingPlan& p, std::span<const double> position) {
  std::vector<double> pos(position.begin(), position.end());
  for (std::size_t k = 0; k < pos.size() && k < p.image_shape.size(); ++k) {
    pos[k] = std::clamp(pos[k], 0.0,
                        std::nextafter(static_cast<double>(p.image_shape[k]), 0.0));
  }
  return expected_views(p, pos);
}

Box unmirror(const Box& b, const std::vector<int>& patch_shape,
             const std::vector<int>& mirror_axes) {
  if (static_cast<int>(patch_shape.size()) != b.dim()) {
    throw UsageError("unmirror: patch shape does not match box dim");
  }
  Box out = b;
  for (const int a : mirror_axes) {
    if (a < 0 || a >= b.dim()) throw UsageError("unmirror: axis out of range");
    out.set_axis(a, patch_shape[a] - b.hi(a), patch_shape[a] - b.lo(a));
  }
  return out;
}

std::vector<Detection> map_boxes(const std::vector<Detection>& dets,
                                 const View& view) {
  std::vector<double> offset(view.origin.begin(), view.origin.end());
  std::vector<double> center(offset.size());
  for (std::size_t k = 0; k < offset.size(); ++k) {
    center[k] = offset[k] + view.patch_shape.at(k) / 2.0;
  }
  std::vector<Detection> out;
  out.reserve(dets.size());
  for (const auto& d : dets) {
    Detection m = d;
    m.box = translate(unmirror(d.box, view.patch_shape, view.mirror_axes), offset);
    m.patch_center = center;
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<ViewRegion> view_regions(const TilingPlan& p) {
  const std::size_t dim = p.image_shape.size();
  std::vector<std::vector<int>> cuts(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    cuts[k] = {0, p.image_shape[k]};
    for (const auto& patch : p.patches) {
      cuts[k].push_back(std::clamp(patch.origin[k], 0, p.image_shape[k]));
      cuts[k].push_back(
          std::clamp(patch.origin[k] + p.patch_shape[k], 0, p.image_shape[k]));
    }
    std::sort(cuts[k].begin(), cuts[k].end());
    cuts[k].erase(std::unique(cuts[k].begin(), cuts[k].end()), cuts[k].end());
  }
  std::vector<ViewRegion> regions;
  std::vector<std::size_t> idx(dim, 0);
  while (true) {
    ViewRegion r;
    std::vector<double> probe(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      r.lo.push_back(cuts[k][idx[k]]);
      r.hi.push_back(cuts[k][idx[k] + 1]);
      probe[k] = r.lo[k];
    }
    r.views = expected_views(p, probe);
    regions.push_back(std::move(r));
    std::size_t k = dim;
    while (k-- > 0) {
      if (++idx[k] + 1 < cuts[k].size()) break;
      idx[k] = 0;
    }
    if (k == static_cast<std::size_t>(-1)) break;
  }
  return regions;
}

nlohmann::json plan_to_json(const TilingPlan& p) {
  nlohmann::json j;
  j["image_shape"] = p.image_shape;
  j["patch_shape"] = p.patch_shape;
  j["stride"] = p.stride;
  j["patches"] = nlohmann::json::array();
  for (const auto& patch : p.patches) {
    j["patches"].push_back({{"origin", patch.origin}, {"center", patch.center}});
  }
  j["mirror_axes_sets"] = p.mirror_axes_sets;
  j["n_models"] = p.n_models;
  return j;
}

TilingPlan plan_from_json(const nlohmann::json& j) {
  try {
    TilingPlan p;
    p.image_shape = get_vec<int>(j, "image_shape");
    p.patch_shape = get_vec<int>(j, "patch_shape");
    p.stride = get_vec<double>(j, "stride");
    p.mirror_axes_sets = j.at("mirror_axes_sets").get<std::vector<std::vector<int>>>();
    p.n_models = j.at("n_models").get<int>();
    for (const auto& jp : j.at("patches")) {
      p.patches.push_back({get_vec<int>(jp, "origin"), get_vec<double>(jp, "center")});
    }
    const std::size_t dim = p.image_shape.size();
    if ((dim != 2 && dim != 3) || p.patch_shape.size() != dim || p.patches.empty() ||
        p.mirror_axes_sets.empty() || p.n_models < 1) {
      throw SchemaError("plan: inconsistent shapes, patches or view settings");
    }
    for (const auto& patch : p.patches) {
      if (patch.origin.size() != dim || patch.center.size() != dim) {
        throw SchemaError("plan: patch entry has wrong dimensionality");
      }
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("plan: ") + e.what());
  }
}

std::string plan_text(const TilingPlan& p) {
  auto join = [](const auto& v) {
    std::ostringstream s;
    for (std::size_t i = 0; i < v.size(); ++i) s << (i ? "x" : "") << v[i];
    return s.str();
  };
  std::ostringstream out;
  out << "image " << join(p.image_shape) << "  patch " << join(p.patch_shape)
      << "  patches " << p.patches.size() << "  mirror settings "
      << p.mirror_axes_sets.size() << "  models " << p.n_models << "\n";
  out << "patch  origin        center\n";
  for (std::size_t i = 0; i < p.patches.size(); ++i) {
    std::ostringstream o;
    std::ostringstream c;
    for (std::size_t k = 0; k < p.patches[i].origin.size(); ++k) {
      o << (k ? "," : "") << p.patches[i].origin[k];
      c << (k ? "," : "") << p.patches[i].center[k];
    }
    char line[128];
    std::snprintf(line, sizeof line, "%-6zu %-13s %s\n", i, o.str().c_str(),
                  c.str().c_str());
    out << line;
  }
  out << "region lo -> hi                 views\n";
  for (const auto& r : view_regions(p)) {
    std::ostringstream span;
    for (std::size_t k = 0; k < r.lo.size(); ++k) {
      span << (k ? " " : "") << "[" << r.lo[k] << "," << r.hi[k] << ")";
    }
    char line[160];
    std::snprintf(line, sizeof line, "%-30s %5d\n", span.str().c_str(), r.views);
    out << line;
  }
  return out.str();
}

}  // namespace boxforge
