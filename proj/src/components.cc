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

#include "boxforge/components.h"

#include <algorithm>
#include <array>
#include <limits>
#include <queue>

#include "boxforge/error.h"

namespace boxforge {
namespace {

std::size_t volume_of(const std::vector<int>& shape) {
  if (shape.size() != 2 && shape.size() != 3) {
    throw UsageError("segmentation shape must have 2 or 3 axes");
  }
  std::size_t n = 1;
  for (const int s : shape) {
    if (s <= 0) throw UsageError("segmentation shape must be positive");
    n *= static_cast<std::size_t>(s);
  }
  return n;
}

}  // namespace

std::size_t ProbabilityMap::pixel_count() const { return volume_of(shape); }

void ProbabilityMap::validate() const {
  if (num_classes < 2 || num_classes > 255) {
    throw UsageError("ProbabilityMap: num_classes must lie in [2,255]");
  }
  if (probs.size() != pixel_count() * static_cast<std::size_t>(num_classes)) {
    throw UsageError("ProbabilityMap: probs size does not match shape");
  }
}

std::vector<std::uint8_t> argmax_labels(const ProbabilityMap& seg) {
  seg.validate();
  const std::size_t n = seg.pixel_count();
  const auto k = static_cast<std::size_t>(seg.num_classes);
  std::vector<std::uint8_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = &seg.probs[i * k];
    labels[i] = static_cast<std::uint8_t>(std::max_element(row, row + k) - row);
  }
  return labels;
}

std::vector<Component> label_components(const std::vector<std::uint8_t>& labels,
                                        const std::vector<int>& shape,
                                        const ProbabilityMap* probs) {
  const std::size_t n = volume_of(shape);
  if (labels.size() != n) throw UsageError("label map size does not match shape");
  const int dim = static_cast<int>(shape.size());
  std::array<std::size_t, kMaxDim> strides{};
  strides[dim - 1] = 1;
  for (int a = dim - 2; a >= 0; --a) strides[a] = strides[a + 1] * shape[a + 1];

  std::vector<bool> visited(n, false);
  std::vector<Component> out;
  std::queue<std::size_t> frontier;
  for (std::size_t start = 0; start < n; ++start) {
    if (visited[start] || labels[start] == 0) continue;
    const std::uint8_t cls = labels[start];
    Component c;
    c.class_id = cls;
    std::array<int, kMaxDim> lo;
    std::array<int, kMaxDim> hi;
    lo.fill(std::numeric_limits<int>::max());
    hi.fill(std::numeric_limits<int>::min());

    visited[start] = true;
    frontier.push(start);
    while (!frontier.empty()) {
      const std::size_t p = frontier.front();
      frontier.pop();
      ++c.pixel_count;
      if (probs) {
        c.max_prob = std::max(
            c.max_prob, probs->probs[p * probs->num_classes + cls]);
      }
      std::array<int, kMaxDim> coord{};
      std::size_t rest = p;
      for (int a = 0; a < dim; ++a) {
        coord[a] = static_cast<int>(rest / strides[a]);
        rest %= strides[a];
        lo[a] = std::min(lo[a], coord[a]);
        hi[a] = std::max(hi[a], coord[a] + 1);
      }
      for (int a = 0; a < dim; ++a) {
        for (const int step : {-1, 1}) {
          const int next = coord[a] + step;
          if (next < 0 || next >= shape[a]) continue;
          const std::size_t q = step < 0 ? p - strides[a] : p + strides[a];
          if (visited[q] || labels[q] != cls) continue;
          visited[q] = true;
          frontier.push(q);
        }
      }
    }
    std::array<double, kMaxDim> flo{};
    std::array<double, kMaxDim> fhi{};
    for (int a = 0; a < dim; ++a) {
      flo[a] = lo[a];
      fhi[a] = hi[a];
    }
    c.bbox = Box(std::span<const double>(flo.data(), dim),
                 std::span<const double>(fhi.data(), dim));
    out.push_back(c);
  }
  return out;
}

std::vector<Detection> components_to_detections(const ProbabilityMap& seg,
                                                int max_components,
                                                const std::string& image_id,
                                                const std::string& patient_id) {
  if (max_components < 1) {
    throw UsageError("components_to_detections: max_components must be >= 1");
  }
  auto comps = label_components(argmax_labels(seg), seg.shape, &seg);
  // Stable: equal-size components keep raster discovery order.
  std::stable_sort(comps.begin(), comps.end(),
                   [](const Component& a, const Component& b) {
                     return a.pixel_count > b.pixel_count;
                   });
  if (comps.size() > static_cast<std::size_t>(max_components)) {
    comps.resize(max_components);
  }
  std::vector<Detection> out;
  out.reserve(comps.size());
  for (const auto& c : comps) {
    Detection d;
    d.box = c.bbox;
    d.class_id = c.class_id;
    d.score = c.max_prob;
    d.image_id = image_id;
    d.patient_id = patient_id;
    d.view_id = "segmentation";
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace boxforge
