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

#include "boxforge/geometry.h"

#include <algorithm>
#include <sstream>

#include "boxforge/error.h"

namespace boxforge {

Box::Box(std::span<const double> lo, std::span<const double> hi) {
  if (lo.size() != hi.size()) {
    throw UsageError("Box: lo and hi have different lengths");
  }
  if (lo.size() != 2 && lo.size() != 3) {
    throw UsageError("Box: dimension must be 2 or 3, got " +
                     std::to_string(lo.size()));
  }
  dim_ = static_cast<int>(lo.size());
  for (int k = 0; k < dim_; ++k) set_axis(k, lo[k], hi[k]);
}

Box Box::Make2D(double lo0, double lo1, double hi0, double hi1) {
  const double lo[] = {lo0, lo1};
  const double hi[] = {hi0, hi1};
  return Box(lo, hi);
}

Box Box::Make3D(double lo0, double lo1, double lo2, double hi0, double hi1,
                double hi2) {
  const double lo[] = {lo0, lo1, lo2};
  const double hi[] = {hi0, hi1, hi2};
  return Box(lo, hi);
}

Box Box::FromFlat(std::span<const double> flat) {
  if (flat.size() != 4 && flat.size() != 6) {
    throw UsageError("Box: flat coordinate list must have 4 or 6 entries");
  }
  const std::size_t d = flat.size() / 2;
  return Box(flat.first(d), flat.subspan(d));
}

std::array<double, 2 * kMaxDim> Box::flat() const {
  std::array<double, 2 * kMaxDim> out{};
  for (int k = 0; k < dim_; ++k) {
    out[k] = lo_[k];
    out[k + dim_] = hi_[k];
  }
  return out;
}

void Box::set_axis(int axis, double lo, double hi) {
  if (axis < 0 || axis >= dim_) throw UsageError("Box: axis out of range");
  if (!(lo <= hi)) {
    std::ostringstream msg;
    msg << "Box: lo > hi on axis " << axis << " (" << lo << " > " << hi
        << ")";
    throw UsageError(msg.str());
  }
  lo_[axis] = lo;
  hi_[axis] = hi;
}

bool Box::operator==(const Box& other) const {
  if (dim_ != other.dim_) return false;
  for (int k = 0; k < dim_; ++k) {
    if (lo_[k] != other.lo_[k] || hi_[k] != other.hi_[k]) return false;
  }
  return true;
}

std::string Box::to_string() const {
  std::ostringstream out;
  out << "[";
  for (int k = 0; k < dim_; ++k) out << (k ? "," : "") << lo_[k];
  out << "]-[";
  for (int k = 0; k < dim_; ++k) out << (k ? "," : "") << hi_[k];
  out << "]";
  return out.str();
}

double measure(const Box& b) {
  double m = 1.0;
  for (int k = 0; k < b.dim(); ++k) m *= b.extent(k);
  return m;
}

double intersection_measure(const Box& a, const Box& b) {
  if (a.dim() != b.dim()) {
    throw UsageError("intersection: dimension mismatch");
  }
  double m = 1.0;
  for (int k = 0; k < a.dim(); ++k) {
    const double side = std::min(a.hi(k), b.hi(k)) - std::max(a.lo(k), b.lo(k));
    if (side <= 0.0) return 0.0;
    m *= side;
  }
  return m;
}

double iou(const Box& a, const Box& b) {
  const double inter = intersection_measure(a, b);
  const double uni = measure(a) + measure(b) - inter;
  if (uni <= 0.0) return 0.0;
  return inter / uni;
}

Box clip(const Box& b, const Box& bounds) {
  if (b.dim() != bounds.dim()) throw UsageError("clip: dimension mismatch");
  Box out = b;
  for (int k = 0; k < b.dim(); ++k) {
    const double lo = std::clamp(b.lo(k), bounds.lo(k), bounds.hi(k));
    const double hi = std::clamp(b.hi(k), bounds.lo(k), bounds.hi(k));
    out.set_axis(k, lo, hi);
  }
  return out;
}

Box translate(const Box& b, std::span<const double> offset) {
  if (static_cast<int>(offset.size()) != b.dim()) {
    throw UsageError("translate: offset length does not match box dim");
  }
  Box out = b;
  for (int k = 0; k < b.dim(); ++k) {
    out.set_axis(k, b.lo(k) + offset[k], b.hi(k) + offset[k]);
  }
  return out;
}

}  // namespace boxforge
