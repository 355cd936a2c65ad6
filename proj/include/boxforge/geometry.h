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

#ifndef BOXFORGE_GEOMETRY_H_
#define BOXFORGE_GEOMETRY_H_

#include <array>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>

namespace boxforge {

inline constexpr int kMaxDim = 3;

// Axis-aligned box in 2D or 3D using half-open pixel coordinates [lo, hi).
// Axis 0 is the image row, axis 1 the column and axis 2 (3D only) the slice.
// Coordinates are real valued because consolidated boxes are weighted
// averages of integer-aligned predictions.
class Box {
 public:
  Box() = default;

  // Throws UsageError if dim is not 2 or 3, the spans differ in length, or
  // lo[k] > hi[k] for some axis.
  Box(std::span<const double> lo, std::span<const double> hi);

  static Box Make2D(double lo0, double lo1, double hi0, double hi1);
  static Box Make3D(double lo0, double lo1, double lo2, double hi0, double hi1,
                    double hi2);
  // Interleaved [lo..., hi...] layout used by the interchange files.
  static Box FromFlat(std::span<const double> flat);

  int dim() const { return dim_; }
  double lo(int axis) const { return lo_[axis]; }
  double hi(int axis) const { return hi_[axis]; }
  double extent(int axis) const { return hi_[axis] - lo_[axis]; }
  double center(int axis) const { return 0.5 * (lo_[axis] + hi_[axis]); }
  std::span<const double> lo() const { return {lo_.data(), size()}; }
  std::span<const double> hi() const { return {hi_.data(), size()}; }

  // Flat [lo..., hi...] copy.
  std::array<double, 2 * kMaxDim> flat() const;

  // Sets one axis. Throws UsageError if lo > hi.
  void set_axis(int axis, double lo, double hi);

  bool operator==(const Box& other) const;

  std::string to_string() const;

 private:
  std::size_t size() const { return static_cast<std::size_t>(dim_); }

  int dim_ = 2;
  std::array<double, kMaxDim> lo_{};
  std::array<double, kMaxDim> hi_{};
};

// Area in 2D, volume in 3D. Degenerate boxes have measure 0.
double measure(const Box& b);

// Measure of a ∩ b (0 when disjoint). Throws UsageError on dim mismatch.
double intersection_measure(const Box& a, const Box& b);

// Intersection over union; 0 when the union has measure 0.
double iou(const Box& a, const Box& b);

// Componentwise clamp of lo and hi into bounds.
Box clip(const Box& b, const Box& bounds);

// Box shifted by offset along each axis (offset.size() must equal dim).
Box translate(const Box& b, std::span<const double> offset);

}  // namespace boxforge

#endif  // BOXFORGE_GEOMETRY_H_
