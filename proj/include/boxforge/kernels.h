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

#ifndef BOXFORGE_KERNELS_H_
#define BOXFORGE_KERNELS_H_

// Data-parallel building blocks. Each OpenMP kernel has a serial twin in
// namespace boxforge::serial that the tests and the benchmark compare
// against; both must produce identical results.

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "boxforge/detection.h"
#include "boxforge/geometry.h"

namespace boxforge {

// Caps the OpenMP team size for subsequent kernels; n <= 0 restores the
// runtime default.
void set_num_threads(int n);
int max_threads();

// Row-major |a| x |b| matrix of pairwise IoU values.
std::vector<double> iou_matrix(std::span<const Box> a, std::span<const Box> b);

// Detections grouped by image_id, groups sorted by image_id, input order
// preserved within each group.
std::vector<std::pair<std::string, std::vector<Detection>>> group_by_image(
    const std::vector<Detection>& dets);

using ImageJob =
    std::function<std::vector<Detection>(const std::vector<Detection>&)>;

// Runs job once per image (in parallel) and concatenates the results in
// image_id order, so the output does not depend on scheduling.
std::vector<Detection> for_each_image(const std::vector<Detection>& dets,
                                      const ImageJob& job);

namespace serial {

std::vector<double> iou_matrix(std::span<const Box> a, std::span<const Box> b);

std::vector<Detection> for_each_image(const std::vector<Detection>& dets,
                                      const ImageJob& job);

}  // namespace serial
}  // namespace boxforge

#endif  // BOXFORGE_KERNELS_H_
