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

#ifndef BOXFORGE_DETECTION_H_
#define BOXFORGE_DETECTION_H_

#include <optional>
#include <string>
#include <vector>

#include "boxforge/geometry.h"

namespace boxforge {

// One scored box produced by some view of an image.
struct Detection {
  Box box;
  int class_id = 1;  // 0 is background
  double score = 0.0;
  std::string image_id;
  std::string patient_id;
  std::string view_id;
  // Center of the patch that produced the box, image coordinates.
  std::optional<std::vector<double>> patch_center;
  // Slice index for 2D detections taken from a volume.
  std::optional<int> slice_id;
};

struct GroundTruthObject {
  Box box;
  int class_id = 1;
  std::string object_id;
  std::string image_id;
  std::string patient_id;
};

// Greedy selection order shared by clustering, NMS and slice merging:
// higher score first, then larger measure, then lower input index.
// Returns the permutation of indices into dets.
std::vector<std::size_t> greedy_order(const std::vector<Detection>& dets);

}  // namespace boxforge

#endif  // BOXFORGE_DETECTION_H_
