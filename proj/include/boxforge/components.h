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

#ifndef BOXFORGE_COMPONENTS_H_
#define BOXFORGE_COMPONENTS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "boxforge/detection.h"

namespace boxforge {

// Dense per-pixel class distribution. Pixels are stored row-major over the
// axes of shape (axis 0 slowest), each holding num_classes probabilities;
// class 0 is background.
struct ProbabilityMap {
  std::vector<int> shape;
  int num_classes = 2;
  std::vector<double> probs;

  std::size_t pixel_count() const;
  // Throws UsageError on inconsistent sizes.
  void validate() const;
};

struct Component {
  int class_id = 0;
  std::size_t pixel_count = 0;
  Box bbox;
  double max_prob = 0.0;  // highest probability of class_id inside
};

// Argmax label per pixel; ties resolve to the lower class index.
std::vector<std::uint8_t> argmax_labels(const ProbabilityMap& seg);

// Face-connected components (4-neighborhood in 2D, 6 in 3D) of every
// foreground label. max_prob is filled from probs when given.
std::vector<Component> label_components(const std::vector<std::uint8_t>& labels,
                                        const std::vector<int>& shape,
                                        const ProbabilityMap* probs = nullptr);

// Segmentation-to-detection heuristic: one tight box per connected component
// scored by the component's highest class probability, keeping only the
// max_components largest components of the image.
std::vector<Detection> components_to_detections(const ProbabilityMap& seg,
                                                int max_components,
                                                const std::string& image_id = "",
                                                const std::string& patient_id = "");

}  // namespace boxforge

#endif  // BOXFORGE_COMPONENTS_H_
