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

#ifndef BOXFORGE_TOYDATA_H_
#define BOXFORGE_TOYDATA_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "boxforge/detection.h"
#include "boxforge/eval.h"
#include "boxforge/tiling.h"

namespace boxforge {

enum class ToyTask {
  kShapes,    // disc vs donut, hole removed from the mask
  kPatterns,  // disc vs donut, hole kept in the mask
  kScales,    // disc of diameter 19 vs 20
};

std::string to_string(ToyTask task);
// Accepts "shapes", "patterns", "scales" (or 1, 2, 3).
ToyTask parse_toy_task(const std::string& name);

inline constexpr int kToyImageSize = 320;
inline constexpr int kToyDiameter = 20;
inline constexpr int kToySmallDiameter = 19;
inline constexpr int kToyHoleDiameter = 4;

struct ToyConfig {
  ToyTask task = ToyTask::kShapes;
  int n_images = 1;
  int min_objects = 1;
  int max_objects = 3;
  int image_size = kToyImageSize;
  float intensity = 0.2f;
  float noise_amplitude = 0.2f;
  int margin = 2;         // free pixels between neighboring boxes
  int max_retries = 1000;  // placement attempts per object
  std::uint64_t seed = 0;
  int first_index = 0;    // offsets image ids, e.g. for split generation
  std::string id_prefix = "toy";
};

struct ToySample {
  std::string image_id;
  std::string patient_id;
  std::vector<int> shape;        // rows, cols
  std::vector<float> image;      // row-major
  std::vector<std::uint8_t> mask;  // class label per pixel, 0 background
  std::vector<GroundTruthObject> gts;
  ToyTask task = ToyTask::kShapes;
  std::uint64_t seed = 0;        // per-image seed
};

// Pixel offsets (row, col) of a disc inscribed in a diameter x diameter
// square, by pixel-center inclusion. For odd diameters the disc is centered
// on a pixel center, for even diameters on a pixel corner, so the footprint
// spans exactly `diameter` pixels per axis.
std::vector<std::pair<int, int>> disc_pixels(int diameter);

// Pixels of the concentric hole (diameter `hole`) inside a disc of the given
// diameter, in the same frame as disc_pixels.
std::vector<std::pair<int, int>> hole_pixels(int diameter, int hole);

// Derived seed for image `index` of a run seeded with `seed`.
std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t index);

// Deterministic toy samples; images are generated in parallel from
// per-image seeds. Throws UsageError if objects cannot be placed.
std::vector<ToySample> generate(const ToyConfig& cfg);

// Patient labels (patient, class) -> 0/1 for the generated samples.
PatientLabels toy_patient_labels(const std::vector<ToySample>& samples,
                                 int num_classes = 2);

// Per-view score distributions of the prediction simulator. All draws are
// clamped to [0, 1]; a zero std-dev yields the mean exactly.
struct ScoreModel {
  int num_classes = 2;
  double correct_mean = 0.8;
  double correct_sd = 0.1;
  bool emit_wrong_class = true;
  double wrong_mean = 0.2;
  double wrong_sd = 0.1;
  double spurious_mean = 0.5;
  double spurious_sd = 0.25;

  static ScoreModel Perfect();
};

struct SimConfig {
  double jitter_sigma = 0.0;  // px, per coordinate
  double fp_rate = 0.0;       // Poisson mean of spurious boxes per view
  double spurious_min_side = 8.0;
  double spurious_max_side = 32.0;
  ScoreModel scores;
  std::uint64_t seed = 0;
};

// Ground truth of one image as seen by the simulator.
struct SimImage {
  std::string image_id;
  std::string patient_id;
  std::vector<int> shape;
  std::vector<GroundTruthObject> gts;
};

std::vector<SimImage> to_sim_images(const std::vector<ToySample>& samples);

// Stand-in for network outputs. Every view of the plan (patch x mirror set x
// model) re-predicts each ground truth whose center lies in its patch with
// jittered coordinates, optionally a wrong-class twin, plus Poisson(fp_rate)
// spurious boxes. Boxes are produced in the mirrored patch frame and mapped
// back with map_boxes. Deterministic under cfg.seed.
std::vector<Detection> simulate_predictions(const std::vector<SimImage>& images,
                                            const SimConfig& cfg,
                                            const TilingPlan& plan);

namespace serial {

std::vector<ToySample> generate(const ToyConfig& cfg);

}  // namespace serial
}  // namespace boxforge

#endif  // BOXFORGE_TOYDATA_H_
