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

#ifndef BOXFORGE_EVAL_H_
#define BOXFORGE_EVAL_H_

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "boxforge/detection.h"

namespace boxforge {

inline constexpr double kEvalIouThreshold = 0.1;

struct MatchRecord {
  std::size_t detection = 0;       // index into the input detections
  std::optional<std::size_t> gt;   // claimed ground truth, none for an FP
  double score = 0.0;
  int class_id = 0;
};

// Greedy matching per (image, class): detections in descending score order
// (ties by input order) each claim the highest-IoU unclaimed ground truth
// with iou >= iou_threshold. Records are returned in that order.
std::vector<MatchRecord> match_predictions(const std::vector<Detection>& dets,
                                           const std::vector<GroundTruthObject>& gts,
                                           double iou_threshold);

struct PrPoint {
  double precision = 0.0;
  double recall = 0.0;
  double score = 0.0;  // score threshold at which the point is reached
};

// Precision/recall after each ranked detection of one class.
std::vector<PrPoint> pr_curve(const std::vector<MatchRecord>& ranked,
                              std::size_t num_gt);

// All-point AP: area under the monotone precision envelope. Records must be
// in rank order and belong to one class. Returns nullopt when neither
// predictions nor ground truth exist; 0 when only one side exists.
std::optional<double> average_precision(const std::vector<MatchRecord>& ranked,
                                        std::size_t num_gt);

struct ClassStats {
  std::size_t num_gt = 0;
  std::size_t num_det = 0;
  std::size_t true_positives = 0;
};

struct EvalResult {
  double iou_threshold = kEvalIouThreshold;
  std::map<int, double> per_class_ap;
  std::map<int, ClassStats> per_class_stats;
  double map_value = 0.0;
  std::map<int, double> patient_ap;
  std::optional<double> patient_map;
  std::map<int, std::vector<PrPoint>> pr_curves;
};

// Per-class AP and their mean over classes with defined AP. Throws
// UsageError when no class has a defined AP.
EvalResult mean_ap(const std::vector<Detection>& dets,
                   const std::vector<GroundTruthObject>& gts,
                   double iou_threshold = kEvalIouThreshold);

using PatientLabels = std::map<std::pair<std::string, int>, int>;

// Per-class AP of the per-patient maximum detection score (0 for patients
// without detections of the class) against binary patient labels. Classes
// without a positive patient are omitted. Throws UsageError for detections
// of patients missing from patient_labels.
std::map<int, double> patient_level_ap(const std::vector<Detection>& dets,
                                       const PatientLabels& patient_labels);

}  // namespace boxforge

#endif  // BOXFORGE_EVAL_H_
