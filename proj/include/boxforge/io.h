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

#ifndef BOXFORGE_IO_H_
#define BOXFORGE_IO_H_

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "boxforge/detection.h"
#include "boxforge/eval.h"

namespace boxforge {

inline constexpr int kSchemaVersion = 1;

// {schema_version, dimensionality, run?, detections: [...]}
struct DetectionFile {
  int dimensionality = 2;
  nlohmann::json run = nlohmann::json::object();  // provenance header
  std::vector<Detection> detections;
};

struct ImageInfo {
  std::string image_id;
  std::string patient_id;
  std::vector<int> shape;
};

// {images: [...], objects: [...], patient_labels: [...]}
struct GroundTruthFile {
  std::vector<ImageInfo> images;
  std::vector<GroundTruthObject> objects;
  PatientLabels patient_labels;
};

// Scores are written with 9 significant digits.
double round_score(double score);

nlohmann::json to_json(const DetectionFile& file);
nlohmann::json to_json(const GroundTruthFile& file);
nlohmann::json to_json(const EvalResult& result);

// Validating readers. Throw SchemaError naming the offending JSON path.
DetectionFile detection_file_from_json(const nlohmann::json& j);
GroundTruthFile ground_truth_from_json(const nlohmann::json& j);

// Throws SchemaError with line and column for syntax errors, UsageError if
// the file cannot be opened.
nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

// Checks that every detection refers to an image declared in gt.
void check_references(const DetectionFile& dets, const GroundTruthFile& gt);

std::string pr_curves_csv(const EvalResult& result);

void write_raw(const std::string& path, const std::vector<float>& data);
void write_raw(const std::string& path, const std::vector<std::uint8_t>& data);

// Dense numeric table: one row per line, comma separated, '#' comments.
std::vector<std::vector<double>> read_csv_table(const std::string& path);
void write_csv_table(const std::string& path, const std::vector<double>& values,
                     int columns);

}  // namespace boxforge

#endif  // BOXFORGE_IO_H_
