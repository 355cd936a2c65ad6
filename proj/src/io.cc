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

#include "boxforge/io.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "boxforge/error.h"

namespace boxforge {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw SchemaError(path + ": " + what);
}

const json& require(const json& obj, const std::string& path, const char* key) {
  if (!obj.is_object()) fail(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) fail(path, std::string("missing field '") + key + "'");
  return *it;
}

std::string get_string(const json& obj, const std::string& path, const char* key) {
  const json& v = require(obj, path, key);
  if (!v.is_string()) fail(path + "/" + key, "expected a string");
  return v.get<std::string>();
}

int get_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<int>();
}

double get_number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(path, "expected a finite number");
  return x;
}

std::vector<double> get_numbers(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(get_number(v[i], path + "/" + std::to_string(i)));
  }
  return out;
}

Box get_box(const json& v, const std::string& path, int dim) {
  const auto flat = get_numbers(v, path);
  if (dim > 0 && static_cast<int>(flat.size()) != 2 * dim) {
    fail(path, "box must hold " + std::to_string(2 * dim) + " coordinates");
  }
  try {
    return Box::FromFlat(flat);
  } catch (const UsageError& e) {
    fail(path, e.what());
  }
}

json box_json(const Box& b) {
  const auto flat = b.flat();
  return json(std::vector<double>(flat.begin(), flat.begin() + 2 * b.dim()));
}

}  // namespace

double round_score(double score) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", score);
  return std::strtod(buf, nullptr);
}

json to_json(const DetectionFile& file) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["dimensionality"] = file.dimensionality;
  if (!file.run.empty()) j["run"] = file.run;
  j["detections"] = json::array();
  for (const auto& d : file.detections) {
    json e;
    e["image_id"] = d.image_id;
    e["patient_id"] = d.patient_id;
    e["class_id"] = d.class_id;
    e["score"] = round_score(d.score);
    e["box"] = box_json(d.box);
    if (!d.view_id.empty()) e["view_id"] = d.view_id;
    if (d.patch_center) e["patch_center"] = *d.patch_center;
    if (d.slice_id) e["slice_id"] = *d.slice_id;
    j["detections"].push_back(std::move(e));
  }
  return j;
}

DetectionFile detection_file_from_json(const json& j) {
  DetectionFile file;
  const int version = get_int(require(j, "", "schema_version"), "/schema_version");
  if (version != kSchemaVersion) {
    fail("/schema_version", "unsupported version " + std::to_string(version));
  }
  file.dimensionality = get_int(require(j, "", "dimensionality"), "/dimensionality");
  if (file.dimensionality != 2 && file.dimensionality != 3) {
    fail("/dimensionality", "must be 2 or 3");
  }
  if (j.contains("run")) file.run = j.at("run");
  const json& arr = require(j, "", "detections");
  if (!arr.is_array()) fail("/detections", "expected an array");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string path = "/detections/" + std::to_string(i);
    const json& e = arr[i];
    Detection d;
    d.image_id = get_string(e, path, "image_id");
    d.patient_id = e.contains("patient_id") ? get_string(e, path, "patient_id") : "";
    d.class_id = get_int(require(e, path, "class_id"), path + "/class_id");
    if (d.class_id < 1) fail(path + "/class_id", "must be >= 1");
    d.score = get_number(require(e, path, "score"), path + "/score");
    if (d.score < 0.0 || d.score > 1.0) fail(path + "/score", "must lie in [0,1]");
    d.box = get_box(require(e, path, "box"), path + "/box", file.dimensionality);
    if (e.contains("view_id")) d.view_id = get_string(e, path, "view_id");
    if (e.contains("patch_center") && !e.at("patch_center").is_null()) {
      d.patch_center = get_numbers(e.at("patch_center"), path + "/patch_center");
      if (static_cast<int>(d.patch_center->size()) != file.dimensionality) {
        fail(path + "/patch_center", "length must equal dimensionality");
      }
    }
    if (e.contains("slice_id") && !e.at("slice_id").is_null()) {
      d.slice_id = get_int(e.at("slice_id"), path + "/slice_id");
    }
    file.detections.push_back(std::move(d));
  }
  return file;
}

json to_json(const GroundTruthFile& file) {
  json j;
  j["images"] = json::array();
  for (const auto& im : file.images) {
    j["images"].push_back(
        {{"image_id", im.image_id}, {"patient_id", im.patient_id}, {"shape", im.shape}});
  }
  j["objects"] = json::array();
  for (const auto& o : file.objects) {
    j["objects"].push_back({{"object_id", o.object_id},
                            {"image_id", o.image_id},
                            {"class_id", o.class_id},
                            {"box", box_json(o.box)}});
  }
  j["patient_labels"] = json::array();
  for (const auto& [key, label] : file.patient_labels) {
    j["patient_labels"].push_back(
        {{"patient_id", key.first}, {"class_id", key.second}, {"label", label}});
  }
  return j;
}

GroundTruthFile ground_truth_from_json(const json& j) {
  GroundTruthFile file;
  std::map<std::string, const ImageInfo*> by_id;
  const json& images = require(j, "", "images");
  if (!images.is_array()) fail("/images", "expected an array");
  for (std::size_t i = 0; i < images.size(); ++i) {
    const std::string path = "/images/" + std::to_string(i);
    ImageInfo im;
    im.image_id = get_string(images[i], path, "image_id");
    im.patient_id = get_string(images[i], path, "patient_id");
    const json& shape = require(images[i], path, "shape");
    if (!shape.is_array() || (shape.size() != 2 && shape.size() != 3)) {
      fail(path + "/shape", "expected 2 or 3 extents");
    }
    for (std::size_t k = 0; k < shape.size(); ++k) {
      const int s = get_int(shape[k], path + "/shape/" + std::to_string(k));
      if (s <= 0) fail(path + "/shape/" + std::to_string(k), "must be positive");
      im.shape.push_back(s);
    }
    file.images.push_back(std::move(im));
  }
  for (std::size_t i = 0; i < file.images.size(); ++i) {
    if (!by_id.emplace(file.images[i].image_id, &file.images[i]).second) {
      fail("/images/" + std::to_string(i), "duplicate image_id '" +
                                               file.images[i].image_id + "'");
    }
  }

  const json& objects = require(j, "", "objects");
  if (!objects.is_array()) fail("/objects", "expected an array");
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const std::string path = "/objects/" + std::to_string(i);
    GroundTruthObject o;
    o.object_id = get_string(objects[i], path, "object_id");
    o.image_id = get_string(objects[i], path, "image_id");
    const auto it = by_id.find(o.image_id);
    if (it == by_id.end()) {
      fail(path + "/image_id", "unknown image_id '" + o.image_id + "'");
    }
    o.patient_id = it->second->patient_id;
    o.class_id = get_int(require(objects[i], path, "class_id"), path + "/class_id");
    if (o.class_id < 1) fail(path + "/class_id", "must be >= 1");
    o.box = get_box(require(objects[i], path, "box"), path + "/box",
                    static_cast<int>(it->second->shape.size()));
    file.objects.push_back(std::move(o));
  }

  std::set<std::string> patients;
  for (const auto& im : file.images) patients.insert(im.patient_id);
  if (j.contains("patient_labels")) {
    const json& labels = j.at("patient_labels");
    if (!labels.is_array()) fail("/patient_labels", "expected an array");
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const std::string path = "/patient_labels/" + std::to_string(i);
      const std::string pid = get_string(labels[i], path, "patient_id");
      if (!patients.count(pid)) {
        fail(path + "/patient_id", "unknown patient_id '" + pid + "'");
      }
      const int cls = get_int(require(labels[i], path, "class_id"), path + "/class_id");
      const int label = get_int(require(labels[i], path, "label"), path + "/label");
      if (label != 0 && label != 1) fail(path + "/label", "must be 0 or 1");
      file.patient_labels[{pid, cls}] = label;
    }
  }
  return file;
}

json to_json(const EvalResult& r) {
  auto pct = [](double v) { return std::round(v * 1e4) / 1e2; };
  json j;
  j["iou_threshold"] = r.iou_threshold;
  j["map"] = r.map_value;
  j["map_percent"] = pct(r.map_value);
  j["per_class"] = json::array();
  for (const auto& [cls, ap] : r.per_class_ap) {
    const auto& st = r.per_class_stats.at(cls);
    j["per_class"].push_back({{"class_id", cls},
                              {"ap", ap},
                              {"num_gt", st.num_gt},
                              {"num_det", st.num_det},
                              {"true_positives", st.true_positives}});
  }
  j["patient_ap"] = json::array();
  for (const auto& [cls, ap] : r.patient_ap) {
    j["patient_ap"].push_back({{"class_id", cls}, {"ap", ap}});
  }
  if (r.patient_map) {
    j["patient_map"] = *r.patient_map;
    j["patient_map_percent"] = pct(*r.patient_map);
  } else {
    j["patient_map"] = nullptr;
  }
  return j;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw SchemaError(path + ":" + std::to_string(line) + ":" + std::to_string(col) +
                      ": invalid JSON: " + e.what());
  }
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

void check_references(const DetectionFile& dets, const GroundTruthFile& gt) {
  std::set<std::string> ids;
  for (const auto& im : gt.images) ids.insert(im.image_id);
  for (std::size_t i = 0; i < dets.detections.size(); ++i) {
    const auto& id = dets.detections[i].image_id;
    if (!ids.count(id)) {
      fail("/detections/" + std::to_string(i) + "/image_id",
           "image_id '" + id + "' is not declared in the ground truth");
    }
  }
}

std::string pr_curves_csv(const EvalResult& result) {
  std::ostringstream out;
  out << "class_id,rank,score,precision,recall\n";
  char line[128];
  for (const auto& [cls, curve] : result.pr_curves) {
    for (std::size_t n = 0; n < curve.size(); ++n) {
      std::snprintf(line, sizeof line, "%d,%zu,%.9g,%.9g,%.9g\n", cls, n + 1,
                    curve[n].score, curve[n].precision, curve[n].recall);
      out << line;
    }
  }
  return out.str();
}

void write_raw(const std::string& path, const std::vector<float>& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(float)));
}

void write_raw(const std::string& path, const std::vector<std::uint8_t>& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size()));
}

std::vector<std::vector<double>> read_csv_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      while (end && (*end == ' ' || *end == '\t' || *end == '\r')) ++end;
      if (end == cell.c_str() || (end && *end != '\0')) {
        throw SchemaError(path + ":" + std::to_string(line_no) + ": not a number '" +
                          cell + "'");
      }
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw SchemaError(path + ":" + std::to_string(line_no) +
                        ": row length differs from the first row");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_csv_table(const std::string& path, const std::vector<double>& values,
                     int columns) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write '" + path + "'");
  char buf[32];
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", values[i]);
    out << buf << ((i + 1) % columns == 0 ? "\n" : ",");
  }
}

}  // namespace boxforge
