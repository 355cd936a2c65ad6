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

#include "boxforge/toydata.h"

#include <algorithm>
#include <cstdio>
#include <random>

#include "boxforge/error.h"

namespace boxforge {
namespace {

struct Placement {
  int row = 0;
  int col = 0;
  int diameter = 0;
  int class_id = 0;
};

int diameter_for(ToyTask task, int class_id) {
  if (task == ToyTask::kScales && class_id == 1) return kToySmallDiameter;
  return kToyDiameter;
}

bool has_hole(ToyTask task, int class_id) {
  return task != ToyTask::kScales && class_id == 2;
}

bool clear_of(const Placement& p, const std::vector<Placement>& placed, int margin) {
  for (const auto& q : placed) {
    const bool apart_rows = p.row + p.diameter + margin <= q.row ||
                            q.row + q.diameter + margin <= p.row;
    const bool apart_cols = p.col + p.diameter + margin <= q.col ||
                            q.col + q.diameter + margin <= p.col;
    if (!apart_rows && !apart_cols) return false;
  }
  return true;
}

std::string indexed_id(const std::string& prefix, int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%05d", index);
  return prefix + buf;
}

ToySample generate_one(const ToyConfig& cfg, int index) {
  const int n = cfg.image_size;
  ToySample s;
  s.image_id = indexed_id(cfg.id_prefix, cfg.first_index + index);
  s.patient_id = indexed_id(cfg.id_prefix + "_patient", cfg.first_index + index);
  s.shape = {n, n};
  s.task = cfg.task;
  s.seed = sub_seed(cfg.seed, static_cast<std::uint64_t>(cfg.first_index + index));
  s.image.assign(static_cast<std::size_t>(n) * n, 0.0f);
  s.mask.assign(static_cast<std::size_t>(n) * n, 0);

  std::mt19937_64 rng(s.seed);
  std::uniform_int_distribution<int> count_dist(cfg.min_objects, cfg.max_objects);
  std::uniform_int_distribution<int> class_dist(1, 2);
  const int n_objects = count_dist(rng);

  std::vector<Placement> placed;
  for (int o = 0; o < n_objects; ++o) {
    Placement p;
    p.class_id = class_dist(rng);
    p.diameter = diameter_for(cfg.task, p.class_id);
    if (p.diameter > n) throw UsageError("toy: image smaller than object");
    std::uniform_int_distribution<int> pos(0, n - p.diameter);
    bool ok = false;
    for (int attempt = 0; attempt < cfg.max_retries && !ok; ++attempt) {
      p.row = pos(rng);
      p.col = pos(rng);
      ok = clear_of(p, placed, cfg.margin);
    }
    if (!ok) {
      throw UsageError("toy: could not place object " + std::to_string(o) +
                       " of " + s.image_id + " after " +
                       std::to_string(cfg.max_retries) + " attempts");
    }
    placed.push_back(p);
  }

  for (std::size_t o = 0; o < placed.size(); ++o) {
    const auto& p = placed[o];
    std::vector<bool> hole(static_cast<std::size_t>(p.diameter) * p.diameter, false);
    if (has_hole(cfg.task, p.class_id)) {
      for (const auto& [r, c] : hole_pixels(p.diameter, kToyHoleDiameter)) {
        hole[static_cast<std::size_t>(r) * p.diameter + c] = true;
      }
    }
    const bool cut_mask = cfg.task == ToyTask::kShapes;
    for (const auto& [r, c] : disc_pixels(p.diameter)) {
      const std::size_t at = static_cast<std::size_t>(p.row + r) * n + (p.col + c);
      const bool in_hole = hole[static_cast<std::size_t>(r) * p.diameter + c];
      if (!in_hole) s.image[at] += cfg.intensity;
      if (!(in_hole && cut_mask)) s.mask[at] = static_cast<std::uint8_t>(p.class_id);
    }
    GroundTruthObject g;
    g.box = Box::Make2D(p.row, p.col, p.row + p.diameter, p.col + p.diameter);
    g.class_id = p.class_id;
    g.object_id = s.image_id + "_obj" + std::to_string(o);
    g.image_id = s.image_id;
    g.patient_id = s.patient_id;
    s.gts.push_back(std::move(g));
  }

  // Noise is drawn as amplitude * U[0,1) so every amplitude consumes the same
  // random stream and the noise-free render shares the geometry.
  std::uniform_real_distribution<float> unit(0.0f, 1.0f);
  for (auto& px : s.image) px += cfg.noise_amplitude * unit(rng);
  return s;
}

void check_config(const ToyConfig& cfg) {
  if (cfg.n_images < 0) throw UsageError("toy: n_images must be >= 0");
  if (cfg.min_objects < 0 || cfg.max_objects < cfg.min_objects) {
    throw UsageError("toy: invalid objects-per-image range");
  }
  if (cfg.image_size < 1) throw UsageError("toy: image_size must be positive");
  if (cfg.noise_amplitude < 0.0f) throw UsageError("toy: noise amplitude must be >= 0");
  if (cfg.max_retries < 1) throw UsageError("toy: max_retries must be >= 1");
}

}  // namespace

std::string to_string(ToyTask task) {
  switch (task) {
    case ToyTask::kShapes:
      return "shapes";
    case ToyTask::kPatterns:
      return "patterns";
    case ToyTask::kScales:
      return "scales";
  }
  return "unknown";
}

ToyTask parse_toy_task(const std::string& name) {
  if (name == "shapes" || name == "1") return ToyTask::kShapes;
  if (name == "patterns" || name == "2") return ToyTask::kPatterns;
  if (name == "scales" || name == "3") return ToyTask::kScales;
  throw UsageError("unknown toy task '" + name + "'");
}

std::vector<std::pair<int, int>> disc_pixels(int diameter) {
  return hole_pixels(diameter, diameter);
}

std::vector<std::pair<int, int>> hole_pixels(int diameter, int hole) {
  std::vector<std::pair<int, int>> out;
  const double c = diameter / 2.0;
  const double r2 = hole * hole / 4.0;
  for (int r = 0; r < diameter; ++r) {
    for (int col = 0; col < diameter; ++col) {
      const double dr = r + 0.5 - c;
      const double dc = col + 0.5 - c;
      if (dr * dr + dc * dc <= r2) out.emplace_back(r, col);
    }
  }
  return out;
}

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finalizer over the combined key.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::vector<ToySample> generate(const ToyConfig& cfg) {
  check_config(cfg);
  std::vector<ToySample> out(cfg.n_images);
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < cfg.n_images; ++i) {
    try {
      out[i] = generate_one(cfg, i);
    } catch (...) {
#pragma omp critical(boxforge_toy_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

PatientLabels toy_patient_labels(const std::vector<ToySample>& samples,
                                 int num_classes) {
  PatientLabels labels;
  for (const auto& s : samples) {
    for (int c = 1; c < num_classes + 1; ++c) labels[{s.patient_id, c}] = 0;
    for (const auto& g : s.gts) labels[{s.patient_id, g.class_id}] = 1;
  }
  return labels;
}

namespace serial {

std::vector<ToySample> generate(const ToyConfig& cfg) {
  check_config(cfg);
  std::vector<ToySample> out;
  out.reserve(cfg.n_images);
  for (int i = 0; i < cfg.n_images; ++i) out.push_back(generate_one(cfg, i));
  return out;
}

}  // namespace serial
}  // namespace boxforge
