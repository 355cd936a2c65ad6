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

#ifndef BOXFORGE_TESTS_INSTANCES_H_
#define BOXFORGE_TESTS_INSTANCES_H_

// Seeded random problem instances shared by the unit and acceptance tests.

#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "boxforge/consolidate.h"
#include "boxforge/detection.h"
#include "boxforge/geometry.h"

namespace boxforge::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// Real-valued 2D box around a point, so that clusters actually form.
inline Box box_near(Rng& rng, double cy, double cx, double spread) {
  const double y = cy + uniform(rng, -spread, spread);
  const double x = cx + uniform(rng, -spread, spread);
  const double h = uniform(rng, 4, 16);
  const double w = uniform(rng, 4, 16);
  return Box::Make2D(y, x, y + h, x + w);
}

struct WbcInstance {
  std::vector<Detection> dets;
  WbcConfig cfg;
};

// Up to max_n detections drawn around 1-3 hotspots with two classes and four
// views. About a third of the instances use coarse scores to exercise ties,
// some reuse identical boxes, some carry patch centers.
inline WbcInstance random_wbc_instance(Rng& rng, int max_n = 8) {
  WbcInstance inst;
  const int n = uniform_int(rng, 1, max_n);
  const int spots = uniform_int(rng, 1, 3);
  const bool coarse = uniform(rng, 0, 1) < 0.35;
  const bool centers = uniform(rng, 0, 1) < 0.5;
  const double thr_choices[] = {0.1, 0.3, 0.5};
  inst.cfg.iou_threshold = thr_choices[uniform_int(rng, 0, 2)];
  inst.cfg.sigma_patch = centers ? uniform(rng, 5, 40)
                                 : std::numeric_limits<double>::infinity();
  inst.cfg.expected_views = uniform_int(rng, 1, 6);
  for (int i = 0; i < n; ++i) {
    Detection d;
    const int s = uniform_int(rng, 0, spots - 1);
    if (i > 0 && uniform(rng, 0, 1) < 0.15) {
      d.box = inst.dets[uniform_int(rng, 0, i - 1)].box;
    } else {
      d.box = box_near(rng, 10 + 15 * s, 10 + 12 * s, 4);
    }
    d.class_id = uniform_int(rng, 1, 2);
    d.score = coarse ? uniform_int(rng, 1, 4) / 4.0 : uniform(rng, 0.01, 1.0);
    d.image_id = "img";
    d.view_id = "v" + std::to_string(uniform_int(rng, 0, 3));
    if (centers) d.patch_center = std::vector<double>{uniform(rng, 0, 50), uniform(rng, 0, 50)};
    inst.dets.push_back(d);
  }
  return inst;
}

// Boxes on a 64x64 canvas for NMS: integer corners half of the time so that
// exact IoU ties and duplicates occur.
inline std::vector<Detection> random_nms_instance(Rng& rng, int max_n = 200) {
  const int n = uniform_int(rng, 0, max_n);
  std::vector<Detection> dets;
  const bool integer = uniform(rng, 0, 1) < 0.5;
  for (int i = 0; i < n; ++i) {
    Detection d;
    double y = uniform(rng, 0, 56);
    double x = uniform(rng, 0, 56);
    double h = uniform(rng, 2, 12);
    double w = uniform(rng, 2, 12);
    if (integer) {
      y = std::floor(y);
      x = std::floor(x);
      h = std::floor(h);
      w = std::floor(w);
    }
    d.box = Box::Make2D(y, x, y + h, x + w);
    d.class_id = uniform_int(rng, 1, 3);
    d.score = integer ? uniform_int(rng, 0, 10) / 10.0 : uniform(rng, 0, 1);
    d.image_id = "img";
    dets.push_back(d);
  }
  return dets;
}

// A synthetic slice stack: a few lesions spanning runs of slices with
// in-plane jitter, optional gaps, and unrelated clutter boxes.
inline std::vector<Detection> random_slice_stack(Rng& rng) {
  std::vector<Detection> dets;
  const int lesions = uniform_int(rng, 1, 4);
  for (int l = 0; l < lesions; ++l) {
    const double cy = uniform(rng, 10, 50);
    const double cx = uniform(rng, 10, 50);
    const int z0 = uniform_int(rng, 0, 20);
    const int len = uniform_int(rng, 1, 8);
    const int cls = uniform_int(rng, 1, 2);
    for (int z = z0; z < z0 + len; ++z) {
      if (uniform(rng, 0, 1) < 0.2) continue;  // leaves gaps in the chain
      const int copies = uniform_int(rng, 1, 2);
      for (int c = 0; c < copies; ++c) {
        Detection d;
        d.box = box_near(rng, cy, cx, 2);
        d.class_id = cls;
        d.score = uniform(rng, 0.05, 1.0);
        d.slice_id = z;
        d.image_id = "vol";
        dets.push_back(d);
      }
    }
  }
  const int clutter = uniform_int(rng, 0, 6);
  for (int c = 0; c < clutter; ++c) {
    Detection d;
    d.box = box_near(rng, uniform(rng, 5, 55), uniform(rng, 5, 55), 0);
    d.class_id = uniform_int(rng, 1, 2);
    d.score = uniform(rng, 0.05, 1.0);
    d.slice_id = uniform_int(rng, 0, 28);
    d.image_id = "vol";
    dets.push_back(d);
  }
  return dets;
}

struct EvalInstance {
  std::vector<Detection> dets;
  std::vector<GroundTruthObject> gts;
};

// Three images, two classes, at most four gts and five detections per
// (image, class) on a small grid, with coarse scores to create ties.
inline EvalInstance random_eval_instance(Rng& rng) {
  EvalInstance inst;
  for (int i = 0; i < 3; ++i) {
    const std::string id = "im" + std::to_string(i);
    for (int c = 1; c <= 2; ++c) {
      const int ng = uniform_int(rng, 0, 4);
      for (int g = 0; g < ng; ++g) {
        GroundTruthObject o;
        const int y = uniform_int(rng, 0, 12), x = uniform_int(rng, 0, 12);
        o.box = Box::Make2D(y, x, y + uniform_int(rng, 2, 6), x + uniform_int(rng, 2, 6));
        o.image_id = id;
        o.class_id = c;
        inst.gts.push_back(o);
      }
      const int nd = uniform_int(rng, 1, 5);
      for (int k = 0; k < nd; ++k) {
        Detection d;
        const int y = uniform_int(rng, 0, 12), x = uniform_int(rng, 0, 12);
        d.box = Box::Make2D(y, x, y + uniform_int(rng, 2, 6), x + uniform_int(rng, 2, 6));
        d.score = uniform_int(rng, 1, 10) / 10.0;
        d.image_id = id;
        d.class_id = c;
        inst.dets.push_back(d);
      }
    }
  }
  return inst;
}

}  // namespace boxforge::testing

#endif  // BOXFORGE_TESTS_INSTANCES_H_
