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

#include <algorithm>
#include <cmath>
#include <exception>
#include <random>

#include "boxforge/error.h"
#include "boxforge/toydata.h"

namespace boxforge {
namespace {

double draw_score(std::mt19937_64& rng, double mean, double sd) {
  double s = mean;
  if (sd > 0.0) s = std::normal_distribution<double>(mean, sd)(rng);
  return std::clamp(s, 0.0, 1.0);
}

// Jitters every coordinate, restores lo <= hi and clips to the patch.
Box jitter_box(const Box& b, double sigma, const Box& patch_bounds,
               std::mt19937_64& rng) {
  if (!(sigma > 0.0)) return clip(b, patch_bounds);
  std::normal_distribution<double> noise(0.0, sigma);
  Box out = b;
  for (int k = 0; k < b.dim(); ++k) {
    double lo = b.lo(k) + noise(rng);
    double hi = b.hi(k) + noise(rng);
    if (lo > hi) std::swap(lo, hi);
    out.set_axis(k, lo, hi);
  }
  return clip(out, patch_bounds);
}

std::vector<Detection> simulate_image(const SimImage& img, std::size_t index,
                                      const SimConfig& cfg, const TilingPlan& plan) {
  if (img.shape != plan.image_shape) {
    throw UsageError("simulate: image " + img.image_id +
                     " does not match the tiling plan shape");
  }
  const int dim = static_cast<int>(img.shape.size());
  const ScoreModel& sm = cfg.scores;
  std::mt19937_64 rng(sub_seed(cfg.seed, index));
  std::vector<double> zero(dim, 0.0);
  std::vector<double> patch_hi(plan.patch_shape.begin(), plan.patch_shape.end());
  const Box patch_bounds(zero, patch_hi);

  std::vector<Detection> out;
  for (std::size_t p = 0; p < plan.patches.size(); ++p) {
    const auto& patch = plan.patches[p];
    std::vector<double> neg_origin(dim);
    for (int k = 0; k < dim; ++k) neg_origin[k] = -patch.origin[k];

    std::vector<const GroundTruthObject*> visible;
    for (const auto& g : img.gts) {
      bool inside = true;
      for (int k = 0; k < dim && inside; ++k) {
        const double c = g.box.center(k);
        inside = c >= patch.origin[k] && c < patch.origin[k] + plan.patch_shape[k];
      }
      if (inside) visible.push_back(&g);
    }

    for (std::size_t m = 0; m < plan.mirror_axes_sets.size(); ++m) {
      const auto& axes = plan.mirror_axes_sets[m];
      for (int e = 0; e < plan.n_models; ++e) {
        const std::string view_id = "p" + std::to_string(p) + "_m" +
                                    std::to_string(m) + "_e" + std::to_string(e);
        std::vector<Detection> view_dets;
        auto emit = [&](const Box& patch_box, int class_id, double score) {
          Detection d;
          // The network sees the mirrored crop and predicts mirrored boxes.
          d.box = unmirror(patch_box, plan.patch_shape, axes);
          d.class_id = class_id;
          d.score = score;
          d.image_id = img.image_id;
          d.patient_id = img.patient_id;
          d.view_id = view_id;
          view_dets.push_back(std::move(d));
        };

        for (const auto* g : visible) {
          const Box local = translate(g->box, neg_origin);
          emit(jitter_box(local, cfg.jitter_sigma, patch_bounds, rng), g->class_id,
               draw_score(rng, sm.correct_mean, sm.correct_sd));
          if (sm.emit_wrong_class) {
            for (int c = 1; c <= sm.num_classes; ++c) {
              if (c == g->class_id) continue;
              emit(jitter_box(local, cfg.jitter_sigma, patch_bounds, rng), c,
                   draw_score(rng, sm.wrong_mean, sm.wrong_sd));
            }
          }
        }

        if (cfg.fp_rate > 0.0) {
          const int n_fp = std::poisson_distribution<int>(cfg.fp_rate)(rng);
          std::uniform_real_distribution<double> side_dist(cfg.spurious_min_side,
                                                           cfg.spurious_max_side);
          std::uniform_int_distribution<int> class_dist(1, sm.num_classes);
          for (int f = 0; f < n_fp; ++f) {
            std::vector<double> lo(dim);
            std::vector<double> hi(dim);
            for (int k = 0; k < dim; ++k) {
              const double side = std::min<double>(side_dist(rng), plan.patch_shape[k]);
              lo[k] = std::uniform_real_distribution<double>(
                  0.0, plan.patch_shape[k] - side)(rng);
              hi[k] = lo[k] + side;
            }
            const int c = class_dist(rng);
            emit(Box(lo, hi), c, draw_score(rng, sm.spurious_mean, sm.spurious_sd));
          }
        }

        View view{patch.origin, plan.patch_shape, axes};
        for (auto& d : map_boxes(view_dets, view)) out.push_back(std::move(d));
      }
    }
  }
  return out;
}

}  // namespace

ScoreModel ScoreModel::Perfect() {
  ScoreModel m;
  m.correct_mean = 1.0;
  m.correct_sd = 0.0;
  m.emit_wrong_class = false;
  return m;
}

std::vector<SimImage> to_sim_images(const std::vector<ToySample>& samples) {
  std::vector<SimImage> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back({s.image_id, s.patient_id, s.shape, s.gts});
  return out;
}

std::vector<Detection> simulate_predictions(const std::vector<SimImage>& images,
                                            const SimConfig& cfg,
                                            const TilingPlan& plan) {
  if (cfg.jitter_sigma < 0.0 || cfg.fp_rate < 0.0) {
    throw UsageError("simulate: jitter and fp_rate must be >= 0");
  }
  if (!(cfg.spurious_min_side > 0.0) || cfg.spurious_max_side < cfg.spurious_min_side) {
    throw UsageError("simulate: invalid spurious box size range");
  }
  if (cfg.scores.num_classes < 1) throw UsageError("simulate: need >= 1 class");

  std::vector<std::vector<Detection>> per_image(images.size());
  std::exception_ptr error;
  const auto n = static_cast<std::ptrdiff_t>(images.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      per_image[i] = simulate_image(images[i], static_cast<std::size_t>(i), cfg, plan);
    } catch (...) {
#pragma omp critical(boxforge_sim_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  std::vector<Detection> out;
  for (auto& v : per_image) {
    out.insert(out.end(), std::make_move_iterator(v.begin()),
               std::make_move_iterator(v.end()));
  }
  return out;
}

}  // namespace boxforge
