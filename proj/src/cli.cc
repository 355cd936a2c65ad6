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

#include "boxforge/cli.h"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "boxforge/anchors.h"
#include "boxforge/consolidate.h"
#include "boxforge/error.h"
#include "boxforge/eval.h"
#include "boxforge/io.h"
#include "boxforge/kernels.h"
#include "boxforge/log.h"
#include "boxforge/losses.h"
#include "boxforge/tiling.h"
#include "boxforge/toydata.h"

namespace boxforge {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<int> parse_shape(const std::string& text, const char* flag) {
  std::vector<int> out;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(part, &used);
      if (used != part.size() || v <= 0) throw std::invalid_argument(part);
      out.push_back(v);
    } catch (const std::exception&) {
      throw UsageError(std::string(flag) + ": expected positive integers, got '" +
                       text + "'");
    }
  }
  if (out.size() != 2 && out.size() != 3) {
    throw UsageError(std::string(flag) + ": expected 2 or 3 comma-separated extents");
  }
  return out;
}

std::vector<std::vector<int>> parse_mirrors(const std::string& mode, int dim) {
  if (mode == "all") return all_mirror_sets(dim);
  if (mode == "none") return {{}};
  throw UsageError("--mirrors must be 'all' or 'none'");
}

void emit_json(const json& j, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << j.dump(2) << "\n";
  } else {
    write_json_file(out, j);
    std::cout << out << "\n";
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write '" + path + "'");
  f << text;
}

// ---- consolidate ----------------------------------------------------------

struct ConsolidateArgs {
  std::string in;
  std::string out;
  std::string mode = "wbc";
  double iou = kDefaultIouThreshold;
  double sigma = 0.0;
  int expected_views = 1;
  std::string plan_file;
  int slice_gap = 1;
};

int cmd_consolidate(const ConsolidateArgs& a) {
  const DetectionFile in = detection_file_from_json(read_json_file(a.in));
  DetectionFile out;
  out.dimensionality = in.dimensionality;
  out.run = {{"command", "consolidate"}, {"mode", a.mode}, {"iou_threshold", a.iou}};
  if (in.run.contains("seed")) out.run["seed"] = in.run["seed"];

  if (a.mode == "wbc") {
    WbcConfig cfg;
    cfg.iou_threshold = a.iou;
    cfg.expected_views = a.expected_views;
    std::shared_ptr<TilingPlan> tiling;
    if (!a.plan_file.empty()) {
      tiling = std::make_shared<TilingPlan>(plan_from_json(read_json_file(a.plan_file)));
      if (static_cast<int>(tiling->image_shape.size()) != in.dimensionality) {
        throw UsageError("--plan-file dimensionality does not match the detections");
      }
      cfg.expected_views_at = [tiling](std::span<const double> pos) {
        return expected_views_clamped(*tiling, pos);
      };
      cfg.sigma_patch =
          *std::min_element(tiling->patch_shape.begin(), tiling->patch_shape.end()) / 4.0;
      out.run["plan_file"] = a.plan_file;
    } else {
      out.run["expected_views"] = a.expected_views;
    }
    if (a.sigma > 0.0) cfg.sigma_patch = a.sigma;
    out.run["sigma_patch"] =
        std::isfinite(cfg.sigma_patch) ? json(cfg.sigma_patch) : json(nullptr);
    out.detections = for_each_image(in.detections, [&cfg](const auto& dets) {
      return wbc(dets, cfg);
    });
  } else if (a.mode == "nms") {
    out.detections = for_each_image(in.detections, [&a](const auto& dets) {
      return nms(dets, a.iou);
    });
  } else if (a.mode == "merge2d3d") {
    if (in.dimensionality != 2) {
      throw UsageError("merge2d3d expects 2D slice detections");
    }
    out.dimensionality = 3;
    out.run["slice_gap"] = a.slice_gap;
    out.detections = for_each_image(in.detections, [&a](const auto& dets) {
      return merge_slices_to_cubes(dets, a.iou, a.slice_gap);
    });
  } else {
    throw UsageError("unknown --mode '" + a.mode + "' (wbc, nms, merge2d3d)");
  }
  emit_json(to_json(out), a.out);
  return kExitOk;
}

// ---- evaluate -------------------------------------------------------------

struct EvaluateArgs {
  std::string dets;
  std::string gt;
  double iou = kEvalIouThreshold;
  std::string out;
  std::string curves;
};

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v * 100);
  return buf;
}

int cmd_evaluate(const EvaluateArgs& a) {
  const DetectionFile dets = detection_file_from_json(read_json_file(a.dets));
  const GroundTruthFile gt = ground_truth_from_json(read_json_file(a.gt));
  check_references(dets, gt);

  EvalResult result = mean_ap(dets.detections, gt.objects, a.iou);
  if (!gt.patient_labels.empty()) {
    result.patient_ap = patient_level_ap(dets.detections, gt.patient_labels);
    if (!result.patient_ap.empty()) {
      double sum = 0.0;
      for (const auto& [cls, ap] : result.patient_ap) sum += ap;
      result.patient_map = sum / static_cast<double>(result.patient_ap.size());
    }
  }
  if (!a.out.empty()) write_json_file(a.out, to_json(result));
  if (!a.curves.empty()) write_text(a.curves, pr_curves_csv(result));

  char line[128];
  const int iou_pct = static_cast<int>(std::lround(a.iou * 100));
  std::snprintf(line, sizeof line, "%-8s %10s %12s\n", "class",
                ("mAP" + std::to_string(iou_pct) + " [%]").c_str(), "AP_pat [%]");
  std::cout << line;
  for (const auto& [cls, ap] : result.per_class_ap) {
    const auto it = result.patient_ap.find(cls);
    const std::string pat =
        it == result.patient_ap.end() ? "-" : percent(it->second);
    std::snprintf(line, sizeof line, "%-8d %10.1f %12s\n", cls, ap * 100, pat.c_str());
    std::cout << line;
  }
  const std::string pat = result.patient_map ? percent(*result.patient_map) : "-";
  std::snprintf(line, sizeof line, "%-8s %10.1f %12s\n", "mean", result.map_value * 100,
                pat.c_str());
  std::cout << line;
  return kExitOk;
}

// ---- gen-toy --------------------------------------------------------------

struct GenToyArgs {
  std::string task = "shapes";
  int n = -1;
  std::string split = "test";
  std::uint64_t seed = 0;
  std::string out_dir = "toy";
  int min_objects = 1;
  int max_objects = 3;
  float noise = 0.2f;
  bool no_arrays = false;
};

int cmd_gen_toy(const GenToyArgs& a) {
  ToyConfig cfg;
  cfg.task = parse_toy_task(a.task);
  int split_index = 0;
  int split_size = 0;
  if (a.split == "train") {
    split_index = 0;
    split_size = 1000;
  } else if (a.split == "val") {
    split_index = 1;
    split_size = 500;
  } else if (a.split == "test") {
    split_index = 2;
    split_size = 1000;
  } else {
    throw UsageError("--split must be train, val or test");
  }
  cfg.n_images = a.n >= 0 ? a.n : split_size;
  cfg.seed = sub_seed(a.seed, 1000 + split_index);
  cfg.min_objects = a.min_objects;
  cfg.max_objects = a.max_objects;
  cfg.noise_amplitude = a.noise;
  cfg.id_prefix = to_string(cfg.task) + "_" + a.split;
  const auto samples = generate(cfg);

  fs::create_directories(a.out_dir);
  GroundTruthFile gt;
  for (const auto& s : samples) {
    gt.images.push_back({s.image_id, s.patient_id, s.shape});
    gt.objects.insert(gt.objects.end(), s.gts.begin(), s.gts.end());
  }
  gt.patient_labels = toy_patient_labels(samples);
  const std::string gt_path = (fs::path(a.out_dir) / "ground_truth.json").string();
  json j = to_json(gt);
  j["generator"] = {{"task", to_string(cfg.task)},
                    {"split", a.split},
                    {"seed", a.seed},
                    {"n_images", cfg.n_images},
                    {"noise_amplitude", cfg.noise_amplitude},
                    {"image_format", "float32 row-major"},
                    {"mask_format", "uint8 row-major"}};
  write_json_file(gt_path, j);
  std::cout << gt_path << "\n";
  if (!a.no_arrays) {
    fs::create_directories(fs::path(a.out_dir) / "images");
    fs::create_directories(fs::path(a.out_dir) / "masks");
    for (const auto& s : samples) {
      write_raw((fs::path(a.out_dir) / "images" / (s.image_id + ".f32")).string(),
                s.image);
      write_raw((fs::path(a.out_dir) / "masks" / (s.image_id + ".u8")).string(), s.mask);
    }
    std::cout << (fs::path(a.out_dir) / "images").string() << "\n"
              << (fs::path(a.out_dir) / "masks").string() << "\n";
  }
  return kExitOk;
}

// ---- simulate -------------------------------------------------------------

struct SimulateArgs {
  std::string gt;
  std::string plan_file;
  std::string patch;
  int min_overlap = kDefaultMinOverlap;
  std::string mirrors = "all";
  int models = 1;
  double jitter = 0.0;
  double fp_rate = 0.0;
  std::string score_model = "default";
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_simulate(const SimulateArgs& a) {
  const GroundTruthFile gt = ground_truth_from_json(read_json_file(a.gt));
  SimConfig cfg;
  cfg.jitter_sigma = a.jitter;
  cfg.fp_rate = a.fp_rate;
  cfg.seed = a.seed;
  if (a.score_model == "perfect") {
    cfg.scores = ScoreModel::Perfect();
  } else if (a.score_model != "default") {
    throw UsageError("--score-model must be 'default' or 'perfect'");
  }

  std::map<std::string, SimImage> images;
  for (const auto& im : gt.images) {
    images[im.image_id] = {im.image_id, im.patient_id, im.shape, {}};
  }
  for (const auto& o : gt.objects) images[o.image_id].gts.push_back(o);

  std::optional<TilingPlan> fixed_plan;
  if (!a.plan_file.empty()) fixed_plan = plan_from_json(read_json_file(a.plan_file));

  // Images sharing a shape share a plan; group to keep per-image seeds stable.
  std::vector<Detection> all;
  std::size_t index = 0;
  for (const auto& [id, img] : images) {
    TilingPlan p = fixed_plan ? *fixed_plan
                              : plan(img.shape, a.patch.empty() ? img.shape
                                                                : parse_shape(a.patch, "--patch"),
                                     a.min_overlap,
                                     parse_mirrors(a.mirrors, static_cast<int>(img.shape.size())),
                                     a.models);
    SimConfig per_image = cfg;
    per_image.seed = sub_seed(a.seed, index++);
    auto dets = simulate_predictions({img}, per_image, p);
    all.insert(all.end(), dets.begin(), dets.end());
  }

  DetectionFile out;
  out.dimensionality = gt.images.empty() ? 2 : static_cast<int>(gt.images[0].shape.size());
  out.run = {{"command", "simulate"},
             {"seed", a.seed},
             {"jitter_sigma", a.jitter},
             {"fp_rate", a.fp_rate},
             {"score_model", a.score_model},
             {"mirrors", a.mirrors},
             {"models", a.models}};
  out.detections = std::move(all);
  emit_json(to_json(out), a.out);
  return kExitOk;
}

// ---- plan -----------------------------------------------------------------

struct PlanArgs {
  std::string image;
  std::string patch;
  int min_overlap = kDefaultMinOverlap;
  std::string mirrors = "all";
  int models = 1;
  std::string out;
};

int cmd_plan(const PlanArgs& a) {
  const auto image = parse_shape(a.image, "--image");
  const auto patch = parse_shape(a.patch, "--patch");
  const TilingPlan p = plan(image, patch, a.min_overlap,
                            parse_mirrors(a.mirrors, static_cast<int>(image.size())),
                            a.models);
  std::cout << plan_text(p);
  if (!a.out.empty()) {
    write_json_file(a.out, plan_to_json(p));
    std::cout << a.out << "\n";
  }
  return kExitOk;
}

// ---- anchors --------------------------------------------------------------

struct AnchorsArgs {
  std::string image;
  std::string format = "text";
  std::vector<double> ratios = {1.0};
};

int cmd_anchors_report(const AnchorsArgs& a) {
  PyramidSpec spec;
  spec.aspect_ratios = a.ratios;
  const auto report = pyramid_report(spec, parse_shape(a.image, "--image"));
  if (a.format == "csv") {
    std::cout << pyramid_report_csv(report);
  } else if (a.format == "text") {
    std::cout << pyramid_report_text(report);
  } else {
    throw UsageError("--format must be 'text' or 'csv'");
  }
  return kExitOk;
}

// ---- loss-eval ------------------------------------------------------------

struct LossArgs {
  std::string u;
  std::string v;
  std::string labels;
  double epsilon = 0.0;
  std::string grad;
};

int cmd_loss_eval(const LossArgs& a) {
  const auto u_rows = read_csv_table(a.u);
  if (u_rows.empty()) throw UsageError("--u: empty tensor file");
  LossBatch batch;
  batch.num_pixels = static_cast<int>(u_rows.size());
  batch.num_classes = static_cast<int>(u_rows.front().size());
  for (const auto& r : u_rows) batch.u.insert(batch.u.end(), r.begin(), r.end());
  if (!a.v.empty() == !a.labels.empty()) {
    throw UsageError("give exactly one of --v (one-hot) or --labels");
  }
  if (!a.v.empty()) {
    for (const auto& r : read_csv_table(a.v)) batch.v.insert(batch.v.end(), r.begin(), r.end());
  } else {
    std::vector<int> labels;
    for (const auto& r : read_csv_table(a.labels)) {
      for (const double x : r) labels.push_back(static_cast<int>(x));
    }
    batch = LossBatch::FromLabels(std::move(batch.u), batch.num_classes, labels);
  }
  LossOptions opts;
  opts.dice_epsilon = a.epsilon;
  const LossParts parts = dice_ce_parts(batch, opts);
  char line[128];
  std::snprintf(line, sizeof line, "loss,cross_entropy,dice\n%.17g,%.17g,%.17g\n",
                parts.total(), parts.cross_entropy, parts.dice);
  std::cout << line;
  if (!a.grad.empty()) {
    write_csv_table(a.grad, dice_ce_grad(batch, opts), batch.num_classes);
    std::cout << a.grad << "\n";
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"boxforge: detection consolidation and evaluation toolkit"};
  app.require_subcommand(1);
  int jobs = 0;
  app.add_option("--jobs", jobs, "Worker threads (0: all cores)");

  ConsolidateArgs ca;
  auto* consolidate = app.add_subcommand("consolidate", "Merge per-view detections");
  consolidate->add_option("--in", ca.in, "Detection JSON")->required();
  consolidate->add_option("--out", ca.out, "Output detection JSON (default stdout)");
  consolidate->add_option("--mode", ca.mode, "wbc, nms or merge2d3d");
  consolidate->add_option("--iou-thresh", ca.iou, "Clustering IoU threshold");
  consolidate->add_option("--sigma-patch", ca.sigma,
                          "Patch-center std-dev in px (default patch/4 with --plan-file)");
  consolidate->add_option("--expected-views", ca.expected_views,
                          "Views expected at every position");
  consolidate->add_option("--plan-file", ca.plan_file,
                          "Tiling plan JSON giving position-dependent view counts");
  consolidate->add_option("--slice-gap", ca.slice_gap, "merge2d3d slice adjacency");
  consolidate->add_option("--jobs", jobs, "Worker threads");

  EvaluateArgs ea;
  auto* evaluate = app.add_subcommand("evaluate", "Object- and patient-level AP");
  evaluate->add_option("--dets", ea.dets, "Detection JSON")->required();
  evaluate->add_option("--gt", ea.gt, "Ground-truth JSON")->required();
  evaluate->add_option("--iou-thresh", ea.iou, "Matching IoU threshold");
  evaluate->add_option("--out", ea.out, "EvalResult JSON");
  evaluate->add_option("--curves", ea.curves, "PR-curve CSV");
  evaluate->add_option("--jobs", jobs, "Worker threads");

  GenToyArgs ga;
  auto* gen = app.add_subcommand("gen-toy", "Generate synthetic toy images");
  gen->add_option("--task", ga.task, "shapes, patterns or scales");
  gen->add_option("--n", ga.n, "Number of images (default: split size)");
  gen->add_option("--split", ga.split, "train (1000), val (500) or test (1000)");
  gen->add_option("--seed", ga.seed, "Random seed");
  gen->add_option("--out-dir,--out", ga.out_dir, "Output directory");
  gen->add_option("--min-objects", ga.min_objects, "Objects per image, lower bound");
  gen->add_option("--max-objects", ga.max_objects, "Objects per image, upper bound");
  gen->add_option("--noise", ga.noise, "Uniform noise amplitude");
  gen->add_flag("--no-arrays", ga.no_arrays, "Only write ground_truth.json");
  gen->add_option("--jobs", jobs, "Worker threads");

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "Simulate per-view network predictions");
  sim->add_option("--gt", sa.gt, "Ground-truth JSON")->required();
  sim->add_option("--plan-file", sa.plan_file, "Tiling plan JSON");
  sim->add_option("--patch", sa.patch, "Patch shape when no plan is given (default: image)");
  sim->add_option("--min-overlap", sa.min_overlap, "Minimum patch overlap");
  sim->add_option("--mirrors", sa.mirrors, "all or none");
  sim->add_option("--models", sa.models, "Ensemble members");
  sim->add_option("--jitter", sa.jitter, "Coordinate jitter std-dev, px");
  sim->add_option("--fp-rate", sa.fp_rate, "Spurious boxes per view (Poisson mean)");
  sim->add_option("--score-model", sa.score_model, "default or perfect");
  sim->add_option("--seed", sa.seed, "Random seed");
  sim->add_option("--out", sa.out, "Detection JSON (default stdout)");
  sim->add_option("--jobs", jobs, "Worker threads");

  PlanArgs pa;
  auto* plan_cmd = app.add_subcommand("plan", "Print a patch tiling plan");
  plan_cmd->add_option("--image", pa.image, "Image shape, e.g. 320,320")->required();
  plan_cmd->add_option("--patch", pa.patch, "Patch shape")->required();
  plan_cmd->add_option("--min-overlap", pa.min_overlap, "Minimum patch overlap");
  plan_cmd->add_option("--mirrors", pa.mirrors, "all or none");
  plan_cmd->add_option("--models", pa.models, "Ensemble members");
  plan_cmd->add_option("--out", pa.out, "Plan JSON");

  AnchorsArgs aa;
  auto* anchors = app.add_subcommand("anchors", "Anchor pyramid tools");
  anchors->require_subcommand(1);
  auto* report = anchors->add_subcommand("report", "Per-level grid and anchor counts");
  report->add_option("--image", aa.image, "Image shape")->required();
  report->add_option("--format", aa.format, "text or csv");
  report->add_option("--ratios", aa.ratios, "Aspect ratios (width:height)");

  LossArgs la;
  auto* loss = app.add_subcommand("loss-eval", "Evaluate the Dice + CE loss");
  loss->add_option("--u", la.u, "Softmax CSV, one pixel per row")->required();
  loss->add_option("--v", la.v, "One-hot target CSV");
  loss->add_option("--labels", la.labels, "Integer label CSV");
  loss->add_option("--epsilon", la.epsilon, "Dice denominator epsilon");
  loss->add_option("--grad", la.grad, "Write dL/du CSV");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    set_num_threads(jobs);
    if (consolidate->parsed()) return cmd_consolidate(ca);
    if (evaluate->parsed()) return cmd_evaluate(ea);
    if (gen->parsed()) return cmd_gen_toy(ga);
    if (sim->parsed()) return cmd_simulate(sa);
    if (plan_cmd->parsed()) return cmd_plan(pa);
    if (report->parsed()) return cmd_anchors_report(aa);
    if (loss->parsed()) return cmd_loss_eval(la);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace boxforge
