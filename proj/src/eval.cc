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

#include "boxforge/eval.h"

#include <algorithm>
#include <numeric>
#include <set>

#include "boxforge/error.h"

namespace boxforge {

std::vector<MatchRecord> match_predictions(const std::vector<Detection>& dets,
                                           const std::vector<GroundTruthObject>& gts,
                                           double iou_threshold) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dets[a].score > dets[b].score;
  });

  std::map<std::pair<std::string, int>, std::vector<std::size_t>> gt_index;
  for (std::size_t g = 0; g < gts.size(); ++g) {
    gt_index[{gts[g].image_id, gts[g].class_id}].push_back(g);
  }
  std::vector<bool> claimed(gts.size(), false);

  std::vector<MatchRecord> out;
  out.reserve(dets.size());
  for (const std::size_t i : order) {
    const Detection& d = dets[i];
    MatchRecord rec{i, std::nullopt, d.score, d.class_id};
    const auto it = gt_index.find({d.image_id, d.class_id});
    if (it != gt_index.end()) {
      double best = -1.0;
      for (const std::size_t g : it->second) {
        if (claimed[g]) continue;
        const double v = iou(d.box, gts[g].box);
        if (v >= iou_threshold && v > best) {
          best = v;
          rec.gt = g;
        }
      }
      if (rec.gt) claimed[*rec.gt] = true;
    }
    out.push_back(rec);
  }
  return out;
}

std::vector<PrPoint> pr_curve(const std::vector<MatchRecord>& ranked,
                              std::size_t num_gt) {
  std::vector<PrPoint> curve;
  curve.reserve(ranked.size());
  std::size_t tp = 0;
  for (std::size_t n = 0; n < ranked.size(); ++n) {
    if (ranked[n].gt) ++tp;
    PrPoint p;
    p.precision = static_cast<double>(tp) / static_cast<double>(n + 1);
    p.recall = num_gt ? static_cast<double>(tp) / static_cast<double>(num_gt) : 0.0;
    p.score = ranked[n].score;
    curve.push_back(p);
  }
  return curve;
}

std::optional<double> average_precision(const std::vector<MatchRecord>& ranked,
                                        std::size_t num_gt) {
  if (num_gt == 0) {
    if (ranked.empty()) return std::nullopt;
    return 0.0;
  }
  const auto curve = pr_curve(ranked, num_gt);
  // Envelope from the right, then integrate over the recall steps.
  std::vector<double> envelope(curve.size());
  double running = 0.0;
  for (std::size_t n = curve.size(); n-- > 0;) {
    running = std::max(running, curve[n].precision);
    envelope[n] = running;
  }
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t n = 0; n < curve.size(); ++n) {
    if (curve[n].recall > prev_recall) {
      ap += (curve[n].recall - prev_recall) * envelope[n];
      prev_recall = curve[n].recall;
    }
  }
  return ap;
}

EvalResult mean_ap(const std::vector<Detection>& dets,
                   const std::vector<GroundTruthObject>& gts,
                   double iou_threshold) {
  EvalResult result;
  result.iou_threshold = iou_threshold;
  const auto matches = match_predictions(dets, gts, iou_threshold);

  std::set<int> classes;
  for (const auto& g : gts) {
    classes.insert(g.class_id);
    ++result.per_class_stats[g.class_id].num_gt;
  }
  std::map<int, std::vector<MatchRecord>> by_class;
  for (const auto& m : matches) {
    classes.insert(m.class_id);
    by_class[m.class_id].push_back(m);
    auto& st = result.per_class_stats[m.class_id];
    ++st.num_det;
    if (m.gt) ++st.true_positives;
  }

  double sum = 0.0;
  for (const int c : classes) {
    const auto& ranked = by_class[c];
    const std::size_t num_gt = result.per_class_stats[c].num_gt;
    const auto ap = average_precision(ranked, num_gt);
    if (!ap) continue;
    result.per_class_ap[c] = *ap;
    result.pr_curves[c] = pr_curve(ranked, num_gt);
    sum += *ap;
  }
  if (result.per_class_ap.empty()) {
    throw UsageError("mean_ap: no class has ground truth or predictions");
  }
  result.map_value = sum / static_cast<double>(result.per_class_ap.size());
  return result;
}

std::map<int, double> patient_level_ap(const std::vector<Detection>& dets,
                                       const PatientLabels& patient_labels) {
  std::set<std::string> known;
  for (const auto& [key, label] : patient_labels) known.insert(key.first);

  std::map<std::pair<std::string, int>, double> max_score;
  for (const auto& d : dets) {
    if (!known.count(d.patient_id)) {
      throw UsageError("patient_level_ap: unknown patient '" + d.patient_id + "'");
    }
    auto& s = max_score[{d.patient_id, d.class_id}];
    s = std::max(s, d.score);
  }

  // Map keys iterate by (patient, class); regroup per class keeping patient
  // order, which breaks score ties.
  std::map<int, std::vector<MatchRecord>> per_class;
  std::map<int, std::size_t> positives;
  std::size_t idx = 0;
  for (const auto& [key, label] : patient_labels) {
    const auto it = max_score.find(key);
    MatchRecord rec;
    rec.detection = idx++;
    rec.score = it == max_score.end() ? 0.0 : it->second;
    rec.class_id = key.second;
    if (label) {
      rec.gt = 0;
      ++positives[key.second];
    }
    per_class[key.second].push_back(rec);
  }

  std::map<int, double> out;
  for (auto& [cls, recs] : per_class) {
    if (!positives[cls]) continue;
    std::stable_sort(recs.begin(), recs.end(),
                     [](const MatchRecord& a, const MatchRecord& b) {
                       return a.score > b.score;
                     });
    out[cls] = *average_precision(recs, positives[cls]);
  }
  return out;
}

}  // namespace boxforge
