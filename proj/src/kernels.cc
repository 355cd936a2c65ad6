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

#include "boxforge/kernels.h"

#include <omp.h>

#include <algorithm>
#include <exception>
#include <map>
#include <numeric>

namespace boxforge {

void set_num_threads(int n) {
  if (n <= 0) n = omp_get_num_procs();
  omp_set_num_threads(n);
}

int max_threads() { return omp_get_max_threads(); }

std::vector<std::size_t> greedy_order(const std::vector<Detection>& dets) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> measures(dets.size());
  for (std::size_t i = 0; i < dets.size(); ++i) measures[i] = measure(dets[i].box);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (dets[a].score != dets[b].score) return dets[a].score > dets[b].score;
    if (measures[a] != measures[b]) return measures[a] > measures[b];
    return a < b;
  });
  return order;
}

std::vector<double> iou_matrix(std::span<const Box> a, std::span<const Box> b) {
  const std::ptrdiff_t rows = static_cast<std::ptrdiff_t>(a.size());
  const std::size_t cols = b.size();
  std::vector<double> out(a.size() * cols);
  // Dimension errors are rethrown after the parallel region.
  std::exception_ptr error;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    try {
      for (std::size_t j = 0; j < cols; ++j) {
        out[static_cast<std::size_t>(i) * cols + j] = iou(a[i], b[j]);
      }
    } catch (...) {
#pragma omp critical(boxforge_kernel_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

std::vector<std::pair<std::string, std::vector<Detection>>> group_by_image(
    const std::vector<Detection>& dets) {
  std::map<std::string, std::vector<Detection>> groups;
  for (const auto& d : dets) groups[d.image_id].push_back(d);
  return {std::make_move_iterator(groups.begin()),
          std::make_move_iterator(groups.end())};
}

std::vector<Detection> for_each_image(const std::vector<Detection>& dets,
                                      const ImageJob& job) {
  const auto groups = group_by_image(dets);
  std::vector<std::vector<Detection>> results(groups.size());
  std::exception_ptr error;
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(groups.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t g = 0; g < n; ++g) {
    try {
      results[g] = job(groups[g].second);
    } catch (...) {
#pragma omp critical(boxforge_kernel_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  std::vector<Detection> out;
  for (auto& r : results) {
    out.insert(out.end(), std::make_move_iterator(r.begin()),
               std::make_move_iterator(r.end()));
  }
  return out;
}

namespace serial {

std::vector<double> iou_matrix(std::span<const Box> a, std::span<const Box> b) {
  std::vector<double> out;
  out.reserve(a.size() * b.size());
  for (const auto& x : a) {
    for (const auto& y : b) out.push_back(iou(x, y));
  }
  return out;
}

std::vector<Detection> for_each_image(const std::vector<Detection>& dets,
                                      const ImageJob& job) {
  std::vector<Detection> out;
  for (const auto& [id, group] : group_by_image(dets)) {
    auto r = job(group);
    out.insert(out.end(), r.begin(), r.end());
  }
  return out;
}

}  // namespace serial
}  // namespace boxforge
