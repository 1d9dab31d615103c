// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stone_needle/eval/routing_eval.hpp"

namespace stone_needle::eval {

struct LabelMetrics {
  Selection label;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t support = 0;  // row sum
};

struct Metrics {
  double accuracy = 0.0;
  std::vector<LabelMetrics> per_label;  // same order as the matrix labels
  // Means over labels with non-zero support.
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
};

// Zero denominators give 0. Throws EmptyMatrix when the matrix has no counts.
Metrics compute_metrics(const ConfusionMatrix& cm);

Json metrics_json(const ConfusionMatrix& cm, const Metrics& m);
// Aligned plain-text report: the metric table followed by the matrix.
std::string metrics_table(const ConfusionMatrix& cm, const Metrics& m);

}  // namespace stone_needle::eval
