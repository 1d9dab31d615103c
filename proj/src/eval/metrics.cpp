// SPDX-License-Identifier: Apache-2.0

#include "stone_needle/eval/metrics.hpp"

#include <algorithm>
#include <cstdio>

#include "stone_needle/error.hpp"

namespace stone_needle::eval {

namespace {

double ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

Metrics compute_metrics(const ConfusionMatrix& cm) {
  const auto n = cm.labels.size();
  auto total = cm.total();
  if (total == 0) throw Error(ErrorCode::EmptyMatrix, "confusion matrix has no counts");

  Metrics m;
  std::uint64_t correct = 0;
  std::vector<std::uint64_t> col_sum(n, 0);
  for (std::size_t r = 0; r < n; ++r) {
    correct += cm.counts[r][r];
    for (std::size_t c = 0; c < n; ++c) col_sum[c] += cm.counts[r][c];
  }
  m.accuracy = ratio(correct, total);

  std::size_t supported = 0;
  for (std::size_t l = 0; l < n; ++l) {
    LabelMetrics lm;
    lm.label = cm.labels[l];
    for (auto v : cm.counts[l]) lm.support += v;
    lm.precision = ratio(cm.counts[l][l], col_sum[l]);
    lm.recall = ratio(cm.counts[l][l], lm.support);
    auto pr = lm.precision + lm.recall;
    lm.f1 = pr == 0.0 ? 0.0 : 2.0 * lm.precision * lm.recall / pr;
    if (lm.support > 0) {
      ++supported;
      m.macro_precision += lm.precision;
      m.macro_recall += lm.recall;
      m.macro_f1 += lm.f1;
    }
    m.per_label.push_back(lm);
  }
  m.macro_precision /= static_cast<double>(supported);
  m.macro_recall /= static_cast<double>(supported);
  m.macro_f1 /= static_cast<double>(supported);
  return m;
}

Json metrics_json(const ConfusionMatrix& cm, const Metrics& m) {
  Json labels = Json::array();
  for (const auto& l : cm.labels) labels.push_back(label_name(l));
  Json per_label = Json::array();
  for (const auto& lm : m.per_label)
    per_label.push_back(Json{{"label", label_name(lm.label)},
                             {"precision", lm.precision},
                             {"recall", lm.recall},
                             {"f1", lm.f1},
                             {"support", lm.support}});
  return Json{{"cases", cm.total()},
              {"accuracy", m.accuracy},
              {"macro", Json{{"precision", m.macro_precision},
                             {"recall", m.macro_recall},
                             {"f1", m.macro_f1}}},
              {"per_label", std::move(per_label)},
              {"confusion_matrix", Json{{"labels", std::move(labels)}, {"counts", cm.counts}}}};
}

std::string metrics_table(const ConfusionMatrix& cm, const Metrics& m) {
  std::size_t width = 5;  // "label", "macro"
  for (const auto& l : cm.labels) width = std::max(width, label_name(l).size());

  std::string out;
  char buf[256];
  auto row = [&](const std::string& name, double p, double r, double f, const std::string& sup) {
    std::snprintf(buf, sizeof buf, "%-*s  %9.4f  %9.4f  %9.4f  %7s\n", static_cast<int>(width),
                  name.c_str(), p, r, f, sup.c_str());
    out += buf;
  };

  std::snprintf(buf, sizeof buf, "%-*s  %9s  %9s  %9s  %7s\n", static_cast<int>(width), "label",
                "precision", "recall", "f1", "support");
  out += buf;
  for (const auto& lm : m.per_label)
    row(label_name(lm.label), lm.precision, lm.recall, lm.f1, std::to_string(lm.support));
  row("macro", m.macro_precision, m.macro_recall, m.macro_f1, std::to_string(cm.total()));
  std::snprintf(buf, sizeof buf, "\naccuracy %.4f over %llu cases\n", m.accuracy,
                static_cast<unsigned long long>(cm.total()));
  out += buf;

  out += "\nconfusion (rows = expected, columns = predicted)\n";
  std::snprintf(buf, sizeof buf, "%-*s", static_cast<int>(width), "");
  out += buf;
  for (const auto& l : cm.labels) {
    std::snprintf(buf, sizeof buf, "  %*s", static_cast<int>(width), label_name(l).c_str());
    out += buf;
  }
  out += '\n';
  for (std::size_t r = 0; r < cm.labels.size(); ++r) {
    std::snprintf(buf, sizeof buf, "%-*s", static_cast<int>(width), label_name(cm.labels[r]).c_str());
    out += buf;
    for (auto c : cm.counts[r]) {
      std::snprintf(buf, sizeof buf, "  %*llu", static_cast<int>(width),
                    static_cast<unsigned long long>(c));
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace stone_needle::eval
