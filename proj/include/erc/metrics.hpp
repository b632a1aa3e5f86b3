#pragma once

#include <span>
#include <string>
#include <vector>

#include "erc/tensor.hpp"

namespace erc {

struct ClassMetrics {
  std::string name;
  int count = 0;  // gold occurrences
  double accuracy = 0;  // per-class accuracy (= recall)
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

struct MetricsReport {
  double w_acc = 0;
  double w_f1 = 0;
  int total = 0;  // valid utterances
  std::vector<ClassMetrics> per_class;
  std::vector<std::vector<int>> confusion;  // [gold][predicted]

  // Per-class rows plus a weighted summary row.
  std::string to_csv() const;
  std::string to_text() const;
};

// Weighted metrics over valid rows: w-Acc = sum_i (N_i/N) Acc_i and
// w-F1 = sum_i (N_i/N) F1_i, with classes absent from the labels
// contributing weight 0 and zero-denominator precision/recall defined as
// 0. Throws DegenerateError when no row is valid.
MetricsReport compute_metrics(std::span<const int> predictions, std::span<const int> labels,
                              const Mask& mask, const std::vector<std::string>& class_names);

}  // namespace erc
