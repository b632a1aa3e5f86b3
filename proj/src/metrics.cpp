#include "erc/metrics.hpp"

#include <iomanip>
#include <sstream>

#include "erc/error.hpp"

namespace erc {

MetricsReport compute_metrics(std::span<const int> predictions, std::span<const int> labels,
                              const Mask& mask, const std::vector<std::string>& class_names) {
  if (predictions.size() != labels.size() || mask.size() != labels.size()) {
    throw DimensionError("compute_metrics: predictions, labels and mask sizes disagree");
  }
  const int c = static_cast<int>(class_names.size());
  MetricsReport rep;
  rep.confusion.assign(static_cast<std::size_t>(c), std::vector<int>(c, 0));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!mask[i]) continue;
    const int y = labels[i], p = predictions[i];
    if (y < 0 || y >= c || p < 0 || p >= c) {
      throw DataError("compute_metrics: class index out of range");
    }
    rep.confusion[y][p]++;
    rep.total++;
  }
  if (rep.total == 0) throw DegenerateError("compute_metrics: no valid utterances");

  for (int i = 0; i < c; ++i) {
    ClassMetrics cm;
    cm.name = class_names[i];
    int tp = rep.confusion[i][i];
    int gold = 0, predicted = 0;
    for (int j = 0; j < c; ++j) {
      gold += rep.confusion[i][j];
      predicted += rep.confusion[j][i];
    }
    cm.count = gold;
    cm.recall = gold > 0 ? static_cast<double>(tp) / gold : 0.0;
    cm.accuracy = cm.recall;
    cm.precision = predicted > 0 ? static_cast<double>(tp) / predicted : 0.0;
    cm.f1 = (cm.precision + cm.recall) > 0.0
                ? 2.0 * cm.precision * cm.recall / (cm.precision + cm.recall)
                : 0.0;
    if (gold > 0) {
      const double weight = static_cast<double>(gold) / rep.total;
      rep.w_acc += weight * cm.accuracy;
      rep.w_f1 += weight * cm.f1;
    }
    rep.per_class.push_back(std::move(cm));
  }
  return rep;
}

std::string MetricsReport::to_csv() const {
  std::ostringstream os;
  os << "class,count,accuracy,precision,recall,f1\n";
  os << std::setprecision(10);
  for (const auto& cm : per_class) {
    os << cm.name << "," << cm.count << "," << cm.accuracy << "," << cm.precision << ","
       << cm.recall << "," << cm.f1 << "\n";
  }
  os << "weighted," << total << "," << w_acc << ",,," << w_f1 << "\n";
  return os.str();
}

std::string MetricsReport::to_text() const {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4);
  os << std::left << std::setw(14) << "class" << std::right << std::setw(7) << "count"
     << std::setw(9) << "acc" << std::setw(9) << "prec" << std::setw(9) << "recall"
     << std::setw(9) << "f1" << "\n";
  for (const auto& cm : per_class) {
    os << std::left << std::setw(14) << cm.name << std::right << std::setw(7) << cm.count
       << std::setw(9) << cm.accuracy << std::setw(9) << cm.precision << std::setw(9)
       << cm.recall << std::setw(9) << cm.f1 << "\n";
  }
  os << std::left << std::setw(14) << "weighted" << std::right << std::setw(7) << total
     << std::setw(9) << w_acc << std::setw(9) << "" << std::setw(9) << "" << std::setw(9)
     << w_f1 << "\n";
  return os.str();
}

}  // namespace erc
