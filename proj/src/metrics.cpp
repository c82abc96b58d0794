#include "qnnbench/metrics.hpp"

#include <map>
#include <stdexcept>

namespace qnnbench {

namespace {
void check(const std::vector<int>& predicted, const std::vector<int>& truth) {
  if (predicted.empty()) throw std::invalid_argument("metrics need at least one prediction");
  if (predicted.size() != truth.size()) throw std::invalid_argument("prediction/label length mismatch");
}
}  // namespace

double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth) {
  check(predicted, truth);
  std::size_t ok = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) ok += predicted[i] == truth[i];
  return static_cast<double>(ok) / static_cast<double>(truth.size());
}

double weighted_f1(const std::vector<int>& predicted, const std::vector<int>& truth) {
  check(predicted, truth);
  std::map<int, double> tp, support, pred_count;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    support[truth[i]] += 1.0;
    pred_count[predicted[i]] += 1.0;
    if (predicted[i] == truth[i]) tp[truth[i]] += 1.0;
  }
  double acc = 0.0;
  for (const auto& [c, s] : support) {
    const double t = tp[c];
    const double p = pred_count[c];
    // F1 = 2TP / (2TP + FP + FN) = 2TP / (predicted + support)
    const double f1 = t > 0.0 ? 2.0 * t / (p + s) : 0.0;
    acc += s * f1;
  }
  return acc / static_cast<double>(truth.size());
}

}  // namespace qnnbench
