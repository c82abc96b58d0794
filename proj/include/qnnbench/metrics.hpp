#pragma once

#include <vector>

namespace qnnbench {

/// Fraction of equal entries.
double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth);

/// Support-weighted mean of per-class F1 over the classes present in
/// `truth`; F1_c = 0 when precision + recall = 0.
double weighted_f1(const std::vector<int>& predicted, const std::vector<int>& truth);

}  // namespace qnnbench
