#pragma once

#include <span>
#include <string>
#include <vector>

namespace qnnbench {

enum class PMethod { Exact, Approximate };

struct SignificanceResult {
  std::string test;
  double statistic = 0.0;
  double p_value = 1.0;  // two-sided
  int n = 0;
  PMethod method = PMethod::Approximate;
};

/// Mid-ranks (1-based, ties share the mean rank).
std::vector<double> midranks(std::span<const double> values);

/// Paired two-sided test. Zero differences are dropped; at least 5 non-zero
/// differences are required. Statistic is min(W+, W-). Exact null
/// distribution for n <= 25 (ties included), otherwise normal approximation
/// with tie and continuity correction.
SignificanceResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b);
SignificanceResult wilcoxon_exact(std::span<const double> a, std::span<const double> b);
SignificanceResult wilcoxon_approx(std::span<const double> a, std::span<const double> b);

/// Two independent samples. Statistic is min(U_a, U_b). Exact over all
/// C(N, n_a) rank arrangements when N <= 12, otherwise tie-corrected
/// normal approximation with continuity correction.
SignificanceResult mann_whitney_u(std::span<const double> a, std::span<const double> b);
SignificanceResult mann_whitney_exact(std::span<const double> a, std::span<const double> b);
SignificanceResult mann_whitney_approx(std::span<const double> a, std::span<const double> b);

/// H statistic with tie correction, chi-squared with k-1 degrees of freedom.
/// Needs at least 3 non-empty groups.
SignificanceResult kruskal_wallis(const std::vector<std::vector<double>>& groups);

/// blocks[i][j] = response of treatment j in block i. Needs >= 3 treatments
/// and >= 2 blocks. Tie-corrected rank statistic, chi-squared with k-1 df.
SignificanceResult friedman(const std::vector<std::vector<double>>& blocks);

inline constexpr int kWilcoxonExactMax = 25;
inline constexpr int kMannWhitneyExactMax = 12;

}  // namespace qnnbench
