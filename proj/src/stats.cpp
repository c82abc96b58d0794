#include "qnnbench/stats.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace qnnbench {

std::vector<double> midranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

namespace {

// Sum of t^3 - t over tie groups.
double tie_term(std::span<const double> values) {
  std::map<double, double> counts;
  for (double v : values) counts[v] += 1.0;
  double acc = 0.0;
  for (const auto& [_, t] : counts) acc += t * t * t - t;
  return acc;
}

double normal_two_sided(double deviation, double sd) {
  if (sd <= 0.0) return 1.0;
  const double z = std::max(0.0, (std::abs(deviation) - 0.5) / sd);
  return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

double chi2_survival(double x, int df) {
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * df, 0.5 * x);
}

struct SignedRanks {
  std::vector<double> ranks;  // mid-ranks of |d|
  std::vector<bool> positive;
  double w_plus = 0.0;
  double w_minus = 0.0;
  double ties = 0.0;
};

SignedRanks signed_ranks(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("Wilcoxon needs paired samples of equal length");
  std::vector<double> d, mag;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double di = a[i] - b[i];
    if (di != 0.0) {
      d.push_back(di);
      mag.push_back(std::abs(di));
    }
  }
  if (d.empty()) throw std::invalid_argument("Wilcoxon: all differences are zero");
  if (d.size() < 5) {
    throw std::invalid_argument("Wilcoxon needs at least 5 non-zero differences, got " + std::to_string(d.size()));
  }
  SignedRanks s;
  s.ranks = midranks(mag);
  s.ties = tie_term(mag);
  for (std::size_t i = 0; i < d.size(); ++i) {
    s.positive.push_back(d[i] > 0.0);
    (d[i] > 0.0 ? s.w_plus : s.w_minus) += s.ranks[i];
  }
  return s;
}

SignificanceResult make(const char* test, double stat, double p, std::size_t n, PMethod m) {
  return {test, stat, std::clamp(p, 0.0, 1.0), static_cast<int>(n), m};
}

}  // namespace

SignificanceResult wilcoxon_exact(std::span<const double> a, std::span<const double> b) {
  const auto s = signed_ranks(a, b);
  const std::size_t n = s.ranks.size();
  if (n > static_cast<std::size_t>(kWilcoxonExactMax) + 40) throw std::invalid_argument("too many pairs for exact Wilcoxon");
  // Doubled mid-ranks are integers; count sign patterns by doubled W+.
  std::vector<int> r2(n);
  int total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    r2[i] = static_cast<int>(std::lround(2.0 * s.ranks[i]));
    total += r2[i];
  }
  std::vector<double> dist(static_cast<std::size_t>(total) + 1, 0.0);
  dist[0] = 1.0;
  int reach = 0;
  for (int r : r2) {
    for (int v = reach; v >= 0; --v) {
      if (dist[static_cast<std::size_t>(v)] != 0.0) dist[static_cast<std::size_t>(v + r)] += dist[static_cast<std::size_t>(v)];
    }
    reach += r;
  }
  const int w = static_cast<int>(std::lround(2.0 * s.w_plus));
  const double all = std::ldexp(1.0, static_cast<int>(n));
  double lower = 0.0, upper = 0.0;
  for (int v = 0; v <= total; ++v) {
    if (v <= w) lower += dist[static_cast<std::size_t>(v)];
    if (v >= w) upper += dist[static_cast<std::size_t>(v)];
  }
  const double p = 2.0 * std::min(lower, upper) / all;
  return make("wilcoxon", std::min(s.w_plus, s.w_minus), p, n, PMethod::Exact);
}

SignificanceResult wilcoxon_approx(std::span<const double> a, std::span<const double> b) {
  const auto s = signed_ranks(a, b);
  const double n = static_cast<double>(s.ranks.size());
  const double mean = n * (n + 1.0) / 4.0;
  const double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - s.ties / 48.0;
  const double p = normal_two_sided(s.w_plus - mean, std::sqrt(std::max(var, 0.0)));
  return make("wilcoxon", std::min(s.w_plus, s.w_minus), p, s.ranks.size(), PMethod::Approximate);
}

SignificanceResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
  const auto s = signed_ranks(a, b);
  return s.ranks.size() <= static_cast<std::size_t>(kWilcoxonExactMax) ? wilcoxon_exact(a, b) : wilcoxon_approx(a, b);
}

namespace {

struct Pooled {
  std::vector<double> ranks;
  double u_a = 0.0;
  double u_b = 0.0;
  double ties = 0.0;
};

Pooled pool(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("Mann-Whitney needs two non-empty samples");
  std::vector<double> all(a.begin(), a.end());
  all.insert(all.end(), b.begin(), b.end());
  Pooled p;
  p.ranks = midranks(all);
  p.ties = tie_term(all);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double ra = std::accumulate(p.ranks.begin(), p.ranks.begin() + static_cast<std::ptrdiff_t>(a.size()), 0.0);
  p.u_a = ra - na * (na + 1.0) / 2.0;
  p.u_b = na * nb - p.u_a;
  return p;
}

}  // namespace

SignificanceResult mann_whitney_exact(std::span<const double> a, std::span<const double> b) {
  const auto p = pool(a, b);
  const std::size_t n = p.ranks.size();
  if (n > 20) throw std::invalid_argument("too many samples for exact Mann-Whitney");
  const std::size_t na = a.size();
  std::vector<long> r2(n);
  for (std::size_t i = 0; i < n; ++i) r2[i] = std::lround(2.0 * p.ranks[i]);
  long observed = 0;
  for (std::size_t i = 0; i < na; ++i) observed += r2[i];
  double lower = 0.0, upper = 0.0, count = 0.0;
  for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) != na) continue;
    long sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1U << i)) sum += r2[i];
    }
    count += 1.0;
    if (sum <= observed) lower += 1.0;
    if (sum >= observed) upper += 1.0;
  }
  return make("mann_whitney", std::min(p.u_a, p.u_b), 2.0 * std::min(lower, upper) / count, n, PMethod::Exact);
}

SignificanceResult mann_whitney_approx(std::span<const double> a, std::span<const double> b) {
  const auto p = pool(a, b);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double n = na + nb;
  const double var = na * nb / 12.0 * ((n + 1.0) - (n > 1.0 ? p.ties / (n * (n - 1.0)) : 0.0));
  const double pv = normal_two_sided(p.u_a - na * nb / 2.0, std::sqrt(std::max(var, 0.0)));
  return make("mann_whitney", std::min(p.u_a, p.u_b), pv, p.ranks.size(), PMethod::Approximate);
}

SignificanceResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
  return a.size() + b.size() <= static_cast<std::size_t>(kMannWhitneyExactMax) ? mann_whitney_exact(a, b)
                                                                               : mann_whitney_approx(a, b);
}

SignificanceResult kruskal_wallis(const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 3) throw std::invalid_argument("Kruskal-Wallis needs at least 3 groups");
  std::vector<double> all;
  for (const auto& g : groups) {
    if (g.empty()) throw std::invalid_argument("Kruskal-Wallis: empty group");
    all.insert(all.end(), g.begin(), g.end());
  }
  const auto ranks = midranks(all);
  const double n = static_cast<double>(all.size());
  double acc = 0.0;
  std::size_t offset = 0;
  for (const auto& g : groups) {
    const double r = std::accumulate(ranks.begin() + static_cast<std::ptrdiff_t>(offset),
                                     ranks.begin() + static_cast<std::ptrdiff_t>(offset + g.size()), 0.0);
    acc += r * r / static_cast<double>(g.size());
    offset += g.size();
  }
  const double correction = 1.0 - tie_term(all) / (n * n * n - n);
  if (correction <= 1e-12) return make("kruskal_wallis", 0.0, 1.0, all.size(), PMethod::Approximate);
  const double h = std::max(0.0, (12.0 / (n * (n + 1.0)) * acc - 3.0 * (n + 1.0)) / correction);
  return make("kruskal_wallis", h, chi2_survival(h, static_cast<int>(groups.size()) - 1), all.size(),
              PMethod::Approximate);
}

SignificanceResult friedman(const std::vector<std::vector<double>>& blocks) {
  if (blocks.size() < 2) throw std::invalid_argument("Friedman needs at least 2 blocks");
  const std::size_t k = blocks.front().size();
  if (k < 3) throw std::invalid_argument("Friedman needs at least 3 treatments");
  std::vector<double> rank_sums(k, 0.0);
  double ties = 0.0;
  for (const auto& row : blocks) {
    if (row.size() != k) throw std::invalid_argument("Friedman: ragged block matrix");
    const auto r = midranks(row);
    for (std::size_t j = 0; j < k; ++j) rank_sums[j] += r[j];
    ties += tie_term(row);
  }
  const double n = static_cast<double>(blocks.size());
  const double kd = static_cast<double>(k);
  double ss = 0.0;
  for (double r : rank_sums) ss += r * r;
  const double correction = 1.0 - ties / (n * (kd * kd * kd - kd));
  if (correction <= 1e-12) return make("friedman", 0.0, 1.0, blocks.size(), PMethod::Approximate);
  const double q = std::max(0.0, (12.0 / (n * kd * (kd + 1.0)) * ss - 3.0 * n * (kd + 1.0)) / correction);
  return make("friedman", q, chi2_survival(q, static_cast<int>(k) - 1), blocks.size(), PMethod::Approximate);
}

}  // namespace qnnbench
