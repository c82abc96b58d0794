#include "qnnbench/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "qnnbench/rng.hpp"

namespace qnnbench {

std::string_view reduction_name(Reduction r) noexcept { return r == Reduction::PCA ? "PCA" : "LDA"; }

Reduction reduction_from_name(std::string_view name) {
  if (name == "PCA") return Reduction::PCA;
  if (name == "LDA") return Reduction::LDA;
  throw std::invalid_argument("unknown preprocessing '" + std::string(name) + "'");
}

namespace {

Eigen::MatrixXd to_eigen(const Matrix& x) {
  if (x.empty()) return {};
  Eigen::MatrixXd m(static_cast<Eigen::Index>(x.size()), static_cast<Eigen::Index>(x.front().size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].size() != x.front().size()) throw std::invalid_argument("ragged matrix");
    for (std::size_t j = 0; j < x[i].size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = x[i][j];
  }
  return m;
}

// Largest-magnitude entry positive; ties resolved toward the lower index.
void fix_sign(Eigen::VectorXd& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (std::abs(v(i)) > std::abs(v(best)) * (1.0 + 1e-12)) best = i;
  }
  if (v(best) < 0.0) v = -v;
}

// Columns of `vecs` ordered by descending `vals`, first `k` taken.
Projection assemble(const Eigen::VectorXd& mean, const Eigen::VectorXd& vals, const Eigen::MatrixXd& vecs,
                    int k, bool normalize) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(vals.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return vals(a) > vals(b); });
  Projection p;
  p.mean.assign(mean.data(), mean.data() + mean.size());
  for (int c = 0; c < k; ++c) {
    Eigen::VectorXd v = vecs.col(order[static_cast<std::size_t>(c)]);
    if (normalize) v.normalize();
    fix_sign(v);
    p.basis.emplace_back(v.data(), v.data() + v.size());
    p.eigenvalues.push_back(vals(order[static_cast<std::size_t>(c)]));
  }
  return p;
}

}  // namespace

Matrix Projection::transform(const Matrix& x) const {
  Matrix out;
  out.reserve(x.size());
  for (const auto& row : x) {
    if (row.size() != mean.size()) throw std::invalid_argument("projection input width mismatch");
    std::vector<double> z(basis.size(), 0.0);
    for (std::size_t k = 0; k < basis.size(); ++k) {
      for (std::size_t j = 0; j < row.size(); ++j) z[k] += basis[k][j] * (row[j] - mean[j]);
    }
    out.push_back(std::move(z));
  }
  return out;
}

Projection pca_fit(const Matrix& x, int out_dims) {
  if (x.size() < 2) throw std::invalid_argument("PCA needs at least two samples");
  const Eigen::MatrixXd m = to_eigen(x);
  if (out_dims < 1 || out_dims > m.cols()) {
    throw std::invalid_argument("PCA out_dims must be in [1, " + std::to_string(m.cols()) + "]");
  }
  const Eigen::VectorXd mean = m.colwise().mean();
  const Eigen::MatrixXd centred = m.rowwise() - mean.transpose();
  const Eigen::MatrixXd cov = centred.transpose() * centred / static_cast<double>(m.rows() - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  if (es.info() != Eigen::Success) throw std::runtime_error("PCA eigendecomposition failed");
  return assemble(mean, es.eigenvalues(), es.eigenvectors(), out_dims, false);
}

Matrix pca_fit_transform(const Matrix& x, int out_dims, Projection* fitted) {
  auto p = pca_fit(x, out_dims);
  auto out = p.transform(x);
  if (fitted) *fitted = std::move(p);
  return out;
}

int lda_max_dims(const Matrix& x, const std::vector<int>& y) {
  const std::set<int> classes(y.begin(), y.end());
  const int d = x.empty() ? 0 : static_cast<int>(x.front().size());
  return std::min(d, static_cast<int>(classes.size()) - 1);
}

Projection lda_fit(const Matrix& x, const std::vector<int>& y, int out_dims) {
  if (x.size() != y.size()) throw std::invalid_argument("LDA feature/label count mismatch");
  const Eigen::MatrixXd m = to_eigen(x);
  std::map<int, std::vector<Eigen::Index>> members;
  for (std::size_t i = 0; i < y.size(); ++i) members[y[i]].push_back(static_cast<Eigen::Index>(i));
  for (const auto& [c, rows] : members) {
    if (rows.size() < 2) throw std::invalid_argument("LDA: class " + std::to_string(c) + " has fewer than 2 samples");
  }
  const int max_dims = lda_max_dims(x, y);
  if (out_dims < 1 || out_dims > max_dims) {
    throw std::invalid_argument("LDA out_dims=" + std::to_string(out_dims) + " exceeds the limit of " +
                                std::to_string(max_dims) + " (min(features, classes - 1))");
  }
  const Eigen::Index d = m.cols();
  const Eigen::VectorXd mean = m.colwise().mean();
  Eigen::MatrixXd sw = Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXd sb = Eigen::MatrixXd::Zero(d, d);
  for (const auto& [c, rows] : members) {
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(d);
    for (auto r : rows) mu += m.row(r).transpose();
    mu /= static_cast<double>(rows.size());
    for (auto r : rows) {
      const Eigen::VectorXd dv = m.row(r).transpose() - mu;
      sw += dv * dv.transpose();
    }
    const Eigen::VectorXd dm = mu - mean;
    sb += static_cast<double>(rows.size()) * dm * dm.transpose();
  }
  sw += 1e-6 * Eigen::MatrixXd::Identity(d, d);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(sb, sw);
  if (es.info() != Eigen::Success) throw std::runtime_error("LDA eigendecomposition failed");
  return assemble(mean, es.eigenvalues(), es.eigenvectors(), out_dims, true);
}

Matrix lda_fit_transform(const Matrix& x, const std::vector<int>& y, int out_dims, Projection* fitted) {
  auto p = lda_fit(x, y, out_dims);
  auto out = p.transform(x);
  if (fitted) *fitted = std::move(p);
  return out;
}

Scaler Scaler::fit(const Matrix& x, double lo, double hi) {
  if (!(hi > lo)) throw std::invalid_argument("scaling needs hi > lo");
  if (x.empty()) throw std::invalid_argument("cannot fit a scaler on no rows");
  Scaler s;
  s.lo = lo;
  s.hi = hi;
  s.mins = x.front();
  s.maxs = x.front();
  for (const auto& row : x) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      s.mins[j] = std::min(s.mins[j], row[j]);
      s.maxs[j] = std::max(s.maxs[j], row[j]);
    }
  }
  return s;
}

Matrix Scaler::transform(const Matrix& x) const {
  Matrix out = x;
  const double mid = 0.5 * (lo + hi);
  for (auto& row : out) {
    if (row.size() != mins.size()) throw std::invalid_argument("scaler input width mismatch");
    for (std::size_t j = 0; j < row.size(); ++j) {
      const double range = maxs[j] - mins[j];
      row[j] = range > 0.0 ? lo + (row[j] - mins[j]) * (hi - lo) / range : mid;
    }
  }
  return out;
}

Matrix scale_features(const Matrix& x, double lo, double hi) { return Scaler::fit(x, lo, hi).transform(x); }

namespace {

// Integer quotas proportional to `weights` summing to `total`; each quota
// is at most ceil(weight * total / sum). Ties go to the lower index.
std::vector<std::size_t> largest_remainder(const std::vector<std::size_t>& weights, std::size_t total) {
  const std::size_t sum = std::accumulate(weights.begin(), weights.end(), std::size_t{0});
  std::vector<std::size_t> q(weights.size(), 0);
  if (sum == 0) return q;
  std::vector<std::pair<double, std::size_t>> rem;
  std::size_t used = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double exact = static_cast<double>(weights[i]) * static_cast<double>(total) / static_cast<double>(sum);
    q[i] = static_cast<std::size_t>(std::floor(exact));
    used += q[i];
    rem.emplace_back(exact - static_cast<double>(q[i]), i);
  }
  std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; used < total && k < rem.size(); ++k, ++used) ++q[rem[k].second];
  return q;
}

void shuffle(std::vector<std::size_t>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

}  // namespace

Split subsample(const Dataset& ds, std::size_t n_train, std::size_t n_test, std::uint64_t seed, bool stratified) {
  const std::size_t n = ds.size();
  if (n_train + n_test == 0) throw std::invalid_argument("subsample needs a positive sample budget");
  if (n_train + n_test > n) {
    const std::size_t t = static_cast<std::size_t>(
        std::llround(static_cast<double>(n) * static_cast<double>(n_train) / static_cast<double>(n_train + n_test)));
    n_train = t;
    n_test = n - t;
  }
  Rng rng(seed);
  Split s;
  if (!stratified) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    shuffle(idx, rng);
    s.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    s.test.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train),
                  idx.begin() + static_cast<std::ptrdiff_t>(n_train + n_test));
  } else {
    std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(ds.n_classes));
    for (std::size_t i = 0; i < n; ++i) by_class[static_cast<std::size_t>(ds.labels[i])].push_back(i);
    std::vector<std::size_t> sizes;
    for (auto& members : by_class) {
      shuffle(members, rng);
      sizes.push_back(members.size());
    }
    const auto take = largest_remainder(sizes, n_train + n_test);
    const auto train_q = largest_remainder(take, n_train);
    for (std::size_t c = 0; c < by_class.size(); ++c) {
      const auto& m = by_class[c];
      s.train.insert(s.train.end(), m.begin(), m.begin() + static_cast<std::ptrdiff_t>(train_q[c]));
      s.test.insert(s.test.end(), m.begin() + static_cast<std::ptrdiff_t>(train_q[c]),
                    m.begin() + static_cast<std::ptrdiff_t>(take[c]));
    }
  }
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

PreparedData prepare(const Dataset& ds, const PrepareOptions& opt, std::uint64_t seed) {
  ds.validate();
  const auto split = subsample(ds, opt.n_train, opt.n_test, seed, opt.stratified);
  PreparedData out;
  out.train = ds.subset(split.train);
  out.test = ds.subset(split.test);

  Matrix train_x, test_x;
  if (opt.reduction == Reduction::PCA) {
    const int dims = std::min(opt.out_dims, static_cast<int>(ds.dims()));
    out.projection = pca_fit(out.train.features, dims);
  } else {
    const int dims = std::min(opt.out_dims, lda_max_dims(out.train.features, out.train.labels));
    out.projection = lda_fit(out.train.features, out.train.labels, dims);
  }
  train_x = out.projection.transform(out.train.features);
  test_x = out.projection.transform(out.test.features);
  out.scaler = Scaler::fit(train_x, opt.scale_lo, opt.scale_hi);
  out.train.features = out.scaler.transform(train_x);
  out.test.features = out.scaler.transform(test_x);
  out.train.feature_names.clear();
  for (std::size_t j = 0; j < out.projection.out_dims(); ++j) {
    out.train.feature_names.push_back(std::string(reduction_name(opt.reduction)) + std::to_string(j));
  }
  out.test.feature_names = out.train.feature_names;
  return out;
}

}  // namespace qnnbench
