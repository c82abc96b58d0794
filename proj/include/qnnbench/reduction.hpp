#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "qnnbench/dataset.hpp"

namespace qnnbench {

enum class Reduction { PCA, LDA };

std::string_view reduction_name(Reduction r) noexcept;
Reduction reduction_from_name(std::string_view name);

/// Affine projection x -> basis * (x - mean).
struct Projection {
  std::vector<double> mean;
  Matrix basis;  // out_dims rows, each of input length
  std::vector<double> eigenvalues;  // descending

  std::size_t out_dims() const { return basis.size(); }
  Matrix transform(const Matrix& x) const;
};

/// Principal components of the sample covariance, eigenvalues descending.
/// Each component is signed so its largest-magnitude entry is positive.
Projection pca_fit(const Matrix& x, int out_dims);
Matrix pca_fit_transform(const Matrix& x, int out_dims, Projection* fitted = nullptr);

/// Fisher discriminant directions from S_B v = lambda (S_W + 1e-6 I) v.
/// Directions are unit length and sign-normalized like PCA components.
Projection lda_fit(const Matrix& x, const std::vector<int>& y, int out_dims);
Matrix lda_fit_transform(const Matrix& x, const std::vector<int>& y, int out_dims,
                         Projection* fitted = nullptr);

/// Largest output dimension LDA accepts for this input.
int lda_max_dims(const Matrix& x, const std::vector<int>& y);

/// Per-column min-max map onto [lo, hi]; constant columns go to the midpoint.
struct Scaler {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<double> mins;
  std::vector<double> maxs;

  static Scaler fit(const Matrix& x, double lo, double hi);
  Matrix transform(const Matrix& x) const;
};
Matrix scale_features(const Matrix& x, double lo, double hi);

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Disjoint train/test row indices (each sorted). Caps apply only when the
/// dataset is larger than n_train + n_test; smaller datasets are split in
/// the n_train:n_test proportion using every row. Stratified quotas use
/// largest remainders.
Split subsample(const Dataset& ds, std::size_t n_train, std::size_t n_test, std::uint64_t seed,
                bool stratified = true);

struct PrepareOptions {
  Reduction reduction = Reduction::PCA;
  int out_dims = 7;
  std::size_t n_train = 400;
  std::size_t n_test = 250;
  bool stratified = true;
  double scale_lo = 0.0;
  // Half range: 2x stays inside [0, pi], so no two inputs encode to complex
  // conjugate states (which real-amplitude ansatzes cannot tell apart).
  double scale_hi = 1.57079632679489661923;
};

struct PreparedData {
  Dataset train;
  Dataset test;
  Projection projection;
  Scaler scaler;
  int n_qubits() const { return static_cast<int>(projection.out_dims()); }
};

/// split -> reduce (fit on train rows) -> scale (fit on train rows).
/// The reduced width is min(out_dims, largest width the reducer allows).
PreparedData prepare(const Dataset& ds, const PrepareOptions& opt, std::uint64_t seed);

}  // namespace qnnbench
