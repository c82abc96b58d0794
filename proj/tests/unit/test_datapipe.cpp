#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>

#include "qnnbench/dataset.hpp"
#include "qnnbench/reduction.hpp"
#include "qnnbench/rng.hpp"

using namespace qnnbench;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name, const std::string& text) {
  const auto dir = fs::temp_directory_path() / "qnnbench_datapipe";
  fs::create_directories(dir);
  const auto p = dir / name;
  std::ofstream(p) << text;
  return p;
}

Matrix random_matrix(Rng& rng, std::size_t n, std::size_t d) {
  Matrix x(n, std::vector<double>(d));
  // correlated columns so the covariance is far from diagonal
  for (auto& row : x) {
    const double shared = rng.normal(0, 1);
    for (std::size_t j = 0; j < d; ++j) row[j] = rng.normal(0, 1 + j * 0.3) + shared * (j % 3);
  }
  return x;
}

// Cyclic Jacobi eigenvalue iteration on a symmetric matrix. Returns
// eigenvalues (descending) and matching eigenvectors as rows.
std::pair<std::vector<double>, Matrix> jacobi(Matrix a) {
  const std::size_t n = a.size();
  Matrix v(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(t * t + 1), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto i, auto j) { return a[i][i] > a[j][j]; });
  std::vector<double> vals;
  Matrix vecs;
  for (auto i : order) {
    vals.push_back(a[i][i]);
    std::vector<double> col(n);
    for (std::size_t k = 0; k < n; ++k) col[k] = v[k][i];
    vecs.push_back(col);
  }
  return {vals, vecs};
}

Matrix covariance(const Matrix& x) {
  const std::size_t n = x.size(), d = x[0].size();
  std::vector<double> mu(d, 0.0);
  for (const auto& r : x)
    for (std::size_t j = 0; j < d; ++j) mu[j] += r[j] / n;
  Matrix c(d, std::vector<double>(d, 0.0));
  for (const auto& r : x)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) c[i][j] += (r[i] - mu[i]) * (r[j] - mu[j]) / (n - 1);
  return c;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Eigen::MatrixXd projector(const Matrix& basis) {
  Eigen::MatrixXd b(basis.size(), basis[0].size());
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = 0; j < basis[0].size(); ++j) b(i, j) = basis[i][j];
  return b.transpose() * (b * b.transpose()).inverse() * b;
}

}  // namespace

TEST_CASE("one-hot encoding of a categorical column") {
  const auto p = temp_file("proto.csv", "1.0,tcp,0.5,normal.\n2.0,udp,0.1,smurf.\n3.0,icmp,0.2,normal.\n4.0,tcp,0.3,neptune.\n");
  DatasetSchema s;
  s.name = "proto";
  s.categorical_columns = {1};
  s.strip_label_suffix = ".";
  const auto ds = load_and_encode(p, s);
  CHECK(ds.size() == 4);
  CHECK(ds.dims() == 5);  // 2 numeric + 3 indicators
  CHECK(ds.feature_names == std::vector<std::string>{"c0", "c1=icmp", "c1=tcp", "c1=udp", "c2"});
  CHECK(ds.features[0] == std::vector<double>{1.0, 0.0, 1.0, 0.0, 0.5});
  CHECK(ds.features[2] == std::vector<double>{3.0, 1.0, 0.0, 0.0, 0.2});
  CHECK(ds.class_names == std::vector<std::string>{"neptune", "normal", "smurf"});
  CHECK(ds.labels == std::vector<int>{1, 2, 1, 0});
  CHECK(label_mapping_json(ds).find("\"smurf\"") != std::string::npos);
}

TEST_CASE("unknown categories and bad rows") {
  const auto p = temp_file("bad.csv", "1.0,tcp,a\n2.0,sctp,b\n");
  DatasetSchema s;
  s.categorical_columns = {1};
  s.categories[1] = {"tcp", "udp"};
  CHECK_THROWS_WITH_AS(load_and_encode(p, s), doctest::Contains("line 2"), std::runtime_error);
  s.unknown_category = UnknownCategory::Ignore;
  const auto ds = load_and_encode(p, s);
  CHECK(ds.features[1] == std::vector<double>{2.0, 0.0, 0.0});
  const auto q = temp_file("nan.csv", "1.0,x\nfoo,y\n");
  CHECK_THROWS_WITH_AS(load_and_encode(q, DatasetSchema{}), doctest::Contains("line 2"), std::runtime_error);
  const auto r = temp_file("ragged.csv", "1.0,2.0,x\n1.0,y\n");
  CHECK_THROWS(load_and_encode(r, DatasetSchema{}));
  CHECK_THROWS(DatasetSchema::from_json_text(R"({"label": 3})"));
}

TEST_CASE("bundled schemas: glass ids are dropped, rice has two classes") {
  std::string glass;
  Rng rng(1);
  for (int i = 1; i <= 214; ++i) {
    glass += std::to_string(i);
    for (int j = 0; j < 9; ++j) glass += "," + std::to_string(rng.uniform());
    glass += "," + std::to_string(1 + i % 6) + "\n";
  }
  const auto g = load_and_encode(temp_file("glass.data", glass), "glass");
  CHECK(g.size() == 214);
  CHECK(g.dims() == 9);
  CHECK(g.n_classes == 6);

  std::string rice = "Area,Perimeter,Major_Axis_Length,Minor_Axis_Length,Eccentricity,Convex_Area,Extent,Class\n";
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 7; ++j) rice += std::to_string(rng.uniform()) + ",";
    rice += (i % 3 ? "Osmancik\n" : "Cammeo\n");
  }
  const auto r = load_and_encode(temp_file("rice.csv", rice), "rice");
  CHECK(r.n_classes == 2);
  CHECK(r.dims() == 7);
  CHECK(r.class_names == std::vector<std::string>{"Cammeo", "Osmancik"});

  const auto kdd = builtin_schema("kdd");
  CHECK(kdd.categorical_columns == std::vector<int>{1, 2, 3});
  CHECK(kdd.strip_label_suffix == ".");
  CHECK_THROWS(builtin_schema("mnist"));
}

TEST_CASE("PCA: diagonal direction") {
  Matrix x;
  for (int i = -5; i <= 5; ++i) x.push_back({i * 1.0, i * 1.0});
  const auto p = pca_fit(x, 1);
  CHECK(p.basis[0][0] == doctest::Approx(M_SQRT1_2).epsilon(1e-12));
  CHECK(p.basis[0][1] == doctest::Approx(M_SQRT1_2).epsilon(1e-12));
}

TEST_CASE("PCA matches a Jacobi eigendecomposition") {
  Rng rng(31);
  const auto x = random_matrix(rng, 120, 10);
  Projection p;
  const auto z = pca_fit_transform(x, 10, &p);
  const auto [vals, vecs] = jacobi(covariance(x));
  for (std::size_t k = 0; k < 10; ++k) {
    CHECK(p.eigenvalues[k] == doctest::Approx(vals[k]).epsilon(1e-9));
    CHECK(std::abs(std::abs(dot(p.basis[k], vecs[k])) - 1.0) < 1e-8);
    // sign rule: largest-magnitude entry positive
    const auto it = std::max_element(p.basis[k].begin(), p.basis[k].end(),
                                     [](double a, double b) { return std::abs(a) < std::abs(b); });
    CHECK(*it > 0.0);
  }
  // projected covariance is diagonal
  const auto cz = covariance(z);
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = 0; j < 10; ++j)
      if (i != j) CHECK(std::abs(cz[i][j]) < 1e-8);
  // full-rank reconstruction equals the centered data
  for (std::size_t r = 0; r < x.size(); ++r) {
    for (std::size_t j = 0; j < 10; ++j) {
      double rec = 0.0;
      for (std::size_t k = 0; k < 10; ++k) rec += z[r][k] * p.basis[k][j];
      CHECK(std::abs(rec - (x[r][j] - p.mean[j])) < 1e-8);
    }
  }
  CHECK_THROWS(pca_fit(x, 11));
  CHECK_THROWS(pca_fit({{1.0, 2.0}}, 1));
}

TEST_CASE("LDA: two-class direction matches the Fisher discriminant") {
  Rng rng(8);
  Matrix x;
  std::vector<int> y;
  for (int i = 0; i < 200; ++i) {
    const int c = i % 2;
    x.push_back({rng.normal(c * 2.0, 1.0), rng.normal(c * 1.0, 1.5), rng.normal(-c * 0.5, 0.7)});
    y.push_back(c);
  }
  Eigen::Matrix3d sw = Eigen::Matrix3d::Zero();
  Eigen::Vector3d mu[2] = {Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero()};
  for (std::size_t i = 0; i < x.size(); ++i) mu[y[i]] += Eigen::Vector3d(x[i].data()) / 100.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Eigen::Vector3d d = Eigen::Vector3d(x[i].data()) - mu[y[i]];
    sw += d * d.transpose();
  }
  const Eigen::Vector3d w = (sw + 1e-6 * Eigen::Matrix3d::Identity()).ldlt().solve(mu[1] - mu[0]).normalized();
  const auto p = lda_fit(x, y, 1);
  const Eigen::Vector3d got = Eigen::Vector3d(p.basis[0].data()).normalized();
  CHECK(std::abs(std::abs(got.dot(w)) - 1.0) < 1e-8);
}

TEST_CASE("LDA: limits, errors and label permutation") {
  Rng rng(3);
  Matrix x;
  std::vector<int> y;
  for (int i = 0; i < 90; ++i) {
    const int c = i % 3;
    x.push_back({rng.normal(c, 1), rng.normal(c * c, 1), rng.normal(0, 1), rng.normal(-c, 2)});
    y.push_back(c);
  }
  CHECK(lda_max_dims(x, y) == 2);
  CHECK_THROWS_AS(lda_fit(x, y, 3), std::invalid_argument);
  std::vector<int> two(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) two[i] = y[i] == 0 ? 0 : 1;
  CHECK_THROWS_AS(lda_fit(x, two, 7), std::invalid_argument);  // binary data allows one direction
  std::vector<int> perm(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) perm[i] = (y[i] + 1) % 3;
  const auto a = projector(lda_fit(x, y, 2).basis);
  const auto b = projector(lda_fit(x, perm, 2).basis);
  CHECK((a - b).norm() < 1e-8);
  std::vector<int> lonely = y;
  lonely[0] = 3;  // class with one sample
  CHECK_THROWS_AS(lda_fit(x, lonely, 2), std::invalid_argument);
}

TEST_CASE("min-max scaling") {
  const auto s = scale_features({{0.0, 7.0}, {5.0, 7.0}, {10.0, 7.0}}, 0.0, M_PI);
  CHECK(s[0][0] == 0.0);
  CHECK(s[1][0] == doctest::Approx(M_PI / 2));
  CHECK(s[2][0] == doctest::Approx(M_PI));
  for (const auto& r : s) CHECK(r[1] == doctest::Approx(M_PI / 2));
  const auto again = scale_features(s, 0.0, M_PI);
  for (std::size_t i = 0; i < 3; ++i) CHECK(again[i][0] == doctest::Approx(s[i][0]).epsilon(1e-15));
  CHECK_THROWS(scale_features(s, 1.0, 1.0));
}

TEST_CASE("subsample: caps, proportional split, stratification, determinism") {
  const auto big = synthetic_dataset();
  const auto a = subsample(big, 400, 250, 5);
  CHECK(a.train.size() == 400);
  CHECK(a.test.size() == 250);
  std::set<std::size_t> seen(a.train.begin(), a.train.end());
  for (auto i : a.test) CHECK(seen.insert(i).second);
  const auto b = subsample(big, 400, 250, 5);
  CHECK(a.train == b.train);
  CHECK(a.test == b.test);
  CHECK(subsample(big, 400, 250, 6).train != a.train);

  // 214 rows (the size of Glass) are used in full at roughly 400:250
  BlobSpec spec;
  spec.n_samples = 214;
  spec.n_classes = 6;
  const auto glass_like = make_blobs(spec, 1);
  const auto g = subsample(glass_like, 400, 250, 0);
  CHECK(g.train.size() + g.test.size() == 214);
  CHECK(g.train.size() == 132);

  // stratified: every class appears in both splits with near-equal shares
  std::vector<int> per_class(static_cast<std::size_t>(big.n_classes), 0);
  for (auto i : a.train) ++per_class[static_cast<std::size_t>(big.labels[i])];
  for (int c : per_class) CHECK(std::abs(c - 100) <= 1);
}

TEST_CASE("prepare fits the reducer on training rows only") {
  const auto ds = synthetic_dataset();
  PrepareOptions opt;
  opt.n_train = 100;
  opt.n_test = 50;
  opt.out_dims = 5;
  const auto prepared = prepare(ds, opt, 2);
  const auto split = subsample(ds, 100, 50, 2);
  const auto p = pca_fit(ds.subset(split.train).features, 5);
  for (std::size_t k = 0; k < 5; ++k)
    for (std::size_t j = 0; j < ds.dims(); ++j) CHECK(prepared.projection.basis[k][j] == doctest::Approx(p.basis[k][j]));
  CHECK(prepared.n_qubits() == 5);
  CHECK(prepared.train.dims() == 5);
  for (const auto& r : prepared.train.features)
    for (double v : r) CHECK((v >= opt.scale_lo - 1e-12 && v <= opt.scale_hi + 1e-12));

  opt.reduction = Reduction::LDA;
  opt.out_dims = 7;
  CHECK(prepare(ds, opt, 2).n_qubits() == 3);  // 4 classes
}
