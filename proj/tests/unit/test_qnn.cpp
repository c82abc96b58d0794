#include <doctest.h>

#include <cmath>
#include <numeric>

#include "qnnbench/initializers.hpp"
#include "qnnbench/metrics.hpp"
#include "qnnbench/qnn.hpp"
#include "qnnbench/reduction.hpp"

using namespace qnnbench;

namespace {

CountsHistogram histogram(int n, std::map<std::uint64_t, std::uint64_t> counts) {
  CountsHistogram h;
  h.n_qubits = n;
  h.counts = std::move(counts);
  for (const auto& [_, c] : h.counts) h.shots += c;
  return h;
}

QnnModel toy_model(int n) {
  QnnModel m;
  m.feature_map = {FeatureMapKind::Z, n, 2, std::nullopt};
  m.ansatz = {AnsatzKind::RealAmplitudes, n, 3, Topology::Full};
  m.n_classes = 2;
  m.shots = 256;
  return m;
}

PreparedData toy_data() {
  BlobSpec spec;
  spec.n_samples = 60;
  PrepareOptions opt;
  opt.out_dims = 3;
  opt.n_train = 36;
  opt.n_test = 24;
  return prepare(make_blobs(spec, 5), opt, 3);
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }
double var(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / (v.size() - 1);
}

}  // namespace

TEST_CASE("decode: modulo-index bucket example") {
  const auto h = histogram(2, {{0b00, 512}, {0b01, 256}, {0b10, 128}, {0b11, 128}});
  const auto p = decode_counts(h, 2, Decode::ModuloIndex);
  CHECK(p == std::vector<double>{0.625, 0.375});
}

TEST_CASE("decode: parity and many classes") {
  const auto h = histogram(3, {{0b000, 10}, {0b011, 20}, {0b111, 30}, {0b100, 40}});
  const auto parity = decode_counts(h, 2, Decode::Parity);
  CHECK(parity[0] == doctest::Approx(0.3));
  CHECK(parity[1] == doctest::Approx(0.7));
  const auto seven = decode_counts(h, 7, Decode::ModuloIndex);
  CHECK(seven.size() == 7);
  CHECK(seven[0] == doctest::Approx(0.4));  // 7 mod 7 and 0
  CHECK(seven[3] == doctest::Approx(0.2));
  CHECK(seven[4] == doctest::Approx(0.4));
  CHECK_THROWS(decode_counts(h, 3, Decode::Parity));
}

TEST_CASE("predict_proba on a deterministic state") {
  QnnModel m;
  m.feature_map = {FeatureMapKind::Z, 2, 1, std::nullopt};
  m.ansatz = {AnsatzKind::RealAmplitudes, 2, 1, Topology::Linear};
  m.shots = 500;
  // x = 0 leaves |+>|+>. RY(pi/2)|+> = |1> on qubit 0, RY(-pi/2)|+> = |0> on
  // qubit 1, CX(0,1) gives |11>, then RY(pi) on qubit 1 gives |01>.
  const double x[] = {0.0, 0.0};
  const double theta[] = {M_PI / 2, -M_PI / 2, 0.0, M_PI};
  Rng rng(1);
  const auto p = predict_proba(m, x, theta, rng);
  CHECK(p[0] == doctest::Approx(0.0));
  CHECK(p[1] == doctest::Approx(1.0));
}

TEST_CASE("probabilities always sum to one") {
  const auto m = toy_model(3);
  Rng rng(8);
  for (int k = 0; k < 30; ++k) {
    std::vector<double> x(3), theta(12);
    for (auto& v : x) v = rng.uniform() * M_PI;
    for (auto& v : theta) v = rng.normal(0, 2);
    const auto p = predict_proba(m, x, theta, rng);
    CHECK(std::accumulate(p.begin(), p.end(), 0.0) == 1.0);
    for (double v : p) CHECK(v >= 0.0);
  }
}

TEST_CASE("predict_proba dimension checks") {
  const auto m = toy_model(3);
  Rng rng(0);
  const std::vector<double> x2(2), x3(3), t5(5), t12(12);
  CHECK_THROWS_AS(predict_proba(m, x2, t12, rng), std::invalid_argument);
  CHECK_THROWS_AS(predict_proba(m, x3, t5, rng), std::invalid_argument);
}

TEST_CASE("cross entropy examples") {
  CHECK(cross_entropy_loss({{0.5, 0.5}}, {0}) == doctest::Approx(std::log(2.0)).epsilon(1e-9));
  CHECK(cross_entropy_loss({{1.0, 0.0}, {0.0, 1.0}}, {0, 1}) <= 1e-9);
  CHECK(cross_entropy_loss({std::vector<double>(7, 1.0 / 7.0)}, {3}) == doctest::Approx(std::log(7.0)).epsilon(1e-9));
  CHECK(cross_entropy_loss({{0.0, 1.0}}, {0}) == doctest::Approx(-std::log(1e-10)));
  CHECK_THROWS(cross_entropy_loss({}, {}));
  CHECK_THROWS(cross_entropy_loss({{0.5, 0.5}}, {2}));
}

TEST_CASE("initializer distributions") {
  Rng rng(123);
  InitializerSpec c{InitKind::ConstantBetaMean, 2, 2, 3};
  CHECK(initialize_params(c, 4, rng) == std::vector<double>(4, 0.5));

  InitializerSpec n{InitKind::NormalSigmaInvL, 2, 2, 4};
  const auto nv = initialize_params(n, 100000, rng);
  CHECK(std::abs(var(nv) - 0.25) < 0.05 * 0.25);
  CHECK(std::abs(mean(nv)) < 3 * 0.5 / std::sqrt(1e5));

  InitializerSpec u{InitKind::Uniform01, 2, 2, 3};
  const auto uv = initialize_params(u, 100000, rng);
  for (double v : uv) CHECK((v >= 0.0 && v <= 1.0));
  CHECK(std::abs(mean(uv) - 0.5) < 3 * std::sqrt(1.0 / 12.0 / 1e5));

  InitializerSpec b{InitKind::Beta, 2, 5, 3};
  const auto bv = initialize_params(b, 100000, rng);
  for (double v : bv) CHECK((v >= 0.0 && v <= 1.0));
  CHECK(std::abs(mean(bv) - 2.0 / 7.0) < 3 * b.beta_stddev() / std::sqrt(1e5));

  InitializerSpec m{InitKind::NormalMatchedToBeta, 2, 5, 3};
  const auto mv = initialize_params(m, 100000, rng);
  CHECK(std::abs(mean(mv) - 2.0 / 7.0) < 3 * b.beta_stddev() / std::sqrt(1e5));
  CHECK(std::sqrt(var(mv)) == doctest::Approx(b.beta_stddev()).epsilon(0.02));
}

TEST_CASE("initializer validation") {
  Rng rng(0);
  CHECK_THROWS(initialize_params({InitKind::Beta, 0.0, 2.0, 3}, 3, rng));
  CHECK_THROWS(initialize_params({InitKind::Beta, 2.0, -1.0, 3}, 3, rng));
  CHECK_THROWS(initialize_params({InitKind::NormalSigmaInvL, 2.0, 2.0, 0}, 3, rng));
  CHECK_THROWS(initialize_params({InitKind::Uniform01, 2.0, 2.0, 3}, 0, rng));
}

TEST_CASE("zero-iteration training returns the initialization draw") {
  const auto data = toy_data();
  const auto m = toy_model(data.n_qubits());
  auto opt = OptimizerSpec::defaults(OptimizerKind::COBYLA);
  opt.max_iterations = 0;
  const auto t = train(m, data.train, opt, InitializerSpec{}, 11);
  CHECK(t.theta == t.initial_theta);
  CHECK(t.theta.size() == static_cast<std::size_t>(expected_weight_count(m.ansatz)));
}

TEST_CASE("training is deterministic and thread-count invariant") {
  const auto data = toy_data();
  auto m = toy_model(data.n_qubits());
  auto opt = OptimizerSpec::defaults(OptimizerKind::SPSA);
  opt.max_iterations = 15;
  const auto a = train(m, data.train, opt, InitializerSpec{}, 21);
  const auto b = train(m, data.train, opt, InitializerSpec{}, 21);
  m.threads = 3;
  const auto c = train(m, data.train, opt, InitializerSpec{}, 21);
  CHECK(a.theta == b.theta);
  CHECK(a.trace.loss_trace == b.trace.loss_trace);
  CHECK(a.theta == c.theta);
  CHECK(a.trace.loss_trace == c.trace.loss_trace);
  for (std::size_t i = 1; i < a.trace.loss_trace.size(); ++i) CHECK(a.trace.loss_trace[i] <= a.trace.loss_trace[i - 1]);
  CHECK(predict(a, data.test.features, 4) == predict(c, data.test.features, 4));
}

TEST_CASE("all-zero noise model trains bit-identically to the noiseless backend") {
  const auto data = toy_data();
  auto m = toy_model(data.n_qubits());
  auto opt = OptimizerSpec::defaults(OptimizerKind::COBYLA);
  opt.max_iterations = 10;
  const auto a = train(m, data.train, opt, InitializerSpec{}, 2);
  m.noise = NoiseModel::zero(m.n_qubits());
  const auto b = train(m, data.train, opt, InitializerSpec{}, 2);
  CHECK(a.theta == b.theta);
  CHECK(a.trace.loss_trace == b.trace.loss_trace);
  CHECK(predict(a, data.test.features, 9) == predict(b, data.test.features, 9));
}

TEST_CASE("model validation") {
  auto m = toy_model(3);
  m.feature_map.n_features = 4;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  m = toy_model(3);
  m.n_classes = 1;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  m = toy_model(3);
  m.noise = NoiseModel::zero(2);
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
}

TEST_CASE("toy blobs reach 0.9 test accuracy") {
  BlobSpec spec;
  PrepareOptions opt;
  opt.out_dims = 3;
  opt.n_train = 120;
  opt.n_test = 80;
  const auto data = prepare(make_blobs(spec, 42), opt, 1);
  auto m = toy_model(3);
  m.shots = 1024;
  const auto t = train(m, data.train, OptimizerSpec::defaults(OptimizerKind::COBYLA), InitializerSpec{}, 1);
  CHECK(accuracy(predict(t, data.test.features, 2), data.test.labels) >= 0.9);
}
