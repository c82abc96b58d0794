#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "qnnbench/optimizers.hpp"

using namespace qnnbench;

namespace {

double sphere(std::span<const double> t) {
  double s = 0.0;
  for (double v : t) s += v * v;
  return s;
}

double rosenbrock(std::span<const double> t) {
  return 100.0 * std::pow(t[1] - t[0] * t[0], 2) + std::pow(1.0 - t[0], 2);
}

double norm(const std::vector<double>& v) { return std::sqrt(sphere(v)); }

OptimizeResult run(const Objective& f, std::vector<double> x0, OptimizerSpec spec, std::uint64_t seed = 1) {
  Rng rng(seed);
  return minimize(f, std::move(x0), spec, rng);
}

void check_common(const OptimizeResult& r, const OptimizerSpec& spec) {
  CHECK(r.iterations_used <= spec.max_iterations);
  CHECK(r.evaluations_used >= r.iterations_used);
  for (std::size_t i = 1; i < r.loss_trace.size(); ++i) CHECK(r.loss_trace[i] <= r.loss_trace[i - 1]);
}

}  // namespace

TEST_CASE("SPSA: sphere from ones, 300 iterations") {
  auto spec = OptimizerSpec::defaults(OptimizerKind::SPSA);
  spec.max_iterations = 300;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto r = run(sphere, std::vector<double>(5, 1.0), spec, seed);
    CHECK(norm(r.best_point) < 0.1);
    CHECK(r.evaluations_used == 2 * r.iterations_used);
    CHECK(r.extra_evaluations == 1);
    check_common(r, spec);
  }
}

TEST_CASE("SPSA: two evaluations per iteration on arbitrary objectives") {
  int calls = 0;
  Objective f = [&](std::span<const double> t) {
    ++calls;
    return std::sin(t[0]) + std::cos(3.0 * t[1]) + t[2] * t[2];
  };
  for (int iters : {1, 2, 7, 50}) {
    calls = 0;
    auto spec = OptimizerSpec::defaults(OptimizerKind::SPSA);
    spec.max_iterations = iters;
    const auto r = run(f, {0.3, -0.2, 1.0}, spec);
    CHECK(r.iterations_used == iters);
    CHECK(r.evaluations_used == 2 * iters);
    CHECK(calls == r.evaluations_used + r.extra_evaluations);
  }
}

TEST_CASE("SPSA: determinism and rejection of early stop") {
  auto spec = OptimizerSpec::defaults(OptimizerKind::SPSA);
  spec.max_iterations = 40;
  const auto a = run(rosenbrock, {-1.2, 1.0}, spec, 9);
  const auto b = run(rosenbrock, {-1.2, 1.0}, spec, 9);
  CHECK(a.best_point == b.best_point);
  CHECK(a.loss_trace == b.loss_trace);
  CHECK(a.best_value == b.best_value);
  spec.early_stop_tolerance = 0.1;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec.early_stop_tolerance.reset();
  spec.max_iterations = 0;
  Rng rng(0);
  CHECK_THROWS_AS(minimize_spsa(sphere, {1.0}, spec, rng), std::invalid_argument);
}

TEST_CASE("Nelder-Mead: Rosenbrock with a generous budget") {
  auto spec = OptimizerSpec::defaults(OptimizerKind::NelderMead);
  spec.max_iterations = 2000;
  spec.early_stop_tolerance.reset();
  spec.nelder_mead = {1e-8, 1e-12};
  const auto r = run(rosenbrock, {-1.2, 1.0}, spec);
  CHECK(std::abs(r.best_point[0] - 1.0) < 1e-3);
  CHECK(std::abs(r.best_point[1] - 1.0) < 1e-3);
  check_common(r, spec);
}

TEST_CASE("Nelder-Mead: constant objective converges internally") {
  auto spec = OptimizerSpec::defaults(OptimizerKind::NelderMead);
  spec.early_stop_tolerance.reset();
  const auto r = run([](std::span<const double>) { return 4.25; }, {0.1, 0.2, 0.3}, spec);
  CHECK(r.terminated_by == Termination::InternalConvergence);
  CHECK(r.best_value == 4.25);
}

TEST_CASE("Nelder-Mead and COBYLA: early stop at 0.1") {
  for (auto kind : {OptimizerKind::NelderMead, OptimizerKind::COBYLA}) {
    auto spec = OptimizerSpec::defaults(kind);
    spec.early_stop_tolerance = 0.1;
    const auto r = run(sphere, {1.0, 1.0}, spec);
    CHECK(r.terminated_by == Termination::EarlyStop);
    CHECK(r.best_value <= 0.1);
    CHECK(r.loss_trace.back() <= 0.1);
    if (r.loss_trace.size() >= 2) CHECK(r.loss_trace[r.loss_trace.size() - 2] > 0.1);
  }
}

TEST_CASE("COBYLA: shifted quadratic") {
  auto spec = OptimizerSpec::defaults(OptimizerKind::COBYLA);
  spec.early_stop_tolerance.reset();
  const auto r = run([](std::span<const double> t) { return std::pow(t[0] - 3.0, 2) + std::pow(t[1] + 1.0, 2); },
                     {0.0, 0.0}, spec);
  CHECK(std::abs(r.best_point[0] - 3.0) < 1e-3);
  CHECK(std::abs(r.best_point[1] + 1.0) < 1e-3);
  check_common(r, spec);
}

TEST_CASE("COBYLA: one-iteration budget") {
  auto spec = OptimizerSpec::defaults(OptimizerKind::COBYLA);
  spec.early_stop_tolerance.reset();
  spec.max_iterations = 1;
  const auto r = run(sphere, {1.0, 2.0, 3.0}, spec);
  CHECK(r.terminated_by == Termination::Budget);
  CHECK(r.evaluations_used >= 4);
  CHECK(r.iterations_used == 1);
}

TEST_CASE("COBYLA and Nelder-Mead never end above f(theta0)") {
  Rng rng(77);
  const std::vector<Objective> fs{sphere, rosenbrock, [](std::span<const double> t) {
                                    return std::sin(5 * t[0]) * std::cos(3 * t[1]) + 0.1 * t[0];
                                  }};
  for (const auto& f : fs) {
    for (int k = 0; k < 10; ++k) {
      std::vector<double> x0{rng.normal(0, 2), rng.normal(0, 2)};
      const double f0 = f(x0);
      for (auto kind : {OptimizerKind::COBYLA, OptimizerKind::NelderMead}) {
        auto spec = OptimizerSpec::defaults(kind);
        spec.max_iterations = 30;
        const auto r = run(f, x0, spec);
        CHECK(r.best_value <= f0);
        CHECK(f(r.best_point) == r.best_value);
        check_common(r, spec);
      }
    }
  }
}

TEST_CASE("SPSA best value is no worse than any probe") {
  std::vector<double> seen;
  Objective f = [&](std::span<const double> t) {
    const double v = rosenbrock(t);
    seen.push_back(v);
    return v;
  };
  auto spec = OptimizerSpec::defaults(OptimizerKind::SPSA);
  spec.max_iterations = 60;
  const auto r = run(f, {-1.2, 1.0}, spec);
  for (double v : seen) CHECK(r.best_value <= v);
}

TEST_CASE("non-finite objective values are errors") {
  const Objective f = [](std::span<const double> t) {
    return t[0] > 0.5 ? std::numeric_limits<double>::quiet_NaN() : t[0];
  };
  for (auto kind : {OptimizerKind::COBYLA, OptimizerKind::NelderMead, OptimizerKind::SPSA}) {
    auto spec = OptimizerSpec::defaults(kind);
    spec.early_stop_tolerance.reset();
    CHECK_THROWS_AS(run(f, {1.0}, spec), std::domain_error);
  }
}

TEST_CASE("default budgets") {
  CHECK(OptimizerSpec::defaults(OptimizerKind::COBYLA).max_iterations == 500);
  CHECK(OptimizerSpec::defaults(OptimizerKind::SPSA).max_iterations == 300);
  CHECK(OptimizerSpec::defaults(OptimizerKind::NelderMead).max_iterations == 250);
  CHECK(OptimizerSpec::defaults(OptimizerKind::NelderMead).adaptive);
  CHECK_FALSE(OptimizerSpec::defaults(OptimizerKind::SPSA).early_stop_tolerance.has_value());
  CHECK(optimizer_from_name("NelderMead") == OptimizerKind::NelderMead);
  CHECK_THROWS(optimizer_from_name("ADAM"));
}
