#include "qnnbench/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace qnnbench {

std::string_view optimizer_name(OptimizerKind k) noexcept {
  switch (k) {
    case OptimizerKind::COBYLA: return "COBYLA";
    case OptimizerKind::SPSA: return "SPSA";
    case OptimizerKind::NelderMead: return "NelderMead";
  }
  return "?";
}

OptimizerKind optimizer_from_name(std::string_view name) {
  for (OptimizerKind k : {OptimizerKind::COBYLA, OptimizerKind::SPSA, OptimizerKind::NelderMead}) {
    if (optimizer_name(k) == name) return k;
  }
  throw std::invalid_argument("unknown optimizer '" + std::string(name) + "'");
}

std::string_view termination_name(Termination t) noexcept {
  switch (t) {
    case Termination::Budget: return "budget";
    case Termination::EarlyStop: return "early_stop";
    case Termination::InternalConvergence: return "internal_convergence";
  }
  return "?";
}

OptimizerSpec OptimizerSpec::defaults(OptimizerKind kind) {
  OptimizerSpec s;
  s.kind = kind;
  switch (kind) {
    case OptimizerKind::COBYLA:
      s.max_iterations = 500;
      s.early_stop_tolerance = 0.1;
      break;
    case OptimizerKind::SPSA:
      s.max_iterations = 300;
      break;
    case OptimizerKind::NelderMead:
      s.max_iterations = 250;
      s.early_stop_tolerance = 0.1;
      s.adaptive = true;
      break;
  }
  return s;
}

void OptimizerSpec::validate() const {
  if (max_iterations < 0) throw std::invalid_argument("optimizer.max_iterations must be >= 0");
  if (kind == OptimizerKind::SPSA && early_stop_tolerance) {
    throw std::invalid_argument("optimizer.kind=SPSA does not support optimizer.early_stop_tolerance");
  }
  if (kind == OptimizerKind::COBYLA && !(cobyla.rho_begin >= cobyla.rho_end && cobyla.rho_end > 0.0)) {
    throw std::invalid_argument("COBYLA needs rho_begin >= rho_end > 0");
  }
  if (kind == OptimizerKind::SPSA && !(spsa.a > 0.0 && spsa.c > 0.0)) {
    throw std::invalid_argument("SPSA gains a and c must be positive");
  }
}

namespace {

/// Counts evaluations, rejects non-finite values and keeps the best point.
class Tracker {
 public:
  Tracker(const Objective& f, std::size_t dim) : f_(f) { best_point_.resize(dim); }

  double operator()(std::span<const double> x) {
    const double v = f_(x);
    ++evaluations_;
    if (!std::isfinite(v)) throw std::domain_error("objective returned a non-finite value");
    if (evaluations_ == 1 || v < best_value_) {
      best_value_ = v;
      best_point_.assign(x.begin(), x.end());
    }
    return v;
  }

  int evaluations() const { return evaluations_; }
  double best_value() const { return best_value_; }

  OptimizeResult finish(int iterations, int init_evals, std::vector<double> trace,
                        Termination why) const {
    OptimizeResult r;
    r.best_point = best_point_;
    r.best_value = best_value_;
    r.iterations_used = iterations;
    r.evaluations_used = evaluations_;
    r.steps_used = evaluations_ - init_evals;
    r.loss_trace = std::move(trace);
    r.terminated_by = why;
    return r;
  }

 private:
  const Objective& f_;
  int evaluations_ = 0;
  double best_value_ = 0.0;
  std::vector<double> best_point_;
};

void check_start(const std::vector<double>& theta0) {
  if (theta0.empty()) throw std::invalid_argument("optimizer needs at least one parameter");
  for (double v : theta0) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite start point");
  }
}

bool reached(const OptimizerSpec& spec, double best) {
  return spec.early_stop_tolerance && best <= *spec.early_stop_tolerance;
}

using Matrix = std::vector<std::vector<double>>;

// Gauss-Jordan inverse with partial pivoting. Returns false when singular.
bool invert(Matrix a, Matrix& inv) {
  const std::size_t n = a.size();
  inv.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  double scale = 0.0;
  for (const auto& row : a)
    for (double v : row) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return false;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) <= 1e-14 * scale) return false;
    std::swap(a[piv], a[col]);
    std::swap(inv[piv], inv[col]);
    const double d = a[col][col];
    for (std::size_t k = 0; k < n; ++k) {
      a[col][k] /= d;
      inv[col][k] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0.0) continue;
      const double m = a[r][col];
      for (std::size_t k = 0; k < n; ++k) {
        a[r][k] -= m * a[col][k];
        inv[r][k] -= m * inv[col][k];
      }
    }
  }
  return true;
}

double norm2(const std::vector<double>& v) {
  return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

}  // namespace

OptimizeResult minimize_spsa(const Objective& f, std::vector<double> theta0,
                             const OptimizerSpec& spec, Rng& rng) {
  check_start(theta0);
  spec.validate();
  if (spec.max_iterations < 1) throw std::invalid_argument("SPSA needs max_iterations >= 1");

  const std::size_t d = theta0.size();
  const auto& g = spec.spsa;
  const double stability = g.stability_fraction * spec.max_iterations;
  Tracker eval(f, d);
  std::vector<double> theta = std::move(theta0);
  std::vector<double> delta(d), plus(d), minus(d), trace;
  trace.reserve(static_cast<std::size_t>(spec.max_iterations));

  for (int k = 0; k < spec.max_iterations; ++k) {
    const double ak = g.a / std::pow(k + 1 + stability, g.alpha);
    const double ck = g.c / std::pow(k + 1, g.gamma);
    for (std::size_t i = 0; i < d; ++i) {
      delta[i] = rng.below(2) == 0 ? -1.0 : 1.0;
      plus[i] = theta[i] + ck * delta[i];
      minus[i] = theta[i] - ck * delta[i];
    }
    const double fp = eval(plus);
    const double fm = eval(minus);
    const double scale = (fp - fm) / (2.0 * ck);
    // Rademacher entries are their own reciprocals.
    for (std::size_t i = 0; i < d; ++i) theta[i] -= ak * scale * delta[i];
    trace.push_back(eval.best_value());
  }
  const int loop_evals = eval.evaluations();
  eval(theta);
  trace.back() = eval.best_value();
  auto r = eval.finish(spec.max_iterations, 0, std::move(trace), Termination::Budget);
  r.evaluations_used = r.steps_used = loop_evals;
  r.extra_evaluations = 1;
  return r;
}

OptimizeResult minimize_nelder_mead(const Objective& f, std::vector<double> theta0,
                                    const OptimizerSpec& spec) {
  check_start(theta0);
  spec.validate();
  const std::size_t d = theta0.size();
  const double dd = static_cast<double>(d);
  const double rho = 1.0;
  const double chi = spec.adaptive ? 1.0 + 2.0 / dd : 2.0;
  const double psi = spec.adaptive ? 0.75 - 1.0 / (2.0 * dd) : 0.5;
  const double sigma = spec.adaptive ? 1.0 - 1.0 / dd : 0.5;

  Tracker eval(f, d);
  std::vector<std::vector<double>> sim(d + 1, theta0);
  for (std::size_t i = 0; i < d; ++i) {
    sim[i + 1][i] = theta0[i] != 0.0 ? 1.05 * theta0[i] : 0.00025;
  }
  std::vector<double> fsim(d + 1);
  for (std::size_t j = 0; j <= d; ++j) fsim[j] = eval(sim[j]);
  const int init_evals = eval.evaluations();
  std::vector<double> trace;

  auto order = [&] {
    std::vector<std::size_t> idx(d + 1);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return fsim[a] < fsim[b]; });
    std::vector<std::vector<double>> s2;
    std::vector<double> f2;
    for (auto i : idx) {
      s2.push_back(sim[i]);
      f2.push_back(fsim[i]);
    }
    sim = std::move(s2);
    fsim = std::move(f2);
  };
  auto affine = [&](const std::vector<double>& a, double wa, const std::vector<double>& b, double wb) {
    std::vector<double> out(d);
    for (std::size_t i = 0; i < d; ++i) out[i] = wa * a[i] + wb * b[i];
    return out;
  };
  order();

  int it = 0;
  Termination why = Termination::Budget;
  while (it < spec.max_iterations) {
    double xspread = 0.0, fspread = 0.0;
    for (std::size_t j = 1; j <= d; ++j) {
      fspread = std::max(fspread, std::abs(fsim[j] - fsim[0]));
      for (std::size_t i = 0; i < d; ++i) xspread = std::max(xspread, std::abs(sim[j][i] - sim[0][i]));
    }
    if (xspread <= spec.nelder_mead.xatol && fspread <= spec.nelder_mead.fatol) {
      why = Termination::InternalConvergence;
      break;
    }

    std::vector<double> xbar(d, 0.0);
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t i = 0; i < d; ++i) xbar[i] += sim[j][i] / dd;
    const auto& worst = sim[d];

    const auto xr = affine(xbar, 1.0 + rho, worst, -rho);
    const double fr = eval(xr);
    bool shrink = false;
    if (fr < fsim[0]) {
      const auto xe = affine(xbar, 1.0 + rho * chi, worst, -rho * chi);
      const double fe = eval(xe);
      if (fe < fr) {
        sim[d] = xe;
        fsim[d] = fe;
      } else {
        sim[d] = xr;
        fsim[d] = fr;
      }
    } else if (fr < fsim[d - 1]) {
      sim[d] = xr;
      fsim[d] = fr;
    } else if (fr < fsim[d]) {
      const auto xc = affine(xbar, 1.0 + psi * rho, worst, -psi * rho);
      const double fc = eval(xc);
      if (fc <= fr) {
        sim[d] = xc;
        fsim[d] = fc;
      } else {
        shrink = true;
      }
    } else {
      const auto xcc = affine(xbar, 1.0 - psi, worst, psi);
      const double fcc = eval(xcc);
      if (fcc < fsim[d]) {
        sim[d] = xcc;
        fsim[d] = fcc;
      } else {
        shrink = true;
      }
    }
    if (shrink) {
      for (std::size_t j = 1; j <= d; ++j) {
        sim[j] = affine(sim[0], 1.0 - sigma, sim[j], sigma);
        fsim[j] = eval(sim[j]);
      }
    }
    order();
    ++it;
    trace.push_back(eval.best_value());
    if (reached(spec, eval.best_value())) {
      why = Termination::EarlyStop;
      break;
    }
  }
  return eval.finish(it, init_evals, std::move(trace), why);
}

OptimizeResult minimize_cobyla(const Objective& f, std::vector<double> theta0,
                               const OptimizerSpec& spec) {
  check_start(theta0);
  spec.validate();
  const std::size_t d = theta0.size();
  constexpr double kAlpha = 0.25;  // simplex acceptability: min face distance
  constexpr double kBeta = 2.1;    // simplex acceptability: max edge length
  constexpr double kGamma = 0.5;   // geometry step length factor
  constexpr double kDelta = 1.1;   // edge threshold when choosing the vertex to drop
  double rho = spec.cobyla.rho_begin;
  const double rho_end = spec.cobyla.rho_end;

  Tracker eval(f, d);
  std::vector<std::vector<double>> vert(d + 1, theta0);
  std::vector<double> fval(d + 1);
  fval[0] = eval(vert[0]);
  if (spec.max_iterations == 0) {
    return eval.finish(0, 1, {}, Termination::Budget);
  }
  for (std::size_t j = 0; j < d; ++j) {
    vert[j + 1][j] += rho;
    fval[j + 1] = eval(vert[j + 1]);
  }
  const int init_evals = eval.evaluations();

  std::vector<double> trace;
  int it = 0;
  std::size_t pole = 0;
  bool trust_branch = true;  // attempt a trust-region step before any geometry step
  Termination why = Termination::InternalConvergence;
  if (reached(spec, eval.best_value())) {
    return eval.finish(0, init_evals, {}, Termination::EarlyStop);
  }

  Matrix disp(d, std::vector<double>(d)), inv;
  std::vector<std::size_t> others;
  std::vector<double> grad(d), vsig(d), veta(d), dx(d), xnew(d);

  auto record_iteration = [&]() -> bool {
    ++it;
    trace.push_back(eval.best_value());
    if (reached(spec, eval.best_value())) {
      why = Termination::EarlyStop;
      return true;
    }
    return false;
  };

  while (true) {
    // Best vertex becomes the pole; ties keep the current pole.
    for (std::size_t j = 0; j <= d; ++j)
      if (fval[j] < fval[pole]) pole = j;
    others.clear();
    for (std::size_t j = 0; j <= d; ++j)
      if (j != pole) others.push_back(j);

    // disp rows are displacement vectors; inv satisfies inv * disp^T = I,
    // so inv row j is the dual vector of displacement j.
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t i = 0; i < d; ++i) disp[i][j] = vert[others[j]][i] - vert[pole][i];
    if (!invert(disp, inv)) {
      why = Termination::InternalConvergence;
      break;
    }
    // inv is the inverse of the matrix whose columns are displacements:
    // row j of inv dotted with displacement k gives delta_jk.
    for (std::size_t i = 0; i < d; ++i) {
      grad[i] = 0.0;
      for (std::size_t j = 0; j < d; ++j) grad[i] += (fval[others[j]] - fval[pole]) * inv[j][i];
    }

    const double parsig = kAlpha * rho;
    const double pareta = kBeta * rho;
    bool acceptable = true;
    for (std::size_t j = 0; j < d; ++j) {
      double ws = 0.0, we = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        ws += inv[j][i] * inv[j][i];
        we += disp[i][j] * disp[i][j];
      }
      vsig[j] = 1.0 / std::sqrt(ws);
      veta[j] = std::sqrt(we);
      if (vsig[j] < parsig || veta[j] > pareta) acceptable = false;
    }

    if (!trust_branch && !acceptable) {
      // Geometry step: replace the vertex that most spoils the simplex.
      std::size_t jdrop = d;
      double temp = pareta;
      for (std::size_t j = 0; j < d; ++j) {
        if (veta[j] > temp) {
          jdrop = j;
          temp = veta[j];
        }
      }
      if (jdrop == d) {
        for (std::size_t j = 0; j < d; ++j) {
          if (vsig[j] < temp) {
            jdrop = j;
            temp = vsig[j];
          }
        }
      }
      const double len = kGamma * rho * vsig[jdrop];
      double slope = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        dx[i] = len * inv[jdrop][i];
        slope += grad[i] * dx[i];
      }
      const double sign = slope > 0.0 ? -1.0 : 1.0;
      if (it >= spec.max_iterations) {
        why = Termination::Budget;
        break;
      }
      for (std::size_t i = 0; i < d; ++i) xnew[i] = vert[pole][i] + sign * dx[i];
      const double fnew = eval(xnew);
      vert[others[jdrop]] = xnew;
      fval[others[jdrop]] = fnew;
      trust_branch = true;
      if (record_iteration()) break;
      continue;
    }

    bool reduce = false;
    const double gnorm = norm2(grad);
    if (gnorm == 0.0) {
      // Linear model is flat: the step would be shorter than rho / 2.
      reduce = true;
    } else {
      if (it >= spec.max_iterations) {
        why = Termination::Budget;
        break;
      }
      for (std::size_t i = 0; i < d; ++i) {
        dx[i] = -rho * grad[i] / gnorm;
        xnew[i] = vert[pole][i] + dx[i];
      }
      const double predicted = rho * gnorm;
      const double fnew = eval(xnew);
      const double actual = fval[pole] - fnew;

      // Choose the vertex to replace; mandatory when the step improved f.
      double ratio = actual <= 0.0 ? 1.0 : 0.0;
      std::size_t jdrop = d;
      std::vector<double> sigbar(d);
      for (std::size_t j = 0; j < d; ++j) {
        double t = 0.0;
        for (std::size_t i = 0; i < d; ++i) t += inv[j][i] * dx[i];
        t = std::abs(t);
        if (t > ratio) {
          jdrop = j;
          ratio = t;
        }
        sigbar[j] = t * vsig[j];
      }
      double edgmax = kDelta * rho;
      std::size_t far = d;
      for (std::size_t j = 0; j < d; ++j) {
        if (sigbar[j] >= parsig || sigbar[j] >= vsig[j]) {
          double t = veta[j];
          if (actual > 0.0) {
            t = 0.0;
            for (std::size_t i = 0; i < d; ++i) t += (dx[i] - disp[i][j]) * (dx[i] - disp[i][j]);
            t = std::sqrt(t);
          }
          if (t > edgmax) {
            far = j;
            edgmax = t;
          }
        }
      }
      if (far != d) jdrop = far;
      if (jdrop != d) {
        vert[others[jdrop]] = xnew;
        fval[others[jdrop]] = fnew;
      }
      if (record_iteration()) break;
      if (actual > 0.0 && actual >= 0.1 * predicted) continue;
      reduce = true;
    }

    if (reduce) {
      if (!acceptable) {
        trust_branch = false;
        continue;
      }
      if (rho > rho_end) {
        rho *= 0.5;
        if (rho <= 1.5 * rho_end) rho = rho_end;
        trust_branch = true;
        continue;
      }
      why = Termination::InternalConvergence;
      break;
    }
  }
  return eval.finish(it, init_evals, std::move(trace), why);
}

OptimizeResult minimize(const Objective& f, std::vector<double> theta0, const OptimizerSpec& spec,
                        Rng& rng) {
  switch (spec.kind) {
    case OptimizerKind::COBYLA: return minimize_cobyla(f, std::move(theta0), spec);
    case OptimizerKind::SPSA: return minimize_spsa(f, std::move(theta0), spec, rng);
    case OptimizerKind::NelderMead: return minimize_nelder_mead(f, std::move(theta0), spec);
  }
  throw std::invalid_argument("unhandled optimizer");
}

}  // namespace qnnbench
