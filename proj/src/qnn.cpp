#include "qnnbench/qnn.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <exception>
#include <cmath>
#include <stdexcept>
#include <mutex>
#include <string>
#include <thread>

namespace qnnbench {

std::string_view decode_name(Decode d) noexcept { return d == Decode::Parity ? "Parity" : "ModuloIndex"; }

Decode decode_from_name(std::string_view name) {
  if (name == "ModuloIndex") return Decode::ModuloIndex;
  if (name == "Parity") return Decode::Parity;
  throw std::invalid_argument("unknown decode '" + std::string(name) + "'");
}

void QnnModel::validate() const {
  feature_map.validate();
  ansatz.validate();
  if (feature_map.n_features != ansatz.n_qubits) {
    throw std::invalid_argument("feature_map width " + std::to_string(feature_map.n_features) +
                                " differs from ansatz width " + std::to_string(ansatz.n_qubits));
  }
  if (n_classes < 2) throw std::invalid_argument("n_classes must be >= 2");
  if (decode == Decode::Parity && n_classes != 2) throw std::invalid_argument("Parity decoding needs n_classes = 2");
  if (shots == 0) throw std::invalid_argument("shots must be positive");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
  if (noise) {
    noise->validate();
    if (noise->n_qubits < n_qubits()) {
      throw std::invalid_argument("noise model covers " + std::to_string(noise->n_qubits) + " qubits, model needs " +
                                  std::to_string(n_qubits()));
    }
  }
}

std::vector<double> decode_counts(const CountsHistogram& counts, int n_classes, Decode decode) {
  if (n_classes < 2) throw std::invalid_argument("n_classes must be >= 2");
  if (decode == Decode::Parity && n_classes != 2) throw std::invalid_argument("Parity decoding needs n_classes = 2");
  std::vector<double> p(static_cast<std::size_t>(n_classes), 0.0);
  const double total = static_cast<double>(counts.total());
  if (total == 0.0) throw std::invalid_argument("empty histogram");
  for (const auto& [idx, c] : counts.counts) {
    const std::uint64_t cls = decode == Decode::Parity ? static_cast<std::uint64_t>(std::popcount(idx) % 2)
                                                       : idx % static_cast<std::uint64_t>(n_classes);
    p[cls] += static_cast<double>(c);
  }
  for (double& v : p) v /= total;
  return p;
}

double cross_entropy_loss(const std::vector<std::vector<double>>& probabilities, const std::vector<int>& labels) {
  if (probabilities.empty()) throw std::invalid_argument("cross-entropy of an empty batch");
  if (probabilities.size() != labels.size()) throw std::invalid_argument("probability/label count mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto& p = probabilities[i];
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= p.size()) {
      throw std::invalid_argument("label out of range");
    }
    acc -= std::log(p[static_cast<std::size_t>(labels[i])] + 1e-10);
  }
  return acc / static_cast<double>(labels.size());
}

namespace {

/// Compiled circuits plus, on the noiseless path, cached encoded states.
class Executor {
 public:
  explicit Executor(const QnnModel& model)
      : model_(model),
        feature_map_(build_feature_map(model.feature_map)),
        ansatz_(build_ansatz(model.ansatz)),
        composed_(ParamCircuit::compose(feature_map_, ansatz_)) {
    model_.validate();
  }

  int weight_count() const { return ansatz_.weight_slot_count(); }
  bool noiseless() const { return !model_.noise.has_value(); }

  void check(std::span<const double> x, std::span<const double> theta) const {
    if (x.size() != static_cast<std::size_t>(feature_map_.data_slot_count())) {
      throw std::invalid_argument("expected " + std::to_string(feature_map_.data_slot_count()) + " features, got " +
                                  std::to_string(x.size()));
    }
    if (theta.size() != static_cast<std::size_t>(weight_count())) {
      throw std::invalid_argument("expected " + std::to_string(weight_count()) + " weights, got " +
                                  std::to_string(theta.size()));
    }
  }

  StateVector encode(std::span<const double> x) const {
    return run_statevector(qnnbench::bind(feature_map_, x, {}));
  }

  std::vector<double> probabilities_from_encoded(const StateVector& encoded, const BoundCircuit& bound_ansatz,
                                                 Rng& rng) const {
    StateVector s = encoded;
    run_on(s, bound_ansatz);
    return decode_counts(sample_counts(s, model_.shots, rng), model_.n_classes, model_.decode);
  }

  std::vector<double> probabilities(std::span<const double> x, std::span<const double> theta, Rng& rng) const {
    check(x, theta);
    if (noiseless()) return probabilities_from_encoded(encode(x), qnnbench::bind(ansatz_, {}, theta), rng);
    std::vector<double> w(theta.begin(), theta.end());
    const auto bound = qnnbench::bind(composed_, x, w);
    return decode_counts(run_noisy_trajectories(bound, *model_.noise, model_.shots, rng), model_.n_classes,
                         model_.decode);
  }

  const QnnModel& model() const { return model_; }
  const ParamCircuit& ansatz() const { return ansatz_; }

 private:
  QnnModel model_;
  ParamCircuit feature_map_;
  ParamCircuit ansatz_;
  ParamCircuit composed_;
};

// Calls fn(i) for i in [0, n) on `threads` workers with a static stride.
template <class Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t t = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (std::size_t w = 0; w < t; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += t) fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

std::vector<double> predict_proba(const QnnModel& model, std::span<const double> x, std::span<const double> theta,
                                  Rng& rng) {
  return Executor(model).probabilities(x, theta, rng);
}

TrainedModel train(const QnnModel& model, const Dataset& train_set, const OptimizerSpec& optimizer,
                   const InitializerSpec& init, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  if (train_set.size() == 0) throw std::invalid_argument("training set is empty");
  train_set.validate();
  const Executor exec(model);
  if (train_set.dims() != static_cast<std::size_t>(model.feature_map.n_features)) {
    throw std::invalid_argument("training features have width " + std::to_string(train_set.dims()) +
                                ", model expects " + std::to_string(model.feature_map.n_features));
  }
  for (int y : train_set.labels) {
    if (y >= model.n_classes) throw std::invalid_argument("training label exceeds model n_classes");
  }
  optimizer.validate();

  Rng init_rng(derive_seed(seed, 1));
  Rng opt_rng(derive_seed(seed, 2));
  const std::uint64_t eval_base = derive_seed(seed, 3);

  std::vector<StateVector> encoded;
  if (exec.noiseless()) {
    encoded.reserve(train_set.size());
    for (const auto& x : train_set.features) encoded.push_back(exec.encode(x));
  }

  std::uint64_t eval_counter = 0;
  const std::size_t n = train_set.size();
  std::vector<std::vector<double>> probs(n);
  const Objective loss = [&](std::span<const double> theta) {
    const std::uint64_t eval_seed = derive_seed(eval_base, eval_counter++);
    if (exec.noiseless()) {
      const auto bound = qnnbench::bind(exec.ansatz(), {}, theta);
      parallel_for(n, model.threads, [&](std::size_t i) {
        Rng rng(derive_seed(eval_seed, i));
        probs[i] = exec.probabilities_from_encoded(encoded[i], bound, rng);
      });
    } else {
      parallel_for(n, model.threads, [&](std::size_t i) {
        Rng rng(derive_seed(eval_seed, i));
        probs[i] = exec.probabilities(train_set.features[i], theta, rng);
      });
    }
    return cross_entropy_loss(probs, train_set.labels);
  };

  TrainedModel out;
  out.model = model;
  out.initial_theta = initialize_params(init, exec.weight_count(), init_rng);
  if (optimizer.max_iterations == 0) {
    OptimizeResult r;
    r.best_point = out.initial_theta;
    r.best_value = loss(out.initial_theta);
    r.evaluations_used = 1;
    r.terminated_by = Termination::Budget;
    out.trace = std::move(r);
  } else {
    out.trace = minimize(loss, out.initial_theta, optimizer, opt_rng);
  }
  out.theta = out.trace.best_point;
  out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::vector<int> predict(const TrainedModel& trained, const Matrix& x, std::uint64_t seed) {
  const Executor exec(trained.model);
  std::vector<int> out(x.size());
  parallel_for(x.size(), trained.model.threads, [&](std::size_t i) {
    Rng rng(derive_seed(seed, i));
    const auto p = exec.probabilities(x[i], trained.theta, rng);
    out[i] = static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
  });
  return out;
}

}  // namespace qnnbench
