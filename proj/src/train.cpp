#include "sketchlab/train.hpp"

#include <algorithm>
#include <cmath>

#include "sketchlab/linalg.hpp"
#include "sketchlab/rng.hpp"
#include "sketchlab/scw.hpp"

namespace sketchlab {

std::string to_string(TrainMode mode) {
  switch (mode) {
    case TrainMode::kFix: return "fix";
    case TrainMode::kLearn: return "learn";
    case TrainMode::kDense: return "dense";
  }
  return "?";
}

TrainMode parse_train_mode(const std::string& text) {
  if (text == "fix") return TrainMode::kFix;
  if (text == "learn") return TrainMode::kLearn;
  if (text == "dense") return TrainMode::kDense;
  throw ParameterError("unknown training mode '" + text + "' (expected fix, learn or dense)");
}

void TrainConfig::validate(std::size_t m) const {
  if (!(eta > 0.0)) throw ParameterError("train: eta must be positive");
  if (iterations < 1) throw ParameterError("train: iterations must be at least 1");
  if (k < 1 || k > m) throw ParameterError("train: need 1 <= k <= m");
  if (mode != TrainMode::kDense && (s < 1 || s > m)) {
    throw ParameterError("train: need 1 <= s <= m for sparse modes");
  }
}

SurrogateInstance prepare_instance(const DenseMatrix& a, std::size_t k) {
  SvdResult f = svd(a);
  if (f.rank < k) {
    throw ContractError("surrogate: rank(A)=" + std::to_string(f.rank) + " is below k=" +
                        std::to_string(k));
  }
  return {a, std::move(f.u), k};
}

std::vector<SurrogateInstance> prepare_instances(std::span<const DenseMatrix> dataset, std::size_t k) {
  std::vector<SurrogateInstance> out;
  out.reserve(dataset.size());
  for (const auto& a : dataset) out.push_back(prepare_instance(a, k));
  return out;
}

namespace {

// E = HᵀG − I₀ with G = SU, H = first k columns of G.
DenseMatrix residual(const DenseMatrix& g, std::size_t k) {
  const std::size_t m = g.rows();
  const std::size_t r = g.cols();
  DenseMatrix e(k, r);
  for (std::size_t t = 0; t < m; ++t) {
    auto g_row = g.row(t);
    for (std::size_t i = 0; i < k; ++i) {
      const double hti = g_row[i];
      auto e_row = e.row(i);
      for (std::size_t j = 0; j < r; ++j) e_row[j] += hti * g_row[j];
    }
  }
  for (std::size_t i = 0; i < k; ++i) e(i, i) -= 1.0;
  return e;
}

void check_sketch(const DenseMatrix& sketch, const SurrogateInstance& inst) {
  if (sketch.cols() != inst.u.rows()) {
    throw ParameterError("surrogate: sketch " + sketch.shape_string() + " incompatible with n=" +
                         std::to_string(inst.u.rows()));
  }
}

}  // namespace

double surrogate_loss(const DenseMatrix& sketch, const SurrogateInstance& inst) {
  check_sketch(sketch, inst);
  return frob_norm_sq(residual(matmul(sketch, inst.u), inst.k));
}

double surrogate_loss(const DenseMatrix& sketch, const DenseMatrix& a, std::size_t k) {
  return surrogate_loss(sketch, prepare_instance(a, k));
}

double surrogate_loss(const SparseSketch& sketch, const DenseMatrix& a, std::size_t k) {
  const SurrogateInstance inst = prepare_instance(a, k);
  return frob_norm_sq(residual(apply(sketch, inst.u), k));
}

double surrogate_loss_and_grad(const DenseMatrix& sketch, const SurrogateInstance& inst,
                               DenseMatrix& grad) {
  check_sketch(sketch, inst);
  const std::size_t k = inst.k;
  const std::size_t m = sketch.rows();
  const std::size_t n = inst.u.rows();
  const std::size_t r = inst.u.cols();
  const DenseMatrix g = matmul(sketch, inst.u);
  const DenseMatrix e = residual(g, k);

  // coef (m×r) holds G Eᵀ in its first k columns plus H E, so that
  // ∇ = 2 · coef · Uᵀ: the G Eᵀ U_kᵀ term only touches the first k columns of U.
  DenseMatrix coef(m, r);
  for (std::size_t t = 0; t < m; ++t) {
    auto g_row = g.row(t);
    auto c_row = coef.row(t);
    for (std::size_t i = 0; i < k; ++i) {
      auto e_row = e.row(i);
      double acc = 0.0;
      for (std::size_t j = 0; j < r; ++j) acc += g_row[j] * e_row[j];
      c_row[i] += acc;
      const double hti = g_row[i];
      for (std::size_t j = 0; j < r; ++j) c_row[j] += hti * e_row[j];
    }
  }
  grad = DenseMatrix(m, n);
  for (std::size_t t = 0; t < m; ++t) {
    auto c_row = coef.row(t);
    auto out = grad.row(t);
    for (std::size_t p = 0; p < n; ++p) {
      auto u_row = inst.u.row(p);
      double acc = 0.0;
      for (std::size_t j = 0; j < r; ++j) acc += c_row[j] * u_row[j];
      out[p] = 2.0 * acc;
    }
  }
  return frob_norm_sq(e);
}

DenseMatrix surrogate_grad(const DenseMatrix& sketch, const SurrogateInstance& inst) {
  DenseMatrix grad;
  surrogate_loss_and_grad(sketch, inst, grad);
  return grad;
}

DenseMatrix surrogate_grad(const DenseMatrix& sketch, const DenseMatrix& a, std::size_t k) {
  return surrogate_grad(sketch, prepare_instance(a, k));
}

DenseMatrix initial_sketch(std::size_t m, std::size_t n, const TrainConfig& config) {
  const std::size_t budget = config.mode == TrainMode::kDense ? m : config.s;
  return densify(random_sparse_init(m, n, budget, derive_key(config.seed, Stream::kTrainer, 0)));
}

namespace {

std::size_t budget_of(const TrainConfig& config, std::size_t m) {
  return config.mode == TrainMode::kDense ? m : config.s;
}

TrainTrace run(std::span<const SurrogateInstance> dataset, DenseMatrix sketch,
               const TrainConfig& config) {
  if (dataset.empty()) throw ParameterError("train: empty dataset");
  const std::size_t m = sketch.rows();
  config.validate(m);
  for (const auto& inst : dataset) {
    require_unit_norm(inst.a, "train");
    if (inst.k != config.k) throw ParameterError("train: instance prepared for a different k");
  }
  const std::size_t budget = budget_of(config, m);
  const Support mask = project_top_s(sketch, budget).support();

  CounterRng sampler(config.seed, Stream::kTrainer, 1);
  TrainTrace trace{{}, project_top_s(sketch, budget), {}};
  trace.records.reserve(config.iterations);
  DenseMatrix grad;

  for (std::size_t it = 0; it < config.iterations; ++it) {
    const auto& inst = dataset[static_cast<std::size_t>(sampler.below(dataset.size()))];
    TrainRecord rec;
    rec.iteration = it;
    rec.surrogate_loss = surrogate_loss_and_grad(sketch, inst, grad);
    if (!std::isfinite(rec.surrogate_loss) || rec.surrogate_loss > config.divergence_limit) {
      throw NumericError("train: surrogate loss " + std::to_string(rec.surrogate_loss) +
                         " exceeded the divergence limit at iteration " + std::to_string(it) +
                         " (mode " + to_string(config.mode) + ", eta " + std::to_string(config.eta) +
                         ")");
    }
    if (config.record_scw) rec.scw_loss_sampled = scw_loss(sketch, inst.a, config.k);
    if (config.train_mean_every > 0 && it % config.train_mean_every == 0) {
      double total = 0.0;
      for (const auto& other : dataset) total += scw_loss(sketch, other.a, config.k);
      rec.scw_loss_train_mean = total / static_cast<double>(dataset.size());
    }
    trace.records.push_back(rec);

    auto s_vals = sketch.values();
    auto g_vals = grad.values();
    for (std::size_t i = 0; i < s_vals.size(); ++i) s_vals[i] -= config.eta * g_vals[i];

    switch (config.mode) {
      case TrainMode::kFix: sketch = densify(sparsify_mask(sketch, mask, budget)); break;
      case TrainMode::kLearn: sketch = densify(project_top_s(sketch, budget)); break;
      case TrainMode::kDense: break;
    }
  }

  trace.final_sketch = config.mode == TrainMode::kFix ? sparsify_mask(sketch, mask, budget)
                                                      : project_top_s(sketch, budget);
  trace.final_dense = std::move(sketch);
  return trace;
}

}  // namespace

TrainTrace sgd_train(std::span<const SurrogateInstance> dataset, std::size_t m,
                     const TrainConfig& config) {
  if (config.mode == TrainMode::kLearn) throw ParameterError("sgd_train: use iht_train for learn mode");
  if (dataset.empty()) throw ParameterError("train: empty dataset");
  config.validate(m);
  return run(dataset, initial_sketch(m, dataset.front().a.rows(), config), config);
}

TrainTrace iht_train(std::span<const SurrogateInstance> dataset, std::size_t m,
                     const TrainConfig& config) {
  if (config.mode != TrainMode::kLearn) throw ParameterError("iht_train: mode must be learn");
  if (dataset.empty()) throw ParameterError("train: empty dataset");
  config.validate(m);
  return run(dataset, initial_sketch(m, dataset.front().a.rows(), config), config);
}

TrainTrace train(std::span<const SurrogateInstance> dataset, std::size_t m,
                 const TrainConfig& config) {
  return config.mode == TrainMode::kLearn ? iht_train(dataset, m, config)
                                          : sgd_train(dataset, m, config);
}

TrainTrace train_from(std::span<const SurrogateInstance> dataset, DenseMatrix start,
                      const TrainConfig& config) {
  return run(dataset, std::move(start), config);
}

}  // namespace sketchlab
