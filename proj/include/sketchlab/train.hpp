#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sketchlab/matrix.hpp"
#include "sketchlab/sketch.hpp"

namespace sketchlab {

enum class TrainMode { kFix, kLearn, kDense };

std::string to_string(TrainMode mode);
TrainMode parse_train_mode(const std::string& text);

struct TrainConfig {
  TrainMode mode = TrainMode::kLearn;
  std::size_t s = 1;            // per-column budget; ignored for dense
  double eta = 0.1;
  std::size_t iterations = 3000;
  std::uint64_t seed = 0;
  std::size_t k = 5;
  std::size_t train_mean_every = 0;  // 0 disables the periodic full-set SCW mean
  bool record_scw = true;            // SCW loss of the sampled instance per step
  double divergence_limit = 1e3;

  void validate(std::size_t m) const;
};

/// One optimizer step. Losses are evaluated at the iterate the step starts
/// from, on the instance sampled for that step.
struct TrainRecord {
  std::size_t iteration = 0;
  double surrogate_loss = 0.0;
  double scw_loss_sampled = std::numeric_limits<double>::quiet_NaN();
  double scw_loss_train_mean = std::numeric_limits<double>::quiet_NaN();
};

struct TrainTrace {
  std::vector<TrainRecord> records;
  SparseSketch final_sketch;
  DenseMatrix final_dense;
};

/// A training matrix with its compact left singular vectors cached.
struct SurrogateInstance {
  DenseMatrix a;
  DenseMatrix u;  // n×r, r = numerical rank
  std::size_t k = 0;
};

/// Throws ContractError when rank(A) < k.
SurrogateInstance prepare_instance(const DenseMatrix& a, std::size_t k);
std::vector<SurrogateInstance> prepare_instances(std::span<const DenseMatrix> dataset, std::size_t k);

/// ‖U_kᵀ Sᵀ S U − I₀‖_F² with I₀ = [I_k, 0] of shape k×r.
double surrogate_loss(const DenseMatrix& sketch, const SurrogateInstance& inst);
double surrogate_loss(const DenseMatrix& sketch, const DenseMatrix& a, std::size_t k);
double surrogate_loss(const SparseSketch& sketch, const DenseMatrix& a, std::size_t k);

/// Gradient with respect to S. With G = SU, H = SU_k and E = HᵀG − I₀:
///   ∇ = 2 (G Eᵀ U_kᵀ + H E Uᵀ).
DenseMatrix surrogate_grad(const DenseMatrix& sketch, const SurrogateInstance& inst);
DenseMatrix surrogate_grad(const DenseMatrix& sketch, const DenseMatrix& a, std::size_t k);

/// Loss and gradient from one shared evaluation of SU.
double surrogate_loss_and_grad(const DenseMatrix& sketch, const SurrogateInstance& inst,
                               DenseMatrix& grad);

/// Initial sketch for a run: random_sparse_init with budget s (fix, learn)
/// or m (dense), densified.
DenseMatrix initial_sketch(std::size_t m, std::size_t n, const TrainConfig& config);

/// SGD on the surrogate loss for fix (update re-masked to the initial
/// support) and dense modes.
TrainTrace sgd_train(std::span<const SurrogateInstance> dataset, std::size_t m,
                     const TrainConfig& config);

/// Stochastic IHT: S ← Π_s(S − η∇L̃(S, A)).
TrainTrace iht_train(std::span<const SurrogateInstance> dataset, std::size_t m,
                     const TrainConfig& config);

/// Dispatches on config.mode.
TrainTrace train(std::span<const SurrogateInstance> dataset, std::size_t m,
                 const TrainConfig& config);

/// Overload that also accepts a starting sketch (used by tests).
TrainTrace train_from(std::span<const SurrogateInstance> dataset, DenseMatrix start,
                      const TrainConfig& config);

}  // namespace sketchlab
