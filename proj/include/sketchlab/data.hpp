#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "sketchlab/matrix.hpp"

namespace sketchlab {

struct DatasetParams {
  std::size_t n = 100;
  std::size_t d = 50;
  std::size_t k_true = 5;
  double noise_scale = 0.1;
  std::size_t count = 300;
  std::size_t split_train = 200;
  std::size_t trials = 30;
  std::uint64_t master_seed = 0;
  bool resample_true = false;  // draw a fresh signal for every instance

  void validate() const;
};

/// Rank-k_true signal: product of n×k and k×d matrices with U[0,1] entries.
/// Drawn from (master_seed, kTrueSignal, stream_index).
DenseMatrix gen_true_signal(const DatasetParams& params, std::uint64_t stream_index = 0);

/// A = A_true + noise_scale · N(0,1) noise, scaled to ‖A‖_F = 1. Noise comes
/// from (master_seed, kNoise, instance_seed); a zero result is redrawn with
/// the next seed.
DenseMatrix gen_instance(const DatasetParams& params, const DenseMatrix& true_signal,
                         std::uint64_t instance_seed);
DenseMatrix gen_instance(const DatasetParams& params, std::uint64_t instance_seed);

std::vector<DenseMatrix> gen_dataset(const DatasetParams& params);

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Deterministic permutation from (master_seed, kSplit, trial_index); the
/// first split_train indices train, the rest test.
Split split_indices(const DatasetParams& params, std::size_t trial_index);

std::pair<std::vector<DenseMatrix>, std::vector<DenseMatrix>> split(
    const std::vector<DenseMatrix>& dataset, const DatasetParams& params, std::size_t trial_index);

/// Binary matrix file: 8-byte magic "SKLDMAT1", uint32 n, uint32 d (little
/// endian), then n·d little-endian IEEE-754 doubles in row-major order.
void write_matrix_file(const std::filesystem::path& path, const DenseMatrix& a);
DenseMatrix read_matrix_file(const std::filesystem::path& path);

}  // namespace sketchlab
