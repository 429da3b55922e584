#include "sketchlab/data.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <numeric>
#include <string>

#include "sketchlab/linalg.hpp"
#include "sketchlab/rng.hpp"

namespace sketchlab {

namespace {

constexpr std::array<char, 8> kMagic = {'S', 'K', 'L', 'D', 'M', 'A', 'T', '1'};

template <typename U>
void put_le(std::ostream& out, U value) {
  static_assert(std::is_unsigned_v<U>);
  for (std::size_t b = 0; b < sizeof(U); ++b) out.put(static_cast<char>((value >> (8 * b)) & 0xFF));
}

template <typename U>
U get_le(std::istream& in) {
  U value = 0;
  for (std::size_t b = 0; b < sizeof(U); ++b) {
    const int c = in.get();
    if (c == EOF) throw std::ios_base::failure("unexpected end of file");
    value |= static_cast<U>(static_cast<unsigned char>(c)) << (8 * b);
  }
  return value;
}

}  // namespace

void DatasetParams::validate() const {
  if (n == 0 || d == 0) throw ParameterError("dataset: n and d must be positive");
  if (k_true < 1 || k_true > d || d > n) throw ParameterError("dataset: need 1 <= k_true <= d <= n");
  if (!(noise_scale >= 0.0)) throw ParameterError("dataset: noise_scale must be non-negative");
  if (count == 0) throw ParameterError("dataset: count must be positive");
  if (split_train >= count) throw ParameterError("dataset: split_train must be below count");
  if (trials == 0) throw ParameterError("dataset: trials must be positive");
}

DenseMatrix gen_true_signal(const DatasetParams& params, std::uint64_t stream_index) {
  CounterRng rng(params.master_seed, Stream::kTrueSignal, stream_index);
  DenseMatrix left(params.n, params.k_true);
  DenseMatrix right(params.k_true, params.d);
  for (double& v : left.values()) v = rng.uniform();
  for (double& v : right.values()) v = rng.uniform();
  return matmul(left, right);
}

DenseMatrix gen_instance(const DatasetParams& params, const DenseMatrix& true_signal,
                         std::uint64_t instance_seed) {
  for (std::uint64_t seed = instance_seed;; ++seed) {
    CounterRng rng(params.master_seed, Stream::kNoise, seed);
    DenseMatrix a = true_signal;
    if (params.noise_scale > 0.0)
      for (double& v : a.values()) v += params.noise_scale * rng.normal();
    const double norm = frob_norm(a);
    if (norm > 0.0) return (1.0 / norm) * a;
  }
}

DenseMatrix gen_instance(const DatasetParams& params, std::uint64_t instance_seed) {
  const std::uint64_t signal_index = params.resample_true ? instance_seed + 1 : 0;
  return gen_instance(params, gen_true_signal(params, signal_index), instance_seed);
}

std::vector<DenseMatrix> gen_dataset(const DatasetParams& params) {
  params.validate();
  std::vector<DenseMatrix> out;
  out.reserve(params.count);
  const DenseMatrix shared = gen_true_signal(params, 0);
  for (std::size_t i = 0; i < params.count; ++i) {
    if (params.resample_true) out.push_back(gen_instance(params, i));
    else out.push_back(gen_instance(params, shared, i));
  }
  return out;
}

Split split_indices(const DatasetParams& params, std::size_t trial_index) {
  params.validate();
  if (trial_index >= params.trials) {
    throw ParameterError("split: trial index " + std::to_string(trial_index) + " >= trials " +
                         std::to_string(params.trials));
  }
  std::vector<std::size_t> perm(params.count);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  CounterRng rng(params.master_seed, Stream::kSplit, trial_index);
  for (std::size_t i = perm.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(perm[i - 1], perm[j]);
  }
  Split out;
  out.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(params.split_train));
  out.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(params.split_train), perm.end());
  return out;
}

std::pair<std::vector<DenseMatrix>, std::vector<DenseMatrix>> split(
    const std::vector<DenseMatrix>& dataset, const DatasetParams& params, std::size_t trial_index) {
  if (dataset.size() != params.count) throw ParameterError("split: dataset size does not match count");
  const Split s = split_indices(params, trial_index);
  std::pair<std::vector<DenseMatrix>, std::vector<DenseMatrix>> out;
  for (std::size_t i : s.train) out.first.push_back(dataset[i]);
  for (std::size_t i : s.test) out.second.push_back(dataset[i]);
  return out;
}

void write_matrix_file(const std::filesystem::path& path, const DenseMatrix& a) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::ios_base::failure("cannot open " + path.string() + " for writing");
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(a.rows()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(a.cols()));
  for (double v : a.values()) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  if (!out) throw std::ios_base::failure("write failed for " + path.string());
}

DenseMatrix read_matrix_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open " + path.string());
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw std::ios_base::failure("bad magic in " + path.string());
  const auto n = get_le<std::uint32_t>(in);
  const auto d = get_le<std::uint32_t>(in);
  std::vector<double> values(static_cast<std::size_t>(n) * d);
  for (double& v : values) v = std::bit_cast<double>(get_le<std::uint64_t>(in));
  return DenseMatrix(n, d, std::move(values));
}

}  // namespace sketchlab
