#include "sketchlab/gjtrace.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sketchlab/linalg.hpp"
#include "sketchlab/pinv.hpp"
#include "sketchlab/rng.hpp"

namespace sketchlab::gj {

namespace {

constexpr std::uint64_t kConstToken = 0xC0A57C0A57ULL;
constexpr std::uint64_t kInputToken = 0x1A9E7ULL;

std::uint64_t combine(std::uint64_t op, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(splitmix64(op) ^ a) + 0x632BE59BD9B4E019ULL * b);
}

void require_rows(std::size_t m, const std::vector<DenseMatrix>& suite, const char* who) {
  for (const auto& z : suite)
    if (z.rows() != m) {
      throw ParameterError(std::string(who) + ": suite matrix " + z.shape_string() +
                           " does not have m=" + std::to_string(m) + " rows");
    }
}

DenseMatrix unit_scaled(const DenseMatrix& z) {
  const double norm = frob_norm(z);
  return norm == 0.0 ? z : (1.0 / norm) * z;
}

}  // namespace

TracedScalar::TracedScalar(double value) : value_(value), node_(splitmix64(kConstToken)) {}

TracedScalar traced_arith(Op op, const TracedScalar& a, const TracedScalar& b) {
  TracedScalar out;
  out.tape_ = a.tape_ != nullptr ? a.tape_ : b.tape_;
  switch (op) {
    case Op::kAdd:
    case Op::kSub:
      out.value_ = op == Op::kAdd ? a.value_ + b.value_ : a.value_ - b.value_;
      out.num_deg_ = std::max(a.num_deg_ + b.den_deg_, b.num_deg_ + a.den_deg_);
      out.den_deg_ = a.den_deg_ + b.den_deg_;
      break;
    case Op::kMul:
      out.value_ = a.value_ * b.value_;
      out.num_deg_ = a.num_deg_ + b.num_deg_;
      out.den_deg_ = a.den_deg_ + b.den_deg_;
      break;
    case Op::kDiv:
      if (b.value_ == 0.0) {
        throw NumericError("gj audit fault: division by a zero-valued expression; "
                           "the divisor is not guarded by a branch");
      }
      out.value_ = a.value_ / b.value_;
      out.num_deg_ = a.num_deg_ + b.den_deg_;
      out.den_deg_ = a.den_deg_ + b.num_deg_;
      break;
  }
  out.node_ = combine(static_cast<std::uint64_t>(op), a.node_, b.node_);
  if (out.tape_ != nullptr) out.tape_->observe(out);
  return out;
}

TracedScalar Tape::input(std::size_t index, double value) {
  TracedScalar v(value);
  v.num_deg_ = 1;
  v.den_deg_ = 0;
  v.node_ = combine(kInputToken, index, 0);
  v.tape_ = this;
  observe(v);
  return v;
}

bool Tape::branch(const TracedScalar& v, BranchKind kind) {
  predicates_.emplace(v.node(), static_cast<int>(kind));
  ++branch_events_;
  observe(v);
  switch (kind) {
    case BranchKind::kNonNegative: return v.value() >= 0.0;
    case BranchKind::kNonPositive: return v.value() <= 0.0;
    case BranchKind::kZero: return std::abs(v.value()) <= kTracedZeroTol;
  }
  return false;
}

void Tape::observe(const TracedScalar& v) { max_degree_ = std::max(max_degree_, v.degree()); }

GjReport Tape::report() const { return {max_degree_, predicates_.size(), branch_events_}; }

void Tape::merge(const Tape& other) {
  predicates_.insert(other.predicates_.begin(), other.predicates_.end());
  branch_events_ += other.branch_events_;
  max_degree_ = std::max(max_degree_, other.max_degree_);
}

bool traced_branch(const TracedScalar& v, BranchKind kind) {
  if (v.tape() == nullptr) {
    throw ParameterError("traced_branch: value is not attached to an audit tape");
  }
  return v.tape()->branch(v, kind);
}

TracedMatrix trace_inputs(Tape& tape, const DenseMatrix& z) {
  TracedMatrix out(z.rows(), z.cols());
  for (std::size_t i = 0; i < z.rows(); ++i)
    for (std::size_t j = 0; j < z.cols(); ++j) out(i, j) = tape.input(i * z.cols() + j, z(i, j));
  return out;
}

std::vector<DenseMatrix> dependence_suite(std::size_t rows, std::uint64_t seed) {
  if (rows == 0 || rows > 20) throw ParameterError("dependence_suite: rows must be in 1..20");
  const std::size_t cols = rows + 1;
  std::vector<DenseMatrix> suite;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << rows); ++mask) {
    CounterRng rng(seed, Stream::kTest, mask);
    DenseMatrix z(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
      if ((mask >> i) & 1U) {
        for (std::size_t j = 0; j < cols; ++j) z(i, j) = rng.normal();
      } else {
        for (std::size_t p = 0; p < i; ++p) {
          const double w = rng.normal();
          for (std::size_t j = 0; j < cols; ++j) z(i, j) += w * z(p, j);
        }
      }
    }
    suite.push_back(std::move(z));
  }
  return suite;
}

std::vector<DenseMatrix> full_rank_suite(std::size_t rows, std::size_t count, std::uint64_t seed) {
  std::vector<DenseMatrix> suite;
  for (std::size_t c = 0; c < count; ++c) {
    CounterRng rng(seed, Stream::kTest, c);
    DenseMatrix z(rows, rows + 1);
    for (double& v : z.values()) v = rng.normal();
    suite.push_back(std::move(z));
  }
  return suite;
}

std::vector<DenseMatrix> rank_suite(std::size_t rows, std::size_t per_rank, std::uint64_t seed) {
  std::vector<DenseMatrix> suite;
  const std::size_t cols = rows + 1;
  for (std::size_t rank = 0; rank <= rows; ++rank) {
    for (std::size_t rep = 0; rep < per_rank; ++rep) {
      CounterRng rng(seed, Stream::kTest, rank * 1000 + rep);
      DenseMatrix left(rows, rank);
      DenseMatrix right(rank, cols);
      for (double& v : left.values()) v = rng.normal();
      for (double& v : right.values()) v = rng.normal();
      suite.push_back(rank == 0 ? DenseMatrix(rows, cols) : matmul(left, right));
    }
  }
  return suite;
}

GjReport audit_pinv_decell(std::size_t m, const std::vector<DenseMatrix>& suite) {
  require_rows(m, suite, "audit_pinv_decell");
  Tape total;
  for (const auto& z : suite) {
    Tape tape;
    const TracedMatrix traced = trace_inputs(tape, unit_scaled(z));
    decell_pinv(traced, [](const TracedScalar& c) { return !traced_branch(c, BranchKind::kZero); });
    total.merge(tape);
  }
  return total.report();
}

GjReport audit_pinv_greedy(std::size_t m, const std::vector<DenseMatrix>& suite) {
  require_rows(m, suite, "audit_pinv_greedy");
  Tape total;
  for (const auto& z : suite) {
    Tape tape;
    const TracedMatrix traced = trace_inputs(tape, unit_scaled(z));
    greedy_pinv_projector(traced,
                          [](const TracedScalar& c) { return !traced_branch(c, BranchKind::kZero); });
    total.merge(tape);
  }
  return total.report();
}

}  // namespace sketchlab::gj
