#pragma once

// Goldberg–Jerrum instrumentation: algorithms templated on their scalar type
// are run over TracedScalar, which records an upper bound on the degree of
// the rational function each value computes and the structural identity of
// every branch predicate.

#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sketchlab/matrix.hpp"

namespace sketchlab::gj {

enum class Op : std::uint64_t { kAdd = 11, kSub = 12, kMul = 13, kDiv = 14 };

enum class BranchKind : int { kNonNegative = 0, kNonPositive = 1, kZero = 2 };

/// Zero-test tolerance used by traced `=0` branches (inputs are normalized).
inline constexpr double kTracedZeroTol = 1e-10;

class Tape;

class TracedScalar {
 public:
  /// Constants: degree (0,0), one shared CONST identity.
  TracedScalar(double value = 0.0);  // NOLINT(google-explicit-constructor)

  double value() const noexcept { return value_; }
  int num_deg() const noexcept { return num_deg_; }
  int den_deg() const noexcept { return den_deg_; }
  int degree() const noexcept { return num_deg_ > den_deg_ ? num_deg_ : den_deg_; }
  std::uint64_t node() const noexcept { return node_; }
  Tape* tape() const noexcept { return tape_; }

 private:
  friend class Tape;
  friend TracedScalar traced_arith(Op, const TracedScalar&, const TracedScalar&);

  double value_ = 0.0;
  int num_deg_ = 0;
  int den_deg_ = 0;
  std::uint64_t node_ = 0;
  Tape* tape_ = nullptr;
};

/// Degree rules (bounds, no cancellation):
///   ±: (max(a.num + b.den, b.num + a.den), a.den + b.den)
///   ×: (a.num + b.num, a.den + b.den)
///   ÷: (a.num + b.den, a.den + b.num)
/// Throws NumericError on a zero divisor value (an unguarded division).
TracedScalar traced_arith(Op op, const TracedScalar& a, const TracedScalar& b);

inline TracedScalar operator+(const TracedScalar& a, const TracedScalar& b) { return traced_arith(Op::kAdd, a, b); }
inline TracedScalar operator-(const TracedScalar& a, const TracedScalar& b) { return traced_arith(Op::kSub, a, b); }
inline TracedScalar operator*(const TracedScalar& a, const TracedScalar& b) { return traced_arith(Op::kMul, a, b); }
inline TracedScalar operator/(const TracedScalar& a, const TracedScalar& b) { return traced_arith(Op::kDiv, a, b); }

struct GjReport {
  int max_degree = 0;
  std::size_t predicate_count = 0;
  std::size_t branch_events = 0;
};

/// Run-local audit state. Confined to one thread.
class Tape {
 public:
  /// Input variable `index`: degree (1,0), identity derived from the index.
  TracedScalar input(std::size_t index, double value);

  /// Records (v.node, kind) and returns the sign test on v's value. The
  /// zero test uses kTracedZeroTol.
  bool branch(const TracedScalar& v, BranchKind kind);

  void observe(const TracedScalar& v);

  GjReport report() const;
  const std::set<std::pair<std::uint64_t, int>>& predicates() const { return predicates_; }

  /// Union of predicate sets, max of degrees, sum of branch events.
  void merge(const Tape& other);

 private:
  std::set<std::pair<std::uint64_t, int>> predicates_;
  std::size_t branch_events_ = 0;
  int max_degree_ = 0;
};

/// Free-function form of Tape::branch.
bool traced_branch(const TracedScalar& v, BranchKind kind);

using TracedMatrix = BasicMatrix<TracedScalar>;

/// Wraps the entries of `z` as input variables 0..rows·cols−1 (row-major).
TracedMatrix trace_inputs(Tape& tape, const DenseMatrix& z);

/// Matrices with `rows` rows and rows+1 columns, one per row-dependence
/// pattern: for mask bit i set, row i is a fresh random direction; otherwise
/// it is a random combination of earlier rows (zero for the first row).
/// Covers every greedy selection path and every rank 0..rows.
std::vector<DenseMatrix> dependence_suite(std::size_t rows, std::uint64_t seed);

/// One full-rank matrix per seed offset.
std::vector<DenseMatrix> full_rank_suite(std::size_t rows, std::size_t count, std::uint64_t seed);

/// `per_rank` random matrices of each rank 0..rows.
std::vector<DenseMatrix> rank_suite(std::size_t rows, std::size_t per_rank, std::uint64_t seed);

/// Decell pseudo-inverse under tracing; inputs are scaled to unit Frobenius
/// norm before being wrapped, as in the untraced routine.
GjReport audit_pinv_decell(std::size_t m, const std::vector<DenseMatrix>& suite);

/// Greedy row-selection projector under tracing.
GjReport audit_pinv_greedy(std::size_t m, const std::vector<DenseMatrix>& suite);

}  // namespace sketchlab::gj
