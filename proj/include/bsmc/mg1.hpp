#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "bsmc/block_matrix.hpp"

namespace bsmc::mg1 {

/// Symbolic M/G/1-type chain: boundary row B_0, B_1, ..., boundary-down
/// block C_0 (level 1 -> 0), repeating blocks A_{-1}, A_0, A_1, ...; levels
/// >= 1 share the repeat phase count, level 0 may differ. Sequences are
/// stored up to a finite cutoff; the mass beyond it is carried per phase in
/// the tail remainders, and every stochasticity check and tail sum accounts
/// for it.
struct MG1Spec {
  Eigen::MatrixXd boundary_diag;             // B_0, r0 x r0
  std::vector<Eigen::MatrixXd> boundary_up;  // [k-1] holds B_k (r0 x r), k >= 1
  Eigen::MatrixXd boundary_down;             // C_0, r x r0
  Eigen::MatrixXd repeat_down;               // A_{-1}, r x r
  Eigen::MatrixXd repeat_diag;               // A_0, r x r
  std::vector<Eigen::MatrixXd> repeat_up;    // [k-1] holds A_k (r x r), k >= 1
  Eigen::VectorXd repeat_tail_remainder;     // per repeat phase; empty = zero
  Eigen::VectorXd boundary_tail_remainder;   // per boundary phase; empty = zero
  double uniformization_hint = 0.0;          // suggested c for rate specs; 0 = unset

  int boundary_phases() const { return static_cast<int>(boundary_diag.rows()); }
  int repeat_phases() const { return static_cast<int>(repeat_down.rows()); }
  int repeat_cutoff() const { return static_cast<int>(repeat_up.size()); }
  int boundary_cutoff() const { return static_cast<int>(boundary_up.size()); }
  int tail_cutoff() const { return std::max(repeat_cutoff(), boundary_cutoff()); }

  /// A_k for k >= -1; nullptr beyond the stored support.
  const Eigen::MatrixXd* find_A(int k) const;
  Eigen::MatrixXd A(int k) const;
  /// B_k for k >= 0; nullptr beyond the stored support.
  const Eigen::MatrixXd* find_B(int k) const;
  Eigen::MatrixXd B(int k) const;

  double repeat_remainder(int phase) const;
  double boundary_remainder(int phase) const;

  /// Suffix row masses of the stored A sequence: row k (0 <= k <= cutoff+1)
  /// holds per-phase sum_{k' >= k} rowsum(A_{k'}); the final row is zero.
  /// Tail remainders are not included.
  Eigen::MatrixXd repeat_suffix_row_mass() const;
  /// Same for B_k, k >= 1 (row 0 equals row 1).
  Eigen::MatrixXd boundary_suffix_row_mass() const;

  /// Shape and stochasticity checks for a probability-valued spec; row sums
  /// must be 1 within tol plus the stored remainder. Throws on violation.
  void validate(double tol = 1e-12) const;
};

/// The diagonal-column blocks G^(m)_s = (Q^m D)_{s,N} of the complement walk,
/// their running sums H_s and the captured return masses r^(M)_{s,p}.
struct GColumnSeries {
  int num_phases = 0;
  std::vector<std::vector<Eigen::MatrixXd>> blocks;  // blocks[m][s], 0 <= s <= m
  std::vector<Eigen::MatrixXd> tail_sums;            // H_s = sum_{m=s}^{M} G^(m)_s
  Eigen::MatrixXd captured;                          // (M+1) x r, r^(M)_{s,p}

  int depth() const { return static_cast<int>(blocks.size()) - 1; }
  /// G^(m)_s; structurally zero for s > m.
  Eigen::MatrixXd block_or_zero(int m, int s) const;
};

/// Runs the constrained path recursion
///   G^(0)_0 = A_{-1},  G^(m+1)_i = sum_{t=max(i-1,0)}^{m} A_{t-i} G^(m)_t
/// down to the requested depth, accumulating tail sums and captured masses
/// in nondecreasing (subtraction-free) order.
GColumnSeries g_columns(const MG1Spec& spec, int depth);

/// Independent check of one block: enumerates every admissible step sequence
/// (k_1..k_m), steps >= -1, partial levels >= 0, final level 0, and sums the
/// products A_{k_1}...A_{k_m} A_{-1}. Exponential; m <= 8 enforced.
Eigen::MatrixXd path_sum_oracle(const MG1Spec& spec, int m, int i);

/// Depth-M approximated censored last block-column C_N^(M): block row i is
/// sum_s U_{i,s} H_s with U_{0,s} = B_{N+1+s} and U_{i,s} = A_{N+1+s-i}.
/// Element [0] is boundary_phases x r; elements 1..N are r x r.
std::vector<Eigen::MatrixXd> censored_column(const MG1Spec& spec, int N, const GColumnSeries& g);

/// Entrywise a posteriori bound on the censored-column truncation error:
///   sum_{s<=M} sum_p U_{i,s}(a,p) (1 - r^(M)_{s,p})  +  (U row mass at s > M),
/// the unseen range taking captured mass 0. The bound does not depend on the
/// destination phase, so each block row is constant across columns.
struct TruncationErrorBound {
  std::vector<Eigen::MatrixXd> entrywise;
  double max_entry = 0.0;
};
TruncationErrorBound error_bound(const MG1Spec& spec, int N, const GColumnSeries& g);

class StopDepthCeilingError : public std::runtime_error {
 public:
  StopDepthCeilingError(int depth_reached, double best);
  int depth;
  double best_bound;
};

struct StopDepthReport {
  int depth = 0;
  double bound = 0.0;
  double min_captured = 0.0;  // over s <= depth and phases
  double max_captured = 0.0;
};

/// Smallest affordable truncation depth whose error bound is <= eps. The
/// recursion is streamed (only the frontier of G blocks is kept), the bound
/// is evaluated at every depth up to 512 and at doubling checkpoints beyond.
/// Throws StopDepthCeilingError when max_depth is hit first.
StopDepthReport stop_depth(const MG1Spec& spec, int N, double eps, int max_depth = 100000);

void write_spec(std::ostream& out, const MG1Spec& spec);
MG1Spec read_spec(std::istream& in);

}  // namespace bsmc::mg1
