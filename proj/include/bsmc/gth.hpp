#pragma once

#include <Eigen/Dense>
#include <vector>

#include "bsmc/block_matrix.hpp"

namespace bsmc::gth {

/// Blocks retained by the forward block-elimination, eliminating levels
/// N, N-1, ..., 1 in that order. After all steps, block (i, j) of the
/// in-place working matrix holds its value in the censored chain on levels
/// 0..max(i, j): the up-column P^(k)_{i,k} (i < k), the down-row P^(k)_{k,i}
/// (i < k), and the pivots Phi_k = P^(k)_{k,k} live side by side in one
/// matrix, so the record costs no copies beyond the input itself.
class EliminationRecord {
 public:
  explicit EliminationRecord(BlockMatrix eliminated) : w_(std::move(eliminated)) {}

  int num_levels() const { return w_.num_levels(); }
  const std::vector<int>& phase_counts() const { return w_.row_phase_counts(); }

  /// Phi_k = P^(k)_{k,k}; zero block when level k has no self-transitions.
  Eigen::MatrixXd pivot(int k) const { return w_.block(k, k); }
  /// P^(k)_{i,k} for i < k; nullptr when the block is zero.
  const Eigen::MatrixXd* up(int i, int k) const { return w_.find_block(i, k); }
  /// P^(k)_{k,i} for i < k; nullptr when the block is zero.
  const Eigen::MatrixXd* down(int k, int i) const { return w_.find_block(k, i); }

  const BlockMatrix& storage() const { return w_; }

 private:
  BlockMatrix w_;
};

/// Forward block-elimination of a stochastic block matrix, level N down to 1:
///   P^(n-1)_{i,j} = P^(n)_{i,j} + P^(n)_{i,n} (I - P^(n)_{n,n})^{-1} P^(n)_{n,j}.
/// Throws std::invalid_argument when the input is not stochastic within
/// 1e-12, and std::runtime_error when some I - Phi_k (k >= 1) is singular
/// (reducible chain or numerical breakdown).
EliminationRecord forward_eliminate(BlockMatrix p);

/// Subtraction-free scalar GTH on the level-0 pivot block. Returns the
/// unnormalized stationary row r_0 with r_0(0) = 1; pivot denominators are
/// accumulated as sums of below-diagonal entries, never as 1 - p.
Eigen::RowVectorXd scalar_gth_level0(const Eigen::MatrixXd& phi0);

/// Back block-form substitution r_j = sum_{i<j} r_i P^(j)_{i,j} (I - Phi_j)^{-1}.
std::vector<Eigen::RowVectorXd> back_substitute(const EliminationRecord& rec,
                                                const Eigen::RowVectorXd& r0);

/// Scales nonnegative rows so the total mass is 1 (compensated summation).
StationaryVector normalize(const std::vector<Eigen::RowVectorXd>& rows);

/// Stationary distribution of an irreducible stochastic block matrix via
/// forward elimination, scalar GTH on level 0, back substitution and
/// normalization.
StationaryVector solve(BlockMatrix p);

}  // namespace bsmc::gth
