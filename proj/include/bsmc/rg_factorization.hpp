#pragma once

#include <Eigen/Dense>
#include <vector>

#include "bsmc/block_matrix.hpp"

namespace bsmc::rgfact {

/// Factors of I - P = (I - R_U)(I - Phi_D)(I - G_L): expected-visit blocks
/// R_{i,j} strictly above the diagonal, censored pivots Phi_k on it, hitting
/// blocks G_{i,j} strictly below (UL orientation, fixed by eliminating from
/// the last level).
struct RGFactors {
  BlockMatrix r_upper;
  std::vector<Eigen::MatrixXd> phi;
  BlockMatrix g_lower;

  int num_levels() const { return static_cast<int>(phi.size()); }
  const std::vector<int>& phase_counts() const { return r_upper.row_phase_counts(); }
};

/// Builds the factors from the forward-elimination record:
///   R_{i,k} = P^(k)_{i,k} (I - Phi_k)^{-1},  G_{k,i} = (I - Phi_k)^{-1} P^(k)_{k,i}.
RGFactors factorize(BlockMatrix p);

/// Two-step solve: seed pi_0 from the stationary row of Phi_0 (scalar GTH),
/// then the backward recursion pi_j = sum_{i<j} pi_i R_{i,j}, normalized.
StationaryVector solve_by_factors(const RGFactors& f);

/// max-norm of (I - R_U)(I - Phi_D)(I - G_L) - (I - P).
double residual(const BlockMatrix& p, const RGFactors& f);

}  // namespace bsmc::rgfact
