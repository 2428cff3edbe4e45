#pragma once

#include <functional>
#include <optional>

#include "bsmc/block_matrix.hpp"
#include "bsmc/mg1.hpp"

namespace bsmc::oracle {

/// Repeated left multiplication v <- vP until the l1 residual drops below
/// tol. Requires an aperiodic chain; damp periodic inputs with (P + I)/2
/// before calling. The optional callback is polled once per sweep and aborts
/// the iteration when it returns true.
StationaryVector power_iteration(const BlockMatrix& p, double tol = 1e-13, long max_iter = 1000000,
                                 const std::function<bool()>& cancelled = {});

struct DenseCensorResult {
  BlockMatrix matrix;
  /// Max scalar-row tail mass folded into the far truncation boundary; the
  /// oracle's deviation from the infinite censored matrix is driven by the
  /// chance of reaching that boundary before returning (reported, not
  /// bounded here).
  double far_boundary_fold_mass = 0.0;
};

/// Censored matrix on levels 0..N computed the slow exact way: truncate at
/// N + buffer with the natural last-block-column augmentation, then censor
/// the finite chain with dense solves. buffer defaults to N + 200.
DenseCensorResult dense_censor_oracle(const mg1::MG1Spec& spec, int N,
                                      std::optional<int> buffer = std::nullopt,
                                      int max_complement_states = 4000);

struct ReferenceResult {
  StationaryVector pi;
  /// l1 distance on the shared level prefix between the references at n_ref
  /// and n_ref/2; negative when the self-check was skipped.
  double self_consistency_l1 = -1.0;
};

/// Reference stationary distribution: natural LBCA at n_ref (irreducibility
/// checked by a reachability scan) solved by GTH.
ReferenceResult reference_stationary(const mg1::MG1Spec& spec, int n_ref, bool self_check = true);

}  // namespace bsmc::oracle
