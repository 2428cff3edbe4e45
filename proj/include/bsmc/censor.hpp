#pragma once

#include "bsmc/block_matrix.hpp"

namespace bsmc::censor {

/// Censored chain on levels 0..n: T + U (I - Q)^{-1} D via a dense
/// multi-right-hand-side solve on the complement (the fundamental matrix is
/// never formed). Throws when the input is not stochastic within 1e-12 or
/// I - Q is singular.
BlockMatrix censor_prefix(const BlockMatrix& p, int n);

/// max-norm deviation between censor_prefix(p, n2) and censoring in two
/// stages through n1 (n2 < n1 < N); small by Lemma-style composition.
double censor_composition_check(const BlockMatrix& p, int n1, int n2);

/// max-norm deviation between the censored chain's stationary vector and the
/// restriction of the full stationary vector to levels 0..n, renormalized.
/// n may equal N (no censoring), in which case the deviation is 0.
double stationary_restriction_check(const BlockMatrix& p, int n);

}  // namespace bsmc::censor
