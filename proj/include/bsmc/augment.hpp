#pragma once

#include <iosfwd>
#include <vector>

#include "bsmc/block_matrix.hpp"
#include "bsmc/mg1.hpp"

namespace bsmc::augment {

/// Which branch of the rowwise renormalization rule fired for a scalar row.
enum class RenormBranch { scaled, uniform_spread, zero_row };

struct RowRenorm {
  double target_mass = 0.0;    // c_{i,a}: mass missing from the corner row
  double captured_mass = 0.0;  // c^(M)_{i,a}: mass present in C_N^(M)
  double scale = 1.0;          // c / c^(M) on the scaled branch
  RenormBranch branch = RenormBranch::zero_row;
};

struct RenormReport {
  std::vector<std::vector<RowRenorm>> levels;  // [level][phase]
};

/// North-west corner T_N of the spec's infinite chain on levels 0..N.
BlockMatrix assemble_corner(const mg1::MG1Spec& spec, int N);

struct RacmResult {
  BlockMatrix matrix;
  RenormReport report;
};

/// Renormalized approximated censored matrix: T_N plus the depth-M censored
/// column rescaled row by row so every scalar row sums to 1 (scale when the
/// column caught mass, spread the target uniformly when it caught none,
/// leave complete rows alone). Zero testing at 1e-14.
RacmResult racm(const mg1::MG1Spec& spec, int N, const mg1::GColumnSeries& g);
RacmResult racm(const mg1::MG1Spec& spec, int N, int depth);
/// Depth chosen by the stop rule for the given bound target.
RacmResult racm_with_tolerance(const mg1::MG1Spec& spec, int N, double eps, int max_depth = 100000);

/// Last-block-column augmentation with the exact tail sums B_{>N}, A_{>i}.
/// Mass beyond the stored cutoff (the spec's tail remainder) is added to the
/// diagonal-phase entry of the last block-column, preserving the phase.
BlockMatrix natural_lbca(const mg1::MG1Spec& spec, int N);

/// Truncation error sum: l1 distance on the shared levels 0..N plus the
/// reference mass above N.
double l1_truncation_error(const StationaryVector& approx, const StationaryVector& reference);

/// ||Z_N||_{1->1} * delta_norm with Z_N = (I - P + 1 pi)^{-1}; delta_norm is
/// the max absolute scalar row sum of the kernel perturbation, the norm under
/// which row-vector perturbation bounds hold.
double perturbation_bound(const BlockMatrix& pn, const StationaryVector& pin, double delta_norm);

struct Table1Row {
  int truncation_level = 0;
  double lbca_error = 0.0;
  double racm_error = 0.0;
  double improvement = 0.0;
  double relative_rate_percent = 0.0;
};

/// CSV with header N,lbca_l1_error,racm_l1_error,improvement,relative_rate_percent;
/// '.' decimal separator, LF line endings, 12 significant digits.
void write_table1_csv(std::ostream& out, const std::vector<Table1Row>& rows);

}  // namespace bsmc::augment
