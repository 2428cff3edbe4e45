#pragma once

#include <random>
#include <vector>

#include "bsmc/augment.hpp"
#include "bsmc/block_matrix.hpp"
#include "bsmc/mg1.hpp"

namespace bsmc::testing {

/// Strictly positive random stochastic block chain (hence irreducible and
/// aperiodic), heterogeneous phase counts.
inline BlockMatrix random_dense_chain(std::mt19937_64& rng, int max_levels = 8, int max_phases = 4) {
  std::uniform_int_distribution<int> level_dist(1, max_levels);
  std::uniform_int_distribution<int> phase_dist(1, max_phases);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  const int levels = level_dist(rng);
  std::vector<int> counts(static_cast<size_t>(levels));
  for (auto& c : counts) c = phase_dist(rng);

  BlockMatrix m(counts);
  for (int i = 0; i < levels; ++i) {
    std::vector<Eigen::MatrixXd> blocks;
    Eigen::VectorXd row_sum = Eigen::VectorXd::Zero(counts[static_cast<size_t>(i)]);
    for (int j = 0; j < levels; ++j) {
      Eigen::MatrixXd b(counts[static_cast<size_t>(i)], counts[static_cast<size_t>(j)]);
      for (int a = 0; a < b.rows(); ++a)
        for (int c = 0; c < b.cols(); ++c) b(a, c) = 0.02 + u(rng) * u(rng);
      row_sum += b.rowwise().sum();
      blocks.push_back(std::move(b));
    }
    for (int j = 0; j < levels; ++j) {
      m.set_block(i, j, row_sum.cwiseInverse().asDiagonal() * blocks[static_cast<size_t>(j)]);
    }
  }
  return m;
}

/// Random M/G/1-type spec with exact finite support (no remainder). Rows are
/// stochastic exactly; down_heavy pushes the drift downward so truncations
/// are positive recurrent.
inline mg1::MG1Spec random_mg1_spec(std::mt19937_64& rng, int max_phases = 3, int max_cutoff = 3,
                                    bool down_heavy = true, int min_cutoff = 0) {
  std::uniform_int_distribution<int> phase_dist(1, max_phases);
  std::uniform_int_distribution<int> cutoff_dist(min_cutoff, max_cutoff);
  std::uniform_real_distribution<double> u(0.05, 1.0);

  const int r = phase_dist(rng);
  const int r0 = phase_dist(rng);
  const int ka = cutoff_dist(rng);
  const int kb = 1 + cutoff_dist(rng);

  auto raw = [&](int rows, int cols, double scale) {
    Eigen::MatrixXd b(rows, cols);
    for (int a = 0; a < rows; ++a)
      for (int c = 0; c < cols; ++c) b(a, c) = scale * u(rng);
    return b;
  };

  mg1::MG1Spec spec;
  spec.repeat_down = raw(r, r, down_heavy ? 4.0 : 1.0);
  spec.repeat_diag = raw(r, r, 1.0);
  spec.repeat_up.resize(static_cast<size_t>(ka));
  double up_scale = down_heavy ? 0.5 : 1.0;
  for (auto& b : spec.repeat_up) {
    b = raw(r, r, up_scale);
    up_scale *= 0.5;
  }
  Eigen::VectorXd total = spec.repeat_down.rowwise().sum() + spec.repeat_diag.rowwise().sum();
  for (const auto& b : spec.repeat_up) total += b.rowwise().sum();
  auto scale_rows = [](Eigen::MatrixXd& b, const Eigen::VectorXd& factor) {
    for (int a = 0; a < b.rows(); ++a) b.row(a) *= factor(a);
  };
  const Eigen::VectorXd inv = total.cwiseInverse();
  scale_rows(spec.repeat_down, inv);
  scale_rows(spec.repeat_diag, inv);
  for (auto& b : spec.repeat_up) scale_rows(b, inv);

  // Level 1 goes down through C0 with the same per-phase mass as A_{-1}.
  spec.boundary_down = raw(r, r0, 1.0);
  const Eigen::VectorXd down_mass = spec.repeat_down.rowwise().sum();
  const Eigen::VectorXd c0_scale = down_mass.cwiseQuotient(spec.boundary_down.rowwise().sum().eval());
  scale_rows(spec.boundary_down, c0_scale);

  spec.boundary_diag = raw(r0, r0, down_heavy ? 3.0 : 1.0);
  spec.boundary_up.resize(static_cast<size_t>(kb));
  for (auto& b : spec.boundary_up) b = raw(r0, r, 1.0);
  Eigen::VectorXd btotal = spec.boundary_diag.rowwise().sum();
  for (const auto& b : spec.boundary_up) btotal += b.rowwise().sum();
  const Eigen::VectorXd binv = btotal.cwiseInverse();
  scale_rows(spec.boundary_diag, binv);
  for (auto& b : spec.boundary_up) scale_rows(b, binv);
  return spec;
}

/// Fixed quasi-birth-death specs (steps -1/0/+1) with strong downward drift;
/// variant 1 has a scalar boundary level.
inline mg1::MG1Spec qbd_fixture(int variant = 0) {
  mg1::MG1Spec spec;
  Eigen::MatrixXd down(2, 2), diag(2, 2), up(2, 2);
  if (variant % 2 == 0) {
    down << 0.45, 0.10, 0.20, 0.35;
    diag << 0.15, 0.05, 0.05, 0.20;
    up << 0.15, 0.10, 0.12, 0.08;
  } else {
    down << 0.50, 0.12, 0.08, 0.50;
    diag << 0.10, 0.08, 0.10, 0.12;
    up << 0.12, 0.08, 0.10, 0.10;
  }
  spec.repeat_down = down;
  spec.repeat_diag = diag;
  spec.repeat_up = {up};
  if (variant == 1) {
    spec.boundary_diag = Eigen::MatrixXd::Constant(1, 1, 0.6);
    spec.boundary_up = {(Eigen::MatrixXd(1, 2) << 0.25, 0.15).finished()};
    spec.boundary_down = down.rowwise().sum();
  } else {
    spec.boundary_diag = down + diag;
    spec.boundary_up = {up};
    spec.boundary_down = down;
  }
  return spec;
}

/// Block-upper-Hessenberg spec whose censored matrix differs from the
/// last-block-column augmentation: the return-phase profiles of the two
/// phases disagree, so the folded tail mass lands on the wrong phases.
inline mg1::MG1Spec block_counterexample_spec() {
  mg1::MG1Spec spec;
  Eigen::MatrixXd down(2, 2), diag(2, 2), up(2, 2);
  down << 0.50, 0.10, 0.30, 0.30;
  diag << 0.10, 0.05, 0.05, 0.10;
  up << 0.15, 0.10, 0.15, 0.10;
  spec.repeat_down = down;
  spec.repeat_diag = diag;
  spec.repeat_up = {up};
  spec.boundary_diag = down + diag;
  spec.boundary_up = {up};
  spec.boundary_down = down;
  return spec;
}

/// Scalar (one-phase) upper-Hessenberg spec with a short batch tail.
inline mg1::MG1Spec scalar_hessenberg_spec() {
  mg1::MG1Spec spec;
  auto s = [](double v) { return Eigen::MatrixXd::Constant(1, 1, v); };
  spec.repeat_down = s(0.60);
  spec.repeat_diag = s(0.15);
  spec.repeat_up = {s(0.10), s(0.10), s(0.05)};
  spec.boundary_diag = s(0.50);
  spec.boundary_up = {s(0.20), s(0.20), s(0.10)};
  spec.boundary_down = s(0.60);
  return spec;
}

/// First-column augmentation: each row's missing mass lands on the first
/// scalar state.
inline BlockMatrix first_column_augmentation(const mg1::MG1Spec& spec, int n) {
  BlockMatrix m = augment::assemble_corner(spec, n);
  for (int i = 0; i <= n; ++i) {
    Eigen::MatrixXd add = Eigen::MatrixXd::Zero(m.row_phases(i), m.col_phases(0));
    for (int a = 0; a < m.row_phases(i); ++a) add(a, 0) = row_defect(m, i, a);
    m.add_to_block(i, 0, add);
  }
  return m;
}

/// Uniform augmentation: missing mass spread evenly over every scalar column.
inline BlockMatrix uniform_augmentation(const mg1::MG1Spec& spec, int n) {
  BlockMatrix m = augment::assemble_corner(spec, n);
  const int cols = m.total_cols();
  for (int i = 0; i <= n; ++i) {
    Eigen::VectorXd defect(m.row_phases(i));
    for (int a = 0; a < defect.size(); ++a) defect(a) = row_defect(m, i, a);
    for (int j = 0; j <= n; ++j) {
      Eigen::MatrixXd add(m.row_phases(i), m.col_phases(j));
      for (int a = 0; a < add.rows(); ++a) add.row(a).setConstant(defect(a) / cols);
      m.add_to_block(i, j, add);
    }
  }
  return m;
}

}  // namespace bsmc::testing
