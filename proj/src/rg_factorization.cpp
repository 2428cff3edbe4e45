#include "bsmc/rg_factorization.hpp"

#include <stdexcept>
#include <utility>

#include "bsmc/gth.hpp"

namespace bsmc::rgfact {

RGFactors factorize(BlockMatrix p) {
  const std::vector<int> counts = p.row_phase_counts();
  const gth::EliminationRecord rec = gth::forward_eliminate(std::move(p));
  const int N = rec.num_levels() - 1;

  RGFactors f{BlockMatrix(counts), {}, BlockMatrix(counts)};
  f.phi.resize(static_cast<size_t>(N) + 1);
  f.phi[0] = rec.pivot(0);
  for (int k = 1; k <= N; ++k) {
    const Eigen::MatrixXd phi = rec.pivot(k);
    f.phi[static_cast<size_t>(k)] = phi;
    const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(phi.rows(), phi.cols()) - phi;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_t(m.transpose());
    for (int i = 0; i < k; ++i) {
      if (const Eigen::MatrixXd* up = rec.up(i, k)) {
        // R = up (I - Phi)^{-1}, solved through the transposed system.
        f.r_upper.set_block(i, k, lu_t.solve(up->transpose()).transpose());
      }
      if (const Eigen::MatrixXd* down = rec.down(k, i)) {
        f.g_lower.set_block(k, i, lu.solve(*down));
      }
    }
  }
  return f;
}

StationaryVector solve_by_factors(const RGFactors& f) {
  const int N = f.num_levels() - 1;
  const auto& counts = f.phase_counts();
  std::vector<Eigen::RowVectorXd> rows(static_cast<size_t>(N) + 1);
  rows[0] = gth::scalar_gth_level0(f.phi[0]);
  for (int j = 1; j <= N; ++j) {
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(counts[static_cast<size_t>(j)]);
    for (int i = 0; i < j; ++i) {
      if (const Eigen::MatrixXd* r = f.r_upper.find_block(i, j)) {
        acc.noalias() += rows[static_cast<size_t>(i)] * (*r);
      }
    }
    rows[static_cast<size_t>(j)] = std::move(acc);
  }
  return gth::normalize(rows);
}

double residual(const BlockMatrix& p, const RGFactors& f) {
  if (p.row_phase_counts() != f.phase_counts()) {
    throw std::invalid_argument("residual: factor shapes do not match the matrix");
  }
  const int n = p.total_rows();
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd iu = eye - f.r_upper.to_dense();
  const Eigen::MatrixXd il = eye - f.g_lower.to_dense();
  Eigen::MatrixXd id = eye;
  {
    int off = 0;
    for (const Eigen::MatrixXd& phi : f.phi) {
      id.block(off, off, phi.rows(), phi.cols()) -= phi;
      off += static_cast<int>(phi.rows());
    }
  }
  const Eigen::MatrixXd product = iu * id * il;
  const Eigen::MatrixXd target = eye - p.to_dense();
  return (product - target).cwiseAbs().maxCoeff();
}

}  // namespace bsmc::rgfact
