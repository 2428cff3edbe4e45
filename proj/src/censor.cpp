#include "bsmc/censor.hpp"

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

#include "bsmc/gth.hpp"

namespace bsmc::censor {

BlockMatrix censor_prefix(const BlockMatrix& p, int n) {
  if (!p.square()) throw std::invalid_argument("censor_prefix requires a square block matrix");
  if (p.min_entry() < -1e-12 || p.max_row_sum_deviation() > 1e-12) {
    throw std::invalid_argument("censor_prefix requires a stochastic matrix (tol 1e-12)");
  }
  BlockPartition parts = partition(p, n);

  const Eigen::MatrixXd q = parts.complement.to_dense();
  Eigen::MatrixXd iq = Eigen::MatrixXd::Identity(q.rows(), q.cols()) - q;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(std::move(iq));
  {
    const Eigen::VectorXd diag = lu.matrixLU().diagonal().cwiseAbs();
    if (diag.minCoeff() <= 1e-14 * std::max(1.0, diag.maxCoeff())) {
      throw std::runtime_error("censor_prefix: I - Q is singular; complement is not transient");
    }
  }
  const Eigen::MatrixXd x = lu.solve(parts.down.to_dense());
  Eigen::MatrixXd censored = parts.corner.to_dense();
  censored.noalias() += parts.up.to_dense() * x;
  return BlockMatrix::from_dense(censored, parts.corner.row_phase_counts(),
                                 parts.corner.col_phase_counts());
}

double censor_composition_check(const BlockMatrix& p, int n1, int n2) {
  if (!(0 <= n2 && n2 < n1 && n1 < p.num_levels() - 1)) {
    throw std::out_of_range("censor_composition_check requires 0 <= n2 < n1 < N");
  }
  const Eigen::MatrixXd direct = censor_prefix(p, n2).to_dense();
  const Eigen::MatrixXd staged = censor_prefix(censor_prefix(p, n1), n2).to_dense();
  return (direct - staged).cwiseAbs().maxCoeff();
}

double stationary_restriction_check(const BlockMatrix& p, int n) {
  const int N = p.num_levels() - 1;
  if (n < 0 || n > N) throw std::out_of_range("stationary_restriction_check: level out of range");

  const StationaryVector pi = gth::solve(p);
  if (n == N) return 0.0;

  const StationaryVector pin = gth::solve(censor_prefix(p, n));
  double prefix_mass = 0.0;
  for (int i = 0; i <= n; ++i) prefix_mass += pi.level(i).sum();

  double worst = 0.0;
  for (int i = 0; i <= n; ++i) {
    const Eigen::RowVectorXd expected = pi.level(i) / prefix_mass;
    worst = std::max(worst, (pin.level(i) - expected).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace bsmc::censor
