#include "bsmc/gth.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace bsmc::gth {

namespace {

constexpr double kConstructionTol = 1e-12;

// LU with partial pivoting of I - phi, with an explicit singularity check:
// the relative size of the smallest U diagonal flags reducible pivots that
// Eigen would otherwise silently accept.
Eigen::PartialPivLU<Eigen::MatrixXd> factor_transient(const Eigen::MatrixXd& phi, int level) {
  const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(phi.rows(), phi.cols()) - phi;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  const Eigen::VectorXd diag = lu.matrixLU().diagonal().cwiseAbs();
  const double scale = std::max(1.0, diag.maxCoeff());
  if (diag.minCoeff() <= 1e-14 * scale) {
    throw std::runtime_error("forward elimination breakdown at level " + std::to_string(level) +
                             ": I - pivot block is singular (reducible chain?)");
  }
  return lu;
}

}  // namespace

EliminationRecord forward_eliminate(BlockMatrix p) {
  if (!p.square()) throw std::invalid_argument("forward_eliminate requires a square block matrix");
  if (p.min_entry() < -kConstructionTol || p.max_row_sum_deviation() > kConstructionTol) {
    throw std::invalid_argument("forward_eliminate requires a stochastic matrix (tol 1e-12)");
  }
  const int N = p.num_levels() - 1;
  for (int n = N; n >= 1; --n) {
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu = factor_transient(p.block(n, n), n);

    // X_j = (I - Phi_n)^{-1} P^(n)_{n,j} for every stored down block.
    std::vector<std::pair<int, Eigen::MatrixXd>> solved;
    for (const BlockMatrix::Entry& e : p.row(n)) {
      if (e.col >= n) break;
      solved.emplace_back(e.col, lu.solve(e.value));
    }
    if (solved.empty()) continue;

    for (int i = 0; i < n; ++i) {
      const Eigen::MatrixXd* found = p.find_block(i, n);
      if (found == nullptr || found->isZero(0.0)) continue;
      // Copy: fill-in insertions below may reallocate row i's storage.
      const Eigen::MatrixXd up = *found;
      for (const auto& [j, x] : solved) {
        p.block_ref(i, j).noalias() += up * x;
      }
    }
  }
  return EliminationRecord(std::move(p));
}

Eigen::RowVectorXd scalar_gth_level0(const Eigen::MatrixXd& phi0) {
  const int r = static_cast<int>(phi0.rows());
  if (phi0.cols() != r) throw std::invalid_argument("level-0 pivot block must be square");
  if (r == 1) return Eigen::RowVectorXd::Ones(1);

  Eigen::MatrixXd a = phi0;
  std::vector<double> denom(static_cast<size_t>(r), 0.0);
  std::vector<Eigen::VectorXd> col(static_cast<size_t>(r));

  // Forward pass: eliminate phases r-1 down to 1, saving each pivot column
  // and its subtraction-free denominator before the update.
  for (int g = r - 1; g >= 1; --g) {
    const double d = a.row(g).head(g).sum();
    if (d <= 0.0) {
      throw std::runtime_error("scalar GTH breakdown at phase " + std::to_string(g) +
                               ": zero pivot denominator (reducible level-0 block)");
    }
    denom[static_cast<size_t>(g)] = d;
    col[static_cast<size_t>(g)] = a.col(g).head(g);
    for (int al = 0; al < g; ++al) {
      const double f = a(al, g) / d;
      for (int be = 0; be < g; ++be) a(al, be) += f * a(g, be);
    }
  }

  Eigen::RowVectorXd r0(r);
  r0(0) = 1.0;
  for (int be = 1; be < r; ++be) {
    r0(be) = r0.head(be).dot(col[static_cast<size_t>(be)]) / denom[static_cast<size_t>(be)];
  }
  return r0;
}

std::vector<Eigen::RowVectorXd> back_substitute(const EliminationRecord& rec,
                                                const Eigen::RowVectorXd& r0) {
  const int N = rec.num_levels() - 1;
  const auto& counts = rec.phase_counts();
  if (r0.size() != counts[0]) throw std::invalid_argument("r0 does not match level-0 phase count");

  std::vector<Eigen::RowVectorXd> rows(static_cast<size_t>(N) + 1);
  rows[0] = r0;
  for (int j = 1; j <= N; ++j) {
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(counts[static_cast<size_t>(j)]);
    for (int i = 0; i < j; ++i) {
      if (const Eigen::MatrixXd* up = rec.up(i, j)) acc.noalias() += rows[static_cast<size_t>(i)] * (*up);
    }
    const Eigen::MatrixXd phi = rec.pivot(j);
    const Eigen::MatrixXd mt = (Eigen::MatrixXd::Identity(phi.rows(), phi.cols()) - phi).transpose();
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(mt);
    Eigen::RowVectorXd rj = lu.solve(acc.transpose()).transpose();
    for (int k = 0; k < rj.size(); ++k) {
      if (rj(k) < 0.0) {
        if (rj(k) < -1e-9) {
          throw std::runtime_error("back substitution produced a negative mass at level " +
                                   std::to_string(j));
        }
        rj(k) = 0.0;
      }
    }
    rows[static_cast<size_t>(j)] = std::move(rj);
  }
  return rows;
}

StationaryVector normalize(const std::vector<Eigen::RowVectorXd>& rows) {
  double sum = 0.0, comp = 0.0;
  for (const auto& row : rows) {
    for (int k = 0; k < row.size(); ++k) {
      if (row[k] < 0.0) throw std::invalid_argument("normalize requires nonnegative rows");
      const double y = row[k] - comp;
      const double t = sum + y;
      comp = (t - sum) - y;
      sum = t;
    }
  }
  if (sum <= 0.0) throw std::invalid_argument("normalize: total mass is zero");
  std::vector<Eigen::RowVectorXd> scaled(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) scaled[i] = rows[i] / sum;
  return StationaryVector(std::move(scaled));
}

StationaryVector solve(BlockMatrix p) {
  EliminationRecord rec = forward_eliminate(std::move(p));
  const Eigen::RowVectorXd r0 = scalar_gth_level0(rec.pivot(0));
  return normalize(back_substitute(rec, r0));
}

}  // namespace bsmc::gth
