#include "bsmc/oracle.hpp"

#include <stdexcept>
#include <string>
#include <utility>

#include "bsmc/augment.hpp"
#include "bsmc/censor.hpp"
#include "bsmc/gth.hpp"

namespace bsmc::oracle {

namespace {

std::vector<Eigen::RowVectorXd> multiply_row(const std::vector<Eigen::RowVectorXd>& v,
                                             const BlockMatrix& p) {
  std::vector<Eigen::RowVectorXd> out(v.size());
  for (int j = 0; j < p.num_levels(); ++j) {
    out[static_cast<size_t>(j)] = Eigen::RowVectorXd::Zero(p.col_phases(j));
  }
  for (int i = 0; i < p.num_levels(); ++i) {
    for (const BlockMatrix::Entry& e : p.row(i)) {
      out[static_cast<size_t>(e.col)].noalias() += v[static_cast<size_t>(i)] * e.value;
    }
  }
  return out;
}

}  // namespace

StationaryVector power_iteration(const BlockMatrix& p, double tol, long max_iter,
                                 const std::function<bool()>& cancelled) {
  if (!p.square()) throw std::invalid_argument("power_iteration requires a square matrix");
  if (p.min_entry() < -1e-12 || p.max_row_sum_deviation() > 1e-12) {
    throw std::invalid_argument("power_iteration requires a stochastic matrix");
  }
  const int n = p.total_rows();
  std::vector<Eigen::RowVectorXd> v(static_cast<size_t>(p.num_levels()));
  for (int i = 0; i < p.num_levels(); ++i) {
    v[static_cast<size_t>(i)] = Eigen::RowVectorXd::Constant(p.row_phases(i), 1.0 / n);
  }

  double residual = 0.0;
  for (long it = 0; it < max_iter; ++it) {
    if (cancelled && cancelled()) throw std::runtime_error("power_iteration cancelled");
    std::vector<Eigen::RowVectorXd> next = multiply_row(v, p);
    residual = 0.0;
    double total = 0.0;
    for (size_t i = 0; i < v.size(); ++i) {
      residual += (next[i] - v[i]).cwiseAbs().sum();
      total += next[i].sum();
    }
    for (auto& row : next) row /= total;
    v = std::move(next);
    if (residual <= tol) return StationaryVector(std::move(v));
  }
  throw std::runtime_error("power_iteration did not converge within " + std::to_string(max_iter) +
                           " sweeps; last l1 residual " + std::to_string(residual));
}

DenseCensorResult dense_censor_oracle(const mg1::MG1Spec& spec, int N, std::optional<int> buffer,
                                      int max_complement_states) {
  if (N < 1) throw std::invalid_argument("dense_censor_oracle requires N >= 1");
  const int pad = buffer.value_or(N + 200);
  if (pad < 1) throw std::invalid_argument("dense_censor_oracle: buffer must be positive");
  const int complement_states = pad * spec.repeat_phases();
  if (complement_states > max_complement_states) {
    throw std::invalid_argument("dense_censor_oracle: complement of " +
                                std::to_string(complement_states) +
                                " states exceeds the memory guard of " +
                                std::to_string(max_complement_states));
  }

  const BlockMatrix truncated = augment::natural_lbca(spec, N + pad);
  DenseCensorResult result{censor::censor_prefix(truncated, N), 0.0};

  // Fold mass at the far boundary: the tail the LBCA folded into level N+pad.
  const Eigen::MatrixXd a_suffix = spec.repeat_suffix_row_mass();
  for (int i = N + 1; i <= N + pad; ++i) {
    const int start = std::min(N + pad - i + 1, spec.repeat_cutoff() + 1);
    for (int p = 0; p < spec.repeat_phases(); ++p) {
      result.far_boundary_fold_mass =
          std::max(result.far_boundary_fold_mass, a_suffix(start, p) + spec.repeat_remainder(p));
    }
  }
  return result;
}

ReferenceResult reference_stationary(const mg1::MG1Spec& spec, int n_ref, bool self_check) {
  if (n_ref < 2) throw std::invalid_argument("reference_stationary requires n_ref >= 2");
  auto solve_at = [&spec](int level) {
    BlockMatrix lbca = augment::natural_lbca(spec, level);
    if (!is_irreducible(lbca)) {
      throw std::runtime_error("reference_stationary: LBCA at level " + std::to_string(level) +
                               " is reducible");
    }
    return gth::solve(std::move(lbca));
  };

  ReferenceResult result{solve_at(n_ref), -1.0};
  if (self_check) {
    const StationaryVector half = solve_at(n_ref / 2);
    double dist = 0.0;
    for (int i = 0; i <= n_ref / 2; ++i) {
      dist += (half.level(i) - result.pi.level(i)).cwiseAbs().sum();
    }
    result.self_consistency_l1 = dist;
  }
  return result;
}

}  // namespace bsmc::oracle
