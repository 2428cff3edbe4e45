#include "bsmc/augment.hpp"

#include <Eigen/Dense>
#include <ostream>
#include <stdexcept>
#include <string>

#include "bsmc/matrix_io.hpp"

namespace bsmc::augment {

namespace {

constexpr double kZeroTol = 1e-14;

std::vector<int> corner_phase_counts(const mg1::MG1Spec& spec, int N) {
  std::vector<int> counts(static_cast<size_t>(N) + 1, spec.repeat_phases());
  counts[0] = spec.boundary_phases();
  return counts;
}

}  // namespace

BlockMatrix assemble_corner(const mg1::MG1Spec& spec, int N) {
  if (N < 1) throw std::invalid_argument("assemble_corner requires N >= 1");
  BlockMatrix t(corner_phase_counts(spec, N));
  for (int j = 0; j <= std::min(N, spec.boundary_cutoff()); ++j) {
    t.set_block(0, j, *spec.find_B(j));
  }
  for (int i = 1; i <= N; ++i) {
    t.set_block(i, i - 1, i == 1 ? spec.boundary_down : spec.repeat_down);
    for (int j = i; j <= N; ++j) {
      if (const Eigen::MatrixXd* a = spec.find_A(j - i)) t.set_block(i, j, *a);
    }
  }
  return t;
}

RacmResult racm(const mg1::MG1Spec& spec, int N, const mg1::GColumnSeries& g) {
  BlockMatrix t = assemble_corner(spec, N);
  const std::vector<Eigen::MatrixXd> column = mg1::censored_column(spec, N, g);
  const int r = spec.repeat_phases();

  RenormReport report;
  report.levels.resize(static_cast<size_t>(N) + 1);
  for (int i = 0; i <= N; ++i) {
    const int phases = t.row_phases(i);
    Eigen::MatrixXd scaled = Eigen::MatrixXd::Zero(phases, r);
    auto& level_report = report.levels[static_cast<size_t>(i)];
    level_report.resize(static_cast<size_t>(phases));
    for (int a = 0; a < phases; ++a) {
      RowRenorm& row = level_report[static_cast<size_t>(a)];
      row.target_mass = row_defect(t, i, a);
      row.captured_mass = column[static_cast<size_t>(i)].row(a).sum();
      if (row.target_mass <= kZeroTol) {
        row.branch = RenormBranch::zero_row;
      } else if (row.captured_mass <= kZeroTol) {
        row.branch = RenormBranch::uniform_spread;
        scaled.row(a).setConstant(row.target_mass / r);
      } else {
        row.branch = RenormBranch::scaled;
        row.scale = row.target_mass / row.captured_mass;
        scaled.row(a) = row.scale * column[static_cast<size_t>(i)].row(a);
      }
    }
    t.add_to_block(i, N, scaled);
  }
  return RacmResult{std::move(t), std::move(report)};
}

RacmResult racm(const mg1::MG1Spec& spec, int N, int depth) {
  return racm(spec, N, mg1::g_columns(spec, depth));
}

RacmResult racm_with_tolerance(const mg1::MG1Spec& spec, int N, double eps, int max_depth) {
  const mg1::StopDepthReport stop = mg1::stop_depth(spec, N, eps, max_depth);
  return racm(spec, N, stop.depth);
}

BlockMatrix natural_lbca(const mg1::MG1Spec& spec, int N) {
  if (N < 1) throw std::invalid_argument("natural_lbca requires N >= 1");
  BlockMatrix t = assemble_corner(spec, N);
  const int r = spec.repeat_phases();
  const int r0 = spec.boundary_phases();

  // Suffix block sums A_{>i} for the start indices the last column needs.
  std::vector<Eigen::MatrixXd> a_tail(static_cast<size_t>(N) + 1);
  {
    Eigen::MatrixXd running = Eigen::MatrixXd::Zero(r, r);
    for (int k = spec.repeat_cutoff(); k >= 1; --k) {
      running += *spec.find_A(k);
      if (k <= N) a_tail[static_cast<size_t>(k)] = running;
    }
    for (int k = spec.repeat_cutoff() + 1; k <= N; ++k) {
      a_tail[static_cast<size_t>(k)] = Eigen::MatrixXd::Zero(r, r);
    }
  }
  Eigen::MatrixXd b_tail = Eigen::MatrixXd::Zero(r0, r);
  for (int k = N + 1; k <= spec.boundary_cutoff(); ++k) b_tail += *spec.find_B(k);

  // Remainder mass beyond the cutoff goes to the diagonal phase of the last
  // block-column; it is below every working tolerance by construction, only
  // row stochasticity must survive.
  for (int p = 0; p < r0; ++p) b_tail(p, std::min(p, r - 1)) += spec.boundary_remainder(p);
  t.add_to_block(0, N, b_tail);
  for (int i = 1; i <= N; ++i) {
    Eigen::MatrixXd add = a_tail[static_cast<size_t>(N - i + 1)];
    if (add.size() == 0) add = Eigen::MatrixXd::Zero(r, r);
    for (int p = 0; p < r; ++p) add(p, p) += spec.repeat_remainder(p);
    t.add_to_block(i, N, add);
  }
  return t;
}

double l1_truncation_error(const StationaryVector& approx, const StationaryVector& reference) {
  const int n = approx.num_levels();
  if (n > reference.num_levels()) {
    throw std::invalid_argument("l1_truncation_error: approximation has more levels than the reference");
  }
  double err = 0.0;
  for (int i = 0; i < n; ++i) {
    if (approx.level(i).size() != reference.level(i).size()) {
      throw std::invalid_argument("l1_truncation_error: phase counts differ at level " + std::to_string(i));
    }
    err += (approx.level(i) - reference.level(i)).cwiseAbs().sum();
  }
  for (int i = n; i < reference.num_levels(); ++i) err += reference.level(i).sum();
  return err;
}

double perturbation_bound(const BlockMatrix& pn, const StationaryVector& pin, double delta_norm) {
  if (delta_norm < 0.0) throw std::invalid_argument("perturbation_bound: negative perturbation norm");
  const int n = pn.total_rows();
  if (n > 6000) throw std::invalid_argument("perturbation_bound: dense Z_N guard exceeded");
  if (pin.total_states() != n) throw std::invalid_argument("perturbation_bound: vector/matrix mismatch");

  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n) - pn.to_dense();
  const Eigen::RowVectorXd pi = pin.flatten();
  m.rowwise() += pi;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(std::move(m));
  {
    const Eigen::VectorXd diag = lu.matrixLU().diagonal().cwiseAbs();
    if (diag.minCoeff() <= 1e-14 * std::max(1.0, diag.maxCoeff())) {
      throw std::runtime_error("perturbation_bound: I - P + 1 pi is singular");
    }
  }
  const Eigen::MatrixXd z = lu.solve(Eigen::MatrixXd::Identity(n, n));
  const double z_norm = z.cwiseAbs().rowwise().sum().maxCoeff();
  return z_norm * delta_norm;
}

void write_table1_csv(std::ostream& out, const std::vector<Table1Row>& rows) {
  out << "N,lbca_l1_error,racm_l1_error,improvement,relative_rate_percent\n";
  for (const Table1Row& row : rows) {
    out << row.truncation_level << ',' << io::format_double(row.lbca_error) << ','
        << io::format_double(row.racm_error) << ',' << io::format_double(row.improvement) << ','
        << io::format_double(row.relative_rate_percent) << "\n";
  }
}

}  // namespace bsmc::augment
