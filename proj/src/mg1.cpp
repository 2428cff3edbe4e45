#include "bsmc/mg1.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <ostream>
#include <string>

#include "bsmc/matrix_io.hpp"

namespace bsmc::mg1 {

const Eigen::MatrixXd* MG1Spec::find_A(int k) const {
  if (k == -1) return &repeat_down;
  if (k == 0) return &repeat_diag;
  if (k >= 1 && k <= repeat_cutoff()) return &repeat_up[static_cast<size_t>(k) - 1];
  return nullptr;
}

Eigen::MatrixXd MG1Spec::A(int k) const {
  if (const Eigen::MatrixXd* b = find_A(k)) return *b;
  return Eigen::MatrixXd::Zero(repeat_phases(), repeat_phases());
}

const Eigen::MatrixXd* MG1Spec::find_B(int k) const {
  if (k == 0) return &boundary_diag;
  if (k >= 1 && k <= boundary_cutoff()) return &boundary_up[static_cast<size_t>(k) - 1];
  return nullptr;
}

Eigen::MatrixXd MG1Spec::B(int k) const {
  if (const Eigen::MatrixXd* b = find_B(k)) return *b;
  if (k == 0) return Eigen::MatrixXd::Zero(boundary_phases(), boundary_phases());
  return Eigen::MatrixXd::Zero(boundary_phases(), repeat_phases());
}

double MG1Spec::repeat_remainder(int phase) const {
  return repeat_tail_remainder.size() > 0 ? repeat_tail_remainder(phase) : 0.0;
}

double MG1Spec::boundary_remainder(int phase) const {
  return boundary_tail_remainder.size() > 0 ? boundary_tail_remainder(phase) : 0.0;
}

Eigen::MatrixXd MG1Spec::repeat_suffix_row_mass() const {
  const int cutoff = repeat_cutoff();
  Eigen::MatrixXd suffix = Eigen::MatrixXd::Zero(cutoff + 2, repeat_phases());
  for (int k = cutoff; k >= 0; --k) {
    suffix.row(k) = suffix.row(k + 1) + find_A(k)->rowwise().sum().transpose();
  }
  return suffix;
}

Eigen::MatrixXd MG1Spec::boundary_suffix_row_mass() const {
  const int cutoff = boundary_cutoff();
  Eigen::MatrixXd suffix = Eigen::MatrixXd::Zero(cutoff + 2, boundary_phases());
  for (int k = cutoff; k >= 1; --k) {
    suffix.row(k) = suffix.row(k + 1) + find_B(k)->rowwise().sum().transpose();
  }
  if (cutoff >= 1) suffix.row(0) = suffix.row(1);
  return suffix;
}

void MG1Spec::validate(double tol) const {
  const int r0 = boundary_phases();
  const int r = repeat_phases();
  if (r0 <= 0 || r <= 0) throw std::invalid_argument("MG1Spec: phase counts must be positive");
  auto check_shape = [](const Eigen::MatrixXd& b, int rows, int cols, const std::string& name) {
    if (b.rows() != rows || b.cols() != cols) {
      throw std::invalid_argument("MG1Spec: block " + name + " has shape " + std::to_string(b.rows()) +
                                  "x" + std::to_string(b.cols()) + ", expected " + std::to_string(rows) +
                                  "x" + std::to_string(cols));
    }
  };
  check_shape(boundary_diag, r0, r0, "B_0");
  check_shape(boundary_down, r, r0, "C_0");
  check_shape(repeat_down, r, r, "A_-1");
  check_shape(repeat_diag, r, r, "A_0");
  for (size_t k = 0; k < boundary_up.size(); ++k) check_shape(boundary_up[k], r0, r, "B_" + std::to_string(k + 1));
  for (size_t k = 0; k < repeat_up.size(); ++k) check_shape(repeat_up[k], r, r, "A_" + std::to_string(k + 1));
  if (repeat_tail_remainder.size() != 0 && repeat_tail_remainder.size() != r) {
    throw std::invalid_argument("MG1Spec: repeat tail remainder has the wrong size");
  }
  if (boundary_tail_remainder.size() != 0 && boundary_tail_remainder.size() != r0) {
    throw std::invalid_argument("MG1Spec: boundary tail remainder has the wrong size");
  }

  auto min_entry = [&]() {
    double m = std::min({boundary_diag.minCoeff(), boundary_down.minCoeff(), repeat_down.minCoeff(),
                         repeat_diag.minCoeff()});
    for (const auto& b : boundary_up) m = std::min(m, b.minCoeff());
    for (const auto& b : repeat_up) m = std::min(m, b.minCoeff());
    return m;
  };
  if (min_entry() < -tol) throw std::invalid_argument("MG1Spec: negative entry");

  const Eigen::MatrixXd a_suffix = repeat_suffix_row_mass();
  const Eigen::MatrixXd b_suffix = boundary_suffix_row_mass();
  for (int p = 0; p < r; ++p) {
    const double repeat_sum = repeat_down.row(p).sum() + a_suffix(0, p);
    if (std::abs(repeat_sum - 1.0) > tol + repeat_remainder(p)) {
      throw std::invalid_argument("MG1Spec: repeat row " + std::to_string(p) + " sums to " +
                                  std::to_string(repeat_sum));
    }
    const double level1_sum = boundary_down.row(p).sum() + a_suffix(0, p);
    if (std::abs(level1_sum - 1.0) > tol + repeat_remainder(p)) {
      throw std::invalid_argument("MG1Spec: level-1 row " + std::to_string(p) + " sums to " +
                                  std::to_string(level1_sum));
    }
  }
  for (int p = 0; p < r0; ++p) {
    const double boundary_sum = boundary_diag.row(p).sum() + b_suffix(0, p);
    if (std::abs(boundary_sum - 1.0) > tol + boundary_remainder(p)) {
      throw std::invalid_argument("MG1Spec: boundary row " + std::to_string(p) + " sums to " +
                                  std::to_string(boundary_sum));
    }
  }
}

Eigen::MatrixXd GColumnSeries::block_or_zero(int m, int s) const {
  if (m < 0 || m > depth() || s < 0) throw std::out_of_range("GColumnSeries index out of range");
  if (s > m) return Eigen::MatrixXd::Zero(num_phases, num_phases);
  return blocks[static_cast<size_t>(m)][static_cast<size_t>(s)];
}

GColumnSeries g_columns(const MG1Spec& spec, int depth) {
  if (depth < 0) throw std::invalid_argument("g_columns: depth must be >= 0");
  const int r = spec.repeat_phases();
  const int cutoff = spec.repeat_cutoff();

  GColumnSeries series;
  series.num_phases = r;
  series.blocks.resize(static_cast<size_t>(depth) + 1);
  series.tail_sums.assign(static_cast<size_t>(depth) + 1, Eigen::MatrixXd::Zero(r, r));
  series.captured = Eigen::MatrixXd::Zero(depth + 1, r);

  series.blocks[0] = {spec.repeat_down};
  series.tail_sums[0] += spec.repeat_down;
  series.captured.row(0) += spec.repeat_down.rowwise().sum().transpose();

  for (int m = 1; m <= depth; ++m) {
    const auto& prev = series.blocks[static_cast<size_t>(m) - 1];
    auto& cur = series.blocks[static_cast<size_t>(m)];
    cur.assign(static_cast<size_t>(m) + 1, Eigen::MatrixXd::Zero(r, r));
    for (int i = 0; i <= m; ++i) {
      Eigen::MatrixXd& acc = cur[static_cast<size_t>(i)];
      const int t_lo = std::max(i - 1, 0);
      const int t_hi = std::min(m - 1, i + cutoff);
      for (int t = t_lo; t <= t_hi; ++t) {
        acc.noalias() += (*spec.find_A(t - i)) * prev[static_cast<size_t>(t)];
      }
      series.tail_sums[static_cast<size_t>(i)] += acc;
      series.captured.row(i) += acc.rowwise().sum().transpose();
    }
  }
  return series;
}

Eigen::MatrixXd path_sum_oracle(const MG1Spec& spec, int m, int i) {
  if (m < 0 || m > 8) throw std::invalid_argument("path_sum_oracle: m must be in [0, 8]");
  if (i < 0) throw std::invalid_argument("path_sum_oracle: level must be >= 0");
  const int r = spec.repeat_phases();
  if (m == 0) return i == 0 ? spec.repeat_down : Eigen::MatrixXd::Zero(r, r);

  const int cutoff = spec.repeat_cutoff();
  Eigen::MatrixXd total = Eigen::MatrixXd::Zero(r, r);
  std::function<void(int, int, const Eigen::MatrixXd&)> walk =
      [&](int level, int steps_left, const Eigen::MatrixXd& product) {
        if (steps_left == 0) {
          if (level == 0) total.noalias() += product * spec.repeat_down;
          return;
        }
        // After the step the level must stay >= 0 and be reachable back to 0
        // with the remaining -1 steps.
        const int k_lo = std::max(-1, -level);
        const int k_hi = std::min(cutoff, steps_left - 1 - level);
        for (int k = k_lo; k <= k_hi; ++k) {
          walk(level + k, steps_left - 1, product * (*spec.find_A(k)));
        }
      };
  walk(i, m, Eigen::MatrixXd::Identity(r, r));
  return total;
}

std::vector<Eigen::MatrixXd> censored_column(const MG1Spec& spec, int N, const GColumnSeries& g) {
  if (N < 1) throw std::invalid_argument("censored_column requires N >= 1");
  const int r = spec.repeat_phases();
  const int depth = g.depth();

  std::vector<Eigen::MatrixXd> column(static_cast<size_t>(N) + 1);
  column[0] = Eigen::MatrixXd::Zero(spec.boundary_phases(), r);
  for (int s = 0; s <= depth; ++s) {
    if (const Eigen::MatrixXd* u = spec.find_B(N + 1 + s)) {
      column[0].noalias() += (*u) * g.tail_sums[static_cast<size_t>(s)];
    }
  }
  for (int i = 1; i <= N; ++i) {
    column[static_cast<size_t>(i)] = Eigen::MatrixXd::Zero(r, r);
    for (int s = 0; s <= depth; ++s) {
      if (const Eigen::MatrixXd* u = spec.find_A(N + 1 + s - i)) {
        column[static_cast<size_t>(i)].noalias() += (*u) * g.tail_sums[static_cast<size_t>(s)];
      }
    }
  }
  return column;
}

namespace {

Eigen::VectorXd remainder_vector(const Eigen::VectorXd& stored, int phases) {
  return stored.size() > 0 ? stored : Eigen::VectorXd::Zero(phases).eval();
}

}  // namespace

TruncationErrorBound error_bound(const MG1Spec& spec, int N, const GColumnSeries& g) {
  if (N < 1) throw std::invalid_argument("error_bound requires N >= 1");
  const int r = spec.repeat_phases();
  const int r0 = spec.boundary_phases();
  const int depth = g.depth();
  const Eigen::MatrixXd a_suffix = spec.repeat_suffix_row_mass();
  const Eigen::MatrixXd b_suffix = spec.boundary_suffix_row_mass();
  const Eigen::VectorXd a_rem = remainder_vector(spec.repeat_tail_remainder, r);
  const Eigen::VectorXd b_rem = remainder_vector(spec.boundary_tail_remainder, r0);

  // w(s, p) = 1 - r^(M)_{s,p}, clamped against rounding overshoot.
  const Eigen::MatrixXd w = (1.0 - g.captured.array()).max(0.0);

  TruncationErrorBound out;
  out.entrywise.resize(static_cast<size_t>(N) + 1);
  for (int i = 0; i <= N; ++i) {
    const int phases = (i == 0) ? r0 : r;
    Eigen::VectorXd row_bound = Eigen::VectorXd::Zero(phases);
    for (int s = 0; s <= depth; ++s) {
      const Eigen::MatrixXd* u = (i == 0) ? spec.find_B(N + 1 + s) : spec.find_A(N + 1 + s - i);
      if (u) row_bound.noalias() += (*u) * w.row(s).transpose();
    }
    if (i == 0) {
      const int k0 = std::min(N + depth + 2, spec.boundary_cutoff() + 1);
      row_bound += b_suffix.row(k0).transpose();
      row_bound += b_rem;
    } else {
      const int k0 = std::min(N + depth + 2 - i, spec.repeat_cutoff() + 1);
      row_bound += a_suffix.row(k0).transpose();
      row_bound += a_rem;
    }
    out.entrywise[static_cast<size_t>(i)] = row_bound.replicate(1, r);
    out.max_entry = std::max(out.max_entry, row_bound.maxCoeff());
  }
  return out;
}

StopDepthCeilingError::StopDepthCeilingError(int depth_reached, double best)
    : std::runtime_error("stop_depth: bound " + std::to_string(best) +
                         " still above target at the depth ceiling " + std::to_string(depth_reached)),
      depth(depth_reached),
      best_bound(best) {}

StopDepthReport stop_depth(const MG1Spec& spec, int N, double eps, int max_depth) {
  if (eps <= 0.0) throw std::invalid_argument("stop_depth: eps must be positive");
  if (N < 1) throw std::invalid_argument("stop_depth requires N >= 1");
  if (max_depth < 0) throw std::invalid_argument("stop_depth: negative depth ceiling");

  const int r = spec.repeat_phases();
  const int r0 = spec.boundary_phases();
  const int cutoff = spec.repeat_cutoff();
  const Eigen::MatrixXd a_suffix = spec.repeat_suffix_row_mass();
  const Eigen::MatrixXd b_suffix = spec.boundary_suffix_row_mass();
  const Eigen::VectorXd a_rem = remainder_vector(spec.repeat_tail_remainder, r);
  const Eigen::VectorXd b_rem = remainder_vector(spec.boundary_tail_remainder, r0);

  // Streaming state: only the current G^(m) row of blocks plus cumulative
  // captured masses, so the depth ceiling never materializes the triangle.
  std::vector<Eigen::MatrixXd> frontier{spec.repeat_down};
  std::vector<Eigen::RowVectorXd> captured{spec.repeat_down.rowwise().sum().transpose()};

  auto bound_at = [&](int m) {
    double worst = 0.0;
    for (int i = 0; i <= N; ++i) {
      const int phases = (i == 0) ? r0 : r;
      Eigen::VectorXd row_bound = Eigen::VectorXd::Zero(phases);
      for (int s = 0; s <= m; ++s) {
        const Eigen::MatrixXd* u = (i == 0) ? spec.find_B(N + 1 + s) : spec.find_A(N + 1 + s - i);
        if (u == nullptr) continue;
        const Eigen::RowVectorXd weight =
            (1.0 - captured[static_cast<size_t>(s)].array()).max(0.0);
        row_bound.noalias() += (*u) * weight.transpose();
      }
      if (i == 0) {
        row_bound += b_suffix.row(std::min(N + m + 2, spec.boundary_cutoff() + 1)).transpose();
        row_bound += b_rem;
      } else {
        row_bound += a_suffix.row(std::min(N + m + 2 - i, cutoff + 1)).transpose();
        row_bound += a_rem;
      }
      worst = std::max(worst, row_bound.maxCoeff());
    }
    return worst;
  };

  constexpr int kDenseEvalLimit = 512;
  double best = std::numeric_limits<double>::infinity();
  for (int m = 0;; ++m) {
    const bool checkpoint =
        m <= kDenseEvalLimit || m == max_depth || (m & (m - 1)) == 0;
    if (checkpoint) {
      const double b = bound_at(m);
      best = std::min(best, b);
      if (b <= eps) {
        StopDepthReport report;
        report.depth = m;
        report.bound = b;
        report.min_captured = std::numeric_limits<double>::infinity();
        report.max_captured = 0.0;
        for (int s = 0; s <= m; ++s) {
          report.min_captured = std::min(report.min_captured, captured[static_cast<size_t>(s)].minCoeff());
          report.max_captured = std::max(report.max_captured, captured[static_cast<size_t>(s)].maxCoeff());
        }
        return report;
      }
    }
    if (m == max_depth) throw StopDepthCeilingError(max_depth, best);

    // Advance the frontier to depth m+1.
    std::vector<Eigen::MatrixXd> next(static_cast<size_t>(m) + 2, Eigen::MatrixXd::Zero(r, r));
    for (int i = 0; i <= m + 1; ++i) {
      Eigen::MatrixXd& acc = next[static_cast<size_t>(i)];
      const int t_lo = std::max(i - 1, 0);
      const int t_hi = std::min(m, i + cutoff);
      for (int t = t_lo; t <= t_hi; ++t) {
        acc.noalias() += (*spec.find_A(t - i)) * frontier[static_cast<size_t>(t)];
      }
    }
    frontier = std::move(next);
    captured.push_back(Eigen::RowVectorXd::Zero(r));
    for (int s = 0; s <= m + 1; ++s) {
      captured[static_cast<size_t>(s)] += frontier[static_cast<size_t>(s)].rowwise().sum().transpose();
    }
  }
}

void write_spec(std::ostream& out, const MG1Spec& spec) {
  auto write_block = [&out](const Eigen::MatrixXd& b) {
    for (int a = 0; a < b.rows(); ++a) {
      for (int c = 0; c < b.cols(); ++c) {
        if (c) out << ' ';
        out << io::format_double(b(a, c), 17);
      }
      out << "\n";
    }
  };
  out << "mg1spec\n";
  out << "boundary_phases " << spec.boundary_phases() << "\n";
  out << "repeat_phases " << spec.repeat_phases() << "\n";
  out << "boundary_cutoff " << spec.boundary_cutoff() << "\n";
  out << "repeat_cutoff " << spec.repeat_cutoff() << "\n";
  out << "uniformization_hint " << io::format_double(spec.uniformization_hint, 17) << "\n";
  out << "boundary_tail_remainder";
  for (int p = 0; p < spec.boundary_phases(); ++p) out << ' ' << io::format_double(spec.boundary_remainder(p), 17);
  out << "\nrepeat_tail_remainder";
  for (int p = 0; p < spec.repeat_phases(); ++p) out << ' ' << io::format_double(spec.repeat_remainder(p), 17);
  out << "\n";
  out << "block B 0\n";
  write_block(spec.boundary_diag);
  out << "block C0\n";
  write_block(spec.boundary_down);
  out << "block A -1\n";
  write_block(spec.repeat_down);
  out << "block A 0\n";
  write_block(spec.repeat_diag);
  for (int k = 1; k <= spec.repeat_cutoff(); ++k) {
    out << "block A " << k << "\n";
    write_block(*spec.find_A(k));
  }
  for (int k = 1; k <= spec.boundary_cutoff(); ++k) {
    out << "block B " << k << "\n";
    write_block(*spec.find_B(k));
  }
}

MG1Spec read_spec(std::istream& in) {
  io::TokenReader reader(in);
  reader.expect_keyword("mg1spec");
  reader.expect_keyword("boundary_phases");
  const int r0 = static_cast<int>(reader.expect_int("boundary phase count"));
  reader.expect_keyword("repeat_phases");
  const int r = static_cast<int>(reader.expect_int("repeat phase count"));
  reader.expect_keyword("boundary_cutoff");
  const int kb = static_cast<int>(reader.expect_int("boundary cutoff"));
  reader.expect_keyword("repeat_cutoff");
  const int ka = static_cast<int>(reader.expect_int("repeat cutoff"));
  reader.expect_keyword("uniformization_hint");
  const double hint = reader.expect_double("uniformization hint");
  if (r0 <= 0 || r <= 0 || kb < 0 || ka < 0) {
    throw io::ParseError("invalid spec header values", reader.line());
  }

  MG1Spec spec;
  spec.uniformization_hint = hint;
  spec.boundary_tail_remainder = Eigen::VectorXd::Zero(r0);
  spec.repeat_tail_remainder = Eigen::VectorXd::Zero(r);
  reader.expect_keyword("boundary_tail_remainder");
  for (int p = 0; p < r0; ++p) spec.boundary_tail_remainder(p) = reader.expect_double("boundary remainder");
  reader.expect_keyword("repeat_tail_remainder");
  for (int p = 0; p < r; ++p) spec.repeat_tail_remainder(p) = reader.expect_double("repeat remainder");

  spec.boundary_diag = Eigen::MatrixXd::Zero(r0, r0);
  spec.boundary_down = Eigen::MatrixXd::Zero(r, r0);
  spec.repeat_down = Eigen::MatrixXd::Zero(r, r);
  spec.repeat_diag = Eigen::MatrixXd::Zero(r, r);
  spec.boundary_up.assign(static_cast<size_t>(kb), Eigen::MatrixXd::Zero(r0, r));
  spec.repeat_up.assign(static_cast<size_t>(ka), Eigen::MatrixXd::Zero(r, r));

  auto read_block = [&reader](Eigen::MatrixXd& b) {
    for (int a = 0; a < b.rows(); ++a)
      for (int c = 0; c < b.cols(); ++c) b(a, c) = reader.expect_double("block entry");
  };

  std::string token;
  while (reader.next(token)) {
    if (token != "block") throw io::ParseError("expected 'block', got '" + token + "'", reader.line());
    const std::string family = reader.expect("block family");
    if (family == "C0") {
      read_block(spec.boundary_down);
      continue;
    }
    const long k = reader.expect_int("block index");
    if (family == "A") {
      if (k < -1 || k > ka) throw io::ParseError("A-block index out of range", reader.line());
      if (k == -1) {
        read_block(spec.repeat_down);
      } else if (k == 0) {
        read_block(spec.repeat_diag);
      } else {
        read_block(spec.repeat_up[static_cast<size_t>(k) - 1]);
      }
    } else if (family == "B") {
      if (k < 0 || k > kb) throw io::ParseError("B-block index out of range", reader.line());
      if (k == 0) {
        read_block(spec.boundary_diag);
      } else {
        read_block(spec.boundary_up[static_cast<size_t>(k) - 1]);
      }
    } else {
      throw io::ParseError("unknown block family '" + family + "'", reader.line());
    }
  }
  return spec;
}

}  // namespace bsmc::mg1
