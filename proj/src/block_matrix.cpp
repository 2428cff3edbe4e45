#include "bsmc/block_matrix.hpp"

#include <algorithm>
#include <cstdint>
#include <queue>
#include <stdexcept>
#include <string>

namespace bsmc {

namespace {

std::vector<int> make_offsets(const std::vector<int>& counts) {
  std::vector<int> offsets(counts.size() + 1, 0);
  for (size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] <= 0) throw std::invalid_argument("phase count must be positive");
    offsets[i + 1] = offsets[i] + counts[i];
  }
  return offsets;
}

}  // namespace

BlockMatrix::BlockMatrix(std::vector<int> phase_counts)
    : BlockMatrix(phase_counts, phase_counts) {}

BlockMatrix::BlockMatrix(std::vector<int> row_phase_counts, std::vector<int> col_phase_counts)
    : row_phases_(std::move(row_phase_counts)), col_phases_(std::move(col_phase_counts)) {
  row_offsets_ = make_offsets(row_phases_);
  col_offsets_ = make_offsets(col_phases_);
  rows_.resize(row_phases_.size());
}

int BlockMatrix::num_levels() const {
  if (!square()) throw std::logic_error("num_levels requires a square block matrix");
  return num_row_levels();
}

void BlockMatrix::check_block_index(int i, int j) const {
  if (i < 0 || i >= num_row_levels() || j < 0 || j >= num_col_levels()) {
    throw std::out_of_range("block index (" + std::to_string(i) + ", " + std::to_string(j) +
                            ") out of range for " + std::to_string(num_row_levels()) + "x" +
                            std::to_string(num_col_levels()) + " levels");
  }
}

const Eigen::MatrixXd* BlockMatrix::find_block(int i, int j) const {
  check_block_index(i, j);
  const auto& row = rows_[static_cast<size_t>(i)];
  auto it = std::lower_bound(row.begin(), row.end(), j,
                             [](const Entry& e, int col) { return e.col < col; });
  if (it == row.end() || it->col != j) return nullptr;
  return &it->value;
}

Eigen::MatrixXd BlockMatrix::block(int i, int j) const {
  if (const Eigen::MatrixXd* b = find_block(i, j)) return *b;
  return Eigen::MatrixXd::Zero(row_phases(i), col_phases(j));
}

Eigen::MatrixXd& BlockMatrix::block_ref(int i, int j) {
  check_block_index(i, j);
  auto& row = rows_[static_cast<size_t>(i)];
  auto it = std::lower_bound(row.begin(), row.end(), j,
                             [](const Entry& e, int col) { return e.col < col; });
  if (it == row.end() || it->col != j) {
    it = row.insert(it, Entry{j, Eigen::MatrixXd::Zero(row_phases(i), col_phases(j))});
  }
  return it->value;
}

void BlockMatrix::set_block(int i, int j, Eigen::MatrixXd value) {
  check_block_index(i, j);
  if (value.rows() != row_phases(i) || value.cols() != col_phases(j)) {
    throw std::invalid_argument("block (" + std::to_string(i) + ", " + std::to_string(j) +
                                ") has shape " + std::to_string(value.rows()) + "x" +
                                std::to_string(value.cols()) + ", expected " +
                                std::to_string(row_phases(i)) + "x" + std::to_string(col_phases(j)));
  }
  auto& row = rows_[static_cast<size_t>(i)];
  auto it = std::lower_bound(row.begin(), row.end(), j,
                             [](const Entry& e, int col) { return e.col < col; });
  const bool zero = value.isZero(0.0);
  if (it != row.end() && it->col == j) {
    if (zero) {
      row.erase(it);
    } else {
      it->value = std::move(value);
    }
  } else if (!zero) {
    row.insert(it, Entry{j, std::move(value)});
  }
}

void BlockMatrix::add_to_block(int i, int j, const Eigen::MatrixXd& delta) {
  if (delta.isZero(0.0)) {
    check_block_index(i, j);
    return;
  }
  block_ref(i, j) += delta;
}

int BlockMatrix::stored_blocks() const {
  int n = 0;
  for (const auto& row : rows_) n += static_cast<int>(row.size());
  return n;
}

double BlockMatrix::scalar_row_sum(int level, int phase) const {
  check_block_index(level, 0);
  if (phase < 0 || phase >= row_phases(level)) {
    throw std::out_of_range("phase " + std::to_string(phase) + " out of range at level " +
                            std::to_string(level));
  }
  double sum = 0.0;
  for (const Entry& e : rows_[static_cast<size_t>(level)]) sum += e.value.row(phase).sum();
  return sum;
}

double BlockMatrix::max_row_sum_deviation() const {
  double worst = 0.0;
  for (int i = 0; i < num_row_levels(); ++i) {
    Eigen::VectorXd sums = Eigen::VectorXd::Zero(row_phases(i));
    for (const Entry& e : rows_[static_cast<size_t>(i)]) sums += e.value.rowwise().sum();
    worst = std::max(worst, (sums.array() - 1.0).abs().maxCoeff());
  }
  return worst;
}

double BlockMatrix::min_entry() const {
  double m = 0.0;
  for (const auto& row : rows_)
    for (const Entry& e : row) m = std::min(m, e.value.minCoeff());
  return m;
}

Eigen::MatrixXd BlockMatrix::to_dense() const {
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(total_rows(), total_cols());
  for (int i = 0; i < num_row_levels(); ++i) {
    for (const Entry& e : rows_[static_cast<size_t>(i)]) {
      dense.block(row_offset(i), col_offset(e.col), row_phases(i), col_phases(e.col)) = e.value;
    }
  }
  return dense;
}

BlockMatrix BlockMatrix::from_dense(const Eigen::MatrixXd& dense,
                                    std::vector<int> row_phase_counts,
                                    std::vector<int> col_phase_counts) {
  BlockMatrix m(std::move(row_phase_counts), std::move(col_phase_counts));
  if (dense.rows() != m.total_rows() || dense.cols() != m.total_cols()) {
    throw std::invalid_argument("dense matrix shape does not match phase counts");
  }
  for (int i = 0; i < m.num_row_levels(); ++i) {
    for (int j = 0; j < m.num_col_levels(); ++j) {
      Eigen::MatrixXd b = dense.block(m.row_offset(i), m.col_offset(j), m.row_phases(i), m.col_phases(j));
      if (!b.isZero(0.0)) m.set_block(i, j, std::move(b));
    }
  }
  return m;
}

double row_defect(const BlockMatrix& m, int level, int phase) {
  const double sum = m.scalar_row_sum(level, phase);
  if (sum > 1.0 + 1e-12) {
    throw std::invalid_argument("row (" + std::to_string(level) + ", " + std::to_string(phase) +
                                ") sums to " + std::to_string(sum) + " > 1: not substochastic");
  }
  return std::max(0.0, 1.0 - sum);
}

BlockPartition partition(const BlockMatrix& m, int n) {
  const int N = m.num_levels() - 1;
  if (n < 0 || n >= N) {
    throw std::out_of_range("partition level " + std::to_string(n) + " out of range [0, " +
                            std::to_string(N) + ")");
  }
  const auto& counts = m.row_phase_counts();
  std::vector<int> low(counts.begin(), counts.begin() + n + 1);
  std::vector<int> high(counts.begin() + n + 1, counts.end());

  BlockPartition p{BlockMatrix(low), BlockMatrix(low, high), BlockMatrix(high, low), BlockMatrix(high)};
  for (int i = 0; i <= N; ++i) {
    for (const BlockMatrix::Entry& e : m.row(i)) {
      const int j = e.col;
      if (i <= n && j <= n) {
        p.corner.set_block(i, j, e.value);
      } else if (i <= n) {
        p.up.set_block(i, j - n - 1, e.value);
      } else if (j <= n) {
        p.down.set_block(i - n - 1, j, e.value);
      } else {
        p.complement.set_block(i - n - 1, j - n - 1, e.value);
      }
    }
  }
  return p;
}

BlockMatrix reassemble(const BlockPartition& p) {
  const int n = p.corner.num_levels() - 1;
  std::vector<int> counts = p.corner.row_phase_counts();
  counts.insert(counts.end(), p.complement.row_phase_counts().begin(),
                p.complement.row_phase_counts().end());
  BlockMatrix m(counts);
  for (int i = 0; i <= n; ++i) {
    for (const BlockMatrix::Entry& e : p.corner.row(i)) m.set_block(i, e.col, e.value);
    for (const BlockMatrix::Entry& e : p.up.row(i)) m.set_block(i, e.col + n + 1, e.value);
  }
  for (int i = 0; i < p.complement.num_row_levels(); ++i) {
    for (const BlockMatrix::Entry& e : p.down.row(i)) m.set_block(i + n + 1, e.col, e.value);
    for (const BlockMatrix::Entry& e : p.complement.row(i)) m.set_block(i + n + 1, e.col + n + 1, e.value);
  }
  return m;
}

namespace {

// CSR adjacency over scalar states with strictly positive transition entries.
struct Csr {
  std::vector<int64_t> offsets;
  std::vector<int32_t> targets;
};

Csr build_adjacency(const BlockMatrix& m, bool reverse) {
  const int n = m.total_rows();
  std::vector<int64_t> counts(static_cast<size_t>(n) + 1, 0);
  for (int i = 0; i < m.num_row_levels(); ++i) {
    for (const BlockMatrix::Entry& e : m.row(i)) {
      for (int a = 0; a < e.value.rows(); ++a) {
        for (int b = 0; b < e.value.cols(); ++b) {
          if (e.value(a, b) > 0.0) {
            const int from = reverse ? m.col_offset(e.col) + b : m.row_offset(i) + a;
            ++counts[static_cast<size_t>(from) + 1];
          }
        }
      }
    }
  }
  Csr csr;
  csr.offsets.resize(static_cast<size_t>(n) + 1, 0);
  for (int i = 0; i < n; ++i) csr.offsets[static_cast<size_t>(i) + 1] = csr.offsets[static_cast<size_t>(i)] + counts[static_cast<size_t>(i) + 1];
  csr.targets.resize(static_cast<size_t>(csr.offsets.back()));
  std::vector<int64_t> cursor(csr.offsets.begin(), csr.offsets.end() - 1);
  for (int i = 0; i < m.num_row_levels(); ++i) {
    for (const BlockMatrix::Entry& e : m.row(i)) {
      for (int a = 0; a < e.value.rows(); ++a) {
        for (int b = 0; b < e.value.cols(); ++b) {
          if (e.value(a, b) > 0.0) {
            const int from = reverse ? m.col_offset(e.col) + b : m.row_offset(i) + a;
            const int to = reverse ? m.row_offset(i) + a : m.col_offset(e.col) + b;
            csr.targets[static_cast<size_t>(cursor[static_cast<size_t>(from)]++)] = to;
          }
        }
      }
    }
  }
  return csr;
}

bool reaches_all(const Csr& csr, int n) {
  std::vector<char> seen(static_cast<size_t>(n), 0);
  std::vector<int32_t> stack{0};
  seen[0] = 1;
  int visited = 1;
  while (!stack.empty()) {
    const int32_t u = stack.back();
    stack.pop_back();
    for (int64_t k = csr.offsets[static_cast<size_t>(u)]; k < csr.offsets[static_cast<size_t>(u) + 1]; ++k) {
      const int32_t v = csr.targets[static_cast<size_t>(k)];
      if (!seen[static_cast<size_t>(v)]) {
        seen[static_cast<size_t>(v)] = 1;
        ++visited;
        stack.push_back(v);
      }
    }
  }
  return visited == n;
}

}  // namespace

bool is_irreducible(const BlockMatrix& m) {
  if (!m.square()) throw std::invalid_argument("irreducibility requires a square matrix");
  const int n = m.total_rows();
  if (n == 1) return true;
  if (!reaches_all(build_adjacency(m, false), n)) return false;
  return reaches_all(build_adjacency(m, true), n);
}

StationaryVector::StationaryVector(std::vector<Eigen::RowVectorXd> level_blocks)
    : blocks_(std::move(level_blocks)) {}

std::vector<int> StationaryVector::phase_counts() const {
  std::vector<int> counts(blocks_.size());
  for (size_t i = 0; i < blocks_.size(); ++i) counts[i] = static_cast<int>(blocks_[i].size());
  return counts;
}

int StationaryVector::total_states() const {
  int n = 0;
  for (const auto& b : blocks_) n += static_cast<int>(b.size());
  return n;
}

double StationaryVector::total() const {
  double sum = 0.0, comp = 0.0;
  for (const auto& b : blocks_) {
    for (int k = 0; k < b.size(); ++k) {
      const double y = b[k] - comp;
      const double t = sum + y;
      comp = (t - sum) - y;
      sum = t;
    }
  }
  return sum;
}

double StationaryVector::min_entry() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& b : blocks_) m = std::min(m, b.size() > 0 ? b.minCoeff() : m);
  return m;
}

double StationaryVector::l1_distance(const StationaryVector& other) const {
  if (phase_counts() != other.phase_counts()) {
    throw std::invalid_argument("l1_distance: mismatched level/phase structure");
  }
  double d = 0.0;
  for (size_t i = 0; i < blocks_.size(); ++i) d += (blocks_[i] - other.blocks_[i]).cwiseAbs().sum();
  return d;
}

double StationaryVector::linf_distance(const StationaryVector& other) const {
  if (phase_counts() != other.phase_counts()) {
    throw std::invalid_argument("linf_distance: mismatched level/phase structure");
  }
  double d = 0.0;
  for (size_t i = 0; i < blocks_.size(); ++i) {
    if (blocks_[i].size() > 0) d = std::max(d, (blocks_[i] - other.blocks_[i]).cwiseAbs().maxCoeff());
  }
  return d;
}

Eigen::RowVectorXd StationaryVector::flatten() const {
  Eigen::RowVectorXd out(total_states());
  int k = 0;
  for (const auto& b : blocks_) {
    out.segment(k, b.size()) = b;
    k += static_cast<int>(b.size());
  }
  return out;
}

}  // namespace bsmc
