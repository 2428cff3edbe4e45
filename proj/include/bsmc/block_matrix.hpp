#pragma once

#include <Eigen/Dense>
#include <vector>

namespace bsmc {

/// Coordinates of a scalar state: block level and phase within the level.
/// Phases are 0-based in code; file formats and printed output list phases
/// in storage order.
struct LevelPhase {
  int level = 0;
  int phase = 0;
};

/// Finite nonnegative matrix partitioned into level-by-level dense blocks.
/// Phase counts may differ per level (heterogeneous boundary blocks) and,
/// for partition pieces, between the row and column axes. All-zero blocks
/// are not stored, so banded chains with thousands of levels stay compact.
class BlockMatrix {
 public:
  struct Entry {
    int col = 0;
    Eigen::MatrixXd value;
  };

  BlockMatrix() = default;
  explicit BlockMatrix(std::vector<int> phase_counts);
  BlockMatrix(std::vector<int> row_phase_counts, std::vector<int> col_phase_counts);

  int num_row_levels() const { return static_cast<int>(row_phases_.size()); }
  int num_col_levels() const { return static_cast<int>(col_phases_.size()); }
  /// Level count of a square matrix (throws when row/col structures differ).
  int num_levels() const;
  bool square() const { return row_phases_ == col_phases_; }

  int row_phases(int level) const { return row_phases_[static_cast<size_t>(level)]; }
  int col_phases(int level) const { return col_phases_[static_cast<size_t>(level)]; }
  const std::vector<int>& row_phase_counts() const { return row_phases_; }
  const std::vector<int>& col_phase_counts() const { return col_phases_; }

  int total_rows() const { return row_offsets_.back(); }
  int total_cols() const { return col_offsets_.back(); }
  int row_offset(int level) const { return row_offsets_[static_cast<size_t>(level)]; }
  int col_offset(int level) const { return col_offsets_[static_cast<size_t>(level)]; }

  bool has_block(int i, int j) const { return find_block(i, j) != nullptr; }
  /// Stored block or nullptr; never materializes zeros.
  const Eigen::MatrixXd* find_block(int i, int j) const;
  /// Copy of block (i, j); a zero block of the right shape when absent.
  Eigen::MatrixXd block(int i, int j) const;
  /// Mutable reference, inserting a zero block when absent.
  Eigen::MatrixXd& block_ref(int i, int j);
  /// Stores a block; all-zero values are dropped instead of stored.
  void set_block(int i, int j, Eigen::MatrixXd value);
  void add_to_block(int i, int j, const Eigen::MatrixXd& delta);

  const std::vector<Entry>& row(int i) const { return rows_[static_cast<size_t>(i)]; }
  int stored_blocks() const;

  double scalar_row_sum(int level, int phase) const;
  /// max over scalar rows of |row sum - 1|.
  double max_row_sum_deviation() const;
  bool is_stochastic(double tol) const { return min_entry() >= -tol && max_row_sum_deviation() <= tol; }
  double min_entry() const;

  Eigen::MatrixXd to_dense() const;
  static BlockMatrix from_dense(const Eigen::MatrixXd& dense,
                                std::vector<int> row_phase_counts,
                                std::vector<int> col_phase_counts);

 private:
  void check_block_index(int i, int j) const;

  std::vector<int> row_phases_;
  std::vector<int> col_phases_;
  std::vector<int> row_offsets_{0};
  std::vector<int> col_offsets_{0};
  std::vector<std::vector<Entry>> rows_;
};

/// Missing mass 1 - (scalar row sum) of a substochastic matrix, clamped to 0
/// when the row sum overshoots 1 by at most 1e-12. Throws when the row sum
/// exceeds 1 + 1e-12.
double row_defect(const BlockMatrix& m, int level, int phase);

/// Corner/complement split of a square chain at level n:
///   corner = levels 0..n, up = rows 0..n x cols n+1.., down = transposed
///   range, complement = levels n+1.. square piece.
struct BlockPartition {
  BlockMatrix corner;
  BlockMatrix up;
  BlockMatrix down;
  BlockMatrix complement;
};

BlockPartition partition(const BlockMatrix& m, int n);
/// Exact inverse of partition (bit-identical blocks).
BlockMatrix reassemble(const BlockPartition& p);

/// Strong connectivity of the directed graph on scalar states induced by
/// strictly positive entries.
bool is_irreducible(const BlockMatrix& m);

/// Level-partitioned nonnegative row vector (stationary distributions and
/// their unnormalized precursors).
class StationaryVector {
 public:
  StationaryVector() = default;
  explicit StationaryVector(std::vector<Eigen::RowVectorXd> level_blocks);

  int num_levels() const { return static_cast<int>(blocks_.size()); }
  const Eigen::RowVectorXd& level(int i) const { return blocks_[static_cast<size_t>(i)]; }
  Eigen::RowVectorXd& level(int i) { return blocks_[static_cast<size_t>(i)]; }
  const std::vector<Eigen::RowVectorXd>& blocks() const { return blocks_; }
  std::vector<int> phase_counts() const;
  int total_states() const;

  /// Compensated (Kahan) total of all entries.
  double total() const;
  double min_entry() const;
  /// Sum of |this - other| over all entries; shapes must match.
  double l1_distance(const StationaryVector& other) const;
  double linf_distance(const StationaryVector& other) const;
  Eigen::RowVectorXd flatten() const;

 private:
  std::vector<Eigen::RowVectorXd> blocks_;
};

}  // namespace bsmc
