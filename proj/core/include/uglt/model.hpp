#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace uglt {

// Observations stored as an m x T matrix (one row per feature).
struct Dataset {
  Eigen::MatrixXd y;
  std::vector<std::string> names;
  bool demeaned = false;
  bool standardized = false;
  Eigen::VectorXd means;
  Eigen::VectorXd sds;

  int m() const { return static_cast<int>(y.rows()); }
  int T() const { return static_cast<int>(y.cols()); }
};

// Demean and scale every feature to unit variance. Throws on a constant feature.
void standardize(Dataset& data);
// FNV-1a hash of the observation matrix bytes and dimensions.
std::uint64_t fingerprint(const Dataset& data);

enum class ColumnClass { Zero, Spurious, Active };

// Binary indicator matrix delta (m x k), column-major.
class SparsityMatrix {
 public:
  SparsityMatrix() = default;
  SparsityMatrix(int m, int k) : m_(m), k_(k), data_(static_cast<std::size_t>(m) * k, 0) {}

  int rows() const { return m_; }
  int cols() const { return k_; }

  bool operator()(int i, int j) const { return data_[idx(i, j)] != 0; }
  void set(int i, int j, bool v) { data_[idx(i, j)] = v ? 1 : 0; }
  void flip(int i, int j) { data_[idx(i, j)] ^= 1; }

  int col_count(int j) const;
  int row_count(int i) const;
  int total() const;
  // First nonzero row of column j, or -1 for a zero column.
  int pivot(int j) const;
  // First nonzero row strictly below `row` in column j, or -1.
  int next_below(int j, int row) const;
  ColumnClass column_class(int j) const;
  std::vector<int> pivots() const;
  // True when the pivots of all nonzero columns are pairwise distinct.
  bool is_uglt() const;

  void clear_column(int j);
  void swap_columns(int a, int b);
  // Keep only the listed columns, in the listed order.
  SparsityMatrix select_columns(const std::vector<int>& cols) const;

  bool operator==(const SparsityMatrix& o) const {
    return m_ == o.m_ && k_ == o.k_ && data_ == o.data_;
  }

 private:
  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(j) * m_ + i; }
  int m_ = 0;
  int k_ = 0;
  std::vector<std::uint8_t> data_;
};

struct ColumnSummary {
  int r = 0;
  int r_sp = 0;
  int zero = 0;
  std::vector<ColumnClass> classes;
  std::vector<int> active;    // storage indices of active columns
  std::vector<int> spurious;  // storage indices of spurious columns
};

ColumnSummary classify_columns(const SparsityMatrix& delta);

// Hierarchical shrinkage parameters. theta and the auxiliaries are indexed by
// storage column, omega by cell.
struct ShrinkageState {
  double kappa = 1.0;
  double aux_kappa = 1.0;
  Eigen::VectorXd theta;
  Eigen::VectorXd aux_theta;
  Eigen::MatrixXd omega;
  Eigen::MatrixXd aux_omega;

  void resize(int m, int k);
  void swap_columns(int a, int b);
  void reset_column(int j);
};

// Full sampler state. Active columns occupy storage slots [0, r) while the
// sampler runs; the order among them carries no meaning. In CFA form the
// spurious columns exist only as the count n_spurious. In EFA form they are
// materialised in storage with a single nonzero entry each.
struct ModelState {
  SparsityMatrix delta;
  Eigen::MatrixXd lambda;   // m x k
  Eigen::VectorXd sigma2;   // m
  Eigen::MatrixXd factors;  // k x T
  Eigen::VectorXd tau;      // k
  ShrinkageState shrink;
  double alpha = 1.0;
  double gamma = 1.0;
  int n_spurious = 0;

  ModelState() = default;
  ModelState(int m, int k, int T);

  int m() const { return static_cast<int>(lambda.rows()); }
  int k() const { return static_cast<int>(lambda.cols()); }
  int T() const { return static_cast<int>(factors.cols()); }

  void swap_columns(int a, int b);
  void clear_column(int j);
};

enum class CovarianceForm { Efa, Cfa };

// Omega = Lambda Lambda' + diag(sigma2). Efa sums over every stored column;
// Cfa keeps the active columns and folds spurious loadings into sigma2.
// Throws std::domain_error on non-finite entries.
Eigen::MatrixXd implied_covariance(const ModelState& s, CovarianceForm form = CovarianceForm::Efa);

// Add spurious columns with pivots `rows` and loadings `xi`, reducing the
// corresponding idiosyncratic variances by xi^2. Columns are placed in free
// zero slots; their storage indices are returned. Throws when xi^2 >= sigma2
// or a row is already a pivot.
std::vector<int> expand_cfa_to_efa(ModelState& s, const std::vector<int>& rows,
                                   const std::vector<double>& xi);

// Fold every materialised spurious column back into the idiosyncratic
// variance and clear it. Returns the number of columns folded.
int collapse_efa_to_cfa(ModelState& s);

// Structural checks; throws std::logic_error describing the first violation.
void check_invariants(const ModelState& s);

}  // namespace uglt
