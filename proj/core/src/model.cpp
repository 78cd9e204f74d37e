#include "uglt/model.hpp"

#include <cmath>
#include <cstring>
#include <sstream>
#include <stdexcept>

namespace uglt {

void standardize(Dataset& data) {
  const int m = data.m(), T = data.T();
  if (T < 2) throw std::invalid_argument("standardize: need at least two observations");
  data.means.resize(m);
  data.sds.resize(m);
  for (int i = 0; i < m; ++i) {
    const double mean = data.y.row(i).mean();
    const double var = (data.y.row(i).array() - mean).square().sum() / (T - 1);
    if (!(var > 0.0)) {
      const std::string name = i < static_cast<int>(data.names.size()) ? data.names[i] : std::to_string(i);
      throw std::invalid_argument("standardize: feature '" + name + "' is constant");
    }
    const double sd = std::sqrt(var);
    data.y.row(i) = (data.y.row(i).array() - mean) / sd;
    data.means(i) = mean;
    data.sds(i) = sd;
  }
  data.demeaned = true;
  data.standardized = true;
}

std::uint64_t fingerprint(const Dataset& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 0x100000001b3ULL;
    }
  };
  const std::int64_t dims[2] = {data.y.rows(), data.y.cols()};
  mix(dims, sizeof dims);
  mix(data.y.data(), sizeof(double) * static_cast<std::size_t>(data.y.size()));
  return h;
}

int SparsityMatrix::col_count(int j) const {
  int c = 0;
  for (int i = 0; i < m_; ++i) c += data_[idx(i, j)];
  return c;
}

int SparsityMatrix::row_count(int i) const {
  int c = 0;
  for (int j = 0; j < k_; ++j) c += data_[idx(i, j)];
  return c;
}

int SparsityMatrix::total() const {
  int c = 0;
  for (auto v : data_) c += v;
  return c;
}

int SparsityMatrix::pivot(int j) const {
  for (int i = 0; i < m_; ++i)
    if (data_[idx(i, j)]) return i;
  return -1;
}

int SparsityMatrix::next_below(int j, int row) const {
  for (int i = row + 1; i < m_; ++i)
    if (data_[idx(i, j)]) return i;
  return -1;
}

ColumnClass SparsityMatrix::column_class(int j) const {
  const int d = col_count(j);
  if (d == 0) return ColumnClass::Zero;
  if (d == 1) return ColumnClass::Spurious;
  return ColumnClass::Active;
}

std::vector<int> SparsityMatrix::pivots() const {
  std::vector<int> p(k_);
  for (int j = 0; j < k_; ++j) p[j] = pivot(j);
  return p;
}

bool SparsityMatrix::is_uglt() const {
  std::vector<char> seen(m_, 0);
  for (int j = 0; j < k_; ++j) {
    const int p = pivot(j);
    if (p < 0) continue;
    if (seen[p]) return false;
    seen[p] = 1;
  }
  return true;
}

void SparsityMatrix::clear_column(int j) {
  for (int i = 0; i < m_; ++i) data_[idx(i, j)] = 0;
}

void SparsityMatrix::swap_columns(int a, int b) {
  if (a == b) return;
  for (int i = 0; i < m_; ++i) std::swap(data_[idx(i, a)], data_[idx(i, b)]);
}

SparsityMatrix SparsityMatrix::select_columns(const std::vector<int>& cols) const {
  SparsityMatrix out(m_, static_cast<int>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c)
    for (int i = 0; i < m_; ++i) out.set(i, static_cast<int>(c), (*this)(i, cols[c]));
  return out;
}

ColumnSummary classify_columns(const SparsityMatrix& delta) {
  ColumnSummary s;
  s.classes.resize(delta.cols());
  for (int j = 0; j < delta.cols(); ++j) {
    const ColumnClass c = delta.column_class(j);
    s.classes[j] = c;
    switch (c) {
      case ColumnClass::Active: ++s.r; s.active.push_back(j); break;
      case ColumnClass::Spurious: ++s.r_sp; s.spurious.push_back(j); break;
      case ColumnClass::Zero: ++s.zero; break;
    }
  }
  return s;
}

void ShrinkageState::resize(int m, int k) {
  theta = Eigen::VectorXd::Ones(k);
  aux_theta = Eigen::VectorXd::Ones(k);
  omega = Eigen::MatrixXd::Ones(m, k);
  aux_omega = Eigen::MatrixXd::Ones(m, k);
}

void ShrinkageState::swap_columns(int a, int b) {
  if (a == b) return;
  std::swap(theta(a), theta(b));
  std::swap(aux_theta(a), aux_theta(b));
  omega.col(a).swap(omega.col(b));
  aux_omega.col(a).swap(aux_omega.col(b));
}

void ShrinkageState::reset_column(int j) {
  theta(j) = 1.0;
  aux_theta(j) = 1.0;
  omega.col(j).setOnes();
  aux_omega.col(j).setOnes();
}

ModelState::ModelState(int m, int k, int T)
    : delta(m, k),
      lambda(Eigen::MatrixXd::Zero(m, k)),
      sigma2(Eigen::VectorXd::Ones(m)),
      factors(Eigen::MatrixXd::Zero(k, T)),
      tau(Eigen::VectorXd::Constant(k, 0.5)) {
  shrink.resize(m, k);
}

void ModelState::swap_columns(int a, int b) {
  if (a == b) return;
  delta.swap_columns(a, b);
  lambda.col(a).swap(lambda.col(b));
  factors.row(a).swap(factors.row(b));
  std::swap(tau(a), tau(b));
  shrink.swap_columns(a, b);
}

void ModelState::clear_column(int j) {
  delta.clear_column(j);
  lambda.col(j).setZero();
  factors.row(j).setZero();
  tau(j) = 0.5;
  shrink.reset_column(j);
}

Eigen::MatrixXd implied_covariance(const ModelState& s, CovarianceForm form) {
  if (!s.lambda.allFinite() || !s.sigma2.allFinite())
    throw std::domain_error("implied_covariance: state has non-finite entries");
  if (form == CovarianceForm::Efa) {
    Eigen::MatrixXd omega = s.lambda * s.lambda.transpose();
    omega.diagonal() += s.sigma2;
    return omega;
  }
  // CFA: active columns only, with the spurious loadings moved into sigma2.
  const int m = s.m();
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd diag = s.sigma2;
  for (int j = 0; j < s.k(); ++j) {
    const ColumnClass c = s.delta.column_class(j);
    if (c == ColumnClass::Active) omega.noalias() += s.lambda.col(j) * s.lambda.col(j).transpose();
    else if (c == ColumnClass::Spurious) diag += s.lambda.col(j).cwiseAbs2();
  }
  omega.diagonal() += diag;
  return omega;
}

std::vector<int> expand_cfa_to_efa(ModelState& s, const std::vector<int>& rows,
                                   const std::vector<double>& xi) {
  if (rows.size() != xi.size()) throw std::invalid_argument("expand_cfa_to_efa: rows and xi differ in length");
  std::vector<char> is_pivot(s.m(), 0);
  for (int p : s.delta.pivots())
    if (p >= 0) is_pivot[p] = 1;
  std::vector<int> placed;
  int next_free = 0;
  for (std::size_t n = 0; n < rows.size(); ++n) {
    const int l = rows[n];
    if (l < 0 || l >= s.m()) throw std::out_of_range("expand_cfa_to_efa: pivot row out of range");
    if (is_pivot[l]) throw std::invalid_argument("expand_cfa_to_efa: row " + std::to_string(l) + " is already a pivot");
    const double x2 = xi[n] * xi[n];
    if (!(x2 < s.sigma2(l)))
      throw std::domain_error("expand_cfa_to_efa: spurious loading squared must be below the idiosyncratic variance of row " +
                              std::to_string(l));
    while (next_free < s.k() && s.delta.col_count(next_free) != 0) ++next_free;
    if (next_free >= s.k()) throw std::length_error("expand_cfa_to_efa: no free column for a spurious factor");
    s.delta.set(l, next_free, true);
    s.lambda(l, next_free) = xi[n];
    s.sigma2(l) -= x2;
    is_pivot[l] = 1;
    placed.push_back(next_free);
    ++next_free;
  }
  s.n_spurious = std::max(s.n_spurious, classify_columns(s.delta).r_sp);
  return placed;
}

int collapse_efa_to_cfa(ModelState& s) {
  int folded = 0;
  for (int j = 0; j < s.k(); ++j) {
    if (s.delta.col_count(j) != 1) continue;
    const int l = s.delta.pivot(j);
    s.sigma2(l) += s.lambda(l, j) * s.lambda(l, j);
    s.clear_column(j);
    ++folded;
  }
  return folded;
}

void check_invariants(const ModelState& s) {
  auto fail = [](const std::string& what) { throw std::logic_error("model invariant violated: " + what); };
  const int m = s.m(), k = s.k();
  if (s.delta.rows() != m || s.delta.cols() != k) fail("indicator matrix shape");
  if (s.sigma2.size() != m || s.factors.rows() != k || s.tau.size() != k) fail("parameter shapes");
  if (!s.delta.is_uglt()) fail("pivots are not distinct");
  for (int i = 0; i < m; ++i)
    if (!(s.sigma2(i) > 0.0) || !std::isfinite(s.sigma2(i))) fail("sigma2 not positive at row " + std::to_string(i));
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < m; ++i)
      if (!s.delta(i, j) && s.lambda(i, j) != 0.0) {
        std::ostringstream os;
        os << "loading (" << i << "," << j << ") nonzero outside the indicator support";
        fail(os.str());
      }
  const ColumnSummary cs = classify_columns(s.delta);
  if (cs.r_sp > s.n_spurious) fail("more materialised spurious columns than counted");
  if (cs.r + s.n_spurious > k) fail("r + r_sp exceeds k");
}

}  // namespace uglt
