#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include <boost/math/special_functions/gamma.hpp>

#include "uglt/sampler.hpp"

namespace uglt {

double log_beta(double a, double b) {
  return boost::math::lgamma(a) + boost::math::lgamma(b) - boost::math::lgamma(a + b);
}

double log_column_prior(const EspParameters& esp, int m, int pivot, int d) {
  const int below = m - 1 - pivot;
  return log_beta(esp.a + d - 1, esp.b + below - (d - 1)) - log_beta(esp.a, esp.b);
}

double log_esp_structure(const EspParameters& esp, int m, int k, int r, int r_sp,
                         const std::vector<int>& pivots, const std::vector<int>& counts) {
  const double a = esp.a, b = esp.b;
  double out = -k * log_beta(a, b);
  for (std::size_t j = 0; j < pivots.size(); ++j) {
    const int below = m - 1 - pivots[j];
    out += log_beta(a + counts[j] - 1, b + below - (counts[j] - 1));
  }
  for (int s = 1; s <= r_sp; ++s) out += log_beta(a + 1.0, b + m - r - s);
  out += (k - r - r_sp) * log_beta(a, b + m - r - r_sp);
  return out;
}

double log_add_acceptance(double log_odds, const EspParameters& esp, int m, int pivot_old, int pivot_new, int d,
                          int n_candidates, double p_add_old, double p_add_new) {
  const double prior_ratio = log_column_prior(esp, m, pivot_new, d + 1) - log_column_prior(esp, m, pivot_old, d);
  return log_odds + prior_ratio + std::log(static_cast<double>(n_candidates)) + std::log1p(-p_add_new) -
         std::log(p_add_old);
}

double log_delete_acceptance(double log_odds, const EspParameters& esp, int m, int pivot_old, int pivot_new, int d,
                             int n_candidates_new, double p_add_old, double p_add_new) {
  const double prior_ratio = log_column_prior(esp, m, pivot_new, d - 1) - log_column_prior(esp, m, pivot_old, d);
  return -log_odds + prior_ratio + std::log(p_add_new) - std::log(static_cast<double>(n_candidates_new)) -
         std::log1p(-p_add_old);
}

SpuriousSplit split_variance(double u, double sigma2) {
  if (!(u > -1.0 && u < 1.0)) throw std::domain_error("split_variance: U must lie in (-1, 1)");
  return {u * std::sqrt(sigma2), (1.0 - u * u) * sigma2};
}

InvGammaParams theta_full_conditional(double c_theta, double b_theta, int d, double kappa, double scaled_sum) {
  return {c_theta + 0.5 * d, b_theta + 0.5 * scaled_sum / kappa};
}

std::array<long, MoveCounters::kSize> MoveCounters::as_array() const {
  return {shift_prop, shift_acc, switch_prop, switch_acc, add_prop,   add_acc,       delete_prop,
          delete_acc, split_prop, split_acc, merge_prop,  merge_acc,  alpha_prop,    alpha_acc,
          gamma_prop, gamma_acc, promotions, demotions,   fallback_rows, shrink_skipped};
}

std::array<const char*, MoveCounters::kSize> MoveCounters::names() {
  return {"shift_prop", "shift_acc", "switch_prop", "switch_acc", "add_prop",   "add_acc",       "delete_prop",
          "delete_acc", "split_prop", "split_acc", "merge_prop",  "merge_acc",  "alpha_prop",    "alpha_acc",
          "gamma_prop", "gamma_acc", "promotions", "demotions",   "fallback_rows", "shrink_skipped"};
}

Eigen::VectorXd idiosyncratic_scales(const Dataset& data, const IdioPrior& idio) {
  const int m = data.m(), T = data.T();
  if (idio.scaling == IdioScaling::Fixed) return Eigen::VectorXd::Constant(m, idio.C0);
  if (!(idio.c0 > 1.0)) throw std::invalid_argument("Heywood scaling needs c0 > 1");
  Eigen::MatrixXd S = 0.5 * data.y * data.y.transpose();
  S.diagonal().array() += idio.nu_o * idio.s_o;
  Eigen::LLT<Eigen::MatrixXd> llt(S);
  if (llt.info() != Eigen::Success) throw std::runtime_error("Heywood scaling: reference matrix not positive definite");
  const Eigen::MatrixXd Sinv = llt.solve(Eigen::MatrixXd::Identity(m, m));
  Eigen::VectorXd C0(m);
  for (int i = 0; i < m; ++i) C0(i) = (idio.c0 - 1.0) / ((idio.nu_o + 0.5 * T) * Sinv(i, i));
  return C0;
}

SparsityMatrix DrawRecord::delta() const {
  SparsityMatrix d(m, r);
  for (const auto& [i, j] : support) d.set(i, j, true);
  return d;
}

Eigen::MatrixXd DrawRecord::lambda() const {
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(m, r);
  for (std::size_t n = 0; n < support.size(); ++n) l(support[n].first, support[n].second) = loadings[n];
  return l;
}

Sampler::Sampler(const Dataset& data, const PriorConfig& prior, int k, Rng& rng, SamplerOptions options)
    : data_(data), prior_(prior), k_(k), rng_(rng), options_(options) {
  validate(prior_);
  const int m = data.m(), T = data.T();
  if (k < 1) throw std::invalid_argument("Sampler: k must be positive");
  slab_.fractional = prior_.slab == SlabFamily::Fractional;
  slab_.fraction = prior_.fraction > 0.0 ? prior_.fraction : 1.0 / (static_cast<double>(m) * T);
  C0_ = idiosyncratic_scales(data, prior_.idio);
  yy_ = data.y.rowwise().squaredNorm();
  s_ = ModelState(m, k, T);
  s_.shrink.kappa = prior_.kappa.family == ScaleFamily::Fixed ? prior_.kappa.value : 1.0;
  if (prior_.theta.family == ScaleFamily::Fixed) s_.shrink.theta.setConstant(prior_.theta.value);
  s_.alpha = prior_.alpha.shape / prior_.alpha.rate;
  s_.gamma = prior_.esp == EspFamily::TwoParameter ? prior_.gamma.shape / prior_.gamma.rate : 1.0;
}

void Sampler::set_state(ModelState s) {
  if (s.m() != data_.m() || s.k() != k_ || s.T() != data_.T()) throw std::invalid_argument("set_state: shape mismatch");
  s_ = std::move(s);
  compact();
  verify("set_state");
}

EspParameters Sampler::esp() const { return esp_parameters(prior_.esp, s_.alpha, s_.gamma, k_); }

double Sampler::prior_var(int row, int col) const {
  switch (prior_.slab) {
    case SlabFamily::GaussianFixed: return prior_.A0;
    case SlabFamily::GaussianColumn: return s_.shrink.kappa * s_.shrink.theta(col);
    case SlabFamily::GaussianTriple: return s_.shrink.kappa * s_.shrink.theta(col) * s_.shrink.omega(row, col);
    case SlabFamily::Fractional: return 1.0;
  }
  return 1.0;
}

CrossProducts Sampler::active_cross_products() const {
  return cross_products(s_.factors.topRows(r_), data_.y, yy_);
}

std::vector<int> Sampler::row_columns(int row, int exclude) const {
  std::vector<int> cols;
  for (int c = 0; c < r_; ++c)
    if (c != exclude && s_.delta(row, c)) cols.push_back(c);
  return cols;
}

Eigen::VectorXd Sampler::row_prior_vars(int row, const std::vector<int>& cols) const {
  Eigen::VectorXd v(cols.size());
  for (std::size_t n = 0; n < cols.size(); ++n) v(n) = prior_var(row, cols[n]);
  return v;
}

double Sampler::row_marginal(const CrossProducts& cp, int row, const std::vector<int>& cols) const {
  return row_log_marginal(assemble_row(cp, row, cols, row_prior_vars(row, cols)), slab_, idio(row));
}

double Sampler::cell_log_odds(const CrossProducts& cp, int row, int col) const {
  const std::vector<int> others = row_columns(row, col);
  return indicator_log_odds(cp, row, others, row_prior_vars(row, others), col, prior_var(row, col), slab_, idio(row));
}

void Sampler::demote(int j) {
  s_.clear_column(j);
  ++s_.n_spurious;
  ++counters_.demotions;
}

void Sampler::compact() {
  const int threshold = options_.demote_spurious ? 2 : 1;
  int next = 0;
  for (int j = 0; j < k_; ++j) {
    if (s_.delta.col_count(j) >= threshold) {
      s_.swap_columns(next, j);
      ++next;
    }
  }
  r_ = next;
  for (int j = r_; j < k_; ++j)
    if (s_.delta.col_count(j) == 0) s_.clear_column(j);
}

void Sampler::sample_rows(const CrossProducts& cp, const std::vector<int>& rows) {
  for (int i : rows) {
    const std::vector<int> cols = row_columns(i);
    const RowSystem sys = assemble_row(cp, i, cols, row_prior_vars(i, cols));
    RowPosterior post;
    try {
      post = row_posterior(sys, slab_, idio(i));
    } catch (const CholeskyError&) {
      if (!slab_.fractional) throw;
      // Singular X'X under the fractional slab: keep the previous row.
      ++counters_.fallback_rows;
      for (int c = 0; c < r_; ++c)
        if (!s_.delta(i, c)) s_.lambda(i, c) = 0.0;
      continue;
    }
    const RowDraw draw = sample_row(post, rng_);
    for (int c = 0; c < k_; ++c) s_.lambda(i, c) = 0.0;
    for (std::size_t n = 0; n < cols.size(); ++n) s_.lambda(i, cols[n]) = draw.beta(n);
    s_.sigma2(i) = draw.sigma2;
  }
}

void Sampler::verify(const char* where) const {
  if (!options_.check_invariants) return;
  try {
    check_invariants(s_);
    for (int j = 0; j < k_; ++j) {
      const int d = s_.delta.col_count(j);
      if (j < r_ && d == 1 && options_.demote_spurious) throw std::logic_error("single-entry column in an active slot");
      if (j >= r_ && d != 0) throw std::logic_error("nonzero column outside the active slots");
    }
  } catch (const std::logic_error& e) {
    throw std::logic_error(std::string(where) + ": " + e.what());
  }
}

void Sampler::step_p() {
  const CrossProducts cp = active_cross_products();
  std::vector<int> rows(data_.m());
  for (int i = 0; i < data_.m(); ++i) rows[i] = i;
  sample_rows(cp, rows);
}

void Sampler::step_f() {
  const int T = data_.T();
  if (r_ == 0) return;
  const Eigen::MatrixXd L = s_.lambda.leftCols(r_);
  const Eigen::VectorXd inv_s2 = s_.sigma2.array().inverse();
  const Eigen::MatrixXd Lw = inv_s2.asDiagonal() * L;  // Sigma^{-1} Lambda
  Eigen::MatrixXd P = L.transpose() * Lw;
  P.diagonal().array() += 1.0;
  Eigen::LLT<Eigen::MatrixXd> llt(P);
  if (llt.info() != Eigen::Success) throw std::runtime_error("factor update: posterior precision not positive definite");
  Eigen::MatrixXd mean = llt.solve(Lw.transpose() * data_.y);
  Eigen::MatrixXd z(r_, T);
  for (int t = 0; t < T; ++t)
    for (int c = 0; c < r_; ++c) z(c, t) = rng_.normal();
  // factor covariance P^{-1} = L^{-T} L^{-1}
  mean += llt.matrixU().solve(z);
  s_.factors.topRows(r_) = mean;
}

void Sampler::sweep() {
  using Step = void (Sampler::*)();
  static constexpr std::pair<const char*, Step> steps[] = {
      {"step H", &Sampler::step_h}, {"step D", &Sampler::step_d}, {"step L", &Sampler::step_l},
      {"step P", &Sampler::step_p}, {"step F", &Sampler::step_f}, {"step S", &Sampler::step_s},
      {"step A", &Sampler::step_a}, {"step R", &Sampler::step_r}};
  for (const auto& [tag, step] : steps) {
    try {
      (this->*step)();
    } catch (const std::logic_error& e) {
      throw std::logic_error(std::string(tag) + ": " + e.what());
    } catch (const std::exception& e) {
      throw std::runtime_error(std::string(tag) + ": " + e.what());
    }
    verify(tag);
  }
}

}  // namespace uglt
