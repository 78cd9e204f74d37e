#include <algorithm>
#include <cmath>

#include "uglt/sampler.hpp"

namespace uglt {

namespace {

struct SpuriousColumn {
  int pivot = -1;
  double xi = 0.0;
  double sigma2_new = 0.0;
  Eigen::RowVectorXd f;
  double tau = 0.5;
  double theta = 1.0;
  double aux_theta = 1.0;
  Eigen::VectorXd omega;
  Eigen::VectorXd aux_omega;
};

}  // namespace

void Sampler::step_r() {
  const int m = data_.m(), T = data_.T();
  int r_sp = s_.n_spurious;
  const EspParameters e = esp();

  // Split or merge the spurious count.
  const bool can_split = r_ + r_sp < k_;
  const bool can_merge = r_sp > 0;
  const double ps = prior_.tuning.p_split;
  const double u = rng_.uniform();
  if (u < ps && can_split) {
    ++counters_.split_prop;
    const double acc = split_acceptance(e.a, e.b, m, k_, r_, r_sp);
    if (rng_.uniform() <= acc) {
      ++r_sp;
      ++counters_.split_acc;
    }
  } else if (u >= ps && u < 2.0 * ps && can_merge) {
    ++counters_.merge_prop;
    const double acc = merge_acceptance(e.a, e.b, m, k_, r_, r_sp);
    if (rng_.uniform() <= acc) {
      --r_sp;
      ++counters_.merge_acc;
    }
  }
  s_.n_spurious = r_sp;
  if (r_sp == 0) return;

  // Spurious pivots: sequential uniform draws from the rows that are not
  // pivots, then sorted.
  std::vector<int> free;
  {
    std::vector<char> taken(m, 0);
    for (int j = 0; j < r_; ++j) taken[s_.delta.pivot(j)] = 1;
    for (int i = 0; i < m; ++i)
      if (!taken[i]) free.push_back(i);
  }
  if (static_cast<int>(free.size()) < r_sp) return;  // only reachable when k >= m
  std::vector<SpuriousColumn> sp(r_sp);
  for (int n = 0; n < r_sp; ++n) {
    const std::size_t pick = rng_.index(free.size());
    sp[n].pivot = free[pick];
    free.erase(free.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  std::sort(sp.begin(), sp.end(), [](const auto& x, const auto& y) { return x.pivot < y.pivot; });

  const auto& sh = s_.shrink;
  const bool col_scale = prior_.has_column_scale();
  const bool local = prior_.has_local_scale();
  for (auto& c : sp) {
    const int l = c.pivot;
    const double s2 = s_.sigma2(l);
    const double U = 2.0 * rng_.uniform() - 1.0;
    const SpuriousSplit split = split_variance(U, s2);
    c.xi = split.xi;
    c.sigma2_new = split.sigma2;
    const Eigen::RowVectorXd resid = data_.y.row(l) - s_.lambda.row(l).head(r_) * s_.factors.topRows(r_);
    const double sd = std::sqrt(1.0 - U * U);
    c.f.resize(T);
    for (int t = 0; t < T; ++t) c.f(t) = U * resid(t) / std::sqrt(s2) + sd * rng_.normal();
    c.tau = rng_.beta(e.a, e.b + (m - 1 - l));

    c.omega = Eigen::VectorXd::Ones(m);
    c.aux_omega = Eigen::VectorXd::Ones(m);
    if (local) {
      const ScalePrior& w = prior_.omega;
      for (int i = 0; i < m; ++i) {
        double b = w.b;
        if (w.family == ScaleFamily::F) b = rng_.gamma(w.a, w.a / w.c);
        c.aux_omega(i) = b;
        c.omega(i) = rng_.inv_gamma(w.c, b);
      }
    }
    if (col_scale) {
      const ScalePrior& th = prior_.theta;
      if (th.family == ScaleFamily::Fixed) {
        c.theta = th.value;
      } else {
        double b = th.b;
        if (th.family == ScaleFamily::F) b = rng_.gamma(th.a, th.a / th.c);
        c.aux_theta = b;
        const double ratio = U * U / (1.0 - U * U);
        c.theta = rng_.inv_gamma(th.c + 0.5, b + 0.5 * ratio / (sh.kappa * c.omega(l)));
      }
      if (local) {
        const double ratio = U * U / (1.0 - U * U);
        const ScalePrior& w = prior_.omega;
        c.omega(l) = rng_.inv_gamma(w.c + 0.5, c.aux_omega(l) + 0.5 * ratio / (sh.kappa * c.theta));
      }
    }
  }

  // From the largest spurious pivot to the smallest: try to add loadings
  // below the pivot; success promotes the spurious column to an active one.
  std::vector<int> touched;
  for (int n = r_sp - 1; n >= 0; --n) {
    SpuriousColumn& c = sp[n];
    const int l = c.pivot;
    const int jw = r_;  // working index of the candidate column
    Eigen::MatrixXd fw(r_ + 1, T);
    fw.topRows(r_) = s_.factors.topRows(r_);
    fw.row(jw) = c.f;
    const CrossProducts cp = cross_products(fw, data_.y, yy_);
    const double logit = std::log(c.tau) - std::log1p(-c.tau);
    std::vector<int> gained;
    for (int i = l + 1; i < m; ++i) {
      const std::vector<int> others = row_columns(i);
      const double pv = prior_.slab == SlabFamily::GaussianFixed
                            ? prior_.A0
                            : sh.kappa * c.theta * c.omega(i);
      double post;
      try {
        post = indicator_log_odds(cp, i, others, row_prior_vars(i, others), jw, pv, slab_, idio(i)) + logit;
      } catch (const CholeskyError&) {
        ++counters_.fallback_rows;
        continue;
      }
      if (std::log(rng_.uniform()) <= post) gained.push_back(i);
    }
    if (gained.empty()) continue;  // integrated out again; sigma2 is untouched

    const int j = r_;
    s_.clear_column(j);
    s_.delta.set(l, j, true);
    for (int i : gained) s_.delta.set(i, j, true);
    s_.lambda(l, j) = c.xi;
    s_.sigma2(l) = c.sigma2_new;
    s_.factors.row(j) = c.f;
    s_.tau(j) = c.tau;
    s_.shrink.theta(j) = c.theta;
    s_.shrink.aux_theta(j) = c.aux_theta;
    s_.shrink.omega.col(j) = c.omega;
    s_.shrink.aux_omega.col(j) = c.aux_omega;
    ++r_;
    --s_.n_spurious;
    ++counters_.promotions;
    touched.push_back(l);
    touched.insert(touched.end(), gained.begin(), gained.end());
  }

  if (!touched.empty()) {
    // Refresh loadings and variances of the rows whose structure changed.
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    sample_rows(active_cross_products(), touched);
  }
}

}  // namespace uglt
