#include "uglt/conjugate.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

namespace uglt {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

double lgam(double x) { return boost::math::lgamma(x); }

double likelihood_weight(const SlabSpec& slab) { return slab.fractional ? 1.0 - slab.fraction : 1.0; }

}  // namespace

Eigen::VectorXd RowPosterior::mean() const {
  return chol.transpose().triangularView<Eigen::Upper>().solve(x);
}

Eigen::MatrixXd RowPosterior::covariance() const {
  const int q = static_cast<int>(x.size());
  Eigen::MatrixXd linv = chol.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(q, q));
  return linv.transpose() * linv;
}

RowPosterior row_posterior(const RowSystem& sys, const SlabSpec& slab, const IdioHyper& idio) {
  const int q = sys.q();
  const double w = likelihood_weight(slab);
  RowPosterior post;
  post.cT = idio.c0 + 0.5 * w * sys.T;
  if (q == 0) {
    post.ssr = sys.yy;
    post.CT = idio.C0 + 0.5 * w * sys.yy;
    return post;
  }
  Eigen::MatrixXd info = sys.xtx;
  if (!slab.fractional) info.diagonal().array() += sys.prior_var.array().inverse();
  Eigen::LLT<Eigen::MatrixXd> llt(info);
  if (llt.info() != Eigen::Success) throw CholeskyError(sys.row, "row information matrix is not positive definite");
  post.chol = llt.matrixL();
  for (int d = 0; d < q; ++d)
    if (!(post.chol(d, d) > 0.0) || !std::isfinite(post.chol(d, d)))
      throw CholeskyError(sys.row, "row information matrix is numerically singular");
  post.x = post.chol.triangularView<Eigen::Lower>().solve(sys.xty);
  post.ssr = sys.yy - post.x.squaredNorm();
  post.CT = idio.C0 + 0.5 * w * post.ssr;
  if (!(post.CT > 0.0)) throw CholeskyError(sys.row, "posterior scale is not positive");
  post.log_det_VT = -2.0 * post.chol.diagonal().array().log().sum();
  return post;
}

NullRowPosterior null_row_posterior(double yy, int T, const IdioHyper& idio) {
  return {idio.c0 + 0.5 * T, idio.C0 + 0.5 * yy};
}

double row_log_marginal(const RowSystem& sys, const SlabSpec& slab, const IdioHyper& idio) {
  const double prior_part = idio.c0 * std::log(idio.C0) - lgam(idio.c0);
  if (sys.q() == 0) {
    const NullRowPosterior n = null_row_posterior(sys.yy, sys.T, idio);
    return -0.5 * sys.T * kLog2Pi + lgam(n.cT) - n.cT * std::log(n.CT) + prior_part;
  }
  const RowPosterior post = row_posterior(sys, slab, idio);
  const double tail = lgam(post.cT) - post.cT * std::log(post.CT) + prior_part;
  if (slab.fractional) {
    return 0.5 * sys.q() * std::log(slab.fraction) - 0.5 * sys.T * (1.0 - slab.fraction) * kLog2Pi + tail;
  }
  const double log_det_V0 = sys.prior_var.array().log().sum();
  return -0.5 * sys.T * kLog2Pi + 0.5 * post.log_det_VT - 0.5 * log_det_V0 + tail;
}

RowDraw sample_row(const RowPosterior& post, Rng& rng) {
  RowDraw d;
  d.sigma2 = rng.inv_gamma(post.cT, post.CT);
  const int q = static_cast<int>(post.x.size());
  if (q == 0) return d;
  Eigen::VectorXd z(q);
  const double sd = std::sqrt(d.sigma2);
  for (int n = 0; n < q; ++n) z(n) = sd * rng.normal();
  d.beta = post.chol.transpose().triangularView<Eigen::Upper>().solve(post.x + z);
  return d;
}

CrossProducts cross_products(const Eigen::MatrixXd& factors, const Eigen::MatrixXd& y, const Eigen::VectorXd& yy) {
  CrossProducts cp;
  cp.T = static_cast<int>(y.cols());
  cp.gram.noalias() = factors * factors.transpose();
  cp.fy.noalias() = factors * y.transpose();
  cp.yy = yy;
  return cp;
}

CrossProducts cross_products(const Eigen::MatrixXd& factors, const Eigen::MatrixXd& y) {
  return cross_products(factors, y, y.rowwise().squaredNorm());
}

RowSystem assemble_row(const CrossProducts& cp, int row, const std::vector<int>& cols,
                       const Eigen::VectorXd& prior_var) {
  const int q = static_cast<int>(cols.size());
  RowSystem sys;
  sys.row = row;
  sys.T = cp.T;
  sys.yy = cp.yy(row);
  sys.xtx.resize(q, q);
  sys.xty.resize(q);
  for (int a = 0; a < q; ++a) {
    sys.xty(a) = cp.fy(cols[a], row);
    for (int b = 0; b < q; ++b) sys.xtx(a, b) = cp.gram(cols[a], cols[b]);
  }
  sys.prior_var = prior_var;
  return sys;
}

double indicator_log_odds(const CrossProducts& cp, int row, const std::vector<int>& others,
                          const Eigen::VectorXd& others_prior_var, int j, double prior_var_j,
                          const SlabSpec& slab, const IdioHyper& idio) {
  const double w = likelihood_weight(slab);
  const double yy = cp.yy(row);
  const double cT = idio.c0 + 0.5 * w * cp.T;

  if (others.empty()) {
    // Dedicated row against the null row.
    const double ff = cp.gram(j, j);
    const double fy = cp.fy(j, row);
    const double BT = slab.fractional ? 1.0 / ff : 1.0 / (1.0 / prior_var_j + ff);
    const double CT = idio.C0 + 0.5 * w * (yy - fy * fy * BT);
    const double cn = idio.c0 + 0.5 * cp.T;
    const double Cn = idio.C0 + 0.5 * yy;
    const double D = slab.fractional ? 0.5 * std::log(slab.fraction) + 0.5 * slab.fraction * cp.T * kLog2Pi
                                     : 0.5 * std::log(BT / prior_var_j);
    return lgam(cT) - lgam(cn) + cn * std::log(Cn) - cT * std::log(CT) + D;
  }

  const int q = static_cast<int>(others.size()) + 1;
  Eigen::MatrixXd info(q, q);
  Eigen::VectorXd c(q);
  for (int a = 0; a < q; ++a) {
    const int ca = a + 1 < q ? others[a] : j;
    c(a) = cp.fy(ca, row);
    for (int b = 0; b < q; ++b) {
      const int cb = b + 1 < q ? others[b] : j;
      info(a, b) = cp.gram(ca, cb);
    }
  }
  if (!slab.fractional) {
    for (int a = 0; a + 1 < q; ++a) info(a, a) += 1.0 / others_prior_var(a);
    info(q - 1, q - 1) += 1.0 / prior_var_j;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(info);
  if (llt.info() != Eigen::Success) throw CholeskyError(row, "indicator update: information matrix is not positive definite");
  const Eigen::MatrixXd L = llt.matrixL();
  const Eigen::VectorXd x = L.triangularView<Eigen::Lower>().solve(c);
  const double lstar = L(q - 1, q - 1);
  const double xstar = x(q - 1);
  const double C1 = idio.C0 + 0.5 * w * (yy - x.squaredNorm());
  const double C0 = C1 + 0.5 * w * xstar * xstar;
  if (!(C1 > 0.0) || !(lstar > 0.0)) throw CholeskyError(row, "indicator update: degenerate row system");
  const double D = slab.fractional ? 0.5 * std::log(slab.fraction) : -std::log(lstar) - 0.5 * std::log(prior_var_j);
  return cT * std::log(C0 / C1) + D;
}

}  // namespace uglt
