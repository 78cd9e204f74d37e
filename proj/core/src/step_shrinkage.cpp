#include <cmath>

#include "uglt/sampler.hpp"

namespace uglt {

void Sampler::step_s() {
  if (prior_.slab == SlabFamily::Fractional) {
    ++counters_.shrink_skipped;
    return;
  }
  if (!prior_.has_column_scale() || r_ == 0) return;
  const int m = data_.m();
  auto& sh = s_.shrink;
  const double kappa = sh.kappa;

  if (prior_.has_local_scale()) {
    const ScalePrior& w = prior_.omega;
    for (int j = 0; j < r_; ++j) {
      for (int i = 0; i < m; ++i) {
        double b = w.b;
        if (w.family == ScaleFamily::F) {
          b = rng_.gamma(w.a + w.c, w.a / w.c + 1.0 / sh.omega(i, j));
          sh.aux_omega(i, j) = b;
        }
        double shape = w.c, scale = b;
        if (s_.delta(i, j)) {
          const double l = s_.lambda(i, j);
          shape += 0.5;
          scale += 0.5 * l * l / (kappa * sh.theta(j) * s_.sigma2(i));
        }
        sh.omega(i, j) = rng_.inv_gamma(shape, scale);
      }
    }
  }

  const ScalePrior& th = prior_.theta;
  if (th.family != ScaleFamily::Fixed) {
    for (int j = 0; j < r_; ++j) {
      double b = th.b;
      if (th.family == ScaleFamily::F) {
        b = rng_.gamma(th.a + th.c, th.a / th.c + 1.0 / sh.theta(j));
      }
      sh.aux_theta(j) = b;
      double sum = 0.0;
      int d = 0;
      for (int i = 0; i < m; ++i) {
        if (!s_.delta(i, j)) continue;
        const double l = s_.lambda(i, j);
        sum += l * l / (s_.sigma2(i) * sh.omega(i, j));
        ++d;
      }
      const InvGammaParams ig = theta_full_conditional(th.c, b, d, kappa, sum);
      sh.theta(j) = rng_.inv_gamma(ig.shape, ig.scale);
    }
  }

  const ScalePrior& kp = prior_.kappa;
  if (kp.family != ScaleFamily::Fixed) {
    double b = kp.b;
    if (kp.family == ScaleFamily::F) b = rng_.gamma(kp.a + kp.c, kp.a / kp.c + 1.0 / sh.kappa);
    sh.aux_kappa = b;
    double sum = 0.0;
    int d = 0;
    for (int j = 0; j < r_; ++j)
      for (int i = 0; i < m; ++i) {
        if (!s_.delta(i, j)) continue;
        const double l = s_.lambda(i, j);
        sum += l * l / (s_.sigma2(i) * sh.theta(j) * sh.omega(i, j));
        ++d;
      }
    sh.kappa = rng_.inv_gamma(kp.c + 0.5 * d, b + 0.5 * sum);
  }
}

}  // namespace uglt
