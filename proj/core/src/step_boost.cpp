#include <cmath>

#include "uglt/sampler.hpp"

namespace uglt {

void Sampler::step_a() {
  if (r_ == 0) return;
  const BoostMode mode = effective_boost_mode(prior_);
  if (mode == BoostMode::None) return;
  const int m = data_.m(), T = data_.T();
  auto& sh = s_.shrink;

  auto rescale = [&](int j, double psi_old, double psi_new) {
    const double g = std::sqrt(psi_new / psi_old);
    s_.lambda.col(j) *= g;
    s_.factors.row(j) /= g;
  };

  for (int j = 0; j < r_; ++j) {
    const int d = s_.delta.col_count(j);
    if (d == 0) continue;
    const double ff = s_.factors.row(j).squaredNorm();
    switch (mode) {
      case BoostMode::Asis: {
        if (T <= d) break;
        int anchor = s_.delta.pivot(j);
        if (prior_.boost.anchor == AsisAnchor::MaxAbs) {
          for (int i = 0; i < m; ++i)
            if (std::abs(s_.lambda(i, j)) > std::abs(s_.lambda(anchor, j))) anchor = i;
        }
        const double psi = s_.lambda(anchor, j) * s_.lambda(anchor, j);
        if (!(psi > 0.0)) break;
        const double psi_new = rng_.inv_gamma(0.5 * (T - d), 0.5 * psi * ff);
        rescale(j, psi, psi_new);
        break;
      }
      case BoostMode::Mda: {
        const double shape = prior_.boost.mda_nu - 0.5 * d + 0.5 * T;
        if (!(shape > 0.0)) break;
        const double psi = rng_.inv_gamma(prior_.boost.mda_nu, prior_.boost.mda_q);
        const double psi_new = rng_.inv_gamma(shape, prior_.boost.mda_q + 0.5 * psi * ff);
        rescale(j, psi, psi_new);
        break;
      }
      case BoostMode::Column: {
        const double theta = sh.theta(j);
        const double theta_new = rng_.inv_gamma(prior_.theta.c + 0.5 * T, sh.aux_theta(j) + 0.5 * theta * ff);
        rescale(j, theta, theta_new);
        sh.theta(j) = theta_new;
        break;
      }
      default:
        break;
    }
  }

  if (mode == BoostMode::Column && prior_.kappa.family != ScaleFamily::Fixed) {
    // Interweave the global scale while keeping kappa * theta_j fixed.
    double sum = 0.0;
    for (int j = 0; j < r_; ++j) sum += sh.aux_theta(j) / sh.theta(j);
    const double kappa = sh.kappa;
    const double p = r_ * prior_.theta.c - prior_.kappa.c;
    const double kappa_new = rng_.gig(p, 2.0 * sum / kappa, 2.0 * sh.aux_kappa);
    for (int j = 0; j < r_; ++j) sh.theta(j) *= kappa / kappa_new;
    sh.kappa = kappa_new;
  }
}

}  // namespace uglt
