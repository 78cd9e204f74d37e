#include <cmath>

#include "uglt/sampler.hpp"

namespace uglt {

namespace {

double log_gamma_prior(const GammaHyper& h, double x) { return (h.shape - 1.0) * std::log(x) - h.rate * x; }

}  // namespace

void Sampler::step_h() {
  const int m = data_.m();
  std::vector<int> pivots, counts;
  for (int j = 0; j < r_; ++j) {
    pivots.push_back(s_.delta.pivot(j));
    counts.push_back(s_.delta.col_count(j));
  }
  const int r_sp = s_.n_spurious;

  // Random walk on the log scale; the log-Jacobian enters as log(x') - log(x).
  auto target = [&](double alpha, double gamma) {
    double out = log_gamma_prior(prior_.alpha, alpha) + std::log(alpha);
    if (prior_.esp == EspFamily::TwoParameter) out += log_gamma_prior(prior_.gamma, gamma) + std::log(gamma);
    const EspParameters e = esp_parameters(prior_.esp, alpha, gamma, k_);
    return out + log_esp_structure(e, m, k_, r_, r_sp, pivots, counts);
  };

  double current = target(s_.alpha, s_.gamma);
  {
    const double prop = s_.alpha * std::exp(prior_.tuning.rw_sd_alpha * rng_.normal());
    const double cand = target(prop, s_.gamma);
    ++counters_.alpha_prop;
    if (std::log(rng_.uniform()) <= cand - current) {
      s_.alpha = prop;
      current = cand;
      ++counters_.alpha_acc;
    }
  }
  if (prior_.esp == EspFamily::TwoParameter) {
    const double prop = s_.gamma * std::exp(prior_.tuning.rw_sd_gamma * rng_.normal());
    const double cand = target(s_.alpha, prop);
    ++counters_.gamma_prop;
    if (std::log(rng_.uniform()) <= cand - current) {
      s_.gamma = prop;
      ++counters_.gamma_acc;
    }
  }

  const EspParameters e = esp();
  for (int j = 0; j < r_; ++j) {
    const int d = counts[j];
    const int below = m - 1 - pivots[j];
    s_.tau(j) = rng_.beta(e.a + d - 1, e.b + below - (d - 1));
  }
}

}  // namespace uglt
