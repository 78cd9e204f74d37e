#include <cmath>

#include "uglt/sampler.hpp"

namespace uglt {

void Sampler::step_d() {
  if (r_ == 0) return;
  const int m = data_.m();
  const CrossProducts cp = active_cross_products();
  std::vector<int> order(r_);
  for (int j = 0; j < r_; ++j) order[j] = j;
  rng_.shuffle(order);

  for (int j : order) {
    if (s_.delta.col_count(j) == 0) continue;
    const int pivot = s_.delta.pivot(j);
    const double logit = std::log(s_.tau(j)) - std::log1p(-s_.tau(j));
    for (int i = pivot + 1; i < m; ++i) {
      double post;
      try {
        post = cell_log_odds(cp, i, j) + logit;
      } catch (const CholeskyError&) {
        ++counters_.fallback_rows;
        continue;
      }
      const double lu = std::log(rng_.uniform());
      if (!s_.delta(i, j)) {
        if (lu <= post) s_.delta.set(i, j, true);
      } else if (lu <= -post) {
        s_.delta.set(i, j, false);
        s_.lambda(i, j) = 0.0;
      }
    }
    if (options_.demote_spurious && s_.delta.col_count(j) == 1) demote(j);
  }
  compact();
}

}  // namespace uglt
