#include <algorithm>

#include "uglt/identification.hpp"
#include "uglt/sampler.hpp"

namespace uglt {

void Sampler::initialize(const InitConfig& init) {
  const int m = data_.m(), T = data_.T();
  const int r0 = std::clamp(init.r, 0, std::min(k_, max_factors(m)));
  const int rsp0 = std::clamp(init.r_sp, 0, k_ - r0);

  auto draw_pivots = [&]() {
    std::vector<int> piv;
    std::vector<char> taken(m, 0);
    for (int j = 0; j < r0; ++j) {
      int p;
      if (j == 0) {
        p = static_cast<int>(rng_.index(static_cast<std::size_t>(std::clamp(init.u1, 1, m))));
      } else {
        std::vector<int> open;
        for (int i = 0; i < m; ++i)
          if (!taken[i]) open.push_back(i);
        p = open[rng_.index(open.size())];
      }
      taken[p] = 1;
      piv.push_back(p);
    }
    return piv;
  };

  SparsityMatrix delta(m, k_);
  bool ok = false;
  std::vector<int> piv;
  for (int attempt = 0; attempt < std::max(1, init.max_tries) && !ok; ++attempt) {
    delta = SparsityMatrix(m, k_);
    piv = draw_pivots();
    for (int j = 0; j < r0; ++j) {
      delta.set(piv[j], j, true);
      for (int i = piv[j] + 1; i < m; ++i) delta.set(i, j, rng_.uniform() >= init.p_zero);
    }
    ok = counting_rule_check(delta).identified;
  }
  if (!ok) {
    // Force three loadings under every pivot of the last attempt.
    for (int j = 0; j < r0; ++j)
      for (int i = piv[j] + 1; i < std::min(m, piv[j] + 4); ++i) delta.set(i, j, true);
    ok = counting_rule_check(delta).identified;
  }
  if (!ok) {
    // Pivots on the first r0 rows with full columns below always satisfy the
    // counting rule when 2 r0 + 1 <= m.
    std::vector<int> rows(r0);
    for (int j = 0; j < r0; ++j) rows[j] = j;
    rng_.shuffle(rows);
    delta = SparsityMatrix(m, k_);
    for (int j = 0; j < r0; ++j)
      for (int i = rows[j]; i < m; ++i) delta.set(i, j, true);
  }

  ModelState s(m, k_, T);
  s.delta = delta;
  for (int j = 0; j < r0; ++j)
    for (int t = 0; t < T; ++t) s.factors(j, t) = rng_.normal();
  s.sigma2 = (yy_ / T).cwiseMax(1e-8);
  s.alpha = s_.alpha;
  s.gamma = s_.gamma;
  s.shrink.kappa = s_.shrink.kappa;
  if (prior_.theta.family == ScaleFamily::Fixed) s.shrink.theta.setConstant(prior_.theta.value);
  s.n_spurious = rsp0;
  s_ = std::move(s);
  compact();
  for (int it = 0; it < init.gibbs_iters; ++it) {
    step_p();
    step_f();
  }
  if (init.gibbs_iters == 0) step_p();
  verify("initialize");
}

}  // namespace uglt
