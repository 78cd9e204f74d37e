#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>

#include "uglt/identification.hpp"
#include "uglt/sampler.hpp"

namespace uglt {

DrawRecord make_record(const Sampler& sampler, int chain, long iter) {
  const ModelState& s = sampler.state();
  const int r = sampler.r();
  DrawRecord rec;
  rec.chain = chain;
  rec.iter = iter;
  rec.m = s.m();
  rec.r = r;
  rec.r_sp = s.n_spurious;
  for (int j = 0; j < r; ++j)
    for (int i = 0; i < s.m(); ++i)
      if (s.delta(i, j)) {
        rec.support.emplace_back(i, j);
        rec.loadings.push_back(s.lambda(i, j));
      }
  rec.sigma2.assign(s.sigma2.data(), s.sigma2.data() + s.m());
  rec.tau.assign(s.tau.data(), s.tau.data() + r);
  rec.alpha = s.alpha;
  rec.gamma = s.gamma;
  if (sampler.prior().has_column_scale()) {
    rec.kappa = s.shrink.kappa;
    rec.theta.assign(s.shrink.theta.data(), s.shrink.theta.data() + r);
  }
  const auto c = sampler.counters().as_array();
  rec.counters.assign(c.begin(), c.end());
  return rec;
}

namespace {

std::string progress_line(const Sampler& s, int chain, long iter, long total) {
  const MoveCounters& c = s.counters();
  auto rate = [](long acc, long prop) { return prop > 0 ? static_cast<double>(acc) / prop : 0.0; };
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "progress chain=%d iter=%ld total=%ld r=%d r_sp=%d d=%d alpha=%.6g gamma=%.6g "
                "acc_shift=%.4f acc_switch=%.4f acc_add=%.4f acc_delete=%.4f acc_split=%.4f acc_merge=%.4f",
                chain, iter, total, s.r(), s.state().n_spurious, s.state().delta.total(), s.state().alpha,
                s.state().gamma, rate(c.shift_acc, c.shift_prop), rate(c.switch_acc, c.switch_prop),
                rate(c.add_acc, c.add_prop), rate(c.delete_acc, c.delete_prop), rate(c.split_acc, c.split_prop),
                rate(c.merge_acc, c.merge_prop));
  return buf;
}

}  // namespace

ChainSummary run_chain(const Dataset& data, const PriorConfig& prior, const ChainConfig& cfg, int chain,
                       const DrawSink& sink, const ProgressSink& progress, const std::atomic<bool>* stop) {
  const int k = cfg.k > 0 ? cfg.k : max_factors(data.m());
  if (cfg.thin < 1) throw std::invalid_argument("thin must be at least 1");
  if (cfg.draws < 0 || cfg.burnin < 0) throw std::invalid_argument("draws and burnin must be non-negative");
  Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(chain)));
  Sampler sampler(data, prior, k, rng);
  sampler.initialize(cfg.init);

  ChainSummary out;
  const long total = cfg.burnin + cfg.draws * cfg.thin;
  for (long it = 1; it <= total; ++it) {
    if (stop && stop->load()) {
      out.interrupted = true;
      break;
    }
    try {
      sampler.sweep();
    } catch (const std::logic_error& e) {
      throw std::logic_error("chain " + std::to_string(chain) + ", sweep " + std::to_string(it) + ": " + e.what());
    } catch (const std::exception& e) {
      throw std::runtime_error("chain " + std::to_string(chain) + ", sweep " + std::to_string(it) + ": " + e.what());
    }
    ++out.sweeps;
    if (it > cfg.burnin && (it - cfg.burnin) % cfg.thin == 0 && sink) sink(make_record(sampler, chain, it));
    if (progress && cfg.progress_every > 0 && it % cfg.progress_every == 0)
      progress(progress_line(sampler, chain, it, total));
  }
  out.counters = sampler.counters();
  return out;
}

}  // namespace uglt
