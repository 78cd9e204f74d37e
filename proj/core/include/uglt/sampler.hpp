#pragma once

#include <array>
#include <atomic>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "uglt/conjugate.hpp"
#include "uglt/draws.hpp"
#include "uglt/model.hpp"
#include "uglt/prior.hpp"
#include "uglt/random.hpp"

namespace uglt {

double log_beta(double a, double b);

// log p(delta_j | pivot) for a column with d ones, pivot at 0-based row `pivot`,
// integrated over the column's inclusion probability.
double log_column_prior(const EspParameters& esp, int m, int pivot, int d);

// Log of the (alpha, gamma) full-conditional kernel contributed by the
// indicator structure (the hyperprior is added separately).
double log_esp_structure(const EspParameters& esp, int m, int k, int r, int r_sp,
                         const std::vector<int>& pivots, const std::vector<int>& counts);

// Split acceptance for r_sp -> r_sp + 1 and merge acceptance for r_sp -> r_sp - 1,
// templated so they can be checked in exact rational arithmetic.
template <class Num>
Num split_acceptance(Num a, Num b, int m, int k, int r, int r_sp) {
  const int free_rows = m - r - r_sp;
  const int free_cols = k - r - r_sp;
  return a * Num(free_rows) * Num(free_cols) / (Num(r_sp + 1) * (b + Num(free_rows - 1)));
}

template <class Num>
Num merge_acceptance(Num a, Num b, int m, int k, int r, int r_sp) {
  const int free_rows = m - r - r_sp;
  const int free_cols = k - r - r_sp;
  return Num(r_sp) * (b + Num(free_rows)) / (a * Num(free_rows + 1) * Num(free_cols + 1));
}

// Log acceptance ratio of adding a new pivot `pivot_new` above `pivot_old`.
// log_odds is O for the new pivot row; n_candidates is |A(pivot_old)|.
double log_add_acceptance(double log_odds, const EspParameters& esp, int m, int pivot_old, int pivot_new, int d,
                          int n_candidates, double p_add_old, double p_add_new);
// Log acceptance ratio of deleting the pivot so that `pivot_new` (the next
// nonzero row) becomes the pivot. log_odds is O for the old pivot row;
// n_candidates_new is |A(pivot_new)|.
double log_delete_acceptance(double log_odds, const EspParameters& esp, int m, int pivot_old, int pivot_new, int d,
                             int n_candidates_new, double p_add_old, double p_add_new);

// Spurious loading construction from U in (-1, 1).
struct SpuriousSplit {
  double xi = 0.0;
  double sigma2 = 0.0;
};
SpuriousSplit split_variance(double u, double sigma2);

struct InvGammaParams {
  double shape = 0.0;
  double scale = 0.0;
};
// Full conditional of a column scale theta_j from d_j loadings whose
// scaled squares sum_j (lambda^2 / (sigma2 omega)) are given.
InvGammaParams theta_full_conditional(double c_theta, double b_theta, int d, double kappa, double scaled_sum);

struct MoveCounters {
  long shift_prop = 0, shift_acc = 0;
  long switch_prop = 0, switch_acc = 0;
  long add_prop = 0, add_acc = 0;
  long delete_prop = 0, delete_acc = 0;
  long split_prop = 0, split_acc = 0;
  long merge_prop = 0, merge_acc = 0;
  long alpha_prop = 0, alpha_acc = 0;
  long gamma_prop = 0, gamma_acc = 0;
  long promotions = 0, demotions = 0;
  long fallback_rows = 0, shrink_skipped = 0;

  static constexpr int kSize = 20;
  std::array<long, kSize> as_array() const;
  static std::array<const char*, kSize> names();
};

struct SamplerOptions {
  // Convert columns left with a single nonzero into spurious factors. Only
  // switched off by fixed-dimension test harnesses.
  bool demote_spurious = true;
  bool check_invariants = false;
};

// One position of a sweep over (H, D, L, P, F, S, A, R).
class Sampler {
 public:
  Sampler(const Dataset& data, const PriorConfig& prior, int k, Rng& rng, SamplerOptions options = {});

  // Install a state. Active columns are compacted into the leading slots.
  void set_state(ModelState s);
  const ModelState& state() const { return s_; }
  ModelState& mutable_state() { return s_; }
  int r() const { return r_; }
  int k() const { return k_; }

  // Random initial state following the counting-rule constrained scheme,
  // followed by `gibbs_iters` loading/factor updates with delta held fixed.
  void initialize(const InitConfig& init);

  void sweep();
  void step_h();  // alpha, gamma and tau
  void step_d();  // indicators below the pivots
  void step_l();  // pivots
  void step_p();  // loadings and idiosyncratic variances
  void step_f();  // factors
  void step_s();  // shrinkage scales
  void step_a();  // boosting
  void step_r();  // dimension change via spurious columns

  const MoveCounters& counters() const { return counters_; }
  EspParameters esp() const;
  const SlabSpec& slab() const { return slab_; }
  IdioHyper idio(int row) const { return {prior_.idio.c0, C0_(row)}; }
  const Eigen::VectorXd& C0() const { return C0_; }
  double prior_var(int row, int col) const;
  const PriorConfig& prior() const { return prior_; }
  const Dataset& data() const { return data_; }

  // Log odds O for flipping delta(row, col) from 0 to 1 given the rest of the
  // row, recomputed from scratch (col must be an active slot).
  double cell_log_odds(const CrossProducts& cp, int row, int col) const;

 private:
  CrossProducts active_cross_products() const;
  std::vector<int> row_columns(int row, int exclude = -1) const;
  Eigen::VectorXd row_prior_vars(int row, const std::vector<int>& cols) const;
  double row_marginal(const CrossProducts& cp, int row, const std::vector<int>& cols) const;
  void demote(int j);
  void compact();
  void sample_rows(const CrossProducts& cp, const std::vector<int>& rows);
  void verify(const char* where) const;

  void pivot_shift(const CrossProducts& cp, int j);
  void pivot_switch(const CrossProducts& cp, int j);
  void pivot_add_delete(const CrossProducts& cp, int j);

  const Dataset& data_;
  PriorConfig prior_;
  int k_;
  Rng& rng_;
  SamplerOptions options_;
  SlabSpec slab_;
  Eigen::VectorXd C0_;
  Eigen::VectorXd yy_;
  ModelState s_;
  int r_ = 0;
  MoveCounters counters_;
};

// Per-row scale C_i0 of the idiosyncratic variance prior.
Eigen::VectorXd idiosyncratic_scales(const Dataset& data, const IdioPrior& idio);

struct ChainSummary {
  MoveCounters counters;
  long sweeps = 0;
  bool interrupted = false;
};

using DrawSink = std::function<void(const DrawRecord&)>;
using ProgressSink = std::function<void(const std::string&)>;

DrawRecord make_record(const Sampler& sampler, int chain, long iter);

// Run one chain: initialise, burn in, then record `draws` states every `thin`
// sweeps. `stop` is polled between sweeps.
ChainSummary run_chain(const Dataset& data, const PriorConfig& prior, const ChainConfig& cfg, int chain,
                       const DrawSink& sink, const ProgressSink& progress = {},
                       const std::atomic<bool>* stop = nullptr);

}  // namespace uglt
