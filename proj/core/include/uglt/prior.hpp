#pragma once

#include <cstdint>
#include <string>

namespace uglt {

enum class EspFamily { OneParameter, TwoParameter };
enum class SlabFamily { GaussianFixed, GaussianColumn, GaussianTriple, Fractional };
enum class ScaleFamily { Fixed, InvGamma, F };
enum class IdioScaling { Fixed, Heywood };
enum class BoostMode { None, Asis, Mda, Column, Auto };
enum class AsisAnchor { MaxAbs, Pivot };

struct GammaHyper {
  double shape = 1.0;
  double rate = 1.0;
};

// Scale parameter prior. InvGamma(c, b) uses c and b; F(2a, 2c) uses a and c
// through the representation X | b ~ InvGamma(c, b), b ~ Gamma(a, a / c).
struct ScalePrior {
  ScaleFamily family = ScaleFamily::InvGamma;
  double a = 0.5;
  double c = 0.5;
  double b = 1.0;
  double value = 1.0;  // used when family == Fixed
};

struct IdioPrior {
  double c0 = 2.5;
  IdioScaling scaling = IdioScaling::Heywood;
  double C0 = 1.5;     // used when scaling == Fixed
  double nu_o = 3.0;   // Heywood reference: nu_o and S_o = s_o * I
  double s_o = 1.0;
};

struct TuningConfig {
  double p_split = 0.5;   // p_s for the split/merge choice when both are possible
  double p_shift = 1.0 / 3.0;
  double p_switch = 1.0 / 3.0;
  double p_add = 0.5;     // p_a for add vs delete when both are feasible
  double rw_sd_alpha = 0.25;
  double rw_sd_gamma = 0.25;
};

struct BoostConfig {
  BoostMode mode = BoostMode::Auto;
  AsisAnchor anchor = AsisAnchor::MaxAbs;
  double mda_nu = 1.5;
  double mda_q = 1.5;
};

struct PriorConfig {
  EspFamily esp = EspFamily::TwoParameter;
  GammaHyper alpha{6.0, 3.0};
  GammaHyper gamma{6.0, 6.0};

  SlabFamily slab = SlabFamily::Fractional;
  double A0 = 1.0;          // slab variance for GaussianFixed
  double fraction = 0.0;    // b_N for the fractional slab; 0 means 1 / (m T)
  ScalePrior theta{ScaleFamily::InvGamma, 0.5, 2.5, 1.5, 1.0};
  ScalePrior omega{ScaleFamily::F, 0.5, 0.5, 1.0, 1.0};
  ScalePrior kappa{ScaleFamily::Fixed, 0.5, 0.5, 1.0, 1.0};

  IdioPrior idio;
  TuningConfig tuning;
  BoostConfig boost;

  bool hierarchical() const { return slab != SlabFamily::Fractional; }
  bool has_column_scale() const {
    return slab == SlabFamily::GaussianColumn || slab == SlabFamily::GaussianTriple;
  }
  bool has_local_scale() const { return slab == SlabFamily::GaussianTriple; }
};

struct InitConfig {
  int r = 1;
  int r_sp = 0;
  int u1 = 5;
  double p_zero = 0.5;   // probability that a below-pivot indicator starts at zero
  int gibbs_iters = 100;
  int max_tries = 100;
};

struct ChainConfig {
  int k = 0;             // maximum number of columns; 0 means the variance-identification bound
  long draws = 1000;
  long burnin = 500;
  long thin = 1;
  std::uint64_t seed = 1;
  int chains = 1;
  long progress_every = 0;  // 0 disables progress lines
  InitConfig init;
};

struct EspParameters {
  double a = 1.0;
  double b = 1.0;
};

// Beta-prior parameters a_k, b_k of the exchangeable shrinkage process.
inline EspParameters esp_parameters(EspFamily family, double alpha, double gamma, int k) {
  if (family == EspFamily::OneParameter) return {alpha / k, 1.0};
  return {gamma * alpha / k, gamma};
}

std::string to_string(EspFamily f);
std::string to_string(SlabFamily f);
std::string to_string(ScaleFamily f);
std::string to_string(IdioScaling f);
std::string to_string(BoostMode f);
std::string to_string(AsisAnchor f);

// Resolve BoostMode::Auto and check that the mode fits the slab.
BoostMode effective_boost_mode(const PriorConfig& prior);
void validate(const PriorConfig& prior);

}  // namespace uglt
