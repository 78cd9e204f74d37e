#include "uglt/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace uglt {

double Rng::uniform() {
  const std::uint64_t bits = eng_() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double Rng::normal() {
  // Box-Muller, one variate per call so the stream position never depends
  // on a hidden cache.
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t Rng::index(std::size_t n) {
  if (n == 0) throw std::invalid_argument("Rng::index: empty range");
  auto k = static_cast<std::size_t>(uniform() * static_cast<double>(n));
  return std::min(k, n - 1);
}

double Rng::log_gamma_variate(double shape) {
  if (!(shape > 0.0)) throw std::invalid_argument("gamma shape must be positive");
  if (shape < 1.0) {
    // Gamma(a) = Gamma(a + 1) * U^(1/a), kept on the log scale.
    return log_gamma_variate(shape + 1.0) + std::log(uniform()) / shape;
  }
  // Marsaglia and Tsang.
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return std::log(d * v);
  }
}

double Rng::gamma(double shape, double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("gamma rate must be positive");
  return std::exp(log_gamma_variate(shape)) / rate;
}

double Rng::inv_gamma(double shape, double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("inverse gamma scale must be positive");
  return scale * std::exp(-log_gamma_variate(shape));
}

double Rng::beta(double a, double b) {
  const double lx = log_gamma_variate(a);
  const double ly = log_gamma_variate(b);
  double p = 1.0 / (1.0 + std::exp(ly - lx));
  constexpr double lo = std::numeric_limits<double>::min();
  const double hi = std::nextafter(1.0, 0.0);
  return std::clamp(p, lo, hi);
}

namespace {

// log density kernel of GIG(lambda, omega, omega) on the standard scale
double gig_log_kernel(double x, double lambda, double omega) {
  return (lambda - 1.0) * std::log(x) - 0.5 * omega * (x + 1.0 / x);
}

double gig_mode(double lambda, double omega) {
  if (lambda >= 1.0)
    return ((lambda - 1.0) + std::sqrt((lambda - 1.0) * (lambda - 1.0) + omega * omega)) / omega;
  return omega / ((1.0 - lambda) + std::sqrt((1.0 - lambda) * (1.0 - lambda) + omega * omega));
}

}  // namespace

double Rng::gig_standard(double lambda, double omega) {
  // Sampler for density proportional to y^(lambda-1) exp(-omega (y + 1/y) / 2)
  // with lambda >= 0 and omega > 0. Three exact methods chosen by region,
  // following the split used by Hoermann and Leydold.
  const double m = gig_mode(lambda, omega);
  const double lgm = gig_log_kernel(m, lambda, omega);

  if (lambda > 2.0 || omega > 3.0) {
    // Ratio of uniforms with the mode shifted to the origin. The bounding
    // rectangle comes from the extrema of (x - m) sqrt(g(x)), which are roots
    // of a cubic.
    const double A = -(2.0 * (lambda + 1.0) / omega + m);
    const double B = 2.0 * (lambda - 1.0) * m / omega - 1.0;
    const double C = m;
    const double p = B - A * A / 3.0;
    const double q = 2.0 * A * A * A / 27.0 - A * B / 3.0 + C;
    const double arg = std::clamp(-q / (2.0 * std::sqrt(-p * p * p / 27.0)), -1.0, 1.0);
    const double phi = std::acos(arg);
    const double fak = 2.0 * std::sqrt(-p / 3.0);
    double roots[3];
    for (int k = 0; k < 3; ++k)
      roots[k] = fak * std::cos(phi / 3.0 + 2.0 * std::numbers::pi * k / 3.0) - A / 3.0;
    std::sort(roots, roots + 3);
    const double y1 = roots[2];
    const double y2 = roots[1];
    const double nc = 0.5 * lgm;
    const double uplus = (y1 - m) * std::exp(0.5 * gig_log_kernel(y1, lambda, omega) - nc);
    const double uminus = (y2 > 0.0) ? (y2 - m) * std::exp(0.5 * gig_log_kernel(y2, lambda, omega) - nc) : -m;
    for (;;) {
      const double u = uminus + uniform() * (uplus - uminus);
      const double v = uniform();
      const double x = u / v + m;
      if (x <= 0.0) continue;
      if (std::log(v) <= 0.5 * gig_log_kernel(x, lambda, omega) - nc) return x;
    }
  }

  if (lambda >= 1.0 - 2.25 * omega * omega || omega > 0.2) {
    // Ratio of uniforms without shift; v is bounded at the maximiser of
    // x sqrt(g(x)), available in closed form.
    const double xv = ((lambda + 1.0) + std::sqrt((lambda + 1.0) * (lambda + 1.0) + omega * omega)) / omega;
    const double ratio = xv * std::exp(0.5 * (gig_log_kernel(xv, lambda, omega) - lgm));
    for (;;) {
      const double u = uniform();
      const double x = ratio * uniform() / u;
      if (2.0 * std::log(u) + lgm <= gig_log_kernel(x, lambda, omega)) return x;
    }
  }

  // Small omega with lambda < 1: three-piece hat. Constant g(m) on (0, m],
  // e^-omega x^(lambda-1) on [m, xs), xs^(lambda-1) e^(-omega x / 2) beyond xs.
  const double xs = std::max(m, 2.0 / omega);
  const double log_a1 = std::log(m) + lgm;
  double log_a2 = -std::numeric_limits<double>::infinity();
  if (xs > m) {
    const double integral = (lambda > 0.0) ? (std::pow(xs, lambda) - std::pow(m, lambda)) / lambda
                                           : std::log(xs / m);
    log_a2 = -omega + std::log(integral);
  }
  const double log_a3 = (lambda - 1.0) * std::log(xs) + std::log(2.0 / omega) - 0.5 * omega * xs;
  const double top = std::max({log_a1, log_a2, log_a3});
  const double w1 = std::exp(log_a1 - top);
  const double w2 = std::exp(log_a2 - top);
  const double w3 = std::exp(log_a3 - top);
  const double total = w1 + w2 + w3;
  for (;;) {
    const double pick = uniform() * total;
    double x, log_hat;
    if (pick < w1) {
      x = m * uniform();
      log_hat = lgm;
    } else if (pick < w1 + w2) {
      const double u = uniform();
      if (lambda > 0.0) {
        const double lo = std::pow(m, lambda), hi = std::pow(xs, lambda);
        x = std::pow(lo + u * (hi - lo), 1.0 / lambda);
      } else {
        x = m * std::pow(xs / m, u);
      }
      log_hat = -omega + (lambda - 1.0) * std::log(x);
    } else {
      x = xs + 2.0 * exponential() / omega;
      log_hat = (lambda - 1.0) * std::log(xs) - 0.5 * omega * x;
    }
    if (x <= 0.0) continue;
    if (std::log(uniform()) + log_hat <= gig_log_kernel(x, lambda, omega)) return x;
  }
}

double Rng::gig(double p, double a, double b) {
  if (a < 0.0 || b < 0.0 || (a == 0.0 && b == 0.0))
    throw std::invalid_argument("GIG parameters must be non-negative and not both zero");
  if (b == 0.0) {
    if (!(p > 0.0)) throw std::invalid_argument("GIG with b = 0 requires p > 0");
    return gamma(p, 0.5 * a);
  }
  if (a == 0.0) {
    if (!(p < 0.0)) throw std::invalid_argument("GIG with a = 0 requires p < 0");
    return inv_gamma(-p, 0.5 * b);
  }
  const double omega = std::sqrt(a * b);
  const double scale = std::sqrt(b / a);
  if (p >= 0.0) return scale * gig_standard(p, omega);
  return scale / gig_standard(-p, omega);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace uglt
