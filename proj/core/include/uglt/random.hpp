#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace uglt {

// Random number generation with explicitly coded variates.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. The distribution algorithms below are written out rather than
// taken from <random> because the standard library distributions are
// implementation-defined, and draw stores must be byte-identical for a given
// seed on any conforming toolchain.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // Uniform on the open interval (0, 1) with 53 random bits.
  double uniform();
  double normal();
  double exponential() { return -std::log(uniform()); }

  // Uniform integer in [0, n).
  std::size_t index(std::size_t n);
  bool bernoulli(double p) { return uniform() < p; }

  // Gamma with the given shape and rate.
  double gamma(double shape, double rate);
  // log of a Gamma(shape, 1) variate, accurate for very small shapes.
  double log_gamma_variate(double shape);
  // Inverse gamma: 1 / Gamma(shape, rate = scale).
  double inv_gamma(double shape, double scale);
  // Beta computed from two log-gamma variates and clamped into (0, 1).
  double beta(double a, double b);
  // Generalised inverse Gaussian with density proportional to
  // x^(p-1) exp(-(a x + b / x) / 2).
  double gig(double p, double a, double b);

  // Fisher-Yates shuffle.
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = index(i);
      std::swap(v[i - 1], v[j]);
    }
  }

  std::mt19937_64& engine() { return eng_; }

 private:
  double gig_standard(double lambda, double omega);

  std::mt19937_64 eng_;
};

// Derive a child seed from a base seed and a stream number (splitmix64).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace uglt
