#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace switchvol {

/// One generator per chain. Never shared between threads.
using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng{seed}; }

/// Uniform draw on the open interval (0, 1).
inline double uniform_open(Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double x = 0.0;
  do {
    x = u(rng);
  } while (x <= 0.0);
  return x;
}

inline double standard_normal(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return n(rng);
}

inline double exponential(double rate, Rng& rng) {
  return -std::log(uniform_open(rng)) / rate;
}

/// Gamma draw in the shape-rate parameterization.
inline double gamma_draw(double shape, double rate, Rng& rng) {
  std::gamma_distribution<double> g(shape, 1.0 / rate);
  return g(rng);
}

inline int poisson_draw(double mean, Rng& rng) {
  if (mean <= 0.0) return 0;
  std::poisson_distribution<int> p(mean);
  return p(rng);
}

}  // namespace switchvol
