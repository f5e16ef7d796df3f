#pragma once

#include <cmath>
#include <random>

#include "hombfc/comb_model.hpp"

namespace testing {

inline double rel_err(double a, double b) {
  return std::fabs(a - b) / std::max(std::fabs(b), 1e-300);
}

/// Random draws over the property-test domain: m in [1, 20], mu/sigma in
/// [mu_lo, 20], delta/sigma in [0, 5], gamma in [0, 0.5], V in [0, 1].
struct Draws {
  explicit Draws(std::uint64_t seed) : rng(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

  hombfc::CombParams params(double mu_lo = 3.0, int m_hi = 20) {
    hombfc::CombParams p;
    p.m = integer(1, m_hi);
    p.sigma = 1.0;
    p.mu = uniform(mu_lo, 20.0);
    p.delta = uniform(0.0, 5.0);
    return p;
  }
  hombfc::Channel channel() { return {uniform(0.0, 0.5), uniform(0.0, 1.0)}; }

  std::mt19937_64 rng;
};

}  // namespace testing
