#pragma once

#include <cmath>
#include <random>

#include "boussctl/fourier_field.h"

namespace boussctl {

// Real field with independent normal coefficients scaled by decay^|k|.
inline FourierField random_field(std::mt19937_64& rng, int n, double decay = 1.0, bool zero_mean = false) {
  std::normal_distribution<double> nd;
  FourierField f(n);
  f[0] = zero_mean ? 0.0 : nd(rng);
  for (int k = 1; k <= n; ++k) {
    const double s = std::pow(decay, k);
    f[k] = cplx(nd(rng), nd(rng)) * s;
    f[-k] = std::conj(f[k]);
  }
  return f;
}

inline StateVector random_state(std::mt19937_64& rng, int n, double decay = 1.0, bool zero_mean = false) {
  FourierField u = random_field(rng, n, decay, zero_mean);
  FourierField v = random_field(rng, n, decay, zero_mean);
  return StateVector(std::move(u), std::move(v));
}

}  // namespace boussctl
