#include "boussctl/sobolev.h"

#include <cmath>
#include <cstdlib>
#include <string>

#include "boussctl/errors.h"

namespace boussctl {

Beta beta_from_int(int b) {
  if (b == 1) return Beta::plus_one;
  if (b == -1) return Beta::minus_one;
  throw ConstraintViolation("beta must be +1 or -1, got " + std::to_string(b));
}

SobolevIndex::SobolevIndex(double s) : s_(s) {
  if (!(s >= 0.0) || !std::isfinite(s)) {
    throw ConstraintViolation("Sobolev index must be finite and >= 0");
  }
}

double equiv_weight(int k, Beta beta, double s) {
  if (k == 0) return 1.0;
  const double k2 = static_cast<double>(k) * k;
  const double base = k2 * (1.0 + value(beta) * k2 + k2 * k2);
  return std::pow(base, s / 3.0);
}

namespace {

double weighted_sq(const FourierField& f, double s, NormConvention conv, Beta beta) {
  double acc = 0.0;
  for (int k = -f.max_mode(); k <= f.max_mode(); ++k) {
    const double w = conv == NormConvention::standard
                         ? std::pow(1.0 + std::abs(k), 2.0 * s)
                         : equiv_weight(k, beta, s);
    acc += std::norm(f[k]) * w;
  }
  return acc;
}

}  // namespace

double sobolev_norm(const FourierField& f, SobolevIndex s, NormConvention conv, Beta beta) {
  return std::sqrt(weighted_sq(f, s.value(), conv, beta));
}

double xs_norm(const StateVector& w, SobolevIndex s, NormConvention conv, Beta beta) {
  return std::sqrt(weighted_sq(w.u, s.value() + 3.0, conv, beta) +
                   weighted_sq(w.v, s.value(), conv, beta));
}

cplx xs_inner(const StateVector& a, const StateVector& b, SobolevIndex s, Beta beta) {
  if (a.max_mode() != b.max_mode()) throw DimensionError("xs_inner: max_mode mismatch");
  cplx acc{};
  for (int k = -a.max_mode(); k <= a.max_mode(); ++k) {
    acc += equiv_weight(k, beta, s.value() + 3.0) * a.u[k] * std::conj(b.u[k]);
    acc += equiv_weight(k, beta, s.value()) * a.v[k] * std::conj(b.v[k]);
  }
  return acc;
}

}  // namespace boussctl
