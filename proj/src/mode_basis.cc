#include "boussctl/mode_basis.h"

#include <cmath>
#include <cstdlib>
#include <string>

#include "boussctl/errors.h"

namespace boussctl {

double omega(int k, Beta beta) {
  if (k == 0) throw ConstraintViolation("omega: mode 0 has no oscillation frequency");
  return std::sqrt(LinearSymbol{beta, 1.0}.omega_sq(k));
}

cplx eigvec_det(int k, Beta beta) {
  const double w = omega(k, beta);
  const double k3 = static_cast<double>(k) * k * k;
  // det [[1, 1], [i w / k^3, -i w / k^3]] = -2 i w / k^3
  return cplx(0.0, -2.0 * w / k3);
}

ModeBasis::ModeBasis(int max_mode, Beta beta, SobolevIndex s)
    : n_(max_mode), beta_(beta), s_(s), omega_(static_cast<std::size_t>(max_mode + 1), 0.0) {
  if (max_mode < 1) throw ConstraintViolation("ModeBasis: N must be >= 1");
  for (int k = 1; k <= n_; ++k) omega_[static_cast<std::size_t>(k)] = boussctl::omega(k, beta);
}

double ModeBasis::omega(int n) const {
  if (n == 0 || std::abs(n) > n_) throw DimensionError("ModeBasis::omega: index out of range");
  return omega_[static_cast<std::size_t>(std::abs(n))];
}

cplx ModeBasis::lambda(int n) const {
  const double w = omega(n);
  return cplx(0.0, n > 0 ? w : -w);
}

double ModeBasis::norm_constant(int j, int k) const {
  (void)j;  // both branches share the norm: |l_{1,k}| = |l_{2,k}| = omega_k
  const double w = omega(k);
  const double k3 = std::abs(static_cast<double>(k) * k * k);
  const double wu = equiv_weight(k, beta_, s_.value() + 3.0);
  const double wv = equiv_weight(k, beta_, s_.value());
  return std::sqrt(wu + wv * w * w) / k3;
}

ModalVector ModeBasis::phi(int j, int n) const {
  if (j != 1 && j != 2) throw ConstraintViolation("ModeBasis::phi: j must be 1 or 2");
  if (n == 0 || std::abs(n) > n_) throw DimensionError("ModeBasis::phi: index out of range");
  const int k = j == 1 ? n : -n;
  const cplx lam = lambda(n);
  const double k3 = static_cast<double>(k) * k * k;
  const double m = norm_constant(n > 0 ? 1 : 2, k);
  return ModalVector{k, cplx(1.0 / (k3 * m)), lam / (k3 * m)};
}

StateVector ModeBasis::phi_state(int j, int n) const {
  const ModalVector p = phi(j, n);
  StateVector w(n_);
  w.u[p.mode] = p.u;
  w.v[p.mode] = p.v;
  return w;
}

StateVector ModeBasis::phi0() const {
  StateVector w(n_);
  w.u[0] = 1.0;
  return w;
}

std::vector<cplx> ModeBasis::frequencies() const {
  std::vector<cplx> f;
  f.reserve(static_cast<std::size_t>(2 * n_));
  for (int n = -n_; n <= n_; ++n) {
    if (n != 0) f.push_back(lambda(n));
  }
  return f;
}

ModeBasis build_basis(int max_mode, Beta beta, SobolevIndex s) { return ModeBasis(max_mode, beta, s); }

ModalCoefficients project_state(const StateVector& w, const ModeBasis& basis) {
  const int nb = basis.max_mode();
  if (w.max_mode() > nb) {
    throw DimensionError("project_state: state has more modes than the basis");
  }
  const StateVector x(w.u.resized(nb), w.v.resized(nb));
  const double s = basis.sobolev().value();
  ModalCoefficients c(nb);
  c.alpha0 = x.u[0];
  c.mean_v = x.v[0];
  for (int n = -nb; n <= nb; ++n) {
    if (n == 0) continue;
    for (int j = 1; j <= 2; ++j) {
      const ModalVector p = basis.phi(j, n);
      const double wu = equiv_weight(p.mode, basis.beta(), s + 3.0);
      const double wv = equiv_weight(p.mode, basis.beta(), s);
      c.alpha(j, n) = wu * x.u[p.mode] * std::conj(p.u) + wv * x.v[p.mode] * std::conj(p.v);
    }
  }
  return c;
}

StateVector reconstruct(const ModalCoefficients& c, const ModeBasis& basis) {
  const int nb = basis.max_mode();
  if (c.max_mode != nb) throw DimensionError("reconstruct: coefficient/basis size mismatch");
  StateVector w(nb);
  w.u[0] = c.alpha0;
  for (int n = -nb; n <= nb; ++n) {
    if (n == 0) continue;
    for (int j = 1; j <= 2; ++j) {
      const ModalVector p = basis.phi(j, n);
      w.u[p.mode] += c.alpha(j, n) * p.u;
      w.v[p.mode] += c.alpha(j, n) * p.v;
    }
  }
  return w;
}

}  // namespace boussctl
