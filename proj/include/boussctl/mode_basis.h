#pragma once

#include <vector>

#include "boussctl/fourier_field.h"
#include "boussctl/sobolev.h"

namespace boussctl {

// Per-mode symbol of the linear operator: (u, v)' = (v, -omega_k^2 u) with
// omega_k^2 = k^2 (c2 + beta k^2 + k^4). c2 = 1 for the equation itself; the
// mean-shifted problem uses c2 = 1 - 2 eta.
struct LinearSymbol {
  Beta beta = Beta::plus_one;
  double second_order = 1.0;

  double omega_sq(int k) const {
    const double k2 = static_cast<double>(k) * k;
    return k2 * (second_order + value(beta) * k2 + k2 * k2);
  }
};

// sqrt(k^2 (k^4 + beta k^2 + 1)). Throws ConstraintViolation for k = 0.
double omega(int k, Beta beta);

// Determinant of the 2x2 eigenvector matrix L_k = [[1, 1], [l1/k^3, l2/k^3]],
// l1,2 = +-i omega_k. Tends to -2i as k -> +infinity.
cplx eigvec_det(int k, Beta beta);

// A state supported on the single Fourier mode `mode`.
struct ModalVector {
  int mode = 0;
  cplx u;
  cplx v;
};

// Eigenvalues and X^s-orthonormal eigenvectors of the generator
// A = [[0, 1], [d^2 - beta d^4 + d^6, 0]] truncated to |k| <= N.
//
// Labels follow the pairing used by the control construction: for n >= 1,
// lambda_n = i omega_n with phi_{1,n} on mode n and phi_{2,n} on mode -n;
// for n <= -1, lambda_n = -i omega_|n| with phi_{1,n} on mode n and phi_{2,n}
// on mode -n. phi_0 = (1, 0) spans the kernel.
class ModeBasis {
 public:
  ModeBasis(int max_mode, Beta beta, SobolevIndex s);

  int max_mode() const { return n_; }
  Beta beta() const { return beta_; }
  SobolevIndex sobolev() const { return s_; }

  double omega(int n) const;  // omega_|n|, n != 0
  cplx lambda(int n) const;   // i sign(n) omega_|n|
  // m_{j,k} = || eta_{j,k} ||_{X^s}, eta_{j,k} = (1/k^3, l_{j,k}/k^3) e^{ikx}.
  double norm_constant(int j, int k) const;

  ModalVector phi(int j, int n) const;
  StateVector phi_state(int j, int n) const;
  StateVector phi0() const;

  // Frequencies lambda_n for n = -N..-1, 1..N in that order.
  std::vector<cplx> frequencies() const;

 private:
  int n_;
  Beta beta_;
  SobolevIndex s_;
  std::vector<double> omega_;  // index |n|
};

ModeBasis build_basis(int max_mode, Beta beta, SobolevIndex s);

// Expansion coefficients of a state in a ModeBasis.
//
// alpha_{j,n} are the coordinates along phi_{j,n} (X^s-orthonormal, so they
// are the X^s inner products). alpha0 is the mean of u. The mean of v has no
// component in the basis and is carried separately.
struct ModalCoefficients {
  int max_mode = 0;
  cplx alpha0;
  cplx mean_v;
  std::vector<cplx> a1;  // index n + N
  std::vector<cplx> a2;

  explicit ModalCoefficients(int n = 0)
      : max_mode(n), a1(static_cast<std::size_t>(2 * n + 1)), a2(static_cast<std::size_t>(2 * n + 1)) {}

  cplx& alpha(int j, int n) { return (j == 1 ? a1 : a2)[static_cast<std::size_t>(n + max_mode)]; }
  const cplx& alpha(int j, int n) const {
    return (j == 1 ? a1 : a2)[static_cast<std::size_t>(n + max_mode)];
  }
};

// Requires w.max_mode() <= basis.max_mode().
ModalCoefficients project_state(const StateVector& w, const ModeBasis& basis);
// alpha0 phi_0 + sum alpha_{j,n} phi_{j,n} (the mean of v is not restored).
StateVector reconstruct(const ModalCoefficients& c, const ModeBasis& basis);

}  // namespace boussctl
