#pragma once

#include <vector>

#include <Eigen/Dense>

#include "boussctl/control_profile.h"
#include "boussctl/mode_basis.h"

namespace boussctl {

// Conditions int_0^T e^{-lambda_n t} sigma_n <h, S_{j,n}> dt = d_{j,n} for
// 1 <= |n| <= N, j = 1, 2, with S_{j,n} = G (phi_{j,n})_2.
struct MomentProblem {
  double T = 0.0;
  int max_mode = 0;
  std::vector<cplx> frequencies;  // lambda_n, n = -N..-1, 1..N
  std::vector<cplx> d1, d2;       // index n + N, unused at n = 0

  cplx d(int j, int n) const { return (j == 1 ? d1 : d2)[static_cast<std::size_t>(n + max_mode)]; }
};

// Position of lambda_n in a frequency list ordered n = -N..-1, 1..N.
inline int frequency_index(int n, int max_mode) { return n < 0 ? n + max_mode : n + max_mode - 1; }

// G_{lm} = int_0^T e^{(lambda_l - lambda_m) t} dt in closed form.
// Throws ConstraintViolation for T <= 0, SingularSystem for repeated frequencies.
Eigen::MatrixXcd gram_matrix(double T, const std::vector<cplx>& frequencies);

// Same entries by composite Gauss-Legendre quadrature, fine enough to resolve
// the largest frequency difference; used as an independent check.
Eigen::MatrixXcd gram_matrix_quadrature(double T, const std::vector<cplx>& frequencies);

// Coefficients of the biorthogonal family q_k = sum_l C_{kl} e^{lambda_l t}:
// int_0^T q_k conj(e^{lambda_m t}) dt = delta_{km}, i.e. C = G^{-1}.
struct DualBasisRep {
  double T = 0.0;
  std::vector<cplx> frequencies;
  Eigen::MatrixXcd gram;
  Eigen::MatrixXcd gram_quadrature;  // gram_matrix_quadrature, kept for residual checks
  Eigen::MatrixXcd coeffs;
  double condition = 0.0;
  // max_{k,m} |int q_k conj(p_m) - delta_{km}| with the integral by quadrature
  double duality_residual = 0.0;

  cplx q(int k, double t) const;
};

// Throws SingularSystem when the Gram condition number exceeds max_condition.
DualBasisRep dual_basis(double T, const std::vector<cplx>& frequencies, double max_condition = 1e10);

// d_{j,n} = e^{-lambda_n T} alphaT_{j,n} - alpha0_{j,n}.
// Throws ConstraintViolation naming the violated mean condition when the
// velocity means are nonzero or the displacement means differ.
MomentProblem moment_rhs(const ModalCoefficients& alpha0, const ModalCoefficients& alphaT, double T,
                         const ModeBasis& basis, double mean_tol = 1e-12);

// Gram matrix of the two control shapes of mode n,
//   M = [[<S1,S1>, <S2,S1>], [<S1,S2>, <S2,S2>]],
// with its determinant delta. Degeneracy is judged on the scale-free
// delta / (|S1|^2 |S2|^2) (the squared sine of the angle between the shapes).
struct ShapeGram {
  int n = 0;
  FourierField s1, s2;
  Eigen::Matrix2cd m;
  double delta = 0.0;
  double normalized_delta = 0.0;
  double cross = 0.0;       // |<S1, S2>|
  double d_n_sq = 0.0;      // |(phi_{j,n})_2|^2, the same for j = 1, 2
};

// Throws ConstraintViolation for |n| outside 1..N and SingularSystem when
// normalized_delta < eps.
ShapeGram shape_gram(int n, const ModeBasis& basis, const GProfile& g, double eps = 1e-12);

struct ControlCoefficients {
  int max_mode = 0;
  std::vector<cplx> c1, c2;  // index n + N, zero at n = 0

  explicit ControlCoefficients(int n = 0)
      : max_mode(n), c1(static_cast<std::size_t>(2 * n + 1)), c2(static_cast<std::size_t>(2 * n + 1)) {}
  cplx& c(int j, int n) { return (j == 1 ? c1 : c2)[static_cast<std::size_t>(n + max_mode)]; }
  cplx c(int j, int n) const { return (j == 1 ? c1 : c2)[static_cast<std::size_t>(n + max_mode)]; }
};

// Solves sigma_n M_n c_n = d_n by Cramer's rule, sigma_n = omega_n^{2s/3}.
// grams[i] must belong to mode n = -N..-1, 1..N in that order.
ControlCoefficients cramer_coeffs(const MomentProblem& problem, const std::vector<ShapeGram>& grams,
                                  const ModeBasis& basis);

}  // namespace boussctl
