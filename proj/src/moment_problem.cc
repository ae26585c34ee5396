#include "boussctl/moment_problem.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss.hpp>

#include "boussctl/errors.h"
#include "propagator.h"

namespace boussctl {

namespace {

void check_frequencies(double T, const std::vector<cplx>& f) {
  if (!(T > 0.0) || !std::isfinite(T)) throw ConstraintViolation("moment problem: T must be > 0");
  if (f.empty()) throw ConstraintViolation("moment problem: no frequencies");
  double scale = 0.0;
  for (const cplx& z : f) scale = std::max(scale, std::abs(z));
  for (std::size_t l = 0; l < f.size(); ++l) {
    for (std::size_t m = l + 1; m < f.size(); ++m) {
      if (std::abs(f[l] - f[m]) <= 1e-13 * std::max(1.0, scale)) {
        std::ostringstream os;
        os << "gram matrix is singular: frequencies " << l << " and " << m << " coincide ("
           << f[l] << ")";
        throw SingularSystem(os.str());
      }
    }
  }
}

}  // namespace

Eigen::MatrixXcd gram_matrix(double T, const std::vector<cplx>& frequencies) {
  check_frequencies(T, frequencies);
  const auto n = static_cast<Eigen::Index>(frequencies.size());
  Eigen::MatrixXcd g(n, n);
  for (Eigen::Index l = 0; l < n; ++l) {
    for (Eigen::Index m = 0; m < n; ++m) {
      const cplx z = frequencies[static_cast<std::size_t>(l)] - frequencies[static_cast<std::size_t>(m)];
      // (e^{zT} - 1)/z = T phi1(zT), equal to T on the diagonal
      g(l, m) = l == m ? cplx(T) : T * detail::phi1(z * T);
    }
  }
  return g;
}

Eigen::MatrixXcd gram_matrix_quadrature(double T, const std::vector<cplx>& frequencies) {
  check_frequencies(T, frequencies);
  double spread = 0.0;
  for (const cplx& a : frequencies) {
    for (const cplx& b : frequencies) spread = std::max(spread, std::abs(a - b));
  }
  // at most ~2 radians of phase per 8-point panel
  const int panels = std::max(1, static_cast<int>(std::ceil(spread * T / 2.0)));
  const double width = T / panels;
  using rule = boost::math::quadrature::gauss<double, 8>;
  const auto& x = rule::abscissa();
  const auto& w = rule::weights();

  const auto n = static_cast<Eigen::Index>(frequencies.size());
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(n, n);
  Eigen::VectorXcd e(n);
  for (int p = 0; p < panels; ++p) {
    const double mid = (p + 0.5) * width;
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (int sgn : {1, -1}) {
        if (x[i] == 0.0 && sgn < 0) continue;
        const double t = mid + sgn * x[i] * width / 2.0;
        const double wt = w[i] * width / 2.0;
        for (Eigen::Index l = 0; l < n; ++l) e(l) = std::exp(frequencies[static_cast<std::size_t>(l)] * t);
        g.noalias() += wt * e * e.adjoint();
      }
    }
  }
  return g;
}

cplx DualBasisRep::q(int k, double t) const {
  cplx s{};
  for (std::size_t l = 0; l < frequencies.size(); ++l) {
    s += coeffs(k, static_cast<Eigen::Index>(l)) * std::exp(frequencies[l] * t);
  }
  return s;
}

DualBasisRep dual_basis(double T, const std::vector<cplx>& frequencies, double max_condition) {
  DualBasisRep rep;
  rep.T = T;
  rep.frequencies = frequencies;
  rep.gram = gram_matrix(T, frequencies);

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(rep.gram, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff(), hi = eig.eigenvalues().maxCoeff();
  rep.condition = lo > 0.0 ? hi / lo : INFINITY;
  if (!(rep.condition <= max_condition)) {
    std::ostringstream os;
    os << "exponential family is ill-conditioned on [0, T]: gram condition number "
       << rep.condition << " exceeds " << max_condition << "; increase T or decrease N";
    throw SingularSystem(os.str());
  }
  const auto n = rep.gram.rows();
  rep.coeffs = rep.gram.llt().solve(Eigen::MatrixXcd::Identity(n, n));

  rep.gram_quadrature = gram_matrix_quadrature(T, frequencies);
  rep.duality_residual =
      (rep.coeffs * rep.gram_quadrature - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
  return rep;
}

MomentProblem moment_rhs(const ModalCoefficients& alpha0, const ModalCoefficients& alphaT, double T,
                         const ModeBasis& basis, double mean_tol) {
  const int n = basis.max_mode();
  if (alpha0.max_mode != n || alphaT.max_mode != n) {
    throw DimensionError("moment_rhs: coefficient/basis size mismatch");
  }
  if (!(T > 0.0)) throw ConstraintViolation("moment_rhs: T must be > 0");
  const double scale = std::max({1.0, std::abs(alpha0.alpha0), std::abs(alphaT.alpha0)});
  if (std::abs(alpha0.mean_v) > mean_tol * scale) {
    throw ConstraintViolation("mean constraint violated: [psi_0] = 0 required for the initial velocity");
  }
  if (std::abs(alphaT.mean_v) > mean_tol * scale) {
    throw ConstraintViolation("mean constraint violated: [psi_T] = 0 required for the terminal velocity");
  }
  if (std::abs(alpha0.alpha0 - alphaT.alpha0) > mean_tol * scale) {
    throw ConstraintViolation("mean constraint violated: [phi_0] = [phi_T] required");
  }
  MomentProblem p;
  p.T = T;
  p.max_mode = n;
  p.frequencies = basis.frequencies();
  p.d1.assign(static_cast<std::size_t>(2 * n + 1), cplx{});
  p.d2 = p.d1;
  for (int m = -n; m <= n; ++m) {
    if (m == 0) continue;
    const cplx decay = std::exp(-basis.lambda(m) * T);
    const auto i = static_cast<std::size_t>(m + n);
    p.d1[i] = decay * alphaT.alpha(1, m) - alpha0.alpha(1, m);
    p.d2[i] = decay * alphaT.alpha(2, m) - alpha0.alpha(2, m);
    if (!std::isfinite(std::abs(p.d1[i])) || !std::isfinite(std::abs(p.d2[i]))) {
      throw ConstraintViolation("moment_rhs: non-finite right-hand side");
    }
  }
  return p;
}

ShapeGram shape_gram(int n, const ModeBasis& basis, const GProfile& g, double eps) {
  if (n == 0 || std::abs(n) > basis.max_mode()) {
    throw ConstraintViolation("shape_gram: mode index out of range");
  }
  if (g.max_mode() != basis.max_mode()) throw DimensionError("shape_gram: g/basis max_mode mismatch");
  ShapeGram r;
  r.n = n;
  const ModalVector p1 = basis.phi(1, n), p2 = basis.phi(2, n);
  r.s1 = apply_G(FourierField::mode(basis.max_mode(), p1.mode, p1.v), g);
  r.s2 = apply_G(FourierField::mode(basis.max_mode(), p2.mode, p2.v), g);
  const cplx a = l2_inner(r.s1, r.s1), b = l2_inner(r.s2, r.s1), e = l2_inner(r.s2, r.s2);
  r.m << a, b, std::conj(b), e;
  r.delta = a.real() * e.real() - std::norm(b);
  const double prod = a.real() * e.real();
  r.normalized_delta = prod > 0.0 ? r.delta / prod : 0.0;
  r.cross = std::abs(b);
  r.d_n_sq = std::norm(p1.v);
  if (!(r.normalized_delta >= eps)) {
    std::ostringstream os;
    os << "control shapes of mode " << n << " are degenerate for this g: normalized delta "
       << r.normalized_delta << " < " << eps;
    throw SingularSystem(os.str());
  }
  return r;
}

ControlCoefficients cramer_coeffs(const MomentProblem& problem, const std::vector<ShapeGram>& grams,
                                  const ModeBasis& basis) {
  const int n = problem.max_mode;
  if (basis.max_mode() != n || grams.size() != static_cast<std::size_t>(2 * n)) {
    throw DimensionError("cramer_coeffs: inconsistent sizes");
  }
  const double s = basis.sobolev().value();
  ControlCoefficients c(n);
  for (int m = -n; m <= n; ++m) {
    if (m == 0) continue;
    const ShapeGram& sg = grams[static_cast<std::size_t>(frequency_index(m, n))];
    if (sg.n != m) throw DimensionError("cramer_coeffs: shape grams out of order");
    if (!(sg.delta > 0.0)) throw SingularSystem("cramer_coeffs: singular shape gram");
    const double sigma = equiv_weight(m, basis.beta(), s);
    const cplx r1 = problem.d(1, m) / sigma, r2 = problem.d(2, m) / sigma;
    const Eigen::Matrix2cd& mm = sg.m;
    // Cramer: replace column 1 / column 2 by the right-hand side
    c.c(1, m) = (r1 * mm(1, 1) - mm(0, 1) * r2) / sg.delta;
    c.c(2, m) = (mm(0, 0) * r2 - mm(1, 0) * r1) / sg.delta;
  }
  return c;
}

}  // namespace boussctl
