#include "boussctl/diagnostics.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "boussctl/linear_flow.h"
#include "boussctl/random_fields.h"
#include "boussctl/sobolev.h"

namespace boussctl {

BasisDiagnostics basis_diagnostics(const ModeBasis& basis) {
  const int n = basis.max_mode();
  const Beta beta = basis.beta();
  const double s = basis.sobolev().value();
  BasisDiagnostics d;
  d.max_mode = n;

  // X^s weights per mode, cached: u carries weight(s + 3), v weight(s).
  std::vector<double> wu(static_cast<std::size_t>(2 * n + 1)), wv(wu.size());
  for (int k = -n; k <= n; ++k) {
    wu[static_cast<std::size_t>(k + n)] = equiv_weight(k, beta, s + 3.0);
    wv[static_cast<std::size_t>(k + n)] = equiv_weight(k, beta, s);
  }
  auto inner = [&](const StateVector& a, const StateVector& b) {
    cplx acc{};
    for (int k = -n; k <= n; ++k) {
      const auto i = static_cast<std::size_t>(k + n);
      acc += wu[i] * a.u[k] * std::conj(b.u[k]) + wv[i] * a.v[k] * std::conj(b.v[k]);
    }
    return acc;
  };

  std::vector<StateVector> vecs{basis.phi0()};
  std::vector<cplx> lams{cplx{}};
  for (int m = -n; m <= n; ++m) {
    if (m == 0) continue;
    for (int j = 1; j <= 2; ++j) {
      vecs.push_back(basis.phi_state(j, m));
      lams.push_back(basis.lambda(m));
    }
  }
  for (std::size_t a = 0; a < vecs.size(); ++a) {
    for (std::size_t b = a; b < vecs.size(); ++b) {
      const cplx ip = inner(vecs[a], vecs[b]);
      d.orthonormality_deviation = std::max(d.orthonormality_deviation, std::abs(ip - (a == b ? 1.0 : 0.0)));
    }
    const StateVector r = apply_generator(vecs[a], beta) - lams[a] * vecs[a];
    const double scale = a == 0 ? 1.0 : std::abs(lams[a]);
    d.eigen_residual = std::max(d.eigen_residual, std::sqrt(std::max(0.0, inner(r, r).real())) / scale);
  }

  // omega_1 = 1 for beta = -1 makes det L_1 = -2i exactly.
  d.det_monotone_from = beta == Beta::minus_one ? 2 : 1;
  d.det_monotone = true;
  double prev = INFINITY;
  for (int k = d.det_monotone_from; k <= n; ++k) {
    const double gap = std::abs(eigvec_det(k, beta) + cplx(0.0, 2.0));
    if (!(gap < prev)) d.det_monotone = false;
    prev = gap;
  }
  d.det_gap_last = std::abs(eigvec_det(n, beta) + cplx(0.0, 2.0));
  return d;
}

GOperatorDiagnostics g_operator_diagnostics(const GProfile& g, int trials, std::uint64_t seed, double decay) {
  std::mt19937_64 rng(seed);
  const int n = g.max_mode();
  GOperatorDiagnostics d;
  d.trials = trials;
  auto l2 = [](const FourierField& f) { return std::sqrt(std::max(0.0, l2_inner(f, f).real())); };
  for (int t = 0; t < trials; ++t) {
    const FourierField h = random_field(rng, n, decay), f = random_field(rng, n, decay);
    const double nh = l2(h), nf = l2(f);
    const FourierField gh = apply_G(h, g);
    d.max_mean = std::max(d.max_mean, std::abs(integral(gh)) / nh);
    d.max_asymmetry = std::max(d.max_asymmetry, std::abs(l2_inner(gh, f) - l2_inner(h, apply_G(f, g))) / (nh * nf));
    d.max_imag = std::max(d.max_imag, gh.reality_defect() / nh);
  }
  return d;
}

GroupDiagnostics group_diagnostics(int max_mode, Beta beta, double s, int trials, std::uint64_t seed, double t_max,
                                   double decay) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ut(0.0, t_max);
  const SobolevIndex x0(0.0), xs(s);
  GroupDiagnostics d;
  d.trials = trials;
  for (int i = 0; i < trials; ++i) {
    const StateVector w = random_state(rng, max_mode, decay);
    const double t = ut(rng), tau = ut(rng);
    const double nw = xs_norm(w, x0, NormConvention::equivalent, beta);
    const StateVector a = W_group(w, t + tau, beta);
    const StateVector b = W_group(W_group(w, tau, beta), t, beta);
    d.group_law = std::max(d.group_law, xs_norm(a - b, x0, NormConvention::equivalent, beta) / nw);
    const StateVector back = W_group(W_group(w, t, beta), -t, beta);
    d.inverse = std::max(d.inverse, xs_norm(back - w, x0, NormConvention::equivalent, beta) / nw);

    StateVector z = w;
    z.u[0] = 0.0;
    z.v[0] = 0.0;
    const double n0 = xs_norm(z, xs, NormConvention::equivalent, beta);
    const double n1 = xs_norm(W_group(z, t, beta), xs, NormConvention::equivalent, beta);
    d.conservation = std::max(d.conservation, std::abs(n1 - n0) / n0);
  }
  return d;
}

}  // namespace boussctl
