#include "boussctl/exact_control.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "boussctl/errors.h"
#include "boussctl/linear_flow.h"

namespace boussctl {

namespace {

double xs(const StateVector& w, double s, Beta beta) {
  return xs_norm(w, SobolevIndex(s), NormConvention::equivalent, beta);
}

cplx hs_inner(const FourierField& a, const FourierField& b, double s) {
  cplx acc{};
  for (int k = -a.max_mode(); k <= a.max_mode(); ++k) {
    acc += std::pow(1.0 + std::abs(k), 2.0 * s) * a[k] * std::conj(b[k]);
  }
  return acc;
}

double grid_imag(const FourierField& f) {
  double m = 0.0;
  for (const cplx& z : to_grid(f, dealiased_grid_size(f.max_mode()))) m = std::max(m, std::abs(z.imag()));
  return m;
}

}  // namespace

ControlSignal assemble_control(const ControlCoefficients& coeffs, const DualBasisRep& dual,
                               const std::vector<ShapeGram>& grams, double sobolev_s, int time_samples) {
  const int n = coeffs.max_mode;
  const auto count = static_cast<std::size_t>(2 * n);
  if (dual.frequencies.size() != count || grams.size() != count) {
    throw DimensionError("assemble_control: inconsistent sizes");
  }
  if (time_samples < 2) throw ConstraintViolation("assemble_control: need at least 2 time samples");

  ControlSignal h;
  h.max_mode = n;
  h.T = dual.T;
  h.coeffs = coeffs;

  std::vector<FourierField> x(count, FourierField(n));
  for (int m = -n; m <= n; ++m) {
    if (m == 0) continue;
    const auto i = static_cast<std::size_t>(frequency_index(m, n));
    x[i] = coeffs.c(1, m) * grams[i].s1 + coeffs.c(2, m) * grams[i].s2;
  }
  h.terms.rates = dual.frequencies;
  h.terms.shapes.assign(count, FourierField(n));
  for (std::size_t l = 0; l < count; ++l) {
    for (std::size_t i = 0; i < count; ++i) {
      const cplx c = dual.coeffs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l));
      if (c != 0.0) h.terms.shapes[l] += c * x[i];
    }
  }

  cplx sq{};
  for (std::size_t l = 0; l < count; ++l) {
    for (std::size_t m = 0; m < count; ++m) {
      sq += dual.gram(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(m)) *
            hs_inner(h.terms.shapes[l], h.terms.shapes[m], sobolev_s);
    }
  }
  h.norm = std::sqrt(std::max(0.0, sq.real()));

  for (int i = 0; i < time_samples; ++i) {
    const double t = h.T * i / (time_samples - 1);
    h.times.push_back(t);
    h.samples.push_back(h.at(t));
    h.max_imag = std::max(h.max_imag, grid_imag(h.samples.back()));
  }
  return h;
}

Controller::Controller(ControlConfig cfg)
    : cfg_(std::move(cfg)), basis_(build_basis(cfg_.max_mode, cfg_.beta, SobolevIndex(cfg_.s))) {
  if (cfg_.g.max_mode() != cfg_.max_mode) throw DimensionError("Controller: g/N mismatch");
  if (!(cfg_.T > 0.0)) throw ConstraintViolation("Controller: T must be > 0");
  dual_ = dual_basis(cfg_.T, basis_.frequencies(), cfg_.max_condition);
  for (int n = -cfg_.max_mode; n <= cfg_.max_mode; ++n) {
    if (n != 0) grams_.push_back(shape_gram(n, basis_, cfg_.g, cfg_.delta_floor));
  }
}

MomentProblem Controller::moments(const StateVector& u0, const StateVector& uT) const {
  if (u0.max_mode() != cfg_.max_mode || uT.max_mode() != cfg_.max_mode) {
    throw DimensionError("K_T: endpoint max_mode differs from the controller's N");
  }
  if (!u0.is_finite() || !uT.is_finite()) throw ConstraintViolation("K_T: non-finite endpoint data");
  // Split off the common mean; the mean part is an equilibrium and gets no control.
  const double kappa = mean_value(u0.u);
  StateVector a = u0, b = uT;
  a.u[0] -= kappa;
  b.u[0] -= kappa;
  return moment_rhs(project_state(a, basis_), project_state(b, basis_), cfg_.T, basis_, cfg_.mean_tol);
}

ControlSignal Controller::synthesize(const StateVector& u0, const StateVector& uT) const {
  const MomentProblem p = moments(u0, uT);
  ControlSignal h = assemble_control(cramer_coeffs(p, grams_, basis_), dual_, grams_, cfg_.s,
                                     cfg_.time_samples);
  const double data = std::pow(xs(u0, cfg_.s, cfg_.beta), 2) + std::pow(xs(uT, cfg_.s, cfg_.beta), 2);
  h.bound_ratio = data > 0.0 ? h.norm * h.norm / data : 0.0;
  return h;
}

double Controller::moment_residual(const ControlSignal& h, const MomentProblem& p) const {
  const int n = cfg_.max_mode;
  double worst = 0.0;
  for (int m = -n; m <= n; ++m) {
    if (m == 0) continue;
    const auto i = static_cast<Eigen::Index>(frequency_index(m, n));
    const ShapeGram& sg = grams_[static_cast<std::size_t>(i)];
    const double sigma = equiv_weight(m, cfg_.beta, cfg_.s);
    for (int j = 1; j <= 2; ++j) {
      const FourierField& shape = j == 1 ? sg.s1 : sg.s2;
      cplx moment{};
      for (std::size_t l = 0; l < h.terms.shapes.size(); ++l) {
        moment += dual_.gram_quadrature(static_cast<Eigen::Index>(l), i) * l2_inner(h.terms.shapes[l], shape);
      }
      worst = std::max(worst, std::abs(sigma * moment - p.d(j, m)));
    }
  }
  return worst;
}

ControlSignal Controller::synthesize(const StateVector& u0, const StateVector& uT,
                                     ControlDiagnostics& diag) const {
  const MomentProblem p = moments(u0, uT);
  ControlSignal h = synthesize(u0, uT);
  diag.condition = dual_.condition;
  diag.duality_residual = dual_.duality_residual;
  diag.moment_residual = moment_residual(h, p);
  diag.min_normalized_delta = INFINITY;
  for (const ShapeGram& sg : grams_) diag.min_normalized_delta = std::min(diag.min_normalized_delta, sg.normalized_delta);
  if (!cfg_.verify) return h;

  EvolveOptions opt;
  opt.T = cfg_.T;
  opt.dt = cfg_.verify_dt;
  opt.beta = cfg_.beta;
  opt.nonlinear = false;
  opt.g = cfg_.g;
  opt.control = h.terms;
  opt.record_every = 10;
  const double scale = std::max(xs(u0, cfg_.s, cfg_.beta), xs(uT, cfg_.s, cfg_.beta));
  opt.blowup_reference = scale;
  const Trajectory tr = evolve(u0, opt);
  diag.terminal_error_abs = xs(tr.final_state() - uT, cfg_.s, cfg_.beta);
  diag.terminal_error = scale > 0.0 ? diag.terminal_error_abs / scale : diag.terminal_error_abs;
  const ConservationReport cr = conservation_check(tr.times, tr.states);
  diag.mean_u_drift = cr.mean_u_drift;
  diag.mean_v_drift = cr.mean_v_drift;
  diag.verified = diag.terminal_error <= cfg_.tol;
  if (!diag.verified) {
    std::ostringstream os;
    os << "control verification failed: terminal X^s error " << diag.terminal_error << " > tol "
       << cfg_.tol;
    throw VerificationFailure(os.str(), diag.terminal_error);
  }
  return h;
}

ControlSignal K_T(const StateVector& u0, const StateVector& uT, const ControlConfig& cfg,
                  ControlDiagnostics* diag) {
  const Controller c(cfg);
  if (diag) return c.synthesize(u0, uT, *diag);
  ControlDiagnostics local;
  return c.synthesize(u0, uT, local);
}

NonlinearControlResult nonlinear_exact_control(const StateVector& u0, const StateVector& uT,
                                               const Controller& controller,
                                               const NonlinearControlOptions& opt) {
  const ControlConfig& cfg = controller.config();
  const double n0 = xs(u0, cfg.s, cfg.beta), nT = xs(uT, cfg.s, cfg.beta);
  if (n0 > opt.delta || nT > opt.delta) {
    std::ostringstream os;
    os << "endpoint norms (" << n0 << ", " << nT << ") exceed the smallness bound delta = " << opt.delta;
    throw ConstraintViolation(os.str());
  }
  if (opt.max_iter < 1) throw ConstraintViolation("nonlinear_exact_control: max_iter must be >= 1");
  const double scale = std::max(n0, nT) > 0.0 ? std::max(n0, nT) : 1.0;

  NonlinearControlResult res;
  ControlSignal h = controller.synthesize(u0, uT, res.linear_diagnostics);

  EvolveOptions eo;
  eo.T = cfg.T;
  eo.dt = opt.dt;
  eo.beta = cfg.beta;
  eo.g = cfg.g;
  eo.track_mu = true;
  eo.blowup_reference = std::max(n0, nT);
  eo.nonlinear = false;
  eo.control = h.terms;
  Trajectory prev = evolve(u0, eo);

  eo.nonlinear = true;
  bool converged = false;
  for (int m = 1; m <= opt.max_iter; ++m) {
    h = controller.synthesize(u0, uT - *prev.mu);
    eo.control = h.terms;
    Trajectory cur = evolve(u0, eo);
    double diff = 0.0;
    for (std::size_t i = 0; i < cur.states.size(); ++i) {
      diff = std::max(diff, xs(cur.states[i] - prev.states[i], cfg.s, cfg.beta));
    }
    diff /= scale;
    if (!res.differences.empty()) res.ratios.push_back(diff / res.differences.back());
    res.differences.push_back(diff);
    res.iterations = m;
    prev = std::move(cur);
    if (diff < opt.tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    std::ostringstream os;
    os << "fixed point did not converge in " << opt.max_iter << " iterations (last difference "
       << res.differences.back() << "); data may be too large for the contraction regime";
    throw NonConvergence(os.str());
  }
  res.terminal_error = xs(prev.final_state() - uT, cfg.s, cfg.beta) / scale;
  if (opt.refine_check) {
    EvolveOptions fine = eo;
    fine.dt = opt.dt / 2.0;
    fine.track_mu = false;
    fine.record_every = 1 << 20;
    const Trajectory t2 = evolve(u0, fine);
    res.terminal_error_refined = xs(t2.final_state() - uT, cfg.s, cfg.beta) / scale;
  }
  res.control = std::move(h);
  res.trajectory = std::move(prev);
  return res;
}

}  // namespace boussctl
