#include "boussctl/stabilization.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "boussctl/errors.h"

namespace boussctl {

namespace {

double x0(const StateVector& w, Beta beta) {
  return xs_norm(w, SobolevIndex(0.0), NormConvention::equivalent, beta);
}

double l2(const FourierField& f) { return sobolev_norm(f, SobolevIndex(0.0), NormConvention::standard); }

// u'' - beta u'''' + u'''''' spectrally: -omega_k^2 u_k.
FourierField linear_part(const FourierField& f, Beta beta) {
  FourierField r(f.max_mode());
  const LinearSymbol sym{beta, 1.0};
  for (int k = -f.max_mode(); k <= f.max_mode(); ++k) r[k] = -sym.omega_sq(k) * f[k];
  return r;
}

}  // namespace

double energy(const StateVector& w, const LinearSymbol& sym) {
  double s = std::norm(w.v[0]);
  for (int k = 1; k <= w.max_mode(); ++k) {
    const double w2 = sym.omega_sq(k);
    s += std::norm(w.v[k]) + std::norm(w.v[-k]) + w2 * (std::norm(w.u[k]) + std::norm(w.u[-k]));
  }
  return kPi * s;
}

double mode_energy(const StateVector& w, int k, const LinearSymbol& sym) {
  if (k < 1 || k > w.max_mode()) throw ConstraintViolation("mode_energy: need 1 <= k <= N");
  const double w2 = sym.omega_sq(k);
  return kPi * (std::norm(w.v[k]) + std::norm(w.v[-k]) + w2 * (std::norm(w.u[k]) + std::norm(w.u[-k])));
}

EnergySeries energy_series(const Trajectory& traj, double s, double second_order) {
  EnergySeries e;
  if (traj.states.empty()) return e;
  const LinearSymbol sym{traj.beta, second_order};
  const SobolevIndex idx(s);
  const cplx mean0 = traj.states.front().u[0];
  e.times = traj.times;
  for (const StateVector& w : traj.states) {
    e.E.push_back(energy(w, sym));
    StateVector d = w;
    d.u[0] -= mean0;
    e.xs_norm.push_back(xs_norm(d, idx, NormConvention::equivalent, traj.beta));
  }
  return e;
}

std::vector<double> mode_energy_series(const Trajectory& traj, int k, double second_order) {
  const LinearSymbol sym{traj.beta, second_order};
  std::vector<double> out;
  out.reserve(traj.states.size());
  for (const StateVector& w : traj.states) out.push_back(mode_energy(w, k, sym));
  return out;
}

ClosedLoopRun evolve_closed_loop(const StateVector& w0, const ClosedLoopOptions& opt) {
  if (!(opt.K >= 0.0) || !std::isfinite(opt.K)) throw ConstraintViolation("closed loop: gain K must be >= 0");
  if (opt.g.max_mode() != w0.max_mode()) throw DimensionError("closed loop: g/state max_mode mismatch");
  const double scale = std::max(1.0, w0.v.max_abs());
  if (std::abs(w0.v[0]) > opt.mean_tol * scale) {
    std::ostringstream os;
    os << "closed loop requires [psi_0] = 0 (zero initial velocity mean), got " << w0.v[0].real();
    throw ConstraintViolation(os.str());
  }
  EvolveOptions eo;
  eo.T = opt.T;
  eo.dt = opt.dt;
  eo.beta = opt.beta;
  eo.second_order = opt.second_order;
  eo.nonlinear = opt.nonlinear;
  eo.feedback_gain = opt.K;
  eo.g = opt.g;
  eo.record_every = opt.record_every;
  eo.blowup_factor = opt.blowup_factor;
  ClosedLoopRun run;
  run.trajectory = evolve(w0, eo);
  run.energy = energy_series(run.trajectory, opt.s, opt.second_order);
  return run;
}

double integrate_samples(const std::vector<double>& times, const std::vector<double>& values, Quadrature rule) {
  if (times.size() != values.size()) throw DimensionError("integrate_samples: size mismatch");
  if (rule == Quadrature::exponential_trapezoid) {
    throw ConstraintViolation("integrate_samples: exponential_trapezoid needs a propagator");
  }
  const std::size_t n = times.size();
  if (n < 2) return 0.0;
  const double h = (times.back() - times.front()) / static_cast<double>(n - 1);
  for (std::size_t i = 1; i < n; ++i) {
    if (std::abs(times[i] - times[i - 1] - h) > 1e-9 * std::max(std::abs(h), 1e-300)) {
      throw ConstraintViolation("integrate_samples: samples are not uniformly spaced");
    }
  }
  const std::size_t m = n - 1;  // intervals
  if (rule == Quadrature::trapezoid || m == 1) {
    double s = 0.5 * (values.front() + values.back());
    for (std::size_t i = 1; i < m; ++i) s += values[i];
    return s * h;
  }
  // Simpson on the leading even block, 3/8 rule on a trailing triple if m is odd.
  const std::size_t even = m % 2 == 0 ? m : m - 3;
  double s = 0.0;
  for (std::size_t i = 0; i < even; i += 2) s += values[i] + 4.0 * values[i + 1] + values[i + 2];
  s *= h / 3.0;
  if (even != m) {
    const std::size_t i = even;
    s += 3.0 * h / 8.0 * (values[i] + 3.0 * values[i + 1] + 3.0 * values[i + 2] + values[i + 3]);
  }
  return s;
}

double dissipation_density(const FourierField& v, const GProfile& g) {
  // g (v - c)^2 has degree deg g + 2 deg v; the trapezoid sum is exact above that.
  const int degree = g.max_mode() + 2 * v.max_mode();
  const int m = std::max(2 * degree + 2, 2 * std::max(v.max_mode(), g.max_mode()) + 1);
  const auto vg = to_grid(v, m);
  const auto gg = to_grid(g.coeffs(), m);
  const double w = kTwoPi / m;
  double c = 0.0;
  for (int j = 0; j < m; ++j) c += gg[j].real() * vg[j].real();
  c *= w;
  double d = 0.0;
  for (int j = 0; j < m; ++j) d += gg[j].real() * std::pow(vg[j].real() - c, 2);
  return d * w;
}

DissipationCheck dissipation_residual(const Trajectory& traj, double K, const GProfile& g, Quadrature rule,
                                      double second_order) {
  if (traj.states.empty()) throw ConstraintViolation("dissipation_residual: empty trajectory");
  const LinearSymbol sym{traj.beta, second_order};
  DissipationCheck c;
  const double e0 = energy(traj.states.front(), sym);
  c.lhs = energy(traj.states.back(), sym) - e0;
  if (K != 0.0) {
    std::vector<double> d;
    d.reserve(traj.states.size());
    for (const StateVector& w : traj.states) d.push_back(dissipation_density(w.v, g));
    c.rhs = -K * integrate_samples(traj.times, d, rule);
  }
  c.residual = std::abs(c.lhs - c.rhs) / std::max(e0, std::numeric_limits<double>::min());
  return c;
}

DecayFit decay_fit(const std::vector<double>& times, const std::vector<double>& values, std::optional<double> t0,
                   std::optional<double> t1) {
  if (times.size() != values.size()) throw DimensionError("decay_fit: size mismatch");
  if (times.empty()) throw ConstraintViolation("decay_fit: empty series");
  DecayFit f;
  f.t1 = t1.value_or(times.back());
  f.t0 = t0.value_or(0.1 * times.back());
  const double eps = 1e-9 * std::max(1.0, std::abs(f.t1));
  std::vector<double> x, y;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < f.t0 - eps || times[i] > f.t1 + eps) continue;
    if (!(values[i] > 0.0)) {
      std::ostringstream os;
      os << "decay_fit: nonpositive value " << values[i] << " at t = " << times[i] << "; fit undefined";
      throw NumericalFailure(os.str());
    }
    x.push_back(times[i]);
    y.push_back(std::log(values[i]));
  }
  if (x.size() < 2) throw ConstraintViolation("decay_fit: fewer than 2 samples in the window");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw ConstraintViolation("decay_fit: window spans a single time");
  const double slope = sxy / sxx;
  f.gamma_hat = -slope;
  f.C_hat = std::exp(my - slope * mx);
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) ss_res += std::pow(y[i] - (my + slope * (x[i] - mx)), 2);
  // A series flat to rounding has no variance to explain; count it as a perfect fit.
  double ymax = 0.0;
  for (double v : y) ymax = std::max(ymax, std::abs(v));
  const double flat = n * std::pow(64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, ymax), 2);
  f.r2 = syy > flat ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  f.points = static_cast<int>(x.size());
  return f;
}

double sample_at(const std::vector<double>& times, const std::vector<double>& values, double t) {
  const double eps = 1e-9 * std::max(1.0, std::abs(t));
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] >= t - eps) return values.at(i);
  }
  throw ConstraintViolation("sample_at: time beyond the series");
}

WkIdentity wk_identity_residual(const StateVector& w0, double K, const GProfile& g, double t, Beta beta, double dt,
                                Quadrature rule) {
  ClosedLoopOptions opt;
  opt.K = K;
  opt.g = g;
  opt.T = t;
  opt.dt = dt;
  opt.beta = beta;
  const ClosedLoopRun run = evolve_closed_loop(w0, opt);
  std::vector<StateVector> forcing;
  forcing.reserve(run.trajectory.states.size());
  for (const StateVector& w : run.trajectory.states) {
    forcing.emplace_back(FourierField(w.max_mode()), cplx(-K) * apply_G(w.v, g));
  }
  WkIdentity r;
  r.closed_loop = run.trajectory.final_state();
  r.variation = duhamel_forced(w0, forcing, t, beta, rule).state;
  r.absolute = x0(r.closed_loop - r.variation, beta);
  const double scale = x0(w0, beta);
  r.residual = scale > 0.0 ? r.absolute / scale : r.absolute;
  return r;
}

MeanShift mean_shift_transform(const StateVector& w0) {
  MeanShift m;
  m.eta = mean_value(w0.u);
  m.state = w0;
  m.state.u[0] -= m.eta;
  m.second_order = 1.0 - 2.0 * m.eta;
  m.positivity_warning = !(m.second_order > 0.0);
  return m;
}

PairedRun paired_mean_shift_run(const StateVector& w0, const PairedRunOptions& opt) {
  PairedRun r;
  r.shift = mean_shift_transform(w0);
  EvolveOptions eo;
  eo.T = opt.T;
  eo.dt = opt.dt;
  eo.beta = opt.beta;
  eo.nonlinear = true;
  eo.record_every = opt.record_every;
  if (opt.K != 0.0) {
    if (!opt.g) throw ConstraintViolation("paired run: closed loop needs a g profile");
    eo.feedback_gain = opt.K;
    eo.g = opt.g;
  }
  r.original = evolve(w0, eo);
  eo.second_order = r.shift.second_order;
  r.transformed = evolve(r.shift.state, eo);
  double sup = 0.0;
  for (std::size_t i = 0; i < r.original.states.size(); ++i) {
    StateVector d = r.original.states[i] - r.transformed.states[i];
    d.u[0] -= r.shift.eta;
    r.discrepancy = std::max(r.discrepancy, x0(d, opt.beta));
    sup = std::max(sup, x0(r.transformed.states[i], opt.beta));
  }
  r.relative_discrepancy = sup > 0.0 ? r.discrepancy / sup : r.discrepancy;
  return r;
}

BootstrapData bootstrap_systems(const StateVector& w0, double K, const GProfile& g, Beta beta) {
  if (g.max_mode() != w0.max_mode()) throw DimensionError("bootstrap_systems: g/state max_mode mismatch");
  BootstrapData d;
  d.phi1 = linear_part(w0.u, beta) - cplx(K) * apply_G(w0.v, g);
  d.psi1 = linear_part(w0.v, beta) - cplx(K) * apply_G(d.phi1, g);
  d.mean_phi1 = mean_value(d.phi1);
  d.mean_psi1 = mean_value(d.psi1);
  const int n = w0.max_mode();
  double total = 0.0, tail = 0.0;
  for (int k = -n; k <= n; ++k) {
    const double c = std::pow(1.0 + std::abs(k), 12) * std::norm(w0.u[k]);
    total += c;
    if (std::abs(k) == n) tail += c;
  }
  d.tail_fraction = total > 0.0 ? tail / total : 0.0;
  return d;
}

BootstrapCheck bootstrap_paired_run(const StateVector& w0, double K, const GProfile& g, Beta beta, double T,
                                    double dt) {
  BootstrapCheck c;
  c.data = bootstrap_systems(w0, K, g, beta);
  ClosedLoopOptions opt;
  opt.K = K;
  opt.g = g;
  opt.T = T;
  opt.dt = dt;
  opt.beta = beta;
  const Trajectory primary = evolve_closed_loop(w0, opt).trajectory;
  const Trajectory derived = evolve_closed_loop(StateVector(w0.v, c.data.phi1), opt).trajectory;
  const std::size_t n = primary.states.size();
  for (std::size_t i = 0; i < n; ++i) {
    c.derivative_mismatch = std::max(c.derivative_mismatch, l2(derived.states[i].u - primary.states[i].v));
    if (i > 0 && i + 1 < n) {
      const double h = primary.times[i + 1] - primary.times[i - 1];
      const FourierField fd = cplx(1.0 / h) * (primary.states[i + 1].u - primary.states[i - 1].u);
      c.finite_difference_mismatch = std::max(c.finite_difference_mismatch, l2(derived.states[i].u - fd));
    }
  }
  return c;
}

}  // namespace boussctl
