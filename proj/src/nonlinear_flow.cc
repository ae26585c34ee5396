#include "boussctl/nonlinear_flow.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "boussctl/errors.h"
#include "boussctl/sobolev.h"
#include "propagator.h"

namespace boussctl {

FourierField nonlinear_term(const FourierField& u) {
  return -spatial_derivative(product(u, u), 2);
}

FourierField SampledControl::at(double t) const {
  if (samples.empty()) throw ConstraintViolation("SampledControl: no samples");
  if (samples.size() == 1 || dt <= 0.0) return samples.front();
  const double x = (t - t0) / dt;
  const auto last = static_cast<double>(samples.size() - 1);
  if (x <= 0.0) return samples.front();
  if (x >= last) return samples.back();
  const auto i = static_cast<std::size_t>(std::floor(x));
  const double f = x - static_cast<double>(i);
  if (i + 1 >= samples.size()) return samples.back();
  return cplx(1.0 - f) * samples[i] + cplx(f) * samples[i + 1];
}

FourierField ExponentialSumControl::at(double t) const {
  if (shapes.empty()) return FourierField(0);
  FourierField h(shapes.front().max_mode());
  for (std::size_t l = 0; l < shapes.size(); ++l) h += std::exp(rates[l] * t) * shapes[l];
  return h;
}

namespace {

int step_count(double T, double dt) {
  if (!(T > 0.0) || !(dt > 0.0)) throw ConstraintViolation("evolve: T and dt must be positive");
  const double r = T / dt;
  const long n = std::lround(r);
  if (n < 1 || std::abs(r - static_cast<double>(n)) > 1e-9 * r) {
    std::ostringstream os;
    os << "evolve: dt = " << dt << " does not divide T = " << T;
    throw ConstraintViolation(os.str());
  }
  return static_cast<int>(n);
}

// Per-step increments of the exactly integrated exponential-sum control.
class ExactControl {
 public:
  ExactControl(const ExponentialSumControl& c, const GProfile& g, const LinearSymbol& sym, int n,
               double h)
      : n_(n), rates_(c.rates) {
    if (c.rates.size() != c.shapes.size()) {
      throw DimensionError("ExponentialSumControl: rates/shapes length mismatch");
    }
    for (const FourierField& s : c.shapes) {
      if (s.max_mode() != n) throw DimensionError("ExponentialSumControl: shape max_mode mismatch");
      shapes_.push_back(apply_G(s, g));
    }
    const std::size_t width = static_cast<std::size_t>(2 * n + 1);
    cu_.assign(rates_.size() * width, cplx{});
    cv_.assign(rates_.size() * width, cplx{});
    for (std::size_t l = 0; l < rates_.size(); ++l) {
      const cplx nu = rates_[l];
      for (int k = -n; k <= n; ++k) {
        const double w2 = sym.omega_sq(k);
        cplx fu, fv;
        if (std::abs(w2) * h * h < 1e-28) {
          // Jordan block: v' = f, u' = v
          fu = h * h * detail::phi2(nu * h);
          fv = h * detail::phi1(nu * h);
        } else {
          const cplx mu = std::sqrt(cplx(-w2));
          for (int sgn : {1, -1}) {
            const cplx m = static_cast<double>(sgn) * mu;
            const cplx b = static_cast<double>(sgn) / (2.0 * mu);
            const cplx j = std::exp(m * h) * h * detail::phi1((nu - m) * h);
            fu += b * j;
            fv += b * m * j;
          }
        }
        cu_[l * width + static_cast<std::size_t>(k + n)] = fu;
        cv_[l * width + static_cast<std::size_t>(k + n)] = fv;
      }
    }
  }

  // Adds int_{t}^{t+h} W(t + h - tau) (0, G h(tau)) dtau to w.
  void add_increment(double t, StateVector& w) const {
    const std::size_t width = static_cast<std::size_t>(2 * n_ + 1);
    for (std::size_t l = 0; l < rates_.size(); ++l) {
      const cplx e = std::exp(rates_[l] * t);
      const FourierField& s = shapes_[l];
      for (int k = -n_; k <= n_; ++k) {
        const cplx a = e * s[k];
        const std::size_t idx = l * width + static_cast<std::size_t>(k + n_);
        w.u[k] += a * cu_[idx];
        w.v[k] += a * cv_[idx];
      }
    }
  }

 private:
  int n_;
  std::vector<cplx> rates_;
  std::vector<FourierField> shapes_;
  std::vector<cplx> cu_, cv_;
};

}  // namespace

Trajectory evolve(const StateVector& w0, const EvolveOptions& opt) {
  const int n = w0.max_mode();
  const int steps = step_count(opt.T, opt.dt);
  const double h = opt.T / steps;
  if (opt.record_every < 1) throw ConstraintViolation("evolve: record_every must be >= 1");
  const bool has_control = !std::holds_alternative<std::monostate>(opt.control);
  if ((has_control || opt.feedback_gain) && !opt.g) {
    throw ConstraintViolation("evolve: controls and feedback need a g profile");
  }
  if (opt.g && opt.g->max_mode() != n) throw DimensionError("evolve: g/state max_mode mismatch");
  if (opt.feedback_gain && !(*opt.feedback_gain >= 0.0)) {
    throw ConstraintViolation("evolve: feedback gain must be >= 0");
  }

  const LinearSymbol sym{opt.beta, opt.second_order};
  std::vector<detail::StepMatrices> mats;
  mats.reserve(static_cast<std::size_t>(n + 1));
  for (int k = 0; k <= n; ++k) mats.push_back(detail::step_matrices(sym.omega_sq(k), h));
  auto mat = [&](int k) -> const detail::StepMatrices& {
    return mats[static_cast<std::size_t>(std::abs(k))];
  };

  std::optional<ExactControl> exact;
  const SampledControl* sampled = std::get_if<SampledControl>(&opt.control);
  if (const auto* es = std::get_if<ExponentialSumControl>(&opt.control)) {
    exact.emplace(*es, *opt.g, sym, n, h);
  }
  if (sampled) {
    for (const FourierField& s : sampled->samples) {
      if (s.max_mode() != n) throw DimensionError("SampledControl: sample max_mode mismatch");
    }
  }

  // Explicit part split as nonlinear F (tracked for mu) and the rest R.
  auto explicit_terms = [&](const StateVector& w, double t, FourierField& f, FourierField& r) {
    f = (opt.nonlinear || opt.track_mu) ? nonlinear_term(w.u) : FourierField(n);
    r = FourierField(n);
    if (opt.feedback_gain && *opt.feedback_gain != 0.0) r -= cplx(*opt.feedback_gain) * apply_G(w.v, *opt.g);
    if (sampled) r += apply_G(sampled->at(t), *opt.g);
  };

  auto norm = [&](const StateVector& w) {
    return xs_norm(w, SobolevIndex(0.0), NormConvention::equivalent, opt.beta);
  };
  const double ref = opt.blowup_reference.value_or(norm(w0));
  const double ceiling = opt.blowup_factor * ref;

  Trajectory traj;
  traj.beta = opt.beta;
  traj.max_mode = n;
  traj.dt = h;
  traj.order = 2;
  traj.record_every = opt.record_every;
  traj.times.push_back(0.0);
  traj.states.push_back(w0);

  // A linear run may still track mu along its own trajectory.
  const double feed = opt.nonlinear ? 1.0 : 0.0;
  StateVector w = w0;
  StateVector mu(n);
  FourierField fn(n), rn(n), fp(n), rp(n);
  StateVector wp(n);

  for (int step = 0; step < steps; ++step) {
    const double t = step * h;
    explicit_terms(w, t, fn, rn);
    // predictor
    for (int k = -n; k <= n; ++k) {
      const auto& m = mat(k);
      cplx u = w.u[k], v = w.v[k];
      m.e.apply(u, v);
      m.p1.apply_add(0.0, feed * fn[k] + rn[k], u, v);
      wp.u[k] = u;
      wp.v[k] = v;
    }
    if (exact) exact->add_increment(t, wp);
    explicit_terms(wp, t + h, fp, rp);
    // corrector: E w + P1 N_n + P2 (N_p - N_n), the exact control increment is
    // identical to the predictor's, so reuse it through the difference
    for (int k = -n; k <= n; ++k) {
      const auto& m = mat(k);
      const cplx dn = feed * (fp[k] - fn[k]) + (rp[k] - rn[k]);
      cplx u = wp.u[k], v = wp.v[k];
      m.p2.apply_add(0.0, dn, u, v);
      w.u[k] = u;
      w.v[k] = v;
      if (opt.track_mu) {
        cplx mu_u = mu.u[k], mu_v = mu.v[k];
        m.e.apply(mu_u, mu_v);
        m.p1.apply_add(0.0, fn[k], mu_u, mu_v);
        m.p2.apply_add(0.0, fp[k] - fn[k], mu_u, mu_v);
        mu.u[k] = mu_u;
        mu.v[k] = mu_v;
      }
    }

    const double t1 = (step + 1) * h;
    const double nw = norm(w);
    if (!std::isfinite(nw) || (ref > 0.0 && nw > ceiling)) {
      std::ostringstream os;
      os << "evolve: solution norm " << nw << " exceeded the blow-up ceiling " << ceiling
         << " at t = " << t1;
      throw BlowUp(os.str(), t1);
    }
    if ((step + 1) % opt.record_every == 0 || step + 1 == steps) {
      traj.times.push_back(t1);
      traj.states.push_back(w);
    }
  }
  if (opt.track_mu) traj.mu = std::move(mu);
  return traj;
}

StateVector mu_functional(const Trajectory& traj, double T, Beta beta, Quadrature rule) {
  if (traj.states.empty()) throw ConstraintViolation("mu_functional: empty trajectory");
  const double span = traj.times.back() - traj.times.front();
  if (std::abs(span - T) > 1e-9 * std::max(1.0, T)) {
    throw ConstraintViolation("mu_functional: trajectory does not cover [0, T]");
  }
  std::vector<StateVector> forcing;
  forcing.reserve(traj.states.size());
  for (const StateVector& w : traj.states) {
    StateVector f(w.max_mode());
    f.v = nonlinear_term(w.u);
    forcing.push_back(std::move(f));
  }
  return duhamel_forced(StateVector(traj.max_mode), forcing, T, beta, rule).state;
}

}  // namespace boussctl
