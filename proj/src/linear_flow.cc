#include "boussctl/linear_flow.h"

#include <algorithm>
#include <cmath>

#include "boussctl/errors.h"
#include "propagator.h"

namespace boussctl {

ModePair propagate_mode(int k, ModePair w, double t, const LinearSymbol& sym) {
  const double w2 = sym.omega_sq(k);
  // e^{tL} = c0 I + t s1 L, evaluated with the same kernels as the integrator
  const detail::Kernels kr = detail::kernels(w2 * t * t);
  return ModePair{kr.c0 * w.u + t * kr.s1 * w.v, -t * kr.s1 * w2 * w.u + kr.c0 * w.v};
}

ModePair propagate_mode(int k, ModePair w, double t, Beta beta) {
  return propagate_mode(k, w, t, LinearSymbol{beta, 1.0});
}

StateVector W_group(const StateVector& w, double t, const LinearSymbol& sym) {
  StateVector out(w.max_mode());
  for (int k = -w.max_mode(); k <= w.max_mode(); ++k) {
    const ModePair p = propagate_mode(k, ModePair{w.u[k], w.v[k]}, t, sym);
    out.u[k] = p.u;
    out.v[k] = p.v;
  }
  return out;
}

StateVector W_group(const StateVector& w, double t, Beta beta) {
  return W_group(w, t, LinearSymbol{beta, 1.0});
}

StateVector apply_generator(const StateVector& w, Beta beta) {
  const LinearSymbol sym{beta, 1.0};
  StateVector out(w.max_mode());
  for (int k = -w.max_mode(); k <= w.max_mode(); ++k) {
    out.u[k] = w.v[k];
    out.v[k] = -sym.omega_sq(k) * w.u[k];
  }
  return out;
}

std::string to_string(Quadrature q) {
  switch (q) {
    case Quadrature::trapezoid: return "trapezoid";
    case Quadrature::simpson: return "simpson";
    case Quadrature::exponential_trapezoid: return "exponential_trapezoid";
  }
  return "unknown";
}

Quadrature quadrature_from_string(const std::string& name) {
  if (name == "trapezoid") return Quadrature::trapezoid;
  if (name == "simpson") return Quadrature::simpson;
  if (name == "exponential_trapezoid") return Quadrature::exponential_trapezoid;
  throw ConstraintViolation("unknown quadrature rule '" + name + "'");
}

int quadrature_order(Quadrature q) { return q == Quadrature::simpson ? 4 : 2; }

DuhamelResult duhamel_forced(const StateVector& w0, const std::vector<StateVector>& forcing,
                             double T, const LinearSymbol& sym, Quadrature rule) {
  if (forcing.empty()) throw ConstraintViolation("duhamel_forced: empty forcing grid");
  if (!(T >= 0.0)) throw ConstraintViolation("duhamel_forced: T must be >= 0");
  const int n = w0.max_mode();
  for (const StateVector& f : forcing) {
    if (f.max_mode() != n) throw DimensionError("duhamel_forced: forcing/state max_mode mismatch");
  }
  const int intervals = static_cast<int>(forcing.size()) - 1;
  if (intervals == 0 && T > 0.0) {
    throw ConstraintViolation("duhamel_forced: a single forcing sample cannot cover [0, T]");
  }
  if (rule == Quadrature::simpson && intervals % 2 != 0) {
    throw ConstraintViolation("duhamel_forced: Simpson needs an even number of intervals, got " +
                              std::to_string(intervals));
  }
  const double h = intervals > 0 ? T / intervals : 0.0;
  StateVector acc = W_group(w0, T, sym);

  if (rule == Quadrature::exponential_trapezoid) {
    // Recursion over intervals: I_{i+1} = E I_i + P1 f_i + P2 (f_{i+1} - f_i).
    StateVector integral(n);
    for (int k = -n; k <= n; ++k) {
      const detail::StepMatrices m = detail::step_matrices(sym.omega_sq(k), h);
      cplx u = 0.0, v = 0.0;
      for (int i = 0; i < intervals; ++i) {
        const StateVector& a = forcing[static_cast<std::size_t>(i)];
        const StateVector& b = forcing[static_cast<std::size_t>(i + 1)];
        m.e.apply(u, v);
        m.p1.apply_add(a.u[k], a.v[k], u, v);
        m.p2.apply_add(b.u[k] - a.u[k], b.v[k] - a.v[k], u, v);
      }
      integral.u[k] = u;
      integral.v[k] = v;
    }
    acc += integral;
  } else {
    for (int i = 0; i <= intervals; ++i) {
      double wgt;
      if (intervals == 0) {
        wgt = 0.0;
      } else if (rule == Quadrature::trapezoid) {
        wgt = (i == 0 || i == intervals) ? 0.5 * h : h;
      } else {
        wgt = (i == 0 || i == intervals) ? h / 3.0 : (i % 2 == 1 ? 4.0 * h / 3.0 : 2.0 * h / 3.0);
      }
      StateVector term = W_group(forcing[static_cast<std::size_t>(i)], T - i * h, sym);
      acc += cplx(wgt) * term;
    }
  }
  return DuhamelResult{std::move(acc), rule, quadrature_order(rule), h};
}

DuhamelResult duhamel_forced(const StateVector& w0, const std::vector<StateVector>& forcing,
                             double T, Beta beta, Quadrature rule) {
  return duhamel_forced(w0, forcing, T, LinearSymbol{beta, 1.0}, rule);
}

ConservationReport conservation_check(const std::vector<double>& times,
                                      const std::vector<StateVector>& states) {
  if (times.size() != states.size()) {
    throw DimensionError("conservation_check: times/states length mismatch");
  }
  ConservationReport r;
  if (states.empty()) return r;
  const double t0 = times.front();
  const double u0 = mean_value(states.front().u);
  const double v0 = mean_value(states.front().v);
  for (std::size_t i = 0; i < states.size(); ++i) {
    const double dt = times[i] - t0;
    r.mean_v_drift = std::max(r.mean_v_drift, std::abs(mean_value(states[i].v) - v0));
    r.mean_u_drift = std::max(r.mean_u_drift, std::abs(mean_value(states[i].u) - u0 - dt * v0));
  }
  return r;
}

}  // namespace boussctl
