#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "boussctl/control_profile.h"
#include "boussctl/fourier_field.h"
#include "boussctl/linear_flow.h"
#include "boussctl/mode_basis.h"

namespace boussctl {

// -(u^2)_xx, dealiased.
FourierField nonlinear_term(const FourierField& u);

// Control h(x, t) given as samples on a uniform time grid; linear
// interpolation in between, clamped to the end values outside.
struct SampledControl {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<FourierField> samples;

  FourierField at(double t) const;
};

// h(x, t) = sum_l e^{rate_l t} shape_l(x). The integrator treats each term
// exactly, so a linear run driven by such a control has no time-stepping error.
struct ExponentialSumControl {
  std::vector<cplx> rates;
  std::vector<FourierField> shapes;

  FourierField at(double t) const;
};

using ControlInput = std::variant<std::monostate, SampledControl, ExponentialSumControl>;

struct Trajectory {
  Beta beta = Beta::plus_one;
  int max_mode = 0;
  double dt = 0.0;      // integrator step
  int order = 2;        // formal order of the integrator
  int record_every = 1;
  std::vector<double> times;
  std::vector<StateVector> states;
  // int_0^T W(T - tau) F(u(tau)) dtau accumulated by the integrator itself,
  // present when EvolveOptions::track_mu is set. For a linear run F is
  // evaluated along the linear trajectory without feeding back into it.
  std::optional<StateVector> mu;

  const StateVector& final_state() const { return states.back(); }
};

struct EvolveOptions {
  double T = 1.0;
  double dt = 1e-3;
  Beta beta = Beta::plus_one;
  // Coefficient of k^2 in omega_k^2; 1 - 2 eta for the mean-shifted equation.
  double second_order = 1.0;
  bool nonlinear = true;
  // Feedback f = -K G u_t when set (requires g).
  std::optional<double> feedback_gain;
  std::optional<GProfile> g;
  ControlInput control;
  // Abort when the X^0 norm exceeds blowup_factor * reference; the reference
  // defaults to the initial norm. A zero reference only traps non-finite values.
  double blowup_factor = 1e6;
  std::optional<double> blowup_reference;
  int record_every = 1;
  bool track_mu = false;
};

// Mild solution by second-order exponential time differencing (ETD2RK): the
// linear part is propagated exactly per mode, the nonlinearity, feedback and
// sampled controls enter through the predictor-corrector, exponential-sum
// controls are integrated exactly.
//
// Throws ConstraintViolation when dt does not divide T or a control needs g,
// BlowUp when the norm ceiling is crossed.
Trajectory evolve(const StateVector& w0, const EvolveOptions& opt);

// int_0^T W(T - tau) F(u(tau)) dtau by quadrature over the recorded states.
StateVector mu_functional(const Trajectory& traj, double T, Beta beta,
                          Quadrature rule = Quadrature::exponential_trapezoid);

}  // namespace boussctl
