#pragma once

#include <optional>
#include <vector>

#include "boussctl/control_profile.h"
#include "boussctl/linear_flow.h"
#include "boussctl/nonlinear_flow.h"

namespace boussctl {

// E = 1/2 int_S u_t^2 + c u_x^2 + beta u_xx^2 + u_xxx^2 dx with c = sym.second_order,
// i.e. pi sum_k |v_k|^2 + omega_k^2 |u_k|^2. Constants carry no energy.
double energy(const StateVector& w, const LinearSymbol& sym);
inline double energy(const StateVector& w, Beta beta) { return energy(w, LinearSymbol{beta, 1.0}); }

// Energy of the modes +k and -k together (k >= 1).
double mode_energy(const StateVector& w, int k, const LinearSymbol& sym);

struct EnergySeries {
  std::vector<double> times;
  std::vector<double> E;
  // Equivalent X^s norm of (u - [u](0), u_t), the distance to the limiting constant state.
  std::vector<double> xs_norm;
};

EnergySeries energy_series(const Trajectory& traj, double s = 0.0, double second_order = 1.0);
// E_k(t) for one mode pair.
std::vector<double> mode_energy_series(const Trajectory& traj, int k, double second_order = 1.0);

struct ClosedLoopOptions {
  double K = 1.0;
  GProfile g = GProfile::raised_cosine(16);
  double T = 10.0;
  double dt = 1e-3;
  Beta beta = Beta::plus_one;
  bool nonlinear = false;
  double second_order = 1.0;
  double s = 0.0;  // index of the norm series
  int record_every = 1;
  double mean_tol = 1e-12;
  double blowup_factor = 1e6;
};

struct ClosedLoopRun {
  Trajectory trajectory;
  EnergySeries energy;
};

// Feedback f = -K G u_t. Rejects [u_t](0) != 0 and K < 0 with ConstraintViolation;
// K = 0 gives the conservative flow.
ClosedLoopRun evolve_closed_loop(const StateVector& w0, const ClosedLoopOptions& opt);

// int over uniformly spaced samples. Simpson falls back to a 3/8 panel at the
// end for an odd interval count and to the trapezoid for one interval.
// Throws ConstraintViolation for non-uniform spacing or exponential_trapezoid.
double integrate_samples(const std::vector<double>& times, const std::vector<double>& values,
                         Quadrature rule = Quadrature::simpson);

// D(t) = int_S g (v - int_S g v)^2 dx, evaluated exactly on a fine grid.
double dissipation_density(const FourierField& v, const GProfile& g);

struct DissipationCheck {
  double lhs = 0.0;  // E(T) - E(0)
  double rhs = 0.0;  // -K int_0^T D(t) dt
  double residual = 0.0;  // |lhs - rhs| / max(E(0), tiny)
};

// Energy identity of the linear closed loop over the recorded trajectory.
DissipationCheck dissipation_residual(const Trajectory& traj, double K, const GProfile& g,
                                      Quadrature rule = Quadrature::simpson, double second_order = 1.0);

struct DecayFit {
  double gamma_hat = 0.0;  // values ~ C_hat e^{-gamma_hat t}
  double C_hat = 0.0;
  double r2 = 0.0;         // 1 for a perfect fit, including a constant series
  double t0 = 0.0, t1 = 0.0;
  int points = 0;
};

// Least-squares line through log(values) on [t0, t1]; the default window is
// [0.1 t_end, t_end]. Throws NumericalFailure for a nonpositive value in the
// window and ConstraintViolation for fewer than 2 points.
DecayFit decay_fit(const std::vector<double>& times, const std::vector<double>& values,
                   std::optional<double> t0 = std::nullopt, std::optional<double> t1 = std::nullopt);

// Sample of the series at the first recorded time >= t (within rounding).
double sample_at(const std::vector<double>& times, const std::vector<double>& values, double t);

struct WkIdentity {
  double residual = 0.0;   // X^0 distance between both sides, relative to |w0|_{X^0}
  double absolute = 0.0;
  StateVector closed_loop;  // W_K(t) w0
  StateVector variation;    // W(t) w0 - K int_0^t W(t - tau) B W_K(tau) w0 dtau
};

// Variation-of-parameters form of the linear closed loop. The left side
// comes from the integrator, the right from the exponential trapezoid (or
// rule) over the stored closed-loop samples.
WkIdentity wk_identity_residual(const StateVector& w0, double K, const GProfile& g, double t, Beta beta,
                                double dt = 1e-3, Quadrature rule = Quadrature::exponential_trapezoid);

// Shift by the displacement mean eta = [u]: (u - eta, u_t) solves the same
// equation with the k^2 coefficient 1 - 2 eta.
struct MeanShift {
  double eta = 0.0;
  StateVector state;
  double second_order = 1.0;
  bool positivity_warning = false;  // second_order <= 0
};

MeanShift mean_shift_transform(const StateVector& w0);

struct PairedRunOptions {
  double T = 1.0;
  double dt = 1e-4;
  Beta beta = Beta::plus_one;
  double K = 0.0;  // optional closed loop, needs g when > 0
  std::optional<GProfile> g;
  int record_every = 10;
};

struct PairedRun {
  MeanShift shift;
  double discrepancy = 0.0;  // sup_t |(u - eta, u_t) - w_shifted(t)|_{X^0}
  double relative_discrepancy = 0.0;  // discrepancy / sup_t |w_shifted(t)|_{X^0}
  Trajectory original, transformed;
};

// Runs the nonlinear system from w0 and the shifted system from the
// transformed data and compares them at every recorded time.
PairedRun paired_mean_shift_run(const StateVector& w0, const PairedRunOptions& opt);

// Data of the differentiated closed loop: with v = u_t and w = v_t,
//   phi1 = phi0'' - beta phi0'''' + phi0'''''' - K G psi0  (= u_tt(0)),
//   psi1 = psi0'' - beta psi0'''' + psi0'''''' - K G phi1  (= v_tt(0)).
struct BootstrapData {
  FourierField phi1, psi1;
  double mean_phi1 = 0.0, mean_psi1 = 0.0;
  // Share of the H^6 norm of phi0 in the outermost mode, a resolution indicator.
  double tail_fraction = 0.0;
};

BootstrapData bootstrap_systems(const StateVector& w0, double K, const GProfile& g, Beta beta);

struct BootstrapCheck {
  BootstrapData data;
  // sup_t |v(t) - u_t(t)|_{H^0} with v from the system started at (psi0, phi1).
  double derivative_mismatch = 0.0;
  // Same comparison against a central difference of u in t.
  double finite_difference_mismatch = 0.0;
};

// Linear closed loop from w0 and from (psi0, phi1) on [0, T].
BootstrapCheck bootstrap_paired_run(const StateVector& w0, double K, const GProfile& g, Beta beta,
                                    double T = 1.0, double dt = 1e-3);

}  // namespace boussctl
