#pragma once

#include <limits>
#include <vector>

#include "boussctl/control_profile.h"
#include "boussctl/moment_problem.h"
#include "boussctl/nonlinear_flow.h"

namespace boussctl {

// Synthesized control h(x, t) = sum_n q_n(t) [c_{1,n} S_{1,n} + c_{2,n} S_{2,n}],
// stored as the exponential sum h = sum_l e^{lambda_l t} H_l together with
// samples on a uniform time grid.
struct ControlSignal {
  int max_mode = 0;
  double T = 0.0;
  ControlCoefficients coeffs;
  ExponentialSumControl terms;
  std::vector<double> times;
  std::vector<FourierField> samples;
  double norm = 0.0;            // |h|_{L^2(0,T; H^s)}, exact through the Gram matrix
  double max_imag = 0.0;        // max imaginary part of h on the space-time sample grid
  double bound_ratio = 0.0;     // |h|^2 / (|u0|^2_{X^s} + |uT|^2_{X^s}), 0 for zero data

  FourierField at(double t) const { return terms.shapes.empty() ? FourierField(max_mode) : terms.at(t); }
};

// Builds the control from modal coefficients. time_samples >= 2 points on [0, T].
ControlSignal assemble_control(const ControlCoefficients& coeffs, const DualBasisRep& dual,
                               const std::vector<ShapeGram>& grams, double sobolev_s, int time_samples = 101);

struct ControlConfig {
  int max_mode = 16;
  Beta beta = Beta::plus_one;
  double s = 0.0;
  double T = 1.0;
  GProfile g = GProfile::raised_cosine(16);
  double max_condition = 1e10;
  double delta_floor = 1e-12;
  double mean_tol = 1e-12;
  // Verification run: linear flow driven by the control, terminal X^s error
  // relative to the larger endpoint norm must not exceed tol.
  bool verify = true;
  double tol = 1e-6;
  double verify_dt = 1e-3;
  int time_samples = 101;
};

struct ControlDiagnostics {
  double condition = 0.0;
  double duality_residual = 0.0;
  double moment_residual = 0.0;        // max_{j,n} |achieved moment - d_{j,n}|, by quadrature
  double min_normalized_delta = 0.0;
  double terminal_error = 0.0;         // relative X^s error of the verification run
  double terminal_error_abs = 0.0;
  double mean_u_drift = 0.0;
  double mean_v_drift = 0.0;
  bool verified = false;
};

// Exact controller K_T for one (N, beta, s, T, g). The dual basis and shape
// grams are computed once and shared by every synthesis.
class Controller {
 public:
  explicit Controller(ControlConfig cfg);

  const ControlConfig& config() const { return cfg_; }
  const ModeBasis& basis() const { return basis_; }
  const DualBasisRep& dual() const { return dual_; }
  const std::vector<ShapeGram>& shape_grams() const { return grams_; }

  // Moment problem of the mean-free parts after checking the mean constraints.
  MomentProblem moments(const StateVector& u0, const StateVector& uT) const;
  // Control only (no verification).
  ControlSignal synthesize(const StateVector& u0, const StateVector& uT) const;
  // Control plus diagnostics; runs the verification simulation when
  // config().verify and throws VerificationFailure above tol.
  ControlSignal synthesize(const StateVector& u0, const StateVector& uT, ControlDiagnostics& diag) const;

  // max |int e^{-lambda_n t} sigma_n <h, S_{j,n}> dt - d_{j,n}| with quadrature moments.
  double moment_residual(const ControlSignal& h, const MomentProblem& p) const;

 private:
  ControlConfig cfg_;
  ModeBasis basis_;
  DualBasisRep dual_;
  std::vector<ShapeGram> grams_;
};

// One-shot K_T.
ControlSignal K_T(const StateVector& u0, const StateVector& uT, const ControlConfig& cfg,
                  ControlDiagnostics* diag = nullptr);

struct NonlinearControlOptions {
  double tol = 1e-8;      // stop when sup_t |u^{m+1} - u^m|_{X^s} < tol * endpoint scale
  int max_iter = 20;
  double dt = 1e-4;
  // Smallness bound on the endpoint X^s norms.
  double delta = std::numeric_limits<double>::infinity();
  // Re-run the final control at dt/2 and report that terminal error as well.
  bool refine_check = true;
};

struct NonlinearControlResult {
  ControlSignal control;
  Trajectory trajectory;
  int iterations = 0;
  std::vector<double> differences;  // relative sup-t differences per iteration
  std::vector<double> ratios;       // differences[m] / differences[m-1]
  double terminal_error = 0.0;      // relative X^s error of the returned trajectory
  double terminal_error_refined = -1.0;
  ControlDiagnostics linear_diagnostics;
};

// Fixed-point iteration h^m = K_T(u0, uT - mu(T, u^m)) starting from the
// controlled linear trajectory. Throws NonConvergence after max_iter and
// ConstraintViolation when an endpoint exceeds delta.
NonlinearControlResult nonlinear_exact_control(const StateVector& u0, const StateVector& uT,
                                               const Controller& controller,
                                               const NonlinearControlOptions& opt);

}  // namespace boussctl
