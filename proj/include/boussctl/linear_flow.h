#pragma once

#include <string>
#include <vector>

#include "boussctl/fourier_field.h"
#include "boussctl/mode_basis.h"

namespace boussctl {

struct ModePair {
  cplx u;
  cplx v;
};

// Exact solution of (u, v)' = (v, -omega_k^2 u) after time t (any sign).
// k = 0 is the Jordan block: u0 + t v0, v0.
ModePair propagate_mode(int k, ModePair w, double t, Beta beta);
ModePair propagate_mode(int k, ModePair w, double t, const LinearSymbol& sym);

// W(t) applied mode by mode.
StateVector W_group(const StateVector& w, double t, Beta beta);
StateVector W_group(const StateVector& w, double t, const LinearSymbol& sym);

// A w = (v, -omega_k^2 u) evaluated spectrally.
StateVector apply_generator(const StateVector& w, Beta beta);

enum class Quadrature {
  trapezoid,  // W(T - t_i) f_i with trapezoid weights
  simpson,    // composite Simpson; needs an even number of intervals
  // f linearly interpolated between samples, W integrated exactly.
  // Second order with an error constant independent of omega_k.
  exponential_trapezoid,
};

std::string to_string(Quadrature q);
Quadrature quadrature_from_string(const std::string& name);
int quadrature_order(Quadrature q);

struct DuhamelResult {
  StateVector state;
  Quadrature rule;
  int order;
  double step;
};

// W(T) w0 + int_0^T W(T - tau) f(tau) dtau where forcing[i] = f(i T / n),
// n = forcing.size() - 1. Throws ConstraintViolation for an empty grid, a
// single sample with T > 0, or Simpson on an odd number of intervals.
DuhamelResult duhamel_forced(const StateVector& w0, const std::vector<StateVector>& forcing,
                             double T, Beta beta, Quadrature rule = Quadrature::simpson);
DuhamelResult duhamel_forced(const StateVector& w0, const std::vector<StateVector>& forcing,
                             double T, const LinearSymbol& sym, Quadrature rule);

struct ConservationReport {
  double mean_v_drift = 0.0;  // max |[v](t) - [v](0)|
  double mean_u_drift = 0.0;  // max |[u](t) - [u](0) - t [v](0)|
};

// Mean-mode laws of the forced system when the forcing has zero integral.
ConservationReport conservation_check(const std::vector<double>& times,
                                      const std::vector<StateVector>& states);

}  // namespace boussctl
