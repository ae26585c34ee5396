#pragma once

#include <cstdint>

#include "boussctl/control_profile.h"
#include "boussctl/mode_basis.h"

namespace boussctl {

struct BasisDiagnostics {
  int max_mode = 0;
  // max |<phi_a, phi_b>_{X^s} - delta_ab| over phi_0 and all phi_{j,n}
  double orthonormality_deviation = 0.0;
  // max |A phi - lambda phi|_{X^s} / |lambda| over phi_{j,n}, plus |A phi_0|
  double eigen_residual = 0.0;
  // |det L_k + 2i| strictly decreasing for k >= det_monotone_from
  bool det_monotone = false;
  int det_monotone_from = 1;
  double det_gap_last = 0.0;  // |det L_N + 2i|
};

BasisDiagnostics basis_diagnostics(const ModeBasis& basis);

struct GOperatorDiagnostics {
  int trials = 0;
  double max_mean = 0.0;          // max |int_S Gh| / |h|
  double max_asymmetry = 0.0;     // max |<Gh, f> - <h, Gf>| / (|h| |f|)
  double max_imag = 0.0;          // reality defect of Gh relative to |h|
};

// Random real fields with normal coefficients (decay^|k| envelope).
GOperatorDiagnostics g_operator_diagnostics(const GProfile& g, int trials, std::uint64_t seed,
                                            double decay = 1.0);

struct GroupDiagnostics {
  int trials = 0;
  double group_law = 0.0;     // max |W(t+s)w - W(t)W(s)w|_{X^0} / |w|
  double inverse = 0.0;       // max |W(-t)W(t)w - w| / |w|
  double conservation = 0.0;  // max ||W(t)w|_{X^s} - |w|_{X^s}| / |w|_{X^s}, zero-mean w
};

// Times uniform in [0, t_max]; data spectra decay like decay^|k| so that
// rounding in the high modes stays below the tested level.
GroupDiagnostics group_diagnostics(int max_mode, Beta beta, double s, int trials, std::uint64_t seed,
                                   double t_max = 10.0, double decay = 0.5);

}  // namespace boussctl
