#pragma once

#include "boussctl/fourier_field.h"

namespace boussctl {

// Sign of the fourth-order term.
enum class Beta : int { minus_one = -1, plus_one = 1 };

inline double value(Beta b) { return static_cast<double>(static_cast<int>(b)); }
// Throws ConstraintViolation unless b is +1 or -1.
Beta beta_from_int(int b);

class SobolevIndex {
 public:
  // Throws ConstraintViolation for s < 0 or non-finite s.
  explicit SobolevIndex(double s);
  double value() const { return s_; }

 private:
  double s_;
};

enum class NormConvention {
  standard,    // sum |c_k|^2 (1+|k|)^{2s}
  equivalent,  // sum |c_k|^2 (k^2(1 + beta k^2 + k^4))^{s/3}, weight 1 at k = 0
};

// (k^2 (1 + beta k^2 + k^4))^{s/3} for k != 0, and 1 for k = 0.
double equiv_weight(int k, Beta beta, double s);

double sobolev_norm(const FourierField& f, SobolevIndex s, NormConvention conv,
                    Beta beta = Beta::plus_one);

// X^s = H^{s+3} x H^s.
double xs_norm(const StateVector& w, SobolevIndex s, NormConvention conv,
               Beta beta = Beta::plus_one);

// Inner product inducing the equivalent X^s norm.
cplx xs_inner(const StateVector& a, const StateVector& b, SobolevIndex s, Beta beta);

}  // namespace boussctl
