#pragma once

#include <cmath>
#include <complex>

namespace boussctl::detail {

// Scalar kernels of the per-mode exponential integrator for L = [[0, 1], [-w2, 0]].
// With x = w2 h^2 they are the even/odd parts of e^{hL}, phi1(hL), phi2(hL):
//   c0 = sum (-x)^m/(2m)!,   s1 = sum (-x)^m/(2m+1)!,
//   c2 = sum (-x)^m/(2m+2)!, s3 = sum (-x)^m/(2m+3)!.
// x may be negative (w2 < 0 gives hyperbolic motion).
struct Kernels {
  double c0, s1, c2, s3;
};

inline Kernels kernels(double x) {
  Kernels r{};
  if (std::abs(x) < 1.0) {
    double c0 = 0.0, s1 = 0.0, c2 = 0.0, s3 = 0.0;
    double term = 1.0;  // (-x)^m / (2m)!
    for (int m = 0; m < 24; ++m) {
      const double a = 2.0 * m;
      c0 += term;
      const double t1 = term / (a + 1.0);
      s1 += t1;
      const double t2 = t1 / (a + 2.0);
      c2 += t2;
      s3 += t2 / (a + 3.0);
      term = -t2 * x;
    }
    r = {c0, s1, c2, s3};
  } else if (x > 0.0) {
    const double th = std::sqrt(x);
    const double c = std::cos(th), s = std::sin(th);
    r = {c, s / th, (1.0 - c) / x, (th - s) / (x * th)};
  } else {
    const double th = std::sqrt(-x);
    const double c = std::cosh(th), s = std::sinh(th);
    r = {c, s / th, (c - 1.0) / (-x), (s - th) / (-x * th)};
  }
  return r;
}

// Real 2x2 matrix acting on a modal pair (u_k, v_k).
struct Mat2 {
  double a = 1, b = 0, c = 0, d = 1;

  void apply(std::complex<double>& u, std::complex<double>& v) const {
    const std::complex<double> nu = a * u + b * v;
    v = c * u + d * v;
    u = nu;
  }
  void apply_add(std::complex<double> fu, std::complex<double> fv, std::complex<double>& u,
                 std::complex<double>& v) const {
    u += a * fu + b * fv;
    v += c * fu + d * fv;
  }
};

// E = e^{hL}, P1 = h phi1(hL), P2 = h phi2(hL) for one mode.
struct StepMatrices {
  Mat2 e, p1, p2;
};

inline StepMatrices step_matrices(double w2, double h) {
  const Kernels kr = kernels(w2 * h * h);
  // alpha I + gamma h L = [[alpha, gamma h], [-gamma h w2, alpha]]
  auto make = [&](double alpha, double gamma, double scale) {
    return Mat2{scale * alpha, scale * gamma * h, -scale * gamma * h * w2, scale * alpha};
  };
  return StepMatrices{make(kr.c0, kr.s1, 1.0), make(kr.s1, kr.c2, h), make(kr.c2, kr.s3, h)};
}

// phi1(z) = (e^z - 1)/z and phi2(z) = (e^z - 1 - z)/z^2, accurate near z = 0.
inline std::complex<double> phi1(std::complex<double> z) {
  if (std::abs(z) < 1.0) {
    std::complex<double> sum = 0.0, term = 1.0;
    for (int m = 1; m < 24; ++m) {
      sum += term;
      term *= z / static_cast<double>(m + 1);
    }
    return sum;
  }
  return (std::exp(z) - 1.0) / z;
}

inline std::complex<double> phi2(std::complex<double> z) {
  if (std::abs(z) < 1.0) {
    std::complex<double> sum = 0.0, term = 0.5;
    for (int m = 2; m < 26; ++m) {
      sum += term;
      term *= z / static_cast<double>(m + 1);
    }
    return sum;
  }
  return (std::exp(z) - 1.0 - z) / (z * z);
}

}  // namespace boussctl::detail
