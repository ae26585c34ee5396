#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace boussctl {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Truncated Fourier series f(x) = sum_{|k|<=N} c_k e^{ikx} on S = [0, 2pi].
//
// Coefficients are stored densely for k = -N..N. With this convention the
// spatial mean (1/2pi) int_S f dx is c_0 and the integral is 2pi c_0.
class FourierField {
 public:
  FourierField() : FourierField(0) {}
  explicit FourierField(int max_mode);
  FourierField(int max_mode, std::vector<cplx> coeffs);

  static FourierField constant(int max_mode, double value);
  // e^{ikx} scaled by amp.
  static FourierField mode(int max_mode, int k, cplx amp = 1.0);
  static FourierField cosine(int max_mode, int k, double amp = 1.0);
  static FourierField sine(int max_mode, int k, double amp = 1.0);

  int max_mode() const { return n_; }
  std::size_t size() const { return c_.size(); }

  cplx& operator[](int k) { return c_[static_cast<std::size_t>(k + n_)]; }
  const cplx& operator[](int k) const { return c_[static_cast<std::size_t>(k + n_)]; }

  std::span<cplx> coeffs() { return c_; }
  std::span<const cplx> coeffs() const { return c_; }

  // Copy with a different truncation; extra modes are zero, dropped modes lost.
  FourierField resized(int max_mode) const;

  // max_k |c_{-k} - conj(c_k)|.
  double reality_defect() const;
  bool is_real(double tol = 1e-12) const { return reality_defect() <= tol; }
  bool is_finite() const;
  // Replace c_k by the Hermitian-symmetric part (c_k + conj(c_{-k}))/2.
  void enforce_reality();
  double max_abs() const;

  FourierField& operator+=(const FourierField& o);
  FourierField& operator-=(const FourierField& o);
  FourierField& operator*=(cplx a);

 private:
  int n_;
  std::vector<cplx> c_;
};

FourierField operator+(FourierField a, const FourierField& b);
FourierField operator-(FourierField a, const FourierField& b);
FourierField operator*(cplx a, FourierField f);
FourierField operator*(FourierField f, cplx a);
FourierField operator-(FourierField f);

// The pair (u, u_t) of the first-order form of the equation.
struct StateVector {
  FourierField u;
  FourierField v;

  StateVector() = default;
  explicit StateVector(int max_mode) : u(max_mode), v(max_mode) {}
  StateVector(FourierField u_, FourierField v_);

  int max_mode() const { return u.max_mode(); }
  bool is_real(double tol = 1e-12) const { return u.is_real(tol) && v.is_real(tol); }
  bool is_finite() const { return u.is_finite() && v.is_finite(); }

  StateVector& operator+=(const StateVector& o);
  StateVector& operator-=(const StateVector& o);
  StateVector& operator*=(cplx a);
};

StateVector operator+(StateVector a, const StateVector& b);
StateVector operator-(StateVector a, const StateVector& b);
StateVector operator*(cplx a, StateVector w);

// Spatial average (1/2pi) int_S f dx, i.e. the real part of c_0.
double mean_value(const FourierField& f);
// int_S f dx = 2pi c_0.
cplx integral(const FourierField& f);

// Normalized L^2 pairing (1/2pi) int_S f conj(g) dx = sum_k f_k conj(g_k).
cplx l2_inner(const FourierField& f, const FourierField& g);

// c_k <- (ik)^order c_k.
FourierField spatial_derivative(const FourierField& f, int order);

// Samples f(x_j), x_j = 2pi j / M. Requires M >= 2N+1.
std::vector<cplx> to_grid(const FourierField& f, int grid_size);
// Discrete transform of M samples truncated to modes |k| <= max_mode.
// Requires M >= 2 max_mode + 1.
FourierField from_grid(std::span<const cplx> samples, int max_mode);

// Smallest grid that represents a product of two fields with modes <= N
// without aliasing the retained modes |k| <= N.
int dealiased_grid_size(int max_mode);

// P_N(f g) computed pseudo-spectrally on a padded grid.
FourierField product(const FourierField& f, const FourierField& g);

}  // namespace boussctl
