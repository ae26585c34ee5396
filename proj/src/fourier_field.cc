#include "boussctl/fourier_field.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "boussctl/errors.h"
#include "fft.h"

namespace boussctl {

namespace {

void require_same(int a, int b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": max_mode mismatch (" + std::to_string(a) +
                         " vs " + std::to_string(b) + ")");
  }
}

int positive_mod(int a, int m) {
  const int r = a % m;
  return r < 0 ? r + m : r;
}

bool smooth_size(int m) {
  for (int p : {2, 3, 5}) {
    while (m % p == 0) m /= p;
  }
  return m == 1;
}

}  // namespace

FourierField::FourierField(int max_mode) : n_(max_mode) {
  if (max_mode < 0) throw ConstraintViolation("FourierField: negative max_mode");
  c_.assign(static_cast<std::size_t>(2 * max_mode + 1), cplx{});
}

FourierField::FourierField(int max_mode, std::vector<cplx> coeffs)
    : n_(max_mode), c_(std::move(coeffs)) {
  if (max_mode < 0) throw ConstraintViolation("FourierField: negative max_mode");
  if (c_.size() != static_cast<std::size_t>(2 * max_mode + 1)) {
    throw DimensionError("FourierField: expected " + std::to_string(2 * max_mode + 1) +
                         " coefficients, got " + std::to_string(c_.size()));
  }
}

FourierField FourierField::constant(int max_mode, double value) {
  FourierField f(max_mode);
  f[0] = value;
  return f;
}

FourierField FourierField::mode(int max_mode, int k, cplx amp) {
  if (std::abs(k) > max_mode) throw DimensionError("FourierField::mode: |k| > N");
  FourierField f(max_mode);
  f[k] = amp;
  return f;
}

FourierField FourierField::cosine(int max_mode, int k, double amp) {
  if (k == 0) return constant(max_mode, amp);
  FourierField f(max_mode);
  f[k] += 0.5 * amp;
  f[-k] += 0.5 * amp;
  return f;
}

FourierField FourierField::sine(int max_mode, int k, double amp) {
  FourierField f(max_mode);
  if (k == 0) return f;
  // sin(kx) = (e^{ikx} - e^{-ikx}) / 2i
  f[k] += cplx(0.0, -0.5 * amp);
  f[-k] += cplx(0.0, 0.5 * amp);
  return f;
}

FourierField FourierField::resized(int max_mode) const {
  FourierField out(max_mode);
  const int m = std::min(max_mode, n_);
  for (int k = -m; k <= m; ++k) out[k] = (*this)[k];
  return out;
}

double FourierField::reality_defect() const {
  double d = 0.0;
  for (int k = 0; k <= n_; ++k) d = std::max(d, std::abs((*this)[-k] - std::conj((*this)[k])));
  return d;
}

bool FourierField::is_finite() const {
  return std::all_of(c_.begin(), c_.end(),
                     [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

void FourierField::enforce_reality() {
  for (int k = 0; k <= n_; ++k) {
    const cplx sym = 0.5 * ((*this)[k] + std::conj((*this)[-k]));
    (*this)[k] = sym;
    (*this)[-k] = std::conj(sym);
  }
}

double FourierField::max_abs() const {
  double m = 0.0;
  for (const cplx& z : c_) m = std::max(m, std::abs(z));
  return m;
}

FourierField& FourierField::operator+=(const FourierField& o) {
  require_same(n_, o.n_, "FourierField +=");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

FourierField& FourierField::operator-=(const FourierField& o) {
  require_same(n_, o.n_, "FourierField -=");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

FourierField& FourierField::operator*=(cplx a) {
  for (cplx& z : c_) z *= a;
  return *this;
}

FourierField operator+(FourierField a, const FourierField& b) { return a += b; }
FourierField operator-(FourierField a, const FourierField& b) { return a -= b; }
FourierField operator*(cplx a, FourierField f) { return f *= a; }
FourierField operator*(FourierField f, cplx a) { return f *= a; }
FourierField operator-(FourierField f) { return f *= -1.0; }

StateVector::StateVector(FourierField u_, FourierField v_) : u(std::move(u_)), v(std::move(v_)) {
  require_same(u.max_mode(), v.max_mode(), "StateVector");
}

StateVector& StateVector::operator+=(const StateVector& o) {
  u += o.u;
  v += o.v;
  return *this;
}

StateVector& StateVector::operator-=(const StateVector& o) {
  u -= o.u;
  v -= o.v;
  return *this;
}

StateVector& StateVector::operator*=(cplx a) {
  u *= a;
  v *= a;
  return *this;
}

StateVector operator+(StateVector a, const StateVector& b) { return a += b; }
StateVector operator-(StateVector a, const StateVector& b) { return a -= b; }
StateVector operator*(cplx a, StateVector w) { return w *= a; }

double mean_value(const FourierField& f) { return f[0].real(); }

cplx integral(const FourierField& f) { return kTwoPi * f[0]; }

cplx l2_inner(const FourierField& f, const FourierField& g) {
  require_same(f.max_mode(), g.max_mode(), "l2_inner");
  cplx s{};
  const auto a = f.coeffs();
  const auto b = g.coeffs();
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * std::conj(b[i]);
  return s;
}

FourierField spatial_derivative(const FourierField& f, int order) {
  if (order < 0) throw ConstraintViolation("spatial_derivative: negative order");
  FourierField out(f.max_mode());
  for (int k = -f.max_mode(); k <= f.max_mode(); ++k) {
    cplx factor = 1.0;
    for (int p = 0; p < order; ++p) factor *= cplx(0.0, static_cast<double>(k));
    out[k] = factor * f[k];
  }
  return out;
}

std::vector<cplx> to_grid(const FourierField& f, int grid_size) {
  const int n = f.max_mode();
  if (grid_size < 2 * n + 1) {
    throw DimensionError("to_grid: grid size " + std::to_string(grid_size) +
                         " < 2N+1 = " + std::to_string(2 * n + 1));
  }
  std::vector<cplx> buf(static_cast<std::size_t>(grid_size), cplx{});
  for (int k = -n; k <= n; ++k) buf[static_cast<std::size_t>(positive_mod(k, grid_size))] = f[k];
  detail::dft(buf, +1);
  return buf;
}

FourierField from_grid(std::span<const cplx> samples, int max_mode) {
  const int m = static_cast<int>(samples.size());
  if (m < 2 * max_mode + 1) {
    throw DimensionError("from_grid: " + std::to_string(m) + " samples < 2N+1 = " +
                         std::to_string(2 * max_mode + 1));
  }
  std::vector<cplx> buf(samples.begin(), samples.end());
  detail::dft(buf, -1);
  FourierField out(max_mode);
  const double inv = 1.0 / m;
  for (int k = -max_mode; k <= max_mode; ++k) {
    out[k] = buf[static_cast<std::size_t>(positive_mod(k, m))] * inv;
  }
  return out;
}

int dealiased_grid_size(int max_mode) {
  int m = std::max(3 * max_mode + 1, 4);
  while (!smooth_size(m)) ++m;
  return m;
}

FourierField product(const FourierField& f, const FourierField& g) {
  require_same(f.max_mode(), g.max_mode(), "product");
  const int m = dealiased_grid_size(f.max_mode());
  auto a = to_grid(f, m);
  const auto b = to_grid(g, m);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] *= b[i];
  return from_grid(a, f.max_mode());
}

}  // namespace boussctl
