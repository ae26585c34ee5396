#include "boussctl/control_profile.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "boussctl/errors.h"

namespace boussctl {

namespace {

constexpr double kMassTol = 1e-12;

std::vector<double> real_samples(const FourierField& f) {
  const auto s = to_grid(f, dealiased_grid_size(f.max_mode()));
  std::vector<double> r(s.size());
  std::transform(s.begin(), s.end(), r.begin(), [](const cplx& z) { return z.real(); });
  return r;
}

}  // namespace

GProfile::GProfile(FourierField coeffs, Validation v) : g_(std::move(coeffs)) {
  if (!g_.is_finite()) throw ConstraintViolation("g profile has non-finite coefficients");
  if (!g_.is_real(1e-14)) throw ConstraintViolation("g profile is not real-valued");
  if (v == Validation::relaxed) return;
  if (std::abs(total_mass() - 1.0) > kMassTol) {
    std::ostringstream os;
    os << "g profile must satisfy int_S g dx = 1, got " << total_mass();
    throw ConstraintViolation(os.str());
  }
  if (grid_min() < -1e-14) {
    std::ostringstream os;
    os << "g profile must be nonnegative on the grid, min = " << grid_min();
    throw ConstraintViolation(os.str());
  }
}

GProfile GProfile::uniform(int max_mode) {
  return GProfile(FourierField::constant(max_mode, 1.0 / kTwoPi));
}

GProfile GProfile::raised_cosine(int max_mode) {
  FourierField g = FourierField::constant(max_mode, 1.0 / kTwoPi);
  if (max_mode >= 1) {
    g[1] = 0.5 / kTwoPi;
    g[-1] = 0.5 / kTwoPi;
  }
  return GProfile(std::move(g));
}

double GProfile::total_mass() const { return integral(g_).real(); }

double GProfile::grid_min() const {
  const auto r = real_samples(g_);
  return *std::min_element(r.begin(), r.end());
}

double GProfile::grid_max() const {
  const auto r = real_samples(g_);
  return *std::max_element(r.begin(), r.end());
}

FourierField apply_G(const FourierField& h, const GProfile& g) {
  if (h.max_mode() != g.max_mode()) {
    throw DimensionError("apply_G: field and g profile have different max_mode");
  }
  // int_S g h dy = 2pi sum_k g_k h_{-k}
  const FourierField& gc = g.coeffs();
  cplx gh{};
  for (int k = -h.max_mode(); k <= h.max_mode(); ++k) gh += gc[k] * h[-k];
  gh *= kTwoPi;
  FourierField shifted = h;
  shifted[0] -= gh;
  return product(gc, shifted);
}

}  // namespace boussctl
