#pragma once

#include "boussctl/fourier_field.h"

namespace boussctl {

// Localization profile g of the distributed control Gh = g (h - int_S g h dy).
//
// Normalized so that int_S g dx = 1 (g_0 = 1/2pi); that is the normalization
// under which Gh has zero spatial integral for every h.
class GProfile {
 public:
  enum class Validation { strict, relaxed };

  // strict: checks reality, finiteness, int g = 1 and g >= 0 on the
  // collocation grid, throwing ConstraintViolation on failure.
  // relaxed: checks only reality and finiteness (used by negative controls).
  explicit GProfile(FourierField coeffs, Validation v = Validation::strict);

  // g = 1/2pi.
  static GProfile uniform(int max_mode);
  // g = (1 + cos x) / 2pi.
  static GProfile raised_cosine(int max_mode);

  const FourierField& coeffs() const { return g_; }
  int max_mode() const { return g_.max_mode(); }

  // int_S g dx.
  double total_mass() const;
  // Minimum and maximum of g on the collocation grid used by apply_G.
  double grid_min() const;
  double grid_max() const;

 private:
  FourierField g_;
};

// Gh = P_N [ g (h - int_S g h dy) ], pseudo-spectral product on a padded grid.
// Throws DimensionError when h and g have different truncations.
FourierField apply_G(const FourierField& h, const GProfile& g);

}  // namespace boussctl
