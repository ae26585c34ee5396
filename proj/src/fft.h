#pragma once

#include <complex>
#include <span>

namespace boussctl::detail {

// In-place complex DFT of length in.size() backed by FFTW.
// sign = +1 evaluates sum_m c_m e^{+2 pi i j m / M} (synthesis),
// sign = -1 the analysis sum without the 1/M factor.
void dft(std::span<std::complex<double>> data, int sign);

}  // namespace boussctl::detail
