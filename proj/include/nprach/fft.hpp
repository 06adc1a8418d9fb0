#pragma once

#include <complex>
#include <vector>

namespace nprach {

// Unnormalized DFT: X[k] = sum_n x[n] exp(-+j 2 pi k n / len). Safe to call
// from several threads.
std::vector<std::complex<double>> fft(const std::vector<std::complex<double>>& x, bool inverse = false);

}  // namespace nprach
