#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace flowmem::detail {

/// Forward real-to-complex DFT, X_k = sum_j x_j exp(-2 pi i j k / n), k = 0..n/2.
std::vector<std::complex<double>> forward_real_dft(std::span<const double> x);

/// Unnormalized inverse of forward_real_dft: returns sum_k X_k exp(+2 pi i j k / n)
/// over the full Hermitian-extended spectrum, j = 0..n-1. half.size() must be n/2 + 1.
std::vector<double> backward_real_dft(std::span<const std::complex<double>> half, std::size_t n);

}  // namespace flowmem::detail
