#pragma once

#include <complex>
#include <span>

namespace gclab::detail {

// Unnormalised DFT: out_k = sum_j in_j exp(-+ 2 pi i jk / n). `in` and `out`
// may alias. Plans and scratch buffers are thread-local.
void fft_forward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out);
void fft_inverse(std::span<const std::complex<double>> in, std::span<std::complex<double>> out);

}  // namespace gclab::detail
