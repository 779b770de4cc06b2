#pragma once

#include <vector>

#include "coorbit/error.hpp"

namespace coorbit::fft {

// Unnormalized in-place transforms: forward uses e^{-2 pi i k n / N},
// backward uses e^{+2 pi i k n / N} and does not divide by N.
void forward(std::vector<Complex>& data);
void backward(std::vector<Complex>& data);
void forward(Complex* data, std::size_t n);
void backward(Complex* data, std::size_t n);

// Signed frequency index of DFT bin k for length n (k >= n/2 maps to k - n).
inline long signed_bin(std::size_t k, std::size_t n) {
    return k < (n + 1) / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(n);
}

}  // namespace coorbit::fft
