#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace qarch::fft {

std::size_t next_pow2(std::size_t n);

// In-place iterative radix-2 transform; a.size() must be a power of two.
// inverse = true applies the 1/N scaling.
void transform(std::vector<std::complex<double>>& a, bool inverse);

// Linear convolution of two real sequences, truncated to out_len terms.
std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b,
                             std::size_t out_len);

}  // namespace qarch::fft
