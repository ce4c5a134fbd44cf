#include "qarch/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace qarch::fft {

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

namespace {

// Twiddle table for size n (n/2 roots), cached per thread.
const std::vector<std::complex<double>>& twiddles(std::size_t n) {
  thread_local std::vector<std::pair<std::size_t, std::vector<std::complex<double>>>> cache;
  for (auto& e : cache)
    if (e.first == n) return e.second;
  std::vector<std::complex<double>> w(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double ang = -2.0 * M_PI * static_cast<double>(k) / static_cast<double>(n);
    w[k] = {std::cos(ang), std::sin(ang)};
  }
  cache.emplace_back(n, std::move(w));
  return cache.back().second;
}

}  // namespace

void transform(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("fft: size must be a power of two");
  if (n == 1) return;
  // bit-reversal permutation
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  const auto& w = twiddles(n);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t step = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        std::complex<double> tw = w[k * step];
        if (inverse) tw = std::conj(tw);
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * tw;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
  if (inverse) {
    const double inv_n = 1.0 / static_cast<double>(n);
    for (auto& x : a) x *= inv_n;
  }
}

std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b,
                             std::size_t out_len) {
  const std::size_t full = a.size() + b.size();
  const std::size_t n = next_pow2(full);
  std::vector<std::complex<double>> fa(n), fb(n);
  for (std::size_t i = 0; i < a.size(); ++i) fa[i] = a[i];
  for (std::size_t i = 0; i < b.size(); ++i) fb[i] = b[i];
  transform(fa, false);
  transform(fb, false);
  for (std::size_t i = 0; i < n; ++i) fa[i] *= fb[i];
  transform(fa, true);
  std::vector<double> out(out_len, 0.0);
  for (std::size_t i = 0; i < std::min(out_len, n); ++i) out[i] = fa[i].real();
  return out;
}

}  // namespace qarch::fft
