#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "impedukt/errors.hpp"

namespace impedukt {

using cdouble = std::complex<double>;

namespace detail {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// In-place iterative radix-2 transform. sign = -1 forward, +1 inverse (unscaled).
inline void fft_radix2(std::vector<cdouble>& a, int sign) {
  const std::size_t n = a.size();
  if (n < 2) return;
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
    const cdouble wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      cdouble w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const cdouble u = a[i + k];
        const cdouble v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

// Bluestein's chirp transform for arbitrary length.
inline void fft_bluestein(std::vector<cdouble>& a, int sign) {
  const std::size_t n = a.size();
  std::size_t m = 1;
  while (m < 2 * n + 1) m <<= 1;

  std::vector<cdouble> chirp(n);
  for (std::size_t k = 0; k < n; ++k) {
    // angle = pi * k^2 / n, with k^2 reduced mod 2n to keep the argument small
    const std::size_t k2 = (k * k) % (2 * n);
    const double ang = sign * std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n);
    chirp[k] = cdouble(std::cos(ang), std::sin(ang));
  }

  std::vector<cdouble> p(m, cdouble(0.0, 0.0));
  std::vector<cdouble> q(m, cdouble(0.0, 0.0));
  for (std::size_t k = 0; k < n; ++k) p[k] = a[k] * chirp[k];
  q[0] = std::conj(chirp[0]);
  for (std::size_t k = 1; k < n; ++k) q[k] = q[m - k] = std::conj(chirp[k]);

  fft_radix2(p, -1);
  fft_radix2(q, -1);
  for (std::size_t k = 0; k < m; ++k) p[k] *= q[k];
  fft_radix2(p, +1);

  const double scale = 1.0 / static_cast<double>(m);
  for (std::size_t k = 0; k < n; ++k) a[k] = p[k] * chirp[k] * scale;
}

}  // namespace detail

/// Forward DFT: X[k] = sum_n x[n] e^{-2*pi*i*k*n/N}. Any length.
inline std::vector<cdouble> dft(std::vector<cdouble> x) {
  if (detail::is_power_of_two(x.size()))
    detail::fft_radix2(x, -1);
  else
    detail::fft_bluestein(x, -1);
  return x;
}

/// Inverse DFT with the 1/N normalization.
inline std::vector<cdouble> idft(std::vector<cdouble> x) {
  if (detail::is_power_of_two(x.size()))
    detail::fft_radix2(x, +1);
  else
    detail::fft_bluestein(x, +1);
  const double scale = x.empty() ? 1.0 : 1.0 / static_cast<double>(x.size());
  for (auto& v : x) v *= scale;
  return x;
}

inline std::vector<cdouble> dft_real(const std::vector<double>& x) {
  std::vector<cdouble> c(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) c[i] = cdouble(x[i], 0.0);
  return dft(std::move(c));
}

}  // namespace impedukt
