// Radix-2 complex FFT and linear convolution / autocorrelation helpers.
//
// Long coefficient convolutions (MA(inf) filtering, xi tables, transform-based
// sample autocovariances) all reduce to these two primitives. Inputs are
// padded to the next power of two internally; small problems fall back to the
// direct O(mn) loop, which is faster below the crossover.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace longmem::fft {

inline std::size_t next_pow2(std::size_t n) {
  std::size_t m = 1;
  while (m < n) m <<= 1;
  return m;
}

// In-place iterative Cooley-Tukey. inverse=true applies the conjugate
// transform and the 1/N scale. Size must be a power of two.
inline void transform(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0)
    throw std::invalid_argument("fft: size must be a power of two");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 2.0 : -2.0) * std::numbers::pi / double(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        // refresh the twiddle periodically to stop rounding drift on
        // very long blocks
        if ((k & 255u) == 0u && k != 0u)
          w = std::polar(1.0, ang * double(k));
        const auto u = a[i + k];
        const auto v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse) {
    for (auto& z : a) z /= double(n);
  }
}

inline std::vector<double> convolve_direct(std::span<const double> a,
                                           std::span<const double> b,
                                           std::size_t out_len) {
  std::vector<double> out(out_len, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    const std::size_t jmax = std::min(b.size(), out_len > i ? out_len - i : 0);
    for (std::size_t j = 0; j < jmax; ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

inline std::vector<double> convolve_fft(std::span<const double> a,
                                        std::span<const double> b,
                                        std::size_t out_len) {
  const std::size_t full = a.size() + b.size() - 1;
  const std::size_t n = next_pow2(full);
  std::vector<std::complex<double>> fa(n), fb(n);
  for (std::size_t i = 0; i < a.size(); ++i) fa[i] = a[i];
  for (std::size_t i = 0; i < b.size(); ++i) fb[i] = b[i];
  transform(fa, false);
  transform(fb, false);
  for (std::size_t i = 0; i < n; ++i) fa[i] *= fb[i];
  transform(fa, true);
  std::vector<double> out(std::min(out_len, full));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fa[i].real();
  out.resize(out_len, 0.0);
  return out;
}

// Linear convolution truncated to out_len terms.
inline std::vector<double> convolve(std::span<const double> a,
                                    std::span<const double> b,
                                    std::size_t out_len) {
  if (a.empty() || b.empty()) return std::vector<double>(out_len, 0.0);
  // direct cost ~ |a||b|, fft cost ~ 5 N log2 N with N = next_pow2(|a|+|b|)
  const double direct = double(a.size()) * double(b.size());
  const std::size_t n = next_pow2(a.size() + b.size() - 1);
  const double viafft = 15.0 * double(n) * std::log2(double(n));
  if (direct <= viafft) return convolve_direct(a, b, out_len);
  return convolve_fft(a, b, out_len);
}

// Lagged self-products r_j = sum_k a_k a_{k+j}, j = 0..maxlag.
inline std::vector<double> autocorrelation(std::span<const double> a,
                                           std::size_t maxlag) {
  const std::size_t la = a.size();
  if (la == 0) return std::vector<double>(maxlag + 1, 0.0);
  const double direct = double(la) * double(maxlag + 1);
  const std::size_t n = next_pow2(la + maxlag + 1);
  const double viafft = 10.0 * double(n) * std::log2(double(n));
  std::vector<double> out(maxlag + 1, 0.0);
  if (direct <= viafft) {
    for (std::size_t j = 0; j <= maxlag && j < la; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k + j < la; ++k) s += a[k] * a[k + j];
      out[j] = s;
    }
    return out;
  }
  std::vector<std::complex<double>> fa(n);
  for (std::size_t i = 0; i < la; ++i) fa[i] = a[i];
  transform(fa, false);
  for (auto& z : fa) z = std::norm(z);
  transform(fa, true);
  for (std::size_t j = 0; j <= maxlag && j < la; ++j) out[j] = fa[j].real();
  return out;
}

}  // namespace longmem::fft
