#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace tabla {

using cplx = std::complex<double>;

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

/// In-place iterative radix-2 FFT. Size must be a power of two.
/// The inverse transform includes the 1/N normalization.
inline void fft_inplace(std::vector<cplx>& a, bool inverse = false) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("fft_inplace: size must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * std::numbers::pi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
        const cplx wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                cplx u = a[i + j];
                cplx v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (auto& x : a) x *= inv;
    }
}

/// Forward FFT of a real signal, zero-padded to `nfft` (power of two).
inline std::vector<cplx> fft_real(const std::vector<double>& x, std::size_t nfft) {
    std::vector<cplx> a(nfft, cplx(0.0, 0.0));
    const std::size_t m = std::min(nfft, x.size());
    for (std::size_t i = 0; i < m; ++i) a[i] = cplx(x[i], 0.0);
    fft_inplace(a, false);
    return a;
}

/// Linear convolution of two real sequences via FFT.
inline std::vector<double> fft_convolve(const std::vector<double>& x, const std::vector<double>& h) {
    const std::size_t out_len = x.size() + h.size() - 1;
    const std::size_t nfft = next_pow2(out_len);
    std::vector<cplx> a = fft_real(x, nfft);
    std::vector<cplx> b = fft_real(h, nfft);
    for (std::size_t i = 0; i < nfft; ++i) a[i] *= b[i];
    fft_inplace(a, true);
    std::vector<double> y(out_len);
    for (std::size_t i = 0; i < out_len; ++i) y[i] = a[i].real();
    return y;
}

/// Direct linear convolution; preferred for short kernels.
inline std::vector<double> direct_convolve(const std::vector<double>& x, const std::vector<double>& h) {
    std::vector<double> y(x.size() + h.size() - 1, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double xi = x[i];
        if (xi == 0.0) continue;
        for (std::size_t j = 0; j < h.size(); ++j) y[i + j] += xi * h[j];
    }
    return y;
}

inline std::vector<double> convolve(const std::vector<double>& x, const std::vector<double>& h) {
    if (x.size() * h.size() > (1u << 18)) return fft_convolve(x, h);
    return direct_convolve(x, h);
}

}  // namespace tabla
