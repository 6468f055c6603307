#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tabla/audio.hpp"
#include "tabla/fft.hpp"

namespace tabla {

/// Morlet CWT configuration. s0 and num_scales of zero mean "derive from
/// the clip" (s0 = 2*dt, scales up to a quarter of the clip duration).
struct WaveletSpec {
    double omega0 = 6.0;   // center frequency parameter
    double dj = 0.125;     // octaves per scale step
    double s0 = 0.0;       // smallest scale, seconds
    int num_scales = 0;

    /// Conversion between scale and Fourier-equivalent period.
    double fourier_factor() const {
        return 4.0 * std::numbers::pi / (omega0 + std::sqrt(2.0 + omega0 * omega0));
    }
    double scale_to_frequency(double s) const { return 1.0 / (fourier_factor() * s); }
    double frequency_to_scale(double f) const { return 1.0 / (fourier_factor() * f); }
};

/// |W(s, t)|^2 over (scale, time), with the scale-to-frequency map and the
/// cone of influence (e-folding time sqrt(2)*s).
struct Scalogram {
    std::vector<std::vector<double>> power;  // [scale][time]
    std::vector<double> scales;              // seconds
    std::vector<double> frequencies;         // Hz, strictly decreasing
    std::vector<double> coi;                 // per time index: max reliable scale, s
    double dt = 0;
    bool scale_exceeds_half_duration = false;

    std::size_t num_scales() const { return scales.size(); }
    std::size_t num_times() const { return power.empty() ? 0 : power.front().size(); }

    std::size_t nearest_scale_index(double freq_hz) const {
        if (frequencies.empty()) throw std::invalid_argument("empty scalogram");
        if (freq_hz > frequencies.front() || freq_hz < frequencies.back())
            throw std::out_of_range("frequency outside scalogram range");
        std::size_t best = 0;
        double bd = std::abs(std::log(frequencies[0] / freq_hz));
        for (std::size_t i = 1; i < frequencies.size(); ++i) {
            const double d = std::abs(std::log(frequencies[i] / freq_hz));
            if (d < bd) { bd = d; best = i; }
        }
        return best;
    }
};

/// Frequency-domain CWT with the Morlet wavelet, Torrence-style
/// conventions: daughter norm sqrt(2*pi*s/dt), zero padding to the next
/// power of two, COI flagging instead of hard errors for large scales.
inline Scalogram cwt_transform(const AudioClip& clip, WaveletSpec spec = WaveletSpec{}) {
    if (clip.samples.empty()) throw std::invalid_argument("empty clip");
    if (!(spec.omega0 >= 5.0)) throw std::invalid_argument("omega0 must be >= 5 (admissibility regime)");
    if (!(spec.dj > 0.0 && spec.dj <= 1.0)) throw std::invalid_argument("dj must be in (0, 1]");
    const double dt = 1.0 / clip.sample_rate;
    const std::size_t n = clip.samples.size();
    if (spec.s0 <= 0.0) spec.s0 = 2.0 * dt;
    if (spec.s0 < 2.0 * dt) throw std::invalid_argument("s0 must be at least 2*dt");
    if (spec.num_scales <= 0)
        spec.num_scales = 1 + static_cast<int>(std::floor(
            std::log2(static_cast<double>(n) * dt / (4.0 * spec.s0)) / spec.dj));
    if (spec.num_scales <= 0) spec.num_scales = 1;

    const std::size_t nfft = next_pow2(n);
    std::vector<cplx> xhat = fft_real(clip.samples, nfft);

    Scalogram sc;
    sc.dt = dt;
    sc.scales.resize(static_cast<std::size_t>(spec.num_scales));
    sc.frequencies.resize(sc.scales.size());
    sc.power.assign(sc.scales.size(), std::vector<double>(n, 0.0));

    const double norm_pi = std::pow(std::numbers::pi, -0.25);
    std::vector<cplx> w(nfft);
    for (std::size_t j = 0; j < sc.scales.size(); ++j) {
        const double s = spec.s0 * std::pow(2.0, spec.dj * static_cast<double>(j));
        sc.scales[j] = s;
        sc.frequencies[j] = spec.scale_to_frequency(s);
        if (std::sqrt(2.0) * s > 0.5 * static_cast<double>(n) * dt) sc.scale_exceeds_half_duration = true;
        const double norm = norm_pi * std::sqrt(2.0 * std::numbers::pi * s / dt);
        for (std::size_t k = 0; k < nfft; ++k) {
            // angular frequency of bin k (positive half only)
            if (k > 0 && k <= nfft / 2) {
                const double omega = 2.0 * std::numbers::pi * static_cast<double>(k) /
                                     (static_cast<double>(nfft) * dt);
                const double arg = s * omega - spec.omega0;
                w[k] = xhat[k] * (norm * std::exp(-0.5 * arg * arg));
            } else {
                w[k] = cplx(0.0, 0.0);
            }
        }
        fft_inplace(w, true);
        auto& row = sc.power[j];
        for (std::size_t i = 0; i < n; ++i) row[i] = std::norm(w[i]);
    }

    sc.coi.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double edge = std::min(static_cast<double>(i), static_cast<double>(n - 1 - i)) * dt;
        sc.coi[i] = edge / std::sqrt(2.0);  // scales above this are edge-affected
    }
    return sc;
}

/// Time-mean power per scale, samples inside the COI omitted. Scales whose
/// every sample is inside the COI are reported absent.
inline std::vector<std::pair<double, double>> global_wavelet_spectrum(const Scalogram& sc) {
    std::vector<std::pair<double, double>> out;
    for (std::size_t j = 0; j < sc.num_scales(); ++j) {
        double sum = 0;
        std::size_t cnt = 0;
        for (std::size_t i = 0; i < sc.num_times(); ++i) {
            if (sc.coi[i] >= sc.scales[j]) {
                sum += sc.power[j][i];
                ++cnt;
            }
        }
        if (cnt > 0) out.emplace_back(sc.frequencies[j], sum / static_cast<double>(cnt));
    }
    return out;
}

struct AdmissibilityReport {
    bool admissible = false;
    double zero_frequency_magnitude = 0;  // |Psi(0)|
    bool band_pass_shape = false;         // single-maximum magnitude
};

/// Morlet spectrum Psi(omega) = pi^{-1/4} exp(-(omega - omega0)^2 / 2).
inline double morlet_spectrum(double omega, double omega0) {
    const double a = omega - omega0;
    return std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * a * a);
}

/// Evaluates |Psi(0)| and checks the band-pass (rise-then-fall) shape.
inline AdmissibilityReport check_admissibility(double omega0) {
    AdmissibilityReport r;
    r.zero_frequency_magnitude = morlet_spectrum(0.0, omega0);
    r.admissible = r.zero_frequency_magnitude * r.zero_frequency_magnitude <= 1e-10;
    // scan [0, 3*omega0] for a single interior maximum
    const int n = 3000;
    int maxima = 0;
    double prev = morlet_spectrum(0.0, omega0);
    double cur = morlet_spectrum(3.0 * omega0 / n, omega0);
    for (int i = 2; i <= n; ++i) {
        const double next = morlet_spectrum(3.0 * omega0 * i / n, omega0);
        if (cur > prev && cur >= next) ++maxima;
        prev = cur;
        cur = next;
    }
    r.band_pass_shape = (maxima == 1);
    return r;
}

/// Time-domain moments M_p = integral of t^p psi(t) dt, p = 0..n_max, with
/// psi the (complex) Morlet kernel centered at `center`. Simpson quadrature
/// over the effective support, with a convergence check.
inline std::vector<std::complex<double>> compute_moments(double omega0, int n_max, double center = 0.0) {
    if (n_max < 0 || n_max > 8) throw std::invalid_argument("n_max must be 0..8");
    auto psi = [&](double t) {
        const double u = t - center;
        return std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * u * u) *
               cplx(std::cos(omega0 * u), std::sin(omega0 * u));
    };
    auto integrate = [&](int p, int steps) {
        const double lo = center - 12.0, hi = center + 12.0;
        const double h = (hi - lo) / steps;
        cplx acc = std::pow(lo, p) * psi(lo) + std::pow(hi, p) * psi(hi);
        for (int i = 1; i < steps; ++i) {
            const double t = lo + h * i;
            acc += std::pow(t, p) * psi(t) * ((i % 2) ? 4.0 : 2.0);
        }
        return acc * (h / 3.0);
    };
    std::vector<cplx> out(static_cast<std::size_t>(n_max) + 1);
    for (int p = 0; p <= n_max; ++p) {
        const cplx a = integrate(p, 4096);
        const cplx b = integrate(p, 8192);
        if (std::abs(a - b) > 1e-9 * (1.0 + std::abs(b)))
            throw std::runtime_error("moment quadrature did not converge");
        out[static_cast<std::size_t>(p)] = b;
    }
    return out;
}

/// Ridge frequency of the scalogram: per-time argmax over scale pooled
/// into a single dominant frequency, refined by parabolic interpolation in
/// log-scale. COI-excluded.
inline std::optional<double> ridge_frequency(const Scalogram& sc) {
    // Use the global wavelet spectrum's maximum with parabolic refinement.
    std::vector<double> gws(sc.num_scales(), 0.0);
    std::vector<bool> valid(sc.num_scales(), false);
    for (std::size_t j = 0; j < sc.num_scales(); ++j) {
        double sum = 0;
        std::size_t cnt = 0;
        for (std::size_t i = 0; i < sc.num_times(); ++i)
            if (sc.coi[i] >= sc.scales[j]) { sum += sc.power[j][i]; ++cnt; }
        if (cnt) { gws[j] = sum / cnt; valid[j] = true; }
    }
    std::size_t best = 0;
    double bv = -1;
    for (std::size_t j = 0; j < gws.size(); ++j)
        if (valid[j] && gws[j] > bv) { bv = gws[j]; best = j; }
    if (bv <= 0) return std::nullopt;
    double delta = 0;
    if (best > 0 && best + 1 < gws.size() && valid[best - 1] && valid[best + 1]) {
        const double la = std::log(gws[best - 1]), lb = std::log(gws[best]), lc = std::log(gws[best + 1]);
        const double den = la - 2 * lb + lc;
        if (den < 0) delta = 0.5 * (la - lc) / den;
    }
    // scale grid is log2-uniform; delta shifts the exponent
    const double s = sc.scales[best] * std::pow(sc.scales[1] / sc.scales[0], delta);
    return sc.frequencies[best] * (sc.scales[best] / s);
}

}  // namespace tabla
