#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "tabla/audio.hpp"
#include "tabla/fft.hpp"

namespace tabla {

/// The eight-octave band plan. Level 1 is the topmost band, level 8 the
/// low-frequency residue.
struct BandPlan {
    struct Level {
        int index;      // 1..8
        double f_low;   // Hz, inclusive
        double f_high;  // Hz, exclusive
    };
    std::vector<Level> levels;

    /// Edges are successive halvings of 14080 Hz; level 8 is [0, 110).
    static BandPlan standard() {
        BandPlan p;
        double hi = 14080.0;
        for (int i = 1; i <= 7; ++i) {
            p.levels.push_back({i, hi / 2.0, hi});
            hi /= 2.0;
        }
        p.levels.push_back({8, 0.0, hi});  // hi == 110
        return p;
    }

    const Level& level(int index) const {
        if (index < 1 || index > static_cast<int>(levels.size()))
            throw std::out_of_range("band level out of range");
        return levels[static_cast<std::size_t>(index - 1)];
    }

    /// Split frequency applied at stage m (= f_low of level m), m in 1..7.
    double split_frequency(int stage) const { return level(stage).f_low; }
};

/// Linear-phase FIR half-band low-pass (odd tap count, symmetric taps).
struct HalfBandFilter {
    std::vector<double> taps;
    double transition_width = 0;       // Hz at the rate it is applied
    double stopband_attenuation = 0;   // dB
    double cutoff_hz = 0;

    /// Complex frequency response at f (Hz) for the given rate, with the
    /// group delay (N-1)/2 removed (the response of the centered filter).
    double magnitude_at(double f_hz, double rate) const {
        const double w = 2.0 * std::numbers::pi * f_hz / rate;
        const std::size_t n = taps.size();
        const double c = (static_cast<double>(n) - 1.0) / 2.0;
        double re = 0, im = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double ph = -w * (static_cast<double>(i) - c);
            re += taps[i] * std::cos(ph);
            im += taps[i] * std::sin(ph);
        }
        return std::hypot(re, im);
    }
};

struct FilterSpec {
    double transition_hz = 50.0;      // at each stage's own sample rate
    double stopband_db = 90.0;
    double interp_stopband_db = 110.0;
    int max_taps = 20000;
};

namespace detail {

inline double kaiser_beta(double atten_db) {
    if (atten_db > 50.0) return 0.1102 * (atten_db - 8.7);
    if (atten_db >= 21.0) return 0.5842 * std::pow(atten_db - 21.0, 0.4) + 0.07886 * (atten_db - 21.0);
    return 0.0;
}

/// Windowed-sinc low-pass, Kaiser window, odd length.
inline std::vector<double> kaiser_lowpass(double cutoff_hz, double transition_hz,
                                          double atten_db, double rate, int max_taps) {
    if (!(transition_hz > 0)) throw std::invalid_argument("transition width must be positive");
    if (!(cutoff_hz > 0) || cutoff_hz >= rate / 2)
        throw std::invalid_argument("cutoff must lie in (0, rate/2)");
    const double dw = 2.0 * std::numbers::pi * transition_hz / rate;
    int n = static_cast<int>(std::ceil((atten_db - 7.95) / (2.285 * dw))) + 1;
    if (n % 2 == 0) ++n;
    if (n < 11) n = 11;
    if (n > max_taps)
        throw std::invalid_argument("filter spec unattainable: needs " + std::to_string(n) +
                                    " taps, cap is " + std::to_string(max_taps));
    const double beta = kaiser_beta(atten_db);
    const double i0b = std::cyl_bessel_i(0.0, beta);
    const double fc = cutoff_hz / rate;  // normalized cutoff (cycles/sample)
    const int mid = (n - 1) / 2;
    std::vector<double> h(static_cast<std::size_t>(n));
    double sum = 0;
    for (int i = 0; i < n; ++i) {
        const int m = i - mid;
        const double sinc = (m == 0) ? 2.0 * fc
                                     : std::sin(2.0 * std::numbers::pi * fc * m) / (std::numbers::pi * m);
        const double r = static_cast<double>(m) / mid;
        const double win = std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0b;
        h[static_cast<std::size_t>(i)] = sinc * win;
        sum += h[static_cast<std::size_t>(i)];
    }
    for (auto& v : h) v /= sum;  // unity DC gain
    return h;
}

/// Convolve with mirror padding and trim to the input length, so the
/// result is delay-compensated (zero net group delay).
inline std::vector<double> filter_same(const std::vector<double>& x, const std::vector<double>& h) {
    const std::size_t n = x.size();
    const std::size_t pad = (h.size() - 1) / 2;
    if (n < h.size()) throw std::invalid_argument("signal shorter than filter");
    std::vector<double> ext;
    ext.reserve(n + 2 * pad);
    for (std::size_t i = 0; i < pad; ++i) ext.push_back(x[pad - i]);         // mirrored head
    ext.insert(ext.end(), x.begin(), x.end());
    for (std::size_t i = 0; i < pad; ++i) ext.push_back(x[n - 2 - i]);       // mirrored tail
    std::vector<double> full = convolve(ext, h);
    // full length = n + 2*pad + h-1; centered segment starts at 2*pad
    std::vector<double> y(full.begin() + static_cast<std::ptrdiff_t>(2 * pad),
                          full.begin() + static_cast<std::ptrdiff_t>(2 * pad + n));
    return y;
}

inline std::vector<double> downsample2(const std::vector<double>& x) {
    std::vector<double> y;
    y.reserve((x.size() + 1) / 2);
    for (std::size_t i = 0; i < x.size(); i += 2) y.push_back(x[i]);
    return y;
}

/// Zero-stuff by two (gain 2) to `target_len` samples, then interpolate.
inline std::vector<double> upsample2(const std::vector<double>& x, const std::vector<double>& interp,
                                     std::size_t target_len) {
    std::vector<double> y(target_len, 0.0);
    for (std::size_t i = 0; i < x.size() && 2 * i < target_len; ++i) y[2 * i] = 2.0 * x[i];
    return filter_same(y, interp);
}

}  // namespace detail

/// Design the stage low-pass: cutoff at a quarter of the nominal stage rate.
/// The complementary high-pass is obtained by subtraction (spectral
/// inversion of the same taps).
inline HalfBandFilter design_halfband(double transition_hz, double stage_rate, double stopband_db,
                                      int max_taps = 20000) {
    if (!(transition_hz > 0)) throw std::invalid_argument("transition width must be positive");
    if (!(stage_rate > 4.0 * transition_hz))
        throw std::invalid_argument("stage rate must exceed 4x the transition width");
    HalfBandFilter f;
    f.cutoff_hz = stage_rate / 4.0;
    f.transition_width = transition_hz;
    f.stopband_attenuation = stopband_db;
    f.taps = detail::kaiser_lowpass(f.cutoff_hz, transition_hz, stopband_db, stage_rate, max_taps);
    return f;
}

/// Per-level detail series (decimated), band-limited signals at the input
/// rate, and count bookkeeping for the eight-band plan.
struct BandDecomposition {
    BandPlan plan;
    double sample_rate = 0;
    std::vector<double> source;                          // original samples
    std::vector<std::vector<double>> coefficient_series; // [8], decimated
    std::vector<std::vector<double>> band_signals;       // [8], at sample_rate
    std::vector<std::size_t> coefficient_counts;         // [8]
};

/// Iterated analysis: seven complementary low/high splits at the plan's
/// octave edges, decimating the low branch by two each stage; level 8 is
/// the final low-pass residue. Band signals come back through the
/// interpolation (synthesis) chain, so their sum reconstructs the input.
inline BandDecomposition decompose(const AudioClip& clip, const BandPlan& plan = BandPlan::standard(),
                                   const FilterSpec& fspec = FilterSpec{}) {
    if (plan.levels.size() != 8) throw std::invalid_argument("plan must have 8 levels");
    const double fs = clip.sample_rate;
    const double top = plan.levels.front().f_high;
    if (fs < 2.0 * top)
        throw std::invalid_argument("sample rate below twice the top band edge");
    if (clip.samples.empty()) throw std::invalid_argument("empty clip");

    BandDecomposition d;
    d.plan = plan;
    d.sample_rate = fs;
    d.source = clip.samples;
    d.coefficient_series.resize(8);
    d.band_signals.resize(8);
    d.coefficient_counts.assign(8, 0);

    // Analysis pyramid.
    std::vector<std::vector<double>> highs(8);           // high branch per stage, at stage rate
    std::vector<std::size_t> stage_len(9, 0);            // input length at each stage (1-based)
    std::vector<std::vector<double>> interp_taps(8);     // interpolation filter per stage
    std::vector<double> x = clip.samples;
    double rate = fs;
    for (int m = 1; m <= 7; ++m) {
        stage_len[static_cast<std::size_t>(m)] = x.size();
        const double split = plan.split_frequency(m);
        const auto low_taps =
            detail::kaiser_lowpass(split, fspec.transition_hz, fspec.stopband_db, rate, fspec.max_taps);
        if (x.size() < low_taps.size())
            throw std::invalid_argument("clip shorter than the stage-" + std::to_string(m) + " filter");
        const auto low = detail::filter_same(x, low_taps);
        std::vector<double> high(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) high[i] = x[i] - low[i];
        highs[static_cast<std::size_t>(m)] = std::move(high);
        d.coefficient_series[static_cast<std::size_t>(m - 1)] =
            detail::downsample2(highs[static_cast<std::size_t>(m)]);

        // Interpolation filter for re-expanding stage m+1 content to stage m:
        // pass everything below the split (plus transition), stop the
        // zero-stuffing image that starts at rate/2 - split.
        const double pass_e = split + fspec.transition_hz;
        const double stop_e = rate / 2.0 - pass_e;
        if (stop_e <= pass_e) throw std::invalid_argument("band plan incompatible with sample rate");
        interp_taps[static_cast<std::size_t>(m)] = detail::kaiser_lowpass(
            0.5 * (pass_e + stop_e), stop_e - pass_e, fspec.interp_stopband_db, rate, fspec.max_taps);

        x = detail::downsample2(low);
        rate /= 2.0;
    }
    stage_len[8] = x.size();
    // Level 8: the residue. Its series is decimated once more (still above
    // Nyquist for its 110 Hz content), so counts keep halving per level.
    d.coefficient_series[7] = detail::downsample2(x);

    for (int l = 0; l < 8; ++l) d.coefficient_counts[static_cast<std::size_t>(l)] =
        d.coefficient_series[static_cast<std::size_t>(l)].size();

    // Synthesis: bring each level's stage-rate signal back to the input rate.
    auto lift = [&](std::vector<double> sig, int from_stage) {
        for (int j = from_stage - 1; j >= 1; --j)
            sig = detail::upsample2(sig, interp_taps[static_cast<std::size_t>(j)],
                                    stage_len[static_cast<std::size_t>(j)]);
        return sig;
    };
    for (int m = 1; m <= 7; ++m)
        d.band_signals[static_cast<std::size_t>(m - 1)] = lift(highs[static_cast<std::size_t>(m)], m);
    d.band_signals[7] = lift(x, 8);
    return d;
}

/// Sum of the band signals; the synthesis chain makes this the
/// reconstruction of the input (zero net delay).
inline AudioClip reconstruct(const BandDecomposition& d) {
    if (d.band_signals.size() != 8) throw std::invalid_argument("decomposition missing band signals");
    const std::size_t n = d.source.size();
    AudioClip out;
    out.sample_rate = static_cast<int>(d.sample_rate);
    out.samples.assign(n, 0.0);
    for (const auto& b : d.band_signals) {
        if (b.size() != n) throw std::invalid_argument("band signal length mismatch");
        for (std::size_t i = 0; i < n; ++i) out.samples[i] += b[i];
    }
    return out;
}

/// Sum of squared band-signal samples.
inline double band_energy(const BandDecomposition& d, int level) {
    if (level < 1 || level > 8) throw std::out_of_range("level must be 1..8");
    double e = 0;
    for (double v : d.band_signals[static_cast<std::size_t>(level - 1)]) e += v * v;
    return e;
}

inline double signal_energy(const std::vector<double>& x) {
    double e = 0;
    for (double v : x) e += v * v;
    return e;
}

}  // namespace tabla
