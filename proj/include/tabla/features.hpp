#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "tabla/audio.hpp"
#include "tabla/cwt.hpp"
#include "tabla/fft.hpp"
#include "tabla/subband.hpp"

namespace tabla {

/// One detected spectral peak inside a sub-band.
struct HarmonicPeak {
    double frequency = 0;            // Hz, sub-bin (quadratic interpolation)
    double magnitude = 0;            // linear
    int band_level = 0;              // 1..8
    double time_of_peak_power = 0;   // seconds, from the scalogram when available
};

struct PeakParams {
    double floor_db = -60.0;          // re the clip's spectral peak
    double prominence_db = 10.0;      // over the neighborhood median
    double neighborhood_hz = 100.0;   // median window half-width
    std::size_t fft_size = 4096;      // analysis window (sets the bin width)
    double reference_magnitude = 0;   // 0: max averaged |FFT| of the source clip
};

namespace detail {

inline std::vector<double> magnitude_spectrum(const std::vector<double>& x, std::size_t nfft) {
    auto a = fft_real(x, nfft);
    std::vector<double> mag(nfft / 2 + 1);
    for (std::size_t i = 0; i < mag.size(); ++i) mag[i] = std::abs(a[i]);
    return mag;
}

/// Mean Hann-windowed magnitude spectrum over half-overlapping frames.
/// Frame averaging suppresses the ripple a truncated decay leaves on a
/// single long FFT, and the window bounds the peak resolution.
inline std::vector<double> averaged_spectrum(const std::vector<double>& x, std::size_t window) {
    if (x.size() < window) throw std::invalid_argument("signal shorter than the FFT window");
    std::vector<double> hann(window);
    for (std::size_t i = 0; i < window; ++i)
        hann[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                       static_cast<double>(window - 1));
    std::vector<double> acc(window / 2 + 1, 0.0);
    std::vector<double> frame(window);
    std::size_t frames = 0;
    const std::size_t hop = window / 2;
    for (std::size_t start = 0; start + window <= x.size(); start += hop) {
        for (std::size_t i = 0; i < window; ++i) frame[i] = x[start + i] * hann[i];
        const auto mag = magnitude_spectrum(frame, window);
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += mag[i];
        ++frames;
    }
    for (auto& v : acc) v /= static_cast<double>(frames);
    return acc;
}

inline double median_of(std::vector<double> v) {
    if (v.empty()) return 0;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2), v.end());
    return v[v.size() / 2];
}

}  // namespace detail

/// Spectral peaks of the band-limited signal inside the band's edges:
/// local maxima above the absolute floor and the prominence threshold,
/// with sub-bin frequency from quadratic (log-magnitude) interpolation.
inline std::vector<HarmonicPeak> detect_band_peaks(const BandDecomposition& d, int level,
                                                   const PeakParams& params = PeakParams{},
                                                   const Scalogram* scal = nullptr) {
    const auto& band = d.plan.level(level);
    const auto& sig = d.band_signals[static_cast<std::size_t>(level - 1)];
    const std::size_t nfft = next_pow2(params.fft_size ? params.fft_size : 4096);
    if (sig.size() < nfft) throw std::invalid_argument("band signal shorter than the FFT window");
    bool all_zero = true;
    for (double v : sig)
        if (v != 0.0) { all_zero = false; break; }
    if (all_zero) return {};

    const auto mag = detail::averaged_spectrum(sig, nfft);
    const double bin_hz = d.sample_rate / static_cast<double>(nfft);
    double ref = params.reference_magnitude;
    if (ref <= 0) {
        const auto src_mag = detail::averaged_spectrum(d.source, nfft);
        ref = *std::max_element(src_mag.begin(), src_mag.end());
    }
    if (ref <= 0) return {};
    const double floor_mag = ref * std::pow(10.0, params.floor_db / 20.0);
    const double prom = std::pow(10.0, params.prominence_db / 20.0);
    const std::size_t half_w = std::max<std::size_t>(5, static_cast<std::size_t>(params.neighborhood_hz / bin_hz));

    std::vector<HarmonicPeak> peaks;
    const std::size_t lo = static_cast<std::size_t>(std::ceil(band.f_low / bin_hz));
    const std::size_t hi = std::min(mag.size() - 1, static_cast<std::size_t>(band.f_high / bin_hz));
    for (std::size_t i = std::max<std::size_t>(1, lo); i < hi && i + 1 < mag.size(); ++i) {
        if (!(mag[i] > mag[i - 1] && mag[i] >= mag[i + 1])) continue;
        if (mag[i] < floor_mag) continue;
        const std::size_t a = i > half_w ? i - half_w : 0;
        const std::size_t b = std::min(mag.size(), i + half_w + 1);
        const double med = detail::median_of(std::vector<double>(mag.begin() + static_cast<std::ptrdiff_t>(a),
                                                                 mag.begin() + static_cast<std::ptrdiff_t>(b)));
        if (mag[i] < med * prom) continue;
        // quadratic interpolation on log magnitude
        double delta = 0;
        if (mag[i - 1] > 0 && mag[i + 1] > 0) {
            const double la = std::log(mag[i - 1]), lb = std::log(mag[i]), lc = std::log(mag[i + 1]);
            const double den = la - 2 * lb + lc;
            if (den < 0) delta = 0.5 * (la - lc) / den;
        }
        HarmonicPeak p;
        p.frequency = (static_cast<double>(i) + delta) * bin_hz;
        p.magnitude = mag[i];
        p.band_level = level;
        if (p.frequency < band.f_low || p.frequency >= band.f_high) continue;
        if (scal != nullptr && p.frequency <= scal->frequencies.front() &&
            p.frequency >= scal->frequencies.back()) {
            const std::size_t si = scal->nearest_scale_index(p.frequency);
            std::size_t best_t = 0;
            double bv = -1;
            for (std::size_t t = 0; t < scal->num_times(); ++t) {
                if (scal->coi[t] < scal->scales[si]) continue;
                if (scal->power[si][t] > bv) { bv = scal->power[si][t]; best_t = t; }
            }
            p.time_of_peak_power = static_cast<double>(best_t) * scal->dt;
        }
        peaks.push_back(p);
    }
    std::sort(peaks.begin(), peaks.end(),
              [](const HarmonicPeak& x, const HarmonicPeak& y) { return x.frequency < y.frequency; });
    return peaks;
}

/// Frequency of the maximum-magnitude peak; ties break toward the lower
/// frequency. Empty input reports an absent value ("no information").
inline std::optional<double> most_prominent_frequency(const std::vector<HarmonicPeak>& peaks) {
    if (peaks.empty()) return std::nullopt;
    const HarmonicPeak* best = &peaks.front();
    for (const auto& p : peaks)
        if (p.magnitude > best->magnitude ||
            (p.magnitude == best->magnitude && p.frequency < best->frequency))
            best = &p;
    return best->frequency;
}

struct EnvelopeParams {
    double window_s = 0.005;
    double hop_s = 0.001;
};

/// RMS amplitude envelope; returns (times, values).
inline std::pair<std::vector<double>, std::vector<double>> rms_envelope(
    const std::vector<double>& x, int rate, const EnvelopeParams& ep = EnvelopeParams{}) {
    const std::size_t win = std::max<std::size_t>(1, static_cast<std::size_t>(ep.window_s * rate));
    const std::size_t hop = std::max<std::size_t>(1, static_cast<std::size_t>(ep.hop_s * rate));
    std::vector<double> times, vals;
    for (std::size_t start = 0; start + win <= x.size(); start += hop) {
        double e = 0;
        for (std::size_t i = start; i < start + win; ++i) e += x[i] * x[i];
        vals.push_back(std::sqrt(e / static_cast<double>(win)));
        times.push_back(static_cast<double>(start) / rate + 0.5 * ep.window_s);
    }
    if (vals.empty()) throw std::invalid_argument("clip shorter than the envelope window");
    return {std::move(times), std::move(vals)};
}

/// Time from signal onset (first window above -40 dB re the envelope peak)
/// to the envelope maximum.
inline double attack_peak_time(const AudioClip& clip, const EnvelopeParams& ep = EnvelopeParams{}) {
    auto [times, env] = rms_envelope(clip.samples, clip.sample_rate, ep);
    const std::size_t ip = static_cast<std::size_t>(
        std::max_element(env.begin(), env.end()) - env.begin());
    const double peak = env[ip];
    if (peak <= 0) throw std::invalid_argument("silent clip");
    const double onset_thr = peak * std::pow(10.0, -40.0 / 20.0);
    std::size_t onset = 0;
    while (onset < env.size() && env[onset] < onset_thr) ++onset;
    return times[ip] - times[onset];
}

struct DecayResult {
    double seconds = 0;
    bool truncated = false;
};

/// Time from the attack peak until the envelope first stays below -20 dB
/// (re peak) for at least 50 ms; the remaining clip duration, flagged, if
/// it never does.
inline DecayResult decay_time(const AudioClip& clip, const EnvelopeParams& ep = EnvelopeParams{}) {
    auto [times, env] = rms_envelope(clip.samples, clip.sample_rate, ep);
    const std::size_t ip = static_cast<std::size_t>(
        std::max_element(env.begin(), env.end()) - env.begin());
    const double peak = env[ip];
    if (peak <= 0) throw std::invalid_argument("silent clip");
    const double thr = peak * std::pow(10.0, -20.0 / 20.0);
    const std::size_t hold = std::max<std::size_t>(1, static_cast<std::size_t>(0.050 / ep.hop_s));
    for (std::size_t j = ip + 1; j < env.size(); ++j) {
        if (env[j] >= thr) continue;
        std::size_t run = 1;
        while (run < hold && j + run < env.size() && env[j + run] < thr) ++run;
        if (run >= hold || j + run >= env.size()) return {times[j] - times[ip], false};
        j += run;
    }
    return {clip.duration() - times[ip], true};
}

/// Time of maximum power at the scale nearest `mpf`, outside the COI
/// (earliest maximum on ties).
inline double mpf_time(const Scalogram& sc, double mpf) {
    const std::size_t si = sc.nearest_scale_index(mpf);
    std::size_t best = 0;
    double bv = -1;
    bool any = false;
    for (std::size_t t = 0; t < sc.num_times(); ++t) {
        if (sc.coi[t] < sc.scales[si]) continue;
        any = true;
        if (sc.power[si][t] > bv) { bv = sc.power[si][t]; best = t; }
    }
    if (!any) {
        for (std::size_t t = 0; t < sc.num_times(); ++t)
            if (sc.power[si][t] > bv) { bv = sc.power[si][t]; best = t; }
    }
    return static_cast<double>(best) * sc.dt;
}

/// Total time the band's short-time energy exceeds threshold_fraction of
/// its own peak short-time energy.
inline double energy_duration(const BandDecomposition& d, int level, double threshold_fraction = 0.1,
                              const EnvelopeParams& ep = EnvelopeParams{}) {
    if (level < 1 || level > 8) throw std::out_of_range("level must be 1..8");
    const auto& sig = d.band_signals[static_cast<std::size_t>(level - 1)];
    const int rate = static_cast<int>(d.sample_rate);
    const std::size_t win = std::max<std::size_t>(1, static_cast<std::size_t>(ep.window_s * rate));
    const std::size_t hop = std::max<std::size_t>(1, static_cast<std::size_t>(ep.hop_s * rate));
    std::vector<double> ste;
    for (std::size_t start = 0; start + win <= sig.size(); start += hop) {
        double e = 0;
        for (std::size_t i = start; i < start + win; ++i) e += sig[i] * sig[i];
        ste.push_back(e);
    }
    if (ste.empty()) return 0;
    const double peak = *std::max_element(ste.begin(), ste.end());
    if (peak <= 0) return 0;
    std::size_t cnt = 0;
    for (double e : ste)
        if (e > threshold_fraction * peak) ++cnt;
    return static_cast<double>(cnt) * static_cast<double>(hop) / rate;
}

/// Long-term average spectrum: mean of per-frame Hann-windowed magnitude
/// spectra, in dB re the maximum bin.
struct Ltas {
    std::vector<double> frequencies;
    std::vector<double> mean_db;
    std::size_t window_size = 0;
    std::size_t hop = 0;
};

inline Ltas compute_ltas(const AudioClip& clip, std::size_t window, std::size_t hop) {
    if (window == 0 || hop == 0) throw std::invalid_argument("window and hop must be positive");
    if (clip.samples.size() < window) throw std::invalid_argument("clip shorter than the window");
    const std::size_t nfft = next_pow2(window);
    std::vector<double> hann(window);
    for (std::size_t i = 0; i < window; ++i)
        hann[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / (window - 1));
    std::vector<double> acc(nfft / 2 + 1, 0.0);
    std::size_t frames = 0;
    std::vector<double> frame(window);
    for (std::size_t start = 0; start + window <= clip.samples.size(); start += hop) {
        for (std::size_t i = 0; i < window; ++i) frame[i] = clip.samples[start + i] * hann[i];
        const auto mag = detail::magnitude_spectrum(frame, nfft);
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += mag[i];
        ++frames;
    }
    Ltas l;
    l.window_size = window;
    l.hop = hop;
    l.frequencies.resize(acc.size());
    l.mean_db.resize(acc.size());
    const double peak = *std::max_element(acc.begin(), acc.end());
    for (std::size_t i = 0; i < acc.size(); ++i) {
        l.frequencies[i] = static_cast<double>(i) * clip.sample_rate / static_cast<double>(nfft);
        l.mean_db[i] = peak > 0 && acc[i] > 0 ? 20.0 * std::log10(acc[i] / peak) : -300.0;
    }
    return l;
}

struct BandFeatures {
    int level = 0;
    double f_low = 0, f_high = 0;
    std::optional<double> mpf;
    int harmonic_count = 0;
    std::vector<HarmonicPeak> harmonics;
    std::size_t coefficient_count = 0;
    double energy = 0;
    double energy_duration_s = 0;
};

/// One row of the analysis table: per-band descriptors plus the global
/// attack/decay/MPF-timing features and pooled harmonic ratios.
struct StrokeFeatureSet {
    std::vector<BandFeatures> bands;                 // 8 entries
    double attack_peak_s = 0;
    double decay_s = 0;
    bool decay_truncated = false;
    double mpf_time_s = 0;
    std::optional<double> global_mpf;
    std::vector<double> harmonic_ratios;             // pooled, frequency-sorted
    std::optional<StrokeLabel> label;
};

struct FeatureConfig {
    BandPlan plan = BandPlan::standard();
    FilterSpec filter;
    PeakParams peaks;
    WaveletSpec wavelet{6.0, 1.0 / 12.0, 0.0, 0};
    double wavelet_fmin = 90.0;   // Hz; scale range for the scalogram
    double wavelet_fmax = 4500.0;
};

/// Full per-clip extraction: sub-band decomposition, Morlet scalogram, and
/// every descriptor above. Deterministic.
inline StrokeFeatureSet extract_features(const AudioClip& clip, const FeatureConfig& cfg = FeatureConfig{}) {
    StrokeFeatureSet fs;
    fs.label = clip.label;
    const BandDecomposition d = decompose(clip, cfg.plan, cfg.filter);

    WaveletSpec ws = cfg.wavelet;
    if (ws.s0 <= 0) ws.s0 = std::max(2.0 / clip.sample_rate, ws.frequency_to_scale(cfg.wavelet_fmax));
    if (ws.num_scales <= 0)
        ws.num_scales = 1 + static_cast<int>(std::ceil(
            std::log2(ws.frequency_to_scale(cfg.wavelet_fmin) / ws.s0) / ws.dj));
    const Scalogram sc = cwt_transform(clip, ws);

    std::vector<HarmonicPeak> pooled;
    for (int level = 1; level <= 8; ++level) {
        BandFeatures bf;
        const auto& pl = d.plan.level(level);
        bf.level = level;
        bf.f_low = pl.f_low;
        bf.f_high = pl.f_high;
        bf.harmonics = detect_band_peaks(d, level, cfg.peaks, &sc);
        bf.harmonic_count = static_cast<int>(bf.harmonics.size());
        bf.mpf = most_prominent_frequency(bf.harmonics);
        bf.coefficient_count = d.coefficient_counts[static_cast<std::size_t>(level - 1)];
        bf.energy = band_energy(d, level);
        bf.energy_duration_s = energy_duration(d, level);
        pooled.insert(pooled.end(), bf.harmonics.begin(), bf.harmonics.end());
        fs.bands.push_back(std::move(bf));
    }
    std::sort(pooled.begin(), pooled.end(),
              [](const HarmonicPeak& a, const HarmonicPeak& b) { return a.frequency < b.frequency; });
    for (std::size_t i = 1; i < pooled.size(); ++i)
        fs.harmonic_ratios.push_back(pooled[i].frequency / pooled[i - 1].frequency);

    fs.attack_peak_s = attack_peak_time(clip);
    const DecayResult dr = decay_time(clip);
    fs.decay_s = dr.seconds;
    fs.decay_truncated = dr.truncated;

    fs.global_mpf = most_prominent_frequency(pooled);
    if (fs.global_mpf && *fs.global_mpf <= sc.frequencies.front() && *fs.global_mpf >= sc.frequencies.back())
        fs.mpf_time_s = mpf_time(sc, *fs.global_mpf);
    return fs;
}

}  // namespace tabla
