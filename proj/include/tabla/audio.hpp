#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace tabla {

enum class Damping { damped, free_stroke };

inline const char* to_string(Damping d) { return d == Damping::damped ? "damped" : "free"; }

/// Stroke metadata: name, execution style, which drum it was played on.
struct StrokeLabel {
    std::string stroke_name;
    Damping damping = Damping::damped;
    int tabla_id = 1;
    double membrane_diameter = 5.0;
};

/// Default execution style per stroke name. Overridable; stored as data.
inline Damping damping_for_stroke(const std::string& name) {
    if (name == "Teen" || name == "Ge" || name == "Thun" || name == "Tu")
        return Damping::free_stroke;
    return Damping::damped;  // Ta/Na, Ti, Ghe, Te, Re
}

inline double diameter_for_tabla(int tabla_id) {
    switch (tabla_id) {
        case 1:
        case 2:
        case 3: return 5.0;
        case 4: return 5.5;
        case 5: return 6.0;
        default: throw std::invalid_argument("tabla_id must be 1..5");
    }
}

inline const std::vector<std::string>& stroke_names() {
    static const std::vector<std::string> names = {
        "Ta/Na", "Ti", "Teen", "Ghe", "Ge", "Thun", "Tu", "Te", "Re"};
    return names;
}

/// Mono sample buffer with sample rate and optional stroke metadata.
struct AudioClip {
    std::vector<double> samples;  // amplitudes in [-1, 1]
    int sample_rate = 44100;
    std::optional<StrokeLabel> label;

    double duration() const { return static_cast<double>(samples.size()) / sample_rate; }
};

struct WavError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::uint32_t read_u32(const unsigned char* p) {
    return p[0] | (p[1] << 8) | (p[2] << 16) | (std::uint32_t(p[3]) << 24);
}
inline std::uint16_t read_u16(const unsigned char* p) { return std::uint16_t(p[0] | (p[1] << 8)); }

inline void write_u32(std::ofstream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff), static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff), static_cast<unsigned char>((v >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 4);
}
inline void write_u16(std::ofstream& out, std::uint16_t v) {
    unsigned char b[2] = {static_cast<unsigned char>(v & 0xff), static_cast<unsigned char>((v >> 8) & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 2);
}

}  // namespace detail

/// Read a mono RIFF/WAVE file. Supports PCM 8/16/24-bit and 32-bit float.
/// Multi-channel files are rejected rather than downmixed.
inline AudioClip read_wav(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw WavError("cannot open " + path);
    std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (buf.size() < 12 || std::memcmp(buf.data(), "RIFF", 4) != 0 || std::memcmp(buf.data() + 8, "WAVE", 4) != 0)
        throw WavError(path + ": not a RIFF/WAVE file");

    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    bool have_fmt = false;
    const unsigned char* data = nullptr;
    std::size_t data_len = 0;

    std::size_t pos = 12;
    while (pos + 8 <= buf.size()) {
        const char* id = reinterpret_cast<const char*>(buf.data() + pos);
        std::uint32_t sz = detail::read_u32(buf.data() + pos + 4);
        if (pos + 8 + sz > buf.size()) sz = static_cast<std::uint32_t>(buf.size() - pos - 8);
        const unsigned char* body = buf.data() + pos + 8;
        if (std::memcmp(id, "fmt ", 4) == 0) {
            if (sz < 16) throw WavError(path + ": malformed fmt chunk");
            format = detail::read_u16(body);
            channels = detail::read_u16(body + 2);
            rate = detail::read_u32(body + 4);
            bits = detail::read_u16(body + 14);
            if (format == 0xFFFE && sz >= 40) format = detail::read_u16(body + 24);  // extensible
            have_fmt = true;
        } else if (std::memcmp(id, "data", 4) == 0) {
            data = body;
            data_len = sz;
        }
        pos += 8 + sz + (sz & 1);
    }
    if (!have_fmt || data == nullptr) throw WavError(path + ": missing fmt or data chunk");
    if (channels != 1) throw WavError(path + ": expected mono, got " + std::to_string(channels) + " channels");
    if (rate == 0) throw WavError(path + ": invalid sample rate");

    AudioClip clip;
    clip.sample_rate = static_cast<int>(rate);
    if (format == 1 && bits == 16) {
        const std::size_t n = data_len / 2;
        clip.samples.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::int16_t v = static_cast<std::int16_t>(detail::read_u16(data + 2 * i));
            clip.samples[i] = v / 32768.0;
        }
    } else if (format == 1 && bits == 8) {
        clip.samples.resize(data_len);
        for (std::size_t i = 0; i < data_len; ++i) clip.samples[i] = (int(data[i]) - 128) / 128.0;
    } else if (format == 1 && bits == 24) {
        const std::size_t n = data_len / 3;
        clip.samples.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::int32_t v = data[3 * i] | (data[3 * i + 1] << 8) | (std::int32_t(static_cast<std::int8_t>(data[3 * i + 2])) << 16);
            clip.samples[i] = v / 8388608.0;
        }
    } else if (format == 3 && bits == 32) {
        const std::size_t n = data_len / 4;
        clip.samples.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            float f;
            std::memcpy(&f, data + 4 * i, 4);
            clip.samples[i] = std::clamp(static_cast<double>(f), -1.0, 1.0);
        }
    } else {
        throw WavError(path + ": unsupported codec (format " + std::to_string(format) + ", " + std::to_string(bits) + " bit)");
    }
    if (clip.samples.empty()) throw WavError(path + ": empty data chunk");
    return clip;
}

/// Write a clip as 16-bit PCM mono. Round-trip error with read_wav is at
/// most one LSB (1/32768).
inline void write_wav(const AudioClip& clip, const std::string& path) {
    if (clip.samples.empty()) throw WavError("write_wav: empty clip");
    if (clip.sample_rate <= 0) throw WavError("write_wav: invalid sample rate");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw WavError("cannot write " + path);
    const std::uint32_t n = static_cast<std::uint32_t>(clip.samples.size());
    const std::uint32_t data_bytes = n * 2;
    out.write("RIFF", 4);
    detail::write_u32(out, 36 + data_bytes);
    out.write("WAVE", 4);
    out.write("fmt ", 4);
    detail::write_u32(out, 16);
    detail::write_u16(out, 1);  // PCM
    detail::write_u16(out, 1);  // mono
    detail::write_u32(out, static_cast<std::uint32_t>(clip.sample_rate));
    detail::write_u32(out, static_cast<std::uint32_t>(clip.sample_rate) * 2);
    detail::write_u16(out, 2);
    detail::write_u16(out, 16);
    out.write("data", 4);
    detail::write_u32(out, data_bytes);
    for (double s : clip.samples) {
        long q = std::lround(std::clamp(s, -1.0, 1.0) * 32768.0);
        q = std::clamp(q, -32768L, 32767L);
        detail::write_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
    }
    if (!out) throw WavError("I/O failure writing " + path);
}

/// One synthetic stroke: a fundamental with partials at the given ratios,
/// each with its own amplitude and exponential decay, a linear attack ramp
/// and a uniform noise floor. Negative amplitudes invert the partial's phase.
struct SynthStrokeSpec {
    double fundamental = 200.0;                                   // Hz
    std::vector<double> partial_ratios = {1, 2, 3, 4, 5};
    std::vector<double> partial_amplitudes = {1, 1, 1, 1, 1};
    std::vector<double> partial_decay_constants = {4, 4, 4, 4, 4};  // 1/s
    double attack_time = 0.010;                                   // s
    double duration = 1.0;                                        // s
    double noise_floor = 0.0;                                     // linear

    void validate() const {
        if (partial_ratios.empty()) throw std::invalid_argument("empty partial list");
        if (partial_ratios.size() != partial_amplitudes.size() ||
            partial_ratios.size() != partial_decay_constants.size())
            throw std::invalid_argument("partial lists must have equal length");
        for (double d : partial_decay_constants)
            if (!(d > 0)) throw std::invalid_argument("decay constants must be positive");
        if (!(attack_time < duration)) throw std::invalid_argument("attack_time must be less than duration");
        if (!(fundamental > 0)) throw std::invalid_argument("fundamental must be positive");
    }

    double max_partial_frequency() const {
        double m = 0;
        for (double r : partial_ratios) m = std::max(m, r * fundamental);
        return m;
    }
};

/// Deterministic stroke generator (given the noise seed). Peak-normalized
/// to 0.9.
inline AudioClip synthesize_stroke(const SynthStrokeSpec& spec, int sample_rate,
                                   std::uint64_t noise_seed = 0,
                                   std::optional<StrokeLabel> label = std::nullopt) {
    spec.validate();
    if (sample_rate <= 0) throw std::invalid_argument("sample rate must be positive");
    if (spec.max_partial_frequency() >= 0.5 * sample_rate)
        throw std::invalid_argument("aliasing: partial frequency at or above Nyquist");

    const std::size_t n = static_cast<std::size_t>(std::llround(spec.duration * sample_rate));
    if (n == 0) throw std::invalid_argument("duration too short");
    AudioClip clip;
    clip.sample_rate = sample_rate;
    clip.label = std::move(label);
    clip.samples.assign(n, 0.0);

    const double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t k = 0; k < spec.partial_ratios.size(); ++k) {
        const double f = spec.partial_ratios[k] * spec.fundamental;
        const double a = spec.partial_amplitudes[k];
        const double d = spec.partial_decay_constants[k];
        for (std::size_t i = 0; i < n; ++i) {
            const double t = static_cast<double>(i) / sample_rate;
            const double env = (spec.attack_time > 0 && t < spec.attack_time) ? t / spec.attack_time : 1.0;
            clip.samples[i] += a * env * std::exp(-d * t) * std::sin(two_pi * f * t);
        }
    }
    if (spec.noise_floor > 0) {
        std::mt19937_64 rng(noise_seed);
        std::uniform_real_distribution<double> uni(-spec.noise_floor, spec.noise_floor);
        for (auto& s : clip.samples) s += uni(rng);
    }
    double peak = 0;
    for (double s : clip.samples) peak = std::max(peak, std::abs(s));
    if (peak > 0) {
        const double g = 0.9 / peak;
        for (auto& s : clip.samples) s *= g;
    }
    return clip;
}

}  // namespace tabla
