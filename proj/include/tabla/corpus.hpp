#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tabla/audio.hpp"

namespace tabla {

/// One entry of the shipped 45-clip synthetic corpus: a stroke spec, its
/// label, the noise seed and a stable file stem.
struct CorpusEntry {
    SynthStrokeSpec spec;
    StrokeLabel label;
    std::uint64_t seed = 0;
    std::string name;  // e.g. "tabla3_Ghe_damped"
};

/// Canonical five-partial stroke: flat partials 1..5 of 200 Hz.
inline SynthStrokeSpec canonical_raman_spec() {
    SynthStrokeSpec s;
    s.fundamental = 200.0;
    s.partial_ratios = {1, 2, 3, 4, 5};
    s.partial_amplitudes = {1, 1, 1, 1, 1};
    s.partial_decay_constants = {4, 4, 4, 4, 4};
    s.attack_time = 0.010;
    s.duration = 1.0;
    s.noise_floor = 0.0;
    return s;
}

/// Deterministic 45-clip corpus (9 strokes x 5 tablas), built so the
/// categorization orderings are realizable:
///  - damped strokes: slower attack (8 ms), fast decay, extra partials in
///    the 880-3520 Hz range;
///  - free strokes: fast attack (3 ms), and a cancelling partial pair at
///    the dominant overtone so its envelope peaks late (delayed MPF);
///  - small-diameter tablas (1-3) carry more partials than large (4-5);
///  - every partial stays inside 110-3520 Hz, so levels 1, 2 and 8 are empty.
inline std::vector<CorpusEntry> build_fixture_corpus(std::uint64_t base_seed = 42) {
    const double f0_by_tabla[5] = {272.0, 266.0, 258.0, 243.0, 232.0};
    std::vector<CorpusEntry> out;
    int stroke_idx = 0;
    for (const auto& stroke : stroke_names()) {
        const Damping damp = damping_for_stroke(stroke);
        for (int tabla = 1; tabla <= 5; ++tabla) {
            const bool small = tabla <= 3;
            const double f0 = f0_by_tabla[tabla - 1] * (1.0 + 0.004 * stroke_idx);
            SynthStrokeSpec s;
            s.fundamental = f0;
            s.duration = 0.5;
            s.noise_floor = 1e-5;
            if (damp == Damping::damped) {
                s.attack_time = 0.008;
                if (small) {
                    s.partial_ratios = {1, 2, 3, 4, 5, 7, 9, 11};
                    s.partial_amplitudes = {1.0, 0.8, 0.6, 0.5, 0.4, 0.35, 0.3, 0.25};
                    s.partial_decay_constants = {18, 18, 18, 18, 18, 18, 18, 18};
                } else {
                    s.partial_ratios = {1, 2, 3, 5, 8};
                    s.partial_amplitudes = {1.0, 0.8, 0.6, 0.45, 0.3};
                    s.partial_decay_constants = {18, 18, 18, 18, 18};
                }
            } else {
                s.attack_time = 0.003;
                // A strong fast-decaying fundamental keeps the envelope peak
                // at the attack, while the weak pair at ratio 2 cancels at
                // onset and peaks near 74 ms; its long tail makes it the
                // highest spectral peak, so the MPF power maximum arrives
                // late and the overall decay outlasts the damped strokes.
                if (small) {
                    s.partial_ratios = {1, 2, 2, 3, 4, 5};
                    s.partial_amplitudes = {1.0, -0.35, 0.3, 0.4, 0.35, 0.3};
                    s.partial_decay_constants = {30, 40, 3, 10, 10, 10};
                } else {
                    s.partial_ratios = {1, 2, 2, 3};
                    s.partial_amplitudes = {1.0, -0.35, 0.3, 0.4};
                    s.partial_decay_constants = {30, 40, 3, 10};
                }
            }
            CorpusEntry e;
            e.spec = s;
            e.label.stroke_name = stroke;
            e.label.damping = damp;
            e.label.tabla_id = tabla;
            e.label.membrane_diameter = diameter_for_tabla(tabla);
            e.seed = base_seed + static_cast<std::uint64_t>(stroke_idx) * 16 + static_cast<std::uint64_t>(tabla);
            std::string stem = stroke;
            for (auto& ch : stem)
                if (ch == '/') ch = '-';
            e.name = "tabla" + std::to_string(tabla) + "_" + stem + "_" + to_string(damp);
            out.push_back(std::move(e));
        }
        ++stroke_idx;
    }
    return out;
}

inline AudioClip render(const CorpusEntry& e, int sample_rate = 44100) {
    return synthesize_stroke(e.spec, sample_rate, e.seed, e.label);
}

}  // namespace tabla
