#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "tabla/audio.hpp"
#include "tabla/cwt.hpp"
#include "tabla/features.hpp"
#include "tabla/subband.hpp"

namespace tabla {

using json = nlohmann::json;

// --- synth spec -------------------------------------------------------------

inline json to_json(const SynthStrokeSpec& s) {
    return json{{"fundamental", s.fundamental},
                {"partial_ratios", s.partial_ratios},
                {"partial_amplitudes", s.partial_amplitudes},
                {"partial_decay_constants", s.partial_decay_constants},
                {"attack_time", s.attack_time},
                {"duration", s.duration},
                {"noise_floor", s.noise_floor}};
}

inline SynthStrokeSpec synth_spec_from_json(const json& j) {
    SynthStrokeSpec s;
    s.fundamental = j.at("fundamental").get<double>();
    s.partial_ratios = j.at("partial_ratios").get<std::vector<double>>();
    s.partial_amplitudes = j.at("partial_amplitudes").get<std::vector<double>>();
    s.partial_decay_constants = j.at("partial_decay_constants").get<std::vector<double>>();
    s.attack_time = j.value("attack_time", s.attack_time);
    s.duration = j.value("duration", s.duration);
    s.noise_floor = j.value("noise_floor", s.noise_floor);
    s.validate();
    return s;
}

inline SynthStrokeSpec load_synth_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j;
    in >> j;
    return synth_spec_from_json(j);
}

// --- band plan / filter spec ------------------------------------------------

inline json to_json(const BandPlan& p) {
    json levels = json::array();
    for (const auto& l : p.levels)
        levels.push_back({{"level", l.index}, {"f_low", l.f_low}, {"f_high", l.f_high}});
    return json{{"levels", levels}};
}

inline BandPlan band_plan_from_json(const json& j) {
    BandPlan p;
    for (const auto& l : j.at("levels"))
        p.levels.push_back({l.at("level").get<int>(), l.at("f_low").get<double>(),
                            l.at("f_high").get<double>()});
    return p;
}

inline json to_json(const FilterSpec& f) {
    return json{{"transition_hz", f.transition_hz},
                {"stopband_db", f.stopband_db},
                {"interp_stopband_db", f.interp_stopband_db},
                {"max_taps", f.max_taps}};
}

inline FilterSpec filter_spec_from_json(const json& j) {
    FilterSpec f;
    f.transition_hz = j.value("transition_hz", f.transition_hz);
    f.stopband_db = j.value("stopband_db", f.stopband_db);
    f.interp_stopband_db = j.value("interp_stopband_db", f.interp_stopband_db);
    f.max_taps = j.value("max_taps", f.max_taps);
    return f;
}

// --- scalogram export -------------------------------------------------------

/// CSV rows: scale,frequency,time,power.
inline void write_scalogram_csv(const Scalogram& sc, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "scale,frequency,time,power\n";
    out.precision(9);
    for (std::size_t j = 0; j < sc.num_scales(); ++j)
        for (std::size_t t = 0; t < sc.num_times(); ++t)
            out << sc.scales[j] << ',' << sc.frequencies[j] << ','
                << static_cast<double>(t) * sc.dt << ',' << sc.power[j][t] << '\n';
}

/// Compact binary layout, little-endian:
///   magic "SCG1", u32 n_scales, u32 n_times,
///   f64 dt, f64 dj, f64 omega0,
///   f64 scales[n_scales], f64 frequencies[n_scales], f64 coi[n_times],
///   f64 power[n_scales * n_times] (row-major over scale, then time).
inline void write_scalogram_bin(const Scalogram& sc, const std::string& path,
                                double dj, double omega0) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    auto put_u32 = [&](std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
    auto put_f64 = [&](double v) { out.write(reinterpret_cast<const char*>(&v), 8); };
    out.write("SCG1", 4);
    put_u32(static_cast<std::uint32_t>(sc.num_scales()));
    put_u32(static_cast<std::uint32_t>(sc.num_times()));
    put_f64(sc.dt);
    put_f64(dj);
    put_f64(omega0);
    for (double v : sc.scales) put_f64(v);
    for (double v : sc.frequencies) put_f64(v);
    for (double v : sc.coi) put_f64(v);
    for (const auto& row : sc.power)
        for (double v : row) put_f64(v);
    if (!out) throw std::runtime_error("I/O failure writing " + path);
}

// --- feature table ----------------------------------------------------------

/// Fixed feature-table columns. Per-band rows carry band fields; the
/// per-clip global row has band_level "global" and the timing features.
inline const char* feature_csv_header() {
    return "clip,tabla_id,stroke,damping,band_level,f_low,f_high,mpf_hz,harmonic_count,"
           "coeff_count,energy,energy_duration_s,attack_peak_s,decay_s,mpf_time_s";
}

inline void append_feature_rows(std::ostream& out, const std::string& clip_name,
                                const StrokeFeatureSet& fs) {
    const auto label = [&](auto field) -> std::string {
        return fs.label ? field(*fs.label) : std::string();
    };
    const std::string tabla = label([](const StrokeLabel& l) { return std::to_string(l.tabla_id); });
    const std::string stroke = label([](const StrokeLabel& l) { return l.stroke_name; });
    const std::string damp = label([](const StrokeLabel& l) { return std::string(to_string(l.damping)); });
    out.precision(9);
    for (const auto& b : fs.bands) {
        out << clip_name << ',' << tabla << ',' << stroke << ',' << damp << ','
            << b.level << ',' << b.f_low << ',' << b.f_high << ','
            << (b.mpf ? std::to_string(*b.mpf) : std::string()) << ','
            << b.harmonic_count << ',' << b.coefficient_count << ','
            << b.energy << ',' << b.energy_duration_s << ",,,\n";
    }
    out << clip_name << ',' << tabla << ',' << stroke << ',' << damp << ",global,,,"
        << (fs.global_mpf ? std::to_string(*fs.global_mpf) : std::string()) << ",,,,,"
        << fs.attack_peak_s << ',' << fs.decay_s << ',' << fs.mpf_time_s << '\n';
}

inline json feature_set_to_json(const std::string& clip_name, const StrokeFeatureSet& fs) {
    json bands = json::array();
    for (const auto& b : fs.bands) {
        json harmonics = json::array();
        for (const auto& h : b.harmonics)
            harmonics.push_back({{"frequency", h.frequency},
                                 {"magnitude", h.magnitude},
                                 {"time_of_peak_power", h.time_of_peak_power}});
        json jb{{"band_level", b.level}, {"f_low", b.f_low},   {"f_high", b.f_high},
                {"harmonic_count", b.harmonic_count}, {"coeff_count", b.coefficient_count},
                {"energy", b.energy}, {"energy_duration_s", b.energy_duration_s},
                {"harmonics", harmonics}};
        if (b.mpf) jb["mpf_hz"] = *b.mpf;
        bands.push_back(jb);
    }
    json j{{"clip", clip_name},
           {"bands", bands},
           {"attack_peak_s", fs.attack_peak_s},
           {"decay_s", fs.decay_s},
           {"decay_truncated", fs.decay_truncated},
           {"mpf_time_s", fs.mpf_time_s},
           {"harmonic_ratios", fs.harmonic_ratios}};
    if (fs.global_mpf) j["mpf_hz"] = *fs.global_mpf;
    if (fs.label) {
        j["tabla_id"] = fs.label->tabla_id;
        j["stroke"] = fs.label->stroke_name;
        j["damping"] = to_string(fs.label->damping);
        j["membrane_diameter"] = fs.label->membrane_diameter;
    }
    return j;
}

// --- simple CSV reader ------------------------------------------------------

/// Minimal CSV: no quoting, header row required.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    int column_index(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return static_cast<int>(i);
        return -1;
    }
};

inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    CsvTable t;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) fields.push_back(tok);
        if (line.back() == ',') fields.push_back("");
        if (first) {
            t.columns = fields;
            first = false;
        } else {
            fields.resize(t.columns.size());
            t.rows.push_back(fields);
        }
    }
    return t;
}

}  // namespace tabla
