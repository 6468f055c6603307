#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tabla/audio.hpp"
#include "tabla/corpus.hpp"
#include "tabla/features.hpp"
#include "tabla/io.hpp"
#include "tabla/stats.hpp"
#include "tabla/table1.hpp"

namespace tabla::cli {

namespace fs = std::filesystem;

constexpr int exit_ok = 0;
constexpr int exit_partial = 1;
constexpr int exit_usage = 2;

struct AnalysisConfig {
    BandPlan plan = BandPlan::standard();
    FilterSpec filter;
    PeakParams peaks;
    WaveletSpec wavelet{6.0, 1.0 / 12.0, 0.0, 0};
    std::uint64_t seed = 0;

    FeatureConfig feature_config() const {
        FeatureConfig c;
        c.plan = plan;
        c.filter = filter;
        c.peaks = peaks;
        c.wavelet = wavelet;
        return c;
    }
};

inline AnalysisConfig load_config(const std::string& path) {
    AnalysisConfig c;
    if (path.empty()) return c;
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path);
    json j;
    in >> j;
    if (j.contains("band_plan")) c.plan = band_plan_from_json(j["band_plan"]);
    if (j.contains("filter")) c.filter = filter_spec_from_json(j["filter"]);
    if (j.contains("peaks")) {
        const auto& p = j["peaks"];
        c.peaks.floor_db = p.value("floor_db", c.peaks.floor_db);
        c.peaks.prominence_db = p.value("prominence_db", c.peaks.prominence_db);
        c.peaks.neighborhood_hz = p.value("neighborhood_hz", c.peaks.neighborhood_hz);
    }
    if (j.contains("wavelet")) {
        const auto& w = j["wavelet"];
        c.wavelet.omega0 = w.value("omega0", c.wavelet.omega0);
        c.wavelet.dj = w.value("dj", c.wavelet.dj);
        c.wavelet.s0 = w.value("s0", c.wavelet.s0);
        c.wavelet.num_scales = w.value("num_scales", c.wavelet.num_scales);
    }
    c.seed = j.value("seed", c.seed);
    return c;
}

/// Labels encoded in the corpus file stems: tabla{N}_{stroke}_{damping}.
inline std::optional<StrokeLabel> label_from_filename(const std::string& path) {
    std::string stem = fs::path(path).stem().string();
    if (stem.rfind("tabla", 0) != 0) return std::nullopt;
    const auto u1 = stem.find('_');
    if (u1 == std::string::npos) return std::nullopt;
    const auto u2 = stem.rfind('_');
    if (u2 == u1) return std::nullopt;
    StrokeLabel l;
    try {
        l.tabla_id = std::stoi(stem.substr(5, u1 - 5));
        l.membrane_diameter = diameter_for_tabla(l.tabla_id);
    } catch (...) {
        return std::nullopt;
    }
    l.stroke_name = stem.substr(u1 + 1, u2 - u1 - 1);
    std::replace(l.stroke_name.begin(), l.stroke_name.end(), '-', '/');
    const std::string damp = stem.substr(u2 + 1);
    if (damp == "free") l.damping = Damping::free_stroke;
    else if (damp == "damped") l.damping = Damping::damped;
    else return std::nullopt;
    return l;
}

// --- synth ------------------------------------------------------------------

inline int run_synth(const std::string& spec_path, const std::string& out_path, int rate,
                     std::uint64_t seed, std::ostream& log = std::cout) {
    try {
        const SynthStrokeSpec spec = spec_path.empty() ? canonical_raman_spec() : load_synth_spec(spec_path);
        const AudioClip clip = synthesize_stroke(spec, rate, seed);
        write_wav(clip, out_path);
        log << "wrote " << out_path << " (" << clip.samples.size() << " samples @ " << rate << " Hz)\n";
        log << "partial_freq_hz,amplitude,decay_per_s\n";
        for (std::size_t k = 0; k < spec.partial_ratios.size(); ++k)
            log << spec.partial_ratios[k] * spec.fundamental << ',' << spec.partial_amplitudes[k]
                << ',' << spec.partial_decay_constants[k] << '\n';
        return exit_ok;
    } catch (const std::exception& e) {
        std::cerr << "synth: " << e.what() << '\n';
        return exit_usage;
    }
}

/// Write the shipped 45-clip fixture corpus plus a manifest.
inline int run_synth_corpus(const std::string& out_dir, std::uint64_t base_seed,
                            std::ostream& log = std::cout) {
    try {
        fs::create_directories(out_dir);
        json manifest = json::array();
        for (const auto& e : build_fixture_corpus(base_seed)) {
            const AudioClip clip = render(e);
            const std::string path = (fs::path(out_dir) / (e.name + ".wav")).string();
            write_wav(clip, path);
            json m = to_json(e.spec);
            m["file"] = e.name + ".wav";
            m["tabla_id"] = e.label.tabla_id;
            m["stroke"] = e.label.stroke_name;
            m["damping"] = to_string(e.label.damping);
            m["seed"] = e.seed;
            manifest.push_back(m);
        }
        std::ofstream mo(fs::path(out_dir) / "manifest.json");
        mo << manifest.dump(2) << '\n';
        log << "wrote 45 corpus clips to " << out_dir << '\n';
        return exit_ok;
    } catch (const std::exception& e) {
        std::cerr << "synth --corpus: " << e.what() << '\n';
        return exit_usage;
    }
}

// --- analyze ----------------------------------------------------------------

inline int run_analyze(std::vector<std::string> inputs, const std::string& out_dir,
                       const std::string& format, const AnalysisConfig& cfg,
                       std::ostream& log = std::cout) {
    try {
        fs::create_directories(out_dir);
    } catch (const std::exception& e) {
        std::cerr << "analyze: " << e.what() << '\n';
        return exit_usage;
    }
    std::sort(inputs.begin(), inputs.end());  // order-independent aggregation
    std::ofstream csv(fs::path(out_dir) / "features.csv");
    csv << feature_csv_header() << '\n';
    json jout = json::array();
    json errors = json::array();
    for (const auto& path : inputs) {
        try {
            AudioClip clip = read_wav(path);
            if (!clip.label) clip.label = label_from_filename(path);
            const StrokeFeatureSet fsr = extract_features(clip, cfg.feature_config());
            const std::string name = fs::path(path).stem().string();
            append_feature_rows(csv, name, fsr);
            if (format == "json") jout.push_back(feature_set_to_json(name, fsr));
        } catch (const std::exception& e) {
            errors.push_back({{"file", path}, {"error", e.what()}});
            log << "error: " << path << ": " << e.what() << '\n';
        }
    }
    if (format == "json") {
        std::ofstream jo(fs::path(out_dir) / "features.json");
        jo << jout.dump(2) << '\n';
    }
    if (!errors.empty()) {
        std::ofstream eo(fs::path(out_dir) / "errors.json");
        eo << errors.dump(2) << '\n';
    }
    if (inputs.empty()) log << "warning: no input files\n";
    log << "analyzed " << (inputs.size() - errors.size()) << "/" << inputs.size() << " clips\n";
    return errors.empty() ? exit_ok : exit_partial;
}

// --- stats ------------------------------------------------------------------

inline void write_stats_reports(const GroupedSamples& g, const std::set<std::string>& tests,
                                const std::string& out_dir, const std::string& format,
                                std::ostream& log) {
    fs::create_directories(out_dir);
    auto want = [&](const std::string& t) { return tests.empty() || tests.count(t) > 0; };
    json jrep;

    if (want("descriptives")) {
        const auto rows = descriptives(g);
        std::ofstream out(fs::path(out_dir) / "descriptives.csv");
        out << "group,n,mean,sd,se,ci95_low,ci95_high,min,max\n";
        out.precision(10);
        json jr = json::array();
        for (const auto& r : rows) {
            out << r.label << ',' << r.n << ',' << r.mean << ',' << r.sd << ',' << r.se << ',';
            if (r.has_ci) out << r.ci95_low << ',' << r.ci95_high;
            else out << ',';
            out << ',' << r.min << ',' << r.max << '\n';
            json j{{"group", r.label}, {"n", r.n},   {"mean", r.mean}, {"sd", r.sd},
                   {"se", r.se},       {"min", r.min}, {"max", r.max}};
            if (r.has_ci) { j["ci95_low"] = r.ci95_low; j["ci95_high"] = r.ci95_high; }
            jr.push_back(j);
        }
        jrep["descriptives"] = jr;
    }

    std::optional<AnovaResult> anova;
    if (want("anova") || want("tukey")) {
        anova = oneway_anova(g);
        if (want("anova")) {
            std::ofstream out(fs::path(out_dir) / "anova.csv");
            out << "f,df_between,df_within,p,p_display,ms_within\n";
            out.precision(10);
            out << anova->f_statistic << ',' << anova->df_between << ',' << anova->df_within << ','
                << anova->p_value << ',' << format_p(anova->p_value) << ',' << anova->ms_within << '\n';
            jrep["anova"] = {{"f", anova->f_statistic}, {"df_between", anova->df_between},
                             {"df_within", anova->df_within}, {"p", anova->p_value},
                             {"ms_within", anova->ms_within}};
            log << "ANOVA F(" << anova->df_between << ',' << anova->df_within << ") = "
                << anova->f_statistic << ", p = " << format_p(anova->p_value) << '\n';
        }
    }

    if (want("levene")) {
        try {
            const auto l = levene_test(g);
            std::ofstream out(fs::path(out_dir) / "levene.csv");
            out << "statistic,df1,df2,p,p_display\n";
            out.precision(10);
            out << l.statistic << ',' << l.df1 << ',' << l.df2 << ',' << l.p_value << ','
                << format_p(l.p_value) << '\n';
            jrep["levene"] = {{"statistic", l.statistic}, {"df1", l.df1}, {"df2", l.df2}, {"p", l.p_value}};
            log << "Levene " << l.statistic << " (" << l.df1 << ',' << l.df2 << "), p = "
                << format_p(l.p_value) << '\n';
        } catch (const std::exception& e) {
            log << "levene skipped: " << e.what() << '\n';
        }
    }

    if (want("welch")) {
        try {
            const auto w = welch_anova(g);
            std::ofstream out(fs::path(out_dir) / "welch.csv");
            out << "statistic,df1,df2,p,p_display\n";
            out.precision(10);
            out << w.statistic << ',' << w.df1 << ',' << w.df2 << ',' << w.p_value << ','
                << format_p(w.p_value) << '\n';
            jrep["welch"] = {{"statistic", w.statistic}, {"df1", w.df1}, {"df2", w.df2}, {"p", w.p_value}};
            log << "Welch p = " << format_p(w.p_value) << '\n';
        } catch (const std::exception& e) {
            log << "welch skipped: " << e.what() << '\n';
        }
    }

    if (want("tukey")) {
        const auto comps = tukey_hsd(g, *anova);
        std::ofstream out(fs::path(out_dir) / "tukey.csv");
        out << "group_i,group_j,mean_difference,std_error,p,p_display,ci95_low,ci95_high,significant\n";
        out.precision(10);
        json jr = json::array();
        for (const auto& c : comps) {
            out << c.label_i << ',' << c.label_j << ',' << c.mean_difference << ',' << c.std_error
                << ',' << c.p_value << ',' << format_p(c.p_value) << ',' << c.ci95_low << ','
                << c.ci95_high << ',' << (c.significant_at_05 ? "*" : "") << '\n';
            jr.push_back({{"group_i", c.label_i}, {"group_j", c.label_j},
                          {"mean_difference", c.mean_difference}, {"std_error", c.std_error},
                          {"p", c.p_value}, {"ci95_low", c.ci95_low}, {"ci95_high", c.ci95_high},
                          {"significant_at_05", c.significant_at_05}});
        }
        jrep["tukey"] = jr;
    }

    if (format == "json") {
        std::ofstream jo(fs::path(out_dir) / "stats.json");
        jo << jrep.dump(2) << '\n';
    }
}

/// Build groups from a long-format CSV: one row per value, grouped by the
/// `group_by` column, measuring the `measure` column.
inline GroupedSamples groups_from_csv(const CsvTable& t, const std::string& group_by,
                                      const std::string& measure) {
    const int gi = t.column_index(group_by);
    const int mi = t.column_index(measure);
    if (gi < 0 || mi < 0)
        throw std::invalid_argument("table lacks column " + (gi < 0 ? group_by : measure));
    std::map<std::string, std::vector<double>> by_label;
    for (const auto& row : t.rows) {
        const std::string& label = row[static_cast<std::size_t>(gi)];
        const std::string& val = row[static_cast<std::size_t>(mi)];
        if (label.empty() || val.empty()) continue;
        by_label[label].push_back(std::stod(val));
    }
    GroupedSamples g;
    for (auto& [label, values] : by_label) g.groups.push_back({label, std::move(values)});
    return g;
}

inline int run_stats(const std::string& table_path, bool use_table1, const std::string& group_by,
                     const std::string& measure, const std::set<std::string>& tests,
                     const std::string& out_dir, const std::string& format,
                     std::ostream& log = std::cout) {
    try {
        GroupedSamples g;
        if (use_table1) {
            const auto cells = table_path.empty() ? table1_data() : load_table1_csv(table_path);
            const Table1Measure m = parse_measure(measure);
            if (group_by == "subband") g = table1_by_subband(m, cells);
            else if (group_by == "tabla") g = table1_by_tabla(m, cells);
            else throw std::invalid_argument("--group-by must be subband or tabla in table1 mode");
        } else {
            g = groups_from_csv(read_csv(table_path), group_by, measure);
        }
        write_stats_reports(g, tests, out_dir, format, log);
        return exit_ok;
    } catch (const std::exception& e) {
        std::cerr << "stats: " << e.what() << '\n';
        return exit_usage;
    }
}

// --- categorize -------------------------------------------------------------

struct FeatureRow {
    std::string clip, stroke, damping;
    int tabla_id = 0;
    int band_level = 0;  // 0 for the global row
    bool global = false;
    double mpf = 0;
    bool has_mpf = false;
    int harmonic_count = 0;
    double energy = 0;
    double attack_peak_s = 0, decay_s = 0, mpf_time_s = 0;
};

inline std::vector<FeatureRow> parse_feature_table(const CsvTable& t) {
    auto idx = [&](const char* c) {
        const int i = t.column_index(c);
        if (i < 0) throw std::invalid_argument(std::string("feature table lacks column ") + c);
        return static_cast<std::size_t>(i);
    };
    const auto ci = idx("clip"), ti = idx("tabla_id"), si = idx("stroke"), di = idx("damping"),
               bi = idx("band_level"), mi = idx("mpf_hz"), hi = idx("harmonic_count"),
               ei = idx("energy"), ai = idx("attack_peak_s"), dci = idx("decay_s"),
               mti = idx("mpf_time_s");
    std::vector<FeatureRow> rows;
    for (const auto& r : t.rows) {
        FeatureRow f;
        f.clip = r[ci];
        f.stroke = r[si];
        f.damping = r[di];
        if (!r[ti].empty()) f.tabla_id = std::stoi(r[ti]);
        if (r[bi] == "global") {
            f.global = true;
            if (!r[ai].empty()) f.attack_peak_s = std::stod(r[ai]);
            if (!r[dci].empty()) f.decay_s = std::stod(r[dci]);
            if (!r[mti].empty()) f.mpf_time_s = std::stod(r[mti]);
        } else {
            f.band_level = std::stoi(r[bi]);
            if (!r[hi].empty()) f.harmonic_count = std::stoi(r[hi]);
            if (!r[ei].empty()) f.energy = std::stod(r[ei]);
        }
        if (!r[mi].empty()) { f.mpf = std::stod(r[mi]); f.has_mpf = true; }
        rows.push_back(std::move(f));
    }
    return rows;
}

/// Evaluates the categorization rules as explicit orderings of computed
/// means; every outcome carries the numbers it used.
inline json categorize_features(const std::vector<FeatureRow>& rows) {
    if (rows.empty()) throw std::invalid_argument("empty feature table");
    struct ClipAgg {
        int tabla = 0;
        bool damped = false;
        bool labeled = false;
        int total_harmonics = 0;
        int band34_harmonics = 0;
        double energy_total = 0, energy_l3to7 = 0;
        double attack = 0, decay = 0, mpf_time = 0;
    };
    std::map<std::string, ClipAgg> clips;
    for (const auto& r : rows) {
        auto& c = clips[r.clip];
        c.tabla = r.tabla_id;
        if (!r.damping.empty()) { c.damped = (r.damping == "damped"); c.labeled = true; }
        if (r.global) {
            c.attack = r.attack_peak_s;
            c.decay = r.decay_s;
            c.mpf_time = r.mpf_time_s;
        } else {
            c.total_harmonics += r.harmonic_count;
            if (r.band_level == 3 || r.band_level == 4) c.band34_harmonics += r.harmonic_count;
            c.energy_total += r.energy;
            if (r.band_level >= 3 && r.band_level <= 7) c.energy_l3to7 += r.energy;
        }
    }
    auto mean_where = [&](auto pred, auto value) {
        double s = 0;
        int n = 0;
        for (const auto& [name, c] : clips)
            if (pred(c)) { s += value(c); ++n; }
        return n ? s / n : 0.0;
    };

    json report;
    {
        const double small = mean_where([](const ClipAgg& c) { return c.tabla >= 1 && c.tabla <= 3; },
                                        [](const ClipAgg& c) { return double(c.total_harmonics); });
        const double large = mean_where([](const ClipAgg& c) { return c.tabla >= 4; },
                                        [](const ClipAgg& c) { return double(c.total_harmonics); });
        report["small_vs_large_diameter"] = {
            {"rule", "smaller-diameter tablas produce more harmonics"},
            {"small_mean_harmonic_count", small},
            {"large_mean_harmonic_count", large},
            {"holds", small > large}};
    }
    {
        auto damped = [](const ClipAgg& c) { return c.labeled && c.damped; };
        auto free_s = [](const ClipAgg& c) { return c.labeled && !c.damped; };
        const double d34 = mean_where(damped, [](const ClipAgg& c) { return double(c.band34_harmonics); });
        const double f34 = mean_where(free_s, [](const ClipAgg& c) { return double(c.band34_harmonics); });
        const double da = mean_where(damped, [](const ClipAgg& c) { return c.attack; });
        const double fa = mean_where(free_s, [](const ClipAgg& c) { return c.attack; });
        const double dm = mean_where(damped, [](const ClipAgg& c) { return c.mpf_time; });
        const double fm = mean_where(free_s, [](const ClipAgg& c) { return c.mpf_time; });
        const double dd = mean_where(damped, [](const ClipAgg& c) { return c.decay; });
        const double fd = mean_where(free_s, [](const ClipAgg& c) { return c.decay; });
        report["damped_vs_free"] = {
            {"band34_harmonics", {{"damped_mean", d34}, {"free_mean", f34}, {"damped_greater", d34 > f34}}},
            {"attack_peak_s", {{"damped_mean", da}, {"free_mean", fa}, {"free_faster", fa < da}}},
            {"mpf_time_s", {{"damped_mean", dm}, {"free_mean", fm}, {"damped_earlier", dm < fm}}},
            {"decay_s", {{"damped_mean", dd}, {"free_mean", fd}, {"damped_shorter", dd < fd}}}};
    }
    {
        double tot = 0, mid = 0;
        for (const auto& [name, c] : clips) { tot += c.energy_total; mid += c.energy_l3to7; }
        report["information_levels_3_to_7"] = {
            {"rule", "information lies within the 3rd to 7th level"},
            {"energy_fraction_levels_3_to_7", tot > 0 ? mid / tot : 0.0},
            {"holds", tot > 0 && mid / tot >= 0.99}};
    }
    return report;
}

inline int run_categorize(const std::string& features_csv, const std::string& out_dir,
                          std::ostream& log = std::cout) {
    try {
        const auto rows = parse_feature_table(read_csv(features_csv));
        const json report = categorize_features(rows);
        fs::create_directories(out_dir);
        std::ofstream out(fs::path(out_dir) / "categorization.json");
        out << report.dump(2) << '\n';
        log << report.dump(2) << '\n';
        return exit_ok;
    } catch (const std::exception& e) {
        std::cerr << "categorize: " << e.what() << '\n';
        return exit_usage;
    }
}

// --- plotdata ---------------------------------------------------------------

inline int run_plotdata(const std::string& features_csv, const std::string& wav_path,
                        const std::string& out_dir, std::ostream& log = std::cout) {
    try {
        fs::create_directories(out_dir);
        if (!features_csv.empty()) {
            const auto rows = parse_feature_table(read_csv(features_csv));
            std::ofstream mpf(fs::path(out_dir) / "mpf_series.csv");
            mpf << "band,tabla,mpf_hz\n";
            std::ofstream hc(fs::path(out_dir) / "harmonic_count_series.csv");
            hc << "band,tabla,harmonic_count\n";
            mpf.precision(9);
            for (const auto& r : rows) {
                if (r.global) continue;
                if (r.has_mpf) mpf << r.band_level << ',' << r.tabla_id << ',' << r.mpf << '\n';
                hc << r.band_level << ',' << r.tabla_id << ',' << r.harmonic_count << '\n';
            }
        }
        if (!wav_path.empty()) {
            const AudioClip clip = read_wav(wav_path);
            WaveletSpec ws;
            ws.dj = 1.0 / 12.0;
            const Scalogram sc = cwt_transform(clip, ws);
            write_scalogram_csv(sc, (fs::path(out_dir) / "scalogram.csv").string());
            write_scalogram_bin(sc, (fs::path(out_dir) / "scalogram.bin").string(), ws.dj, ws.omega0);
        }
        log << "plot data written to " << out_dir << '\n';
        return exit_ok;
    } catch (const std::exception& e) {
        std::cerr << "plotdata: " << e.what() << '\n';
        return exit_usage;
    }
}

}  // namespace tabla::cli
