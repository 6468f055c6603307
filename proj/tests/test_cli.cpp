#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tabla/cli.hpp"

using namespace tabla;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const char* stem) : path(fs::temp_directory_path() / stem) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const char* name) const { return (path / name).string(); }
};

std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("filename labels") {
    const auto l = cli::label_from_filename("/x/y/tabla3_Ta-Na_damped.wav");
    REQUIRE(l.has_value());
    CHECK(l->tabla_id == 3);
    CHECK(l->stroke_name == "Ta/Na");
    CHECK(l->damping == Damping::damped);
    CHECK(l->membrane_diameter == 5.0);
    const auto f = cli::label_from_filename("tabla5_Tu_free.wav");
    REQUIRE(f.has_value());
    CHECK(f->damping == Damping::free_stroke);
    CHECK(f->membrane_diameter == 6.0);
    CHECK_FALSE(cli::label_from_filename("clip01.wav").has_value());
    CHECK_FALSE(cli::label_from_filename("tabla9_X_loud.wav").has_value());
}

TEST_CASE("config loading") {
    TempDir tmp("tabla_cfg");
    {
        std::ofstream out(tmp.file("c.json"));
        out << R"({"filter": {"transition_hz": 40}, "wavelet": {"omega0": 7, "dj": 0.25},
                   "peaks": {"floor_db": -50}, "seed": 9})";
    }
    const auto c = cli::load_config(tmp.file("c.json"));
    CHECK(c.filter.transition_hz == 40.0);
    CHECK(c.filter.stopband_db == 90.0);  // untouched default
    CHECK(c.wavelet.omega0 == 7.0);
    CHECK(c.wavelet.dj == 0.25);
    CHECK(c.peaks.floor_db == -50.0);
    CHECK(c.seed == 9);
    CHECK_NOTHROW(cli::load_config(""));
    CHECK_THROWS(cli::load_config(tmp.file("missing.json")));
}

TEST_CASE("synth subcommand") {
    TempDir tmp("tabla_synth");
    std::ostringstream log1, log2;
    CHECK(cli::run_synth("", tmp.file("a.wav"), 44100, 5, log1) == cli::exit_ok);
    CHECK(cli::run_synth("", tmp.file("b.wav"), 44100, 5, log2) == cli::exit_ok);
    CHECK(slurp(tmp.file("a.wav")) == slurp(tmp.file("b.wav")));  // seed-fixed determinism
    CHECK(log1.str().find("partial_freq_hz") != std::string::npos);
    CHECK(log1.str().find("200") != std::string::npos);  // ground-truth table printed

    // custom spec file
    {
        std::ofstream out(tmp.file("spec.json"));
        out << R"({"fundamental": 300, "partial_ratios": [1, 2], "partial_amplitudes": [1, 0.5],
                   "partial_decay_constants": [4, 4], "duration": 0.2})";
    }
    std::ostringstream log3;
    CHECK(cli::run_synth(tmp.file("spec.json"), tmp.file("c.wav"), 44100, 0, log3) == cli::exit_ok);
    CHECK(read_wav(tmp.file("c.wav")).samples.size() == 8820);

    // aliasing spec refused
    {
        std::ofstream out(tmp.file("alias.json"));
        out << R"({"fundamental": 9000, "partial_ratios": [1, 3], "partial_amplitudes": [1, 1],
                   "partial_decay_constants": [4, 4], "duration": 0.2})";
    }
    std::ostringstream log4;
    CHECK(cli::run_synth(tmp.file("alias.json"), tmp.file("d.wav"), 44100, 0, log4) == cli::exit_usage);
}

TEST_CASE("analyze subcommand: batch with one corrupt file") {
    TempDir tmp("tabla_analyze");
    const auto corpus = build_fixture_corpus();
    // two real clips (kept small in count for speed) + one corrupt file
    const std::string w1 = tmp.file("tabla1_Ti_damped.wav");
    const std::string w2 = tmp.file("tabla4_Tu_free.wav");
    for (const auto& e : corpus) {
        if (e.name == "tabla1_Ti_damped") write_wav(render(e), w1);
        if (e.name == "tabla4_Tu_free") write_wav(render(e), w2);
    }
    const std::string bad = tmp.file("broken.wav");
    { std::ofstream out(bad, std::ios::binary); out << "garbage"; }

    TempDir out("tabla_analyze_out");
    std::ostringstream log;
    const int rc = cli::run_analyze({w2, bad, w1}, out.path.string(), "json",
                                    cli::AnalysisConfig{}, log);
    CHECK(rc == cli::exit_partial);
    const auto t = read_csv(out.file("features.csv"));
    CHECK(t.columns.size() == 15);
    CHECK(t.rows.size() == 18);  // 2 clips x (8 band rows + 1 global row)
    CHECK(fs::exists(out.file("errors.json")));
    CHECK(fs::exists(out.file("features.json")));
    // labels parsed from the file stems
    const auto rows = cli::parse_feature_table(t);
    bool saw_damped = false, saw_free = false;
    for (const auto& r : rows) {
        if (r.clip == "tabla1_Ti_damped" && r.damping == "damped") saw_damped = true;
        if (r.clip == "tabla4_Tu_free" && r.damping == "free") saw_free = true;
    }
    CHECK(saw_damped);
    CHECK(saw_free);

    // empty input list: success with a warning
    TempDir out2("tabla_analyze_empty");
    std::ostringstream log2;
    CHECK(cli::run_analyze({}, out2.path.string(), "csv", cli::AnalysisConfig{}, log2) == cli::exit_ok);
    CHECK(log2.str().find("warning") != std::string::npos);
}

TEST_CASE("stats subcommand on the bundled table") {
    TempDir out("tabla_stats_out");
    std::ostringstream log;
    const int rc = cli::run_stats("", true, "subband", "cv", {}, out.path.string(), "json", log);
    CHECK(rc == cli::exit_ok);
    const auto anova = read_csv(out.file("anova.csv"));
    REQUIRE(anova.rows.size() == 1);
    CHECK(std::stod(anova.rows[0][0]) == doctest::Approx(2.561).epsilon(1e-3));
    CHECK(anova.rows[0][4] == ".074");
    const auto lev = read_csv(out.file("levene.csv"));
    CHECK(std::stod(lev.rows[0][0]) == doctest::Approx(0.896).epsilon(1e-3));
    const auto wel = read_csv(out.file("welch.csv"));
    CHECK(wel.rows[0][4] == ".126");
    CHECK(fs::exists(out.file("descriptives.csv")));
    CHECK(fs::exists(out.file("tukey.csv")));
    CHECK(fs::exists(out.file("stats.json")));

    // tabla grouping
    TempDir out2("tabla_stats_out2");
    std::ostringstream log2;
    CHECK(cli::run_stats("", true, "tabla", "cv", {"anova", "levene"}, out2.path.string(), "csv",
                         log2) == cli::exit_ok);
    const auto a2 = read_csv(out2.file("anova.csv"));
    CHECK(std::stod(a2.rows[0][0]) == doctest::Approx(0.954).epsilon(1e-3));
    CHECK(!fs::exists(out2.file("welch.csv")));  // not requested

    // usage errors
    std::ostringstream log3;
    CHECK(cli::run_stats("", true, "stroke", "cv", {}, out2.path.string(), "csv", log3) ==
          cli::exit_usage);
    CHECK(cli::run_stats("/nonexistent.csv", false, "g", "v", {}, out2.path.string(), "csv",
                         log3) == cli::exit_usage);
}

TEST_CASE("stats subcommand on a long-format CSV") {
    TempDir tmp("tabla_stats_csv");
    {
        std::ofstream out(tmp.file("long.csv"));
        out << "grp,val\n";
        for (double v : {1.0, 2.0, 3.0}) out << "a," << v << "\n";
        for (double v : {4.0, 5.0, 7.0}) out << "b," << v << "\n";
    }
    TempDir out("tabla_stats_csv_out");
    std::ostringstream log;
    CHECK(cli::run_stats(tmp.file("long.csv"), false, "grp", "val", {"anova"}, out.path.string(),
                         "csv", log) == cli::exit_ok);
    const auto a = read_csv(out.file("anova.csv"));
    // F = (2 groups, means 2 and 16/3): computed by hand, ssb 50/3, msw 5/3
    CHECK(std::stod(a.rows[0][0]) == doctest::Approx(10.0).epsilon(1e-9));
}

TEST_CASE("categorize subcommand on a hand-built table") {
    TempDir tmp("tabla_cat");
    {
        std::ofstream out(tmp.file("features.csv"));
        out << feature_csv_header() << "\n";
        // clip A: small tabla, damped; clip B: large tabla, free
        out << "A,1,Ti,damped,3,1760,3520,2000,3,10,5,0.1,,,\n";
        out << "A,1,Ti,damped,4,880,1760,1000,2,20,4,0.1,,,\n";
        out << "A,1,Ti,damped,global,,,2000,,,,,0.008,0.2,0.01\n";
        out << "B,4,Tu,free,3,1760,3520,,0,10,0.05,0.1,,,\n";
        out << "B,4,Tu,free,4,880,1760,1000,1,20,0.04,0.1,,,\n";
        out << "B,4,Tu,free,global,,,1000,,,,,0.003,0.4,0.07\n";
    }
    TempDir out("tabla_cat_out");
    std::ostringstream log;
    CHECK(cli::run_categorize(tmp.file("features.csv"), out.path.string(), log) == cli::exit_ok);
    json rep;
    std::ifstream(out.file("categorization.json")) >> rep;
    CHECK(rep["small_vs_large_diameter"]["holds"] == true);
    CHECK(rep["small_vs_large_diameter"]["small_mean_harmonic_count"] == 5.0);
    CHECK(rep["small_vs_large_diameter"]["large_mean_harmonic_count"] == 1.0);
    CHECK(rep["damped_vs_free"]["band34_harmonics"]["damped_greater"] == true);
    CHECK(rep["damped_vs_free"]["attack_peak_s"]["free_faster"] == true);
    CHECK(rep["damped_vs_free"]["mpf_time_s"]["damped_earlier"] == true);
    CHECK(rep["damped_vs_free"]["decay_s"]["damped_shorter"] == true);
    CHECK(rep["information_levels_3_to_7"]["holds"] == true);

    std::ostringstream log2;
    CHECK(cli::run_categorize(tmp.file("missing.csv"), out.path.string(), log2) == cli::exit_usage);
}

TEST_CASE("plotdata subcommand") {
    TempDir tmp("tabla_plot");
    {
        std::ofstream out(tmp.file("features.csv"));
        out << feature_csv_header() << "\n";
        out << "A,1,Ti,damped,5,440,880,600,2,10,5,0.1,,,\n";
        out << "A,1,Ti,damped,global,,,600,,,,,0.008,0.2,0.01\n";
    }
    SynthStrokeSpec s;
    s.fundamental = 500.0;
    s.partial_ratios = {1};
    s.partial_amplitudes = {1};
    s.partial_decay_constants = {4};
    s.duration = 0.25;
    write_wav(synthesize_stroke(s, 8000), tmp.file("tone.wav"));

    TempDir out("tabla_plot_out");
    std::ostringstream log;
    CHECK(cli::run_plotdata(tmp.file("features.csv"), tmp.file("tone.wav"), out.path.string(),
                            log) == cli::exit_ok);
    const auto mpf = read_csv(out.file("mpf_series.csv"));
    REQUIRE(mpf.rows.size() == 1);
    CHECK(mpf.rows[0][0] == "5");
    CHECK(std::stod(mpf.rows[0][2]) == doctest::Approx(600.0));
    CHECK(fs::exists(out.file("harmonic_count_series.csv")));
    CHECK(fs::exists(out.file("scalogram.csv")));

    // binary scalogram header
    const std::string bin = slurp(out.file("scalogram.bin"));
    REQUIRE(bin.size() > 36);
    CHECK(bin.substr(0, 4) == "SCG1");
    std::uint32_t ns = 0, nt = 0;
    std::memcpy(&ns, bin.data() + 4, 4);
    std::memcpy(&nt, bin.data() + 8, 4);
    CHECK(nt == 2000);
    CHECK(bin.size() == 12 + 8 * (3 + 2 * std::size_t(ns) + nt + std::size_t(ns) * nt));

    // header-only series from an empty feature table
    TempDir tmp2("tabla_plot_empty");
    {
        std::ofstream out2(tmp2.file("features.csv"));
        out2 << feature_csv_header() << "\n";
    }
    TempDir out2("tabla_plot_empty_out");
    std::ostringstream log2;
    CHECK(cli::run_plotdata(tmp2.file("features.csv"), "", out2.path.string(), log2) == cli::exit_ok);
    CHECK(read_csv(out2.file("mpf_series.csv")).rows.empty());
}
