// Command-line front end: synth | analyze | stats | categorize | plotdata.

#include <CLI11.hpp>

#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tabla/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"tabla stroke analysis pipeline"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "synthesize a stroke (or the fixture corpus)");
    std::string synth_spec, synth_out = "stroke.wav", corpus_dir;
    int rate = 44100;
    std::uint64_t seed = 0;
    synth->add_option("--spec", synth_spec, "stroke spec JSON (default: canonical 5-partial stroke)");
    synth->add_option("--out", synth_out, "output WAV path");
    synth->add_option("--rate", rate, "sample rate, Hz");
    synth->add_option("--seed", seed, "noise seed");
    synth->add_option("--corpus", corpus_dir, "write the 45-clip fixture corpus to this directory");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "extract stroke features from WAV files");
    std::vector<std::string> inputs;
    std::string out_dir = "out", format = "csv", config_path, bands_path;
    analyze->add_option("inputs", inputs, "input WAV files");
    analyze->add_option("--out", out_dir, "output directory");
    analyze->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    analyze->add_option("--config", config_path, "analysis config JSON");
    analyze->add_option("--bands", bands_path, "band plan JSON override");
    analyze->add_option("--seed", seed, "seed (recorded for determinism)");

    // stats
    auto* stats = app.add_subcommand("stats", "descriptives / Levene / ANOVA / Welch / Tukey");
    std::string table_path, group_by = "subband", measure = "cv", tests_csv;
    bool use_table1 = false;
    stats->add_option("--table", table_path, "long-format CSV (or a band-summary CSV with --table1)");
    stats->add_flag("--table1", use_table1, "interpret the table as the bundled band-summary fixture");
    stats->add_option("--group-by", group_by, "grouping column (or subband|tabla with --table1)");
    stats->add_option("--measure", measure, "measure column (or cv|mean|sd with --table1)");
    stats->add_option("--tests", tests_csv, "comma list: descriptives,levene,anova,welch,tukey (default all)");
    stats->add_option("--out", out_dir, "output directory");
    stats->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    // categorize
    auto* categorize = app.add_subcommand("categorize", "evaluate the categorization rules");
    std::string features_csv;
    categorize->add_option("--features", features_csv, "features.csv from analyze")->required();
    categorize->add_option("--out", out_dir, "output directory");

    // plotdata
    auto* plotdata = app.add_subcommand("plotdata", "emit plot-ready CSV series");
    std::string wav_path;
    plotdata->add_option("--features", features_csv, "features.csv from analyze");
    plotdata->add_option("--wav", wav_path, "clip whose scalogram heat map to export");
    plotdata->add_option("--out", out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : tabla::cli::exit_usage;
    }

    if (synth->parsed()) {
        if (!corpus_dir.empty()) return tabla::cli::run_synth_corpus(corpus_dir, seed ? seed : 42);
        return tabla::cli::run_synth(synth_spec, synth_out, rate, seed);
    }
    if (analyze->parsed()) {
        try {
            tabla::cli::AnalysisConfig cfg = tabla::cli::load_config(config_path);
            if (!bands_path.empty()) {
                std::ifstream in(bands_path);
                if (!in) throw std::runtime_error("cannot open " + bands_path);
                tabla::json j;
                in >> j;
                cfg.plan = tabla::band_plan_from_json(j);
            }
            cfg.seed = seed;
            return tabla::cli::run_analyze(inputs, out_dir, format, cfg);
        } catch (const std::exception& e) {
            std::cerr << "analyze: " << e.what() << '\n';
            return tabla::cli::exit_usage;
        }
    }
    if (stats->parsed()) {
        std::set<std::string> tests;
        std::stringstream ss(tests_csv);
        std::string tok;
        while (std::getline(ss, tok, ','))
            if (!tok.empty()) tests.insert(tok);
        return tabla::cli::run_stats(table_path, use_table1 || table_path.empty(), group_by, measure,
                                     tests, out_dir, format);
    }
    if (categorize->parsed()) return tabla::cli::run_categorize(features_csv, out_dir);
    if (plotdata->parsed()) return tabla::cli::run_plotdata(features_csv, wav_path, out_dir);
    return tabla::cli::exit_usage;
}
