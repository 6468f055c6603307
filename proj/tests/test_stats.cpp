#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "tabla/special.hpp"
#include "tabla/stats.hpp"
#include "tabla/table1.hpp"

using namespace tabla;

namespace {

// Independent oracle: regularized incomplete beta by direct Simpson
// quadrature of the density.
double ibeta_quadrature(double a, double b, double x) {
    const int n = 200000;
    const double h = x / n;
    auto f = [&](double t) {
        if (t <= 0.0 || t >= 1.0) return 0.0;
        return std::exp((a - 1.0) * std::log(t) + (b - 1.0) * std::log1p(-t));
    };
    double acc = f(1e-12) + f(x);
    for (int i = 1; i < n; ++i) acc += f(h * i) * ((i % 2) ? 4.0 : 2.0);
    const double ln_beta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    return acc * h / 3.0 / std::exp(ln_beta);
}

// Direct sum-of-squares one-way F, written from the definition.
double brute_force_f(const GroupedSamples& g) {
    double grand = 0;
    std::size_t n = 0;
    for (const auto& grp : g.groups)
        for (double x : grp.values) { grand += x; ++n; }
    grand /= n;
    double ssb = 0, ssw = 0;
    for (const auto& grp : g.groups) {
        double m = 0;
        for (double x : grp.values) m += x;
        m /= grp.values.size();
        ssb += grp.values.size() * (m - grand) * (m - grand);
        for (double x : grp.values) ssw += (x - m) * (x - m);
    }
    const double dfb = static_cast<double>(g.groups.size()) - 1.0;
    const double dfw = static_cast<double>(n - g.groups.size());
    return (ssb / dfb) / (ssw / dfw);
}

GroupedSamples two_groups(std::vector<double> a, std::vector<double> b) {
    GroupedSamples g;
    g.groups.push_back({"a", std::move(a)});
    g.groups.push_back({"b", std::move(b)});
    return g;
}

}  // namespace

TEST_CASE("incomplete beta against quadrature oracle") {
    CHECK(ibeta(2.5, 3.5, 0.3) == doctest::Approx(0.296752989296).epsilon(1e-9));
    CHECK(ibeta(0.5, 5.0, 0.2) == doctest::Approx(0.855072394596).epsilon(1e-9));
    CHECK(ibeta(2.5, 3.5, 0.3) == doctest::Approx(ibeta_quadrature(2.5, 3.5, 0.3)).epsilon(1e-8));
    CHECK(ibeta(4.0, 2.0, 0.7) == doctest::Approx(ibeta_quadrature(4.0, 2.0, 0.7)).epsilon(1e-8));
}

TEST_CASE("F distribution CDF") {
    CHECK(f_cdf(0.0, 3, 7) == 0.0);
    CHECK(f_cdf(1.0, 9, 9) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(1.0 - f_cdf(2.561, 4, 18) == doctest::Approx(0.073953931136).epsilon(1e-8));
    // monotone in x
    CHECK(f_cdf(1.0, 4, 18) < f_cdf(2.0, 4, 18));
}

TEST_CASE("t distribution CDF and quantile") {
    CHECK(t_cdf(0.0, 5) == doctest::Approx(0.5));
    CHECK(t_cdf(2.0, 12) + t_cdf(-2.0, 12) == doctest::Approx(1.0).epsilon(1e-12));
    const double q = t_quantile(0.95, 4);
    CHECK(q == doctest::Approx(2.776445).epsilon(1e-5));  // standard table value
    CHECK(t_cdf(q, 4) - t_cdf(-q, 4) == doctest::Approx(0.95).epsilon(1e-9));
}

TEST_CASE("studentized range distribution") {
    // frozen from standard references
    CHECK(studentized_range_cdf(3.0, 3, 10) == doctest::Approx(0.86501658).epsilon(2e-5));
    CHECK(studentized_range_cdf(4.0, 5, 18) == doctest::Approx(0.92678604).epsilon(2e-5));
    CHECK(studentized_range_cdf(2.0, 4, 6) == doctest::Approx(0.46490871).epsilon(2e-5));
    CHECK(studentized_range_quantile(0.95, 5, 18) == doctest::Approx(4.2763).epsilon(5e-3));
    // monotone nondecreasing in q
    double prev = 0;
    for (double q = 0.5; q < 8.0; q += 0.5) {
        const double p = studentized_range_cdf(q, 4, 12);
        CHECK(p >= prev);
        prev = p;
    }
    // k=2 reduces to the |t| distribution
    for (double x : {1.0, 2.0, 3.0, 4.5}) {
        for (double df : {5.0, 18.0, 30.0}) {
            const double lhs = studentized_range_cdf(x, 2, df);
            const double rhs = 2.0 * t_cdf(x / std::sqrt(2.0), df) - 1.0;
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-4));
        }
    }
}

TEST_CASE("coefficient of variation") {
    CHECK(coefficient_of_variation(24.341, 178.732) == doctest::Approx(13.61871).epsilon(1e-6));
    CHECK(coefficient_of_variation(61.536, 315.576) == doctest::Approx(19.49958).epsilon(1e-6));
    CHECK(coefficient_of_variation(0.0, 3.0) == 0.0);
    CHECK_THROWS(coefficient_of_variation(1.0, 0.0));
}

TEST_CASE("descriptives reproduce the CV-by-sub-band table") {
    const auto rows = descriptives(table1_by_subband(Table1Measure::cv));
    REQUIRE(rows.size() == 6);
    CHECK(rows[0].n == 3);
    CHECK(rows[0].mean == doctest::Approx(15.5057552).epsilon(1e-7));
    CHECK(rows[0].sd == doctest::Approx(2.02449572).epsilon(1e-7));
    CHECK(rows[0].se == doctest::Approx(1.16884315).epsilon(1e-7));
    CHECK(rows[0].ci95_low == doctest::Approx(10.4766290).epsilon(1e-6));
    CHECK(rows[0].ci95_high == doctest::Approx(20.5348814).epsilon(1e-6));
    CHECK(rows[0].min == doctest::Approx(13.61871).epsilon(1e-6));
    CHECK(rows[0].max == doctest::Approx(17.64422).epsilon(1e-6));
    const auto& total = rows.back();
    CHECK(total.label == "Total");
    CHECK(total.n == 23);
    CHECK(total.mean == doctest::Approx(16.2597809).epsilon(1e-7));
    CHECK(total.sd == doctest::Approx(5.38559134).epsilon(1e-7));
}

TEST_CASE("descriptives edge cases") {
    GroupedSamples g = two_groups({5, 5, 5}, {1, 2});
    const auto rows = descriptives(g);
    CHECK(rows[0].mean == 5.0);
    CHECK(rows[0].sd == 0.0);
    CHECK(rows[0].ci95_low == 5.0);
    CHECK(rows[0].ci95_high == 5.0);
    GroupedSamples single = two_groups({3.0}, {1, 2});
    CHECK_FALSE(descriptives(single)[0].has_ci);
}

TEST_CASE("Levene test reproduces the published statistics") {
    const auto cv = levene_test(table1_by_subband(Table1Measure::cv));
    CHECK(cv.statistic == doctest::Approx(0.896).epsilon(2e-3));
    CHECK(cv.df1 == 4);
    CHECK(cv.df2 == 18);
    CHECK(cv.p_value == doctest::Approx(0.487).epsilon(3e-3));
    const auto means = levene_test(table1_by_subband(Table1Measure::mean));
    CHECK(means.statistic == doctest::Approx(8.774).epsilon(1e-3));
    CHECK(means.p_value < 0.0015);
    const auto sds = levene_test(table1_by_subband(Table1Measure::sd));
    CHECK(sds.statistic == doctest::Approx(3.222).epsilon(1e-3));
    CHECK(sds.p_value == doctest::Approx(0.037).epsilon(3e-2));
    const auto tab = levene_test(table1_by_tabla(Table1Measure::cv));
    CHECK(tab.statistic == doctest::Approx(0.716).epsilon(2e-3));
    CHECK(tab.p_value == doctest::Approx(0.592).epsilon(3e-3));
}

TEST_CASE("one-way ANOVA reproduces the published statistics") {
    const auto cv = oneway_anova(table1_by_subband(Table1Measure::cv));
    CHECK(cv.f_statistic == doctest::Approx(2.561).epsilon(2e-3));
    CHECK(cv.df_between == 4);
    CHECK(cv.df_within == 18);
    CHECK(cv.p_value == doctest::Approx(0.074).epsilon(2e-2));
    const auto means = oneway_anova(table1_by_subband(Table1Measure::mean));
    CHECK(means.f_statistic == doctest::Approx(500.313).epsilon(1e-3));
    CHECK(means.p_value < 1e-6);
    const auto tab = oneway_anova(table1_by_tabla(Table1Measure::cv));
    CHECK(tab.f_statistic == doctest::Approx(0.954).epsilon(2e-3));
    CHECK(tab.p_value == doctest::Approx(0.456).epsilon(3e-3));
    const auto sds = oneway_anova(table1_by_subband(Table1Measure::sd));
    CHECK(sds.f_statistic == doctest::Approx(30.082).epsilon(1e-3));
}

TEST_CASE("ANOVA invariances and the k=2 pooled-t identity") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uni(-5, 5);
    GroupedSamples g;
    for (int i = 0; i < 3; ++i) {
        GroupedSamples::Group grp;
        grp.label = std::to_string(i);
        for (int j = 0; j < 4 + i; ++j) grp.values.push_back(uni(rng));
        g.groups.push_back(grp);
    }
    const double f0 = oneway_anova(g).f_statistic;
    GroupedSamples shifted = g, scaled = g, relabeled = g;
    for (auto& grp : shifted.groups)
        for (auto& v : grp.values) v += 11.25;
    for (auto& grp : scaled.groups)
        for (auto& v : grp.values) v *= 3.5;
    std::swap(relabeled.groups[0], relabeled.groups[2]);
    CHECK(oneway_anova(shifted).f_statistic == doctest::Approx(f0).epsilon(1e-9));
    CHECK(oneway_anova(scaled).f_statistic == doctest::Approx(f0).epsilon(1e-12));
    CHECK(oneway_anova(relabeled).f_statistic == doctest::Approx(f0).epsilon(1e-12));

    // k=2: F equals the squared pooled two-sample t
    GroupedSamples g2 = two_groups({1.2, 3.4, 2.2, 4.1}, {5.0, 6.1, 4.9, 5.5, 7.2});
    const auto a = oneway_anova(g2);
    const double n1 = 4, n2 = 5;
    const double m1 = mean_of(g2.groups[0].values), m2 = mean_of(g2.groups[1].values);
    const double s1 = sd_of(g2.groups[0].values), s2 = sd_of(g2.groups[1].values);
    const double sp2 = ((n1 - 1) * s1 * s1 + (n2 - 1) * s2 * s2) / (n1 + n2 - 2);
    const double t = (m1 - m2) / std::sqrt(sp2 * (1 / n1 + 1 / n2));
    CHECK(a.f_statistic == doctest::Approx(t * t).epsilon(1e-9));
}

TEST_CASE("degenerate ANOVA") {
    GroupedSamples g = two_groups({2, 2, 2}, {5, 5, 5});
    const auto a = oneway_anova(g);
    CHECK(a.degenerate);
    CHECK(a.p_value == 0.0);
}

TEST_CASE("Welch ANOVA reproduces the published p-values") {
    const auto cv = welch_anova(table1_by_subband(Table1Measure::cv));
    CHECK(cv.p_value == doctest::Approx(0.126).epsilon(2e-2));
    CHECK(cv.df1 == 4);
    CHECK(cv.df2 == doctest::Approx(8.711).epsilon(1e-3));
    const auto tab = welch_anova(table1_by_tabla(Table1Measure::cv));
    CHECK(tab.p_value == doctest::Approx(0.621).epsilon(4e-3));
}

TEST_CASE("Welch with two groups equals the Welch t-squared") {
    GroupedSamples g = two_groups({1.0, 2.5, 2.0, 3.5}, {4.0, 6.5, 5.0, 7.5, 6.0});
    const auto w = welch_anova(g);
    const double n1 = 4, n2 = 5;
    const double m1 = mean_of(g.groups[0].values), m2 = mean_of(g.groups[1].values);
    const double v1 = sd_of(g.groups[0].values) * sd_of(g.groups[0].values);
    const double v2 = sd_of(g.groups[1].values) * sd_of(g.groups[1].values);
    const double t2 = (m1 - m2) * (m1 - m2) / (v1 / n1 + v2 / n2);
    CHECK(w.statistic == doctest::Approx(t2).epsilon(1e-9));
}

TEST_CASE("Tukey HSD reproduces the published comparisons") {
    const auto g = table1_by_subband(Table1Measure::mean);
    const auto anova = oneway_anova(g);
    const auto comps = tukey_hsd(g, anova);
    auto find = [&](const std::string& i, const std::string& j) {
        for (const auto& c : comps)
            if (c.label_i == i && c.label_j == j) return c;
        FAIL("pair not found");
        return comps.front();
    };
    const auto c12 = find("1", "2");
    CHECK(c12.mean_difference == doctest::Approx(-128.671).epsilon(1e-8));
    CHECK(c12.std_error == doctest::Approx(55.74770298).epsilon(1e-7));
    CHECK(c12.p_value == doctest::Approx(0.188).epsilon(2e-2));
    CHECK_FALSE(c12.significant_at_05);
    CHECK(c12.ci95_low == doctest::Approx(-297.2406692).epsilon(1e-5));
    CHECK(c12.ci95_high == doctest::Approx(39.8986692).epsilon(1e-4));
    const auto c13 = find("1", "3");
    CHECK(c13.mean_difference == doctest::Approx(-401.2432).epsilon(1e-8));
    CHECK(c13.p_value < 0.001);
    CHECK(c13.significant_at_05);
    const auto c23 = find("2", "3");
    CHECK(c23.std_error == doctest::Approx(48.27892699).epsilon(1e-7));
    // antisymmetry
    const auto c21 = find("2", "1");
    CHECK(c21.mean_difference == doctest::Approx(-c12.mean_difference));
    CHECK(c21.p_value == doctest::Approx(c12.p_value).epsilon(1e-12));

    const auto gs = table1_by_subband(Table1Measure::sd);
    const auto comps_sd = tukey_hsd(gs, oneway_anova(gs));
    auto find_sd = [&](const std::string& i, const std::string& j) {
        for (const auto& c : comps_sd)
            if (c.label_i == i && c.label_j == j) return c;
        FAIL("pair not found");
        return comps_sd.front();
    };
    CHECK(find_sd("1", "2").p_value == doctest::Approx(0.998).epsilon(3e-3));
    CHECK(find_sd("1", "3").p_value == doctest::Approx(0.104).epsilon(3e-2));
    CHECK(find_sd("2", "3").p_value == doctest::Approx(0.091).epsilon(3e-2));
    const auto c45 = find_sd("4", "5");
    CHECK(c45.mean_difference == doctest::Approx(-61.485).epsilon(1e-8));
    CHECK(c45.std_error == doctest::Approx(28.90275653).epsilon(1e-7));
    CHECK(c45.p_value == doctest::Approx(0.252).epsilon(2e-2));
    CHECK_FALSE(c45.significant_at_05);
}

TEST_CASE("Tukey properties: CI/significance equivalence, scale invariance") {
    const auto g = table1_by_subband(Table1Measure::sd);
    const auto comps = tukey_hsd(g, oneway_anova(g));
    for (const auto& c : comps) {
        const bool ci_excludes_zero = c.ci95_low > 0.0 || c.ci95_high < 0.0;
        CHECK(c.significant_at_05 == ci_excludes_zero);
        CHECK(c.p_value >= 0.0);
        CHECK(c.p_value <= 1.0);
    }
    GroupedSamples scaled = g;
    for (auto& grp : scaled.groups)
        for (auto& v : grp.values) v *= 7.5;
    const auto comps2 = tukey_hsd(scaled, oneway_anova(scaled));
    for (std::size_t i = 0; i < comps.size(); ++i)
        CHECK(comps2[i].p_value == doctest::Approx(comps[i].p_value).epsilon(1e-9));
}

TEST_CASE("brute-force oracle equivalence on random instances") {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> nk(2, 4), nn(2, 6);
    std::uniform_real_distribution<double> uni(-10, 10);
    for (int iter = 0; iter < 25; ++iter) {
        GroupedSamples g;
        const int k = nk(rng);
        for (int i = 0; i < k; ++i) {
            GroupedSamples::Group grp;
            grp.label = std::to_string(i);
            const int n = nn(rng);
            for (int j = 0; j < n; ++j) grp.values.push_back(uni(rng));
            g.groups.push_back(grp);
        }
        const auto a = oneway_anova(g);
        if (!a.degenerate)
            CHECK(a.f_statistic == doctest::Approx(brute_force_f(g)).epsilon(1e-9));
    }
}

TEST_CASE("p display convention") {
    CHECK(format_p(0.0004) == ".000");
    CHECK(format_p(0.188) == ".188");
    CHECK(format_p(0.9982) == ".998");
}

TEST_CASE("table1 CSV round trip") {
    write_table1_csv(table1_data(), "table1_rt.csv");
    const auto cells = load_table1_csv("table1_rt.csv");
    REQUIRE(cells.size() == table1_data().size());
    CHECK(cells[3].mean == doctest::Approx(1181.595));
    CHECK(cells[18].mean == doctest::Approx(2217.92));
}
