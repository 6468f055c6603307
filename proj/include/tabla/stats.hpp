#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tabla/special.hpp"

namespace tabla {

/// Labeled numeric groups: the input of every test in this module.
struct GroupedSamples {
    struct Group {
        std::string label;
        std::vector<double> values;
    };
    std::vector<Group> groups;

    std::size_t total_n() const {
        std::size_t n = 0;
        for (const auto& g : groups) n += g.values.size();
        return n;
    }
    void validate() const {
        if (groups.size() < 2) throw std::invalid_argument("need at least 2 groups");
        for (const auto& g : groups)
            if (g.values.empty()) throw std::invalid_argument("empty group " + g.label);
    }
};

inline double mean_of(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

/// n-1 sample standard deviation.
inline double sd_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double ss = 0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

inline double coefficient_of_variation(double sd, double mean) {
    if (mean == 0.0) throw std::invalid_argument("coefficient_of_variation: zero mean");
    return 100.0 * sd / mean;
}

struct DescriptivesRow {
    std::string label;
    std::size_t n = 0;
    double mean = 0, sd = 0, se = 0;
    double ci95_low = 0, ci95_high = 0;
    bool has_ci = false;
    double min = 0, max = 0;
};

/// Per-group rows plus a pooled "Total" row, in the reference tool's layout.
inline std::vector<DescriptivesRow> descriptives(const GroupedSamples& g) {
    g.validate();
    std::vector<DescriptivesRow> rows;
    std::vector<double> pooled;
    auto make_row = [](const std::string& label, const std::vector<double>& v) {
        DescriptivesRow r;
        r.label = label;
        r.n = v.size();
        r.mean = mean_of(v);
        r.sd = sd_of(v);
        r.min = *std::min_element(v.begin(), v.end());
        r.max = *std::max_element(v.begin(), v.end());
        if (v.size() >= 2) {
            r.se = r.sd / std::sqrt(static_cast<double>(v.size()));
            const double t = t_quantile(0.95, static_cast<double>(v.size() - 1));
            r.ci95_low = r.mean - t * r.se;
            r.ci95_high = r.mean + t * r.se;
            r.has_ci = true;
        }
        return r;
    };
    for (const auto& grp : g.groups) {
        rows.push_back(make_row(grp.label, grp.values));
        pooled.insert(pooled.end(), grp.values.begin(), grp.values.end());
    }
    rows.push_back(make_row("Total", pooled));
    return rows;
}

struct AnovaResult {
    double f_statistic = 0;
    int df_between = 0;
    int df_within = 0;
    double p_value = 1;
    double ms_within = 0;
    bool degenerate = false;
};

inline AnovaResult oneway_anova(const GroupedSamples& g) {
    g.validate();
    const std::size_t k = g.groups.size();
    const std::size_t n = g.total_n();
    if (n <= k) throw std::invalid_argument("ANOVA requires total N > group count");
    double grand = 0;
    for (const auto& grp : g.groups)
        for (double x : grp.values) grand += x;
    grand /= static_cast<double>(n);
    double ssb = 0, ssw = 0;
    for (const auto& grp : g.groups) {
        const double m = mean_of(grp.values);
        ssb += static_cast<double>(grp.values.size()) * (m - grand) * (m - grand);
        for (double x : grp.values) ssw += (x - m) * (x - m);
    }
    AnovaResult r;
    r.df_between = static_cast<int>(k) - 1;
    r.df_within = static_cast<int>(n - k);
    r.ms_within = ssw / r.df_within;
    if (r.ms_within == 0.0) {
        r.degenerate = true;
        r.f_statistic = ssb > 0 ? std::numeric_limits<double>::infinity() : 0.0;
        r.p_value = ssb > 0 ? 0.0 : 1.0;
        return r;
    }
    r.f_statistic = (ssb / r.df_between) / r.ms_within;
    r.p_value = 1.0 - f_cdf(r.f_statistic, r.df_between, r.df_within);
    return r;
}

struct LeveneResult {
    double statistic = 0;
    int df1 = 0, df2 = 0;
    double p_value = 1;
    bool degenerate = false;
    std::vector<std::string> excluded_groups;  // size-1 groups
};

/// Mean-centered Levene: one-way ANOVA F on |x - group mean|.
inline LeveneResult levene_test(const GroupedSamples& g) {
    g.validate();
    GroupedSamples dev;
    LeveneResult r;
    for (const auto& grp : g.groups) {
        if (grp.values.size() < 2) {
            r.excluded_groups.push_back(grp.label);
            continue;
        }
        const double m = mean_of(grp.values);
        GroupedSamples::Group d;
        d.label = grp.label;
        for (double x : grp.values) d.values.push_back(std::abs(x - m));
        dev.groups.push_back(std::move(d));
    }
    if (dev.groups.size() < 2) throw std::invalid_argument("levene_test: need >= 2 groups of size >= 2");
    bool all_zero = true;
    for (const auto& grp : dev.groups)
        for (double x : grp.values)
            if (x != 0.0) all_zero = false;
    if (all_zero) {
        r.degenerate = true;
        r.p_value = std::numeric_limits<double>::quiet_NaN();
        return r;
    }
    const AnovaResult a = oneway_anova(dev);
    r.statistic = a.f_statistic;
    r.df1 = a.df_between;
    r.df2 = a.df_within;
    r.p_value = a.p_value;
    r.degenerate = a.degenerate;
    return r;
}

struct WelchResult {
    double statistic = 0;
    int df1 = 0;
    double df2 = 0;  // fractional
    double p_value = 1;
    std::vector<std::string> excluded_groups;  // zero-variance or size-1 groups
};

/// Welch's heteroscedastic one-way test with Satterthwaite-style
/// fractional denominator degrees of freedom.
inline WelchResult welch_anova(const GroupedSamples& g) {
    g.validate();
    WelchResult r;
    std::vector<double> n, m, v;
    for (const auto& grp : g.groups) {
        const double var = sd_of(grp.values) * sd_of(grp.values);
        if (grp.values.size() < 2 || var == 0.0) {
            r.excluded_groups.push_back(grp.label);
            continue;
        }
        n.push_back(static_cast<double>(grp.values.size()));
        m.push_back(mean_of(grp.values));
        v.push_back(var);
    }
    const std::size_t k = n.size();
    if (k < 2) throw std::invalid_argument("welch_anova: need >= 2 usable groups");
    double W = 0, mw = 0;
    std::vector<double> w(k);
    for (std::size_t i = 0; i < k; ++i) {
        w[i] = n[i] / v[i];
        W += w[i];
    }
    for (std::size_t i = 0; i < k; ++i) mw += w[i] * m[i] / W;
    double A = 0, S = 0;
    for (std::size_t i = 0; i < k; ++i) {
        A += w[i] * (m[i] - mw) * (m[i] - mw);
        const double t = 1.0 - w[i] / W;
        S += t * t / (n[i] - 1.0);
    }
    const double kk = static_cast<double>(k);
    A /= (kk - 1.0);
    const double B = 1.0 + 2.0 * (kk - 2.0) / (kk * kk - 1.0) * S;
    r.statistic = A / B;
    r.df1 = static_cast<int>(k) - 1;
    r.df2 = (kk * kk - 1.0) / (3.0 * S);
    r.p_value = 1.0 - f_cdf(r.statistic, r.df1, r.df2);
    return r;
}

struct TukeyComparison {
    std::string label_i, label_j;
    double mean_difference = 0;
    double std_error = 0;
    double p_value = 1;
    double ci95_low = 0, ci95_high = 0;
    bool significant_at_05 = false;
};

/// Tukey-Kramer HSD over all ordered pairs. SE = sqrt(MSW*(1/ni + 1/nj));
/// p from the studentized range with q = |diff| / sqrt(MSW/2*(1/ni+1/nj)).
inline std::vector<TukeyComparison> tukey_hsd(const GroupedSamples& g, const AnovaResult& anova) {
    g.validate();
    if (anova.ms_within <= 0.0) throw std::invalid_argument("tukey_hsd: degenerate MSW");
    const std::size_t k = g.groups.size();
    const double df = anova.df_within;
    const double q_crit = studentized_range_quantile(0.95, static_cast<int>(k), df);
    std::vector<TukeyComparison> out;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            if (i == j) continue;
            const auto& gi = g.groups[i];
            const auto& gj = g.groups[j];
            TukeyComparison c;
            c.label_i = gi.label;
            c.label_j = gj.label;
            const double inv = 1.0 / gi.values.size() + 1.0 / gj.values.size();
            c.mean_difference = mean_of(gi.values) - mean_of(gj.values);
            c.std_error = std::sqrt(anova.ms_within * inv);
            const double half = std::sqrt(anova.ms_within / 2.0 * inv);
            const double q = std::abs(c.mean_difference) / half;
            c.p_value = 1.0 - studentized_range_cdf(q, static_cast<int>(k), df);
            c.ci95_low = c.mean_difference - q_crit * half;
            c.ci95_high = c.mean_difference + q_crit * half;
            c.significant_at_05 = q > q_crit;
            out.push_back(std::move(c));
        }
    }
    return out;
}

/// Display convention of the reference tables: p below 0.0005 prints ".000".
inline std::string format_p(double p) {
    if (std::isnan(p)) return "-";
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.3f", p);
    std::string s(buf);
    if (s[0] == '0') s.erase(0, 1);  // SPSS-style leading-dot
    return s;
}

}  // namespace tabla
