#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace tabla {

namespace detail {

/// Continued fraction for the incomplete beta function (Lentz's method).
inline double betacf(double a, double b, double x) {
    constexpr int max_iter = 300;
    constexpr double eps = 3e-16;
    constexpr double fpmin = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0, d = 1.0 - qab * x / qap;
    if (std::abs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) return h;
    }
    throw std::runtime_error("betacf: continued fraction did not converge");
}

}  // namespace detail

/// Regularized incomplete beta function I_x(a, b).
inline double ibeta(double a, double b, double x) {
    if (!(a > 0) || !(b > 0)) throw std::invalid_argument("ibeta: a, b must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                         a * std::log(x) + b * std::log1p(-x);
    const double bt = std::exp(ln_bt);
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * detail::betacf(a, b, x) / a;
    return 1.0 - bt * detail::betacf(b, a, 1.0 - x) / b;
}

/// F distribution CDF, fractional degrees of freedom allowed.
inline double f_cdf(double x, double df1, double df2) {
    if (!(df1 > 0) || !(df2 > 0)) throw std::invalid_argument("f_cdf: df must be positive");
    if (x <= 0.0) return 0.0;
    return ibeta(df1 / 2.0, df2 / 2.0, df1 * x / (df1 * x + df2));
}

/// Student's t CDF.
inline double t_cdf(double t, double df) {
    if (!(df > 0)) throw std::invalid_argument("t_cdf: df must be positive");
    const double p = 0.5 * ibeta(df / 2.0, 0.5, df / (df + t * t));
    return t >= 0 ? 1.0 - p : p;
}

/// Two-sided t quantile: returns t such that P(|T| <= t) = p.
inline double t_quantile(double p, double df) {
    if (!(p > 0) || !(p < 1)) throw std::invalid_argument("t_quantile: p in (0,1)");
    const double target = 0.5 + 0.5 * p;  // upper-tail point of the CDF
    double lo = 0.0, hi = 1.0;
    while (t_cdf(hi, df) < target) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (t_cdf(mid, df) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

inline double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

namespace detail {

/// Gauss-Legendre nodes/weights on [-1, 1], 16 points.
inline const double gl16_x[8] = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                                 0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                                 0.9445750230732326, 0.9894009349916499};
inline const double gl16_w[8] = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                                 0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                                 0.0622535239386479, 0.0271524594117541};

template <typename F>
double gauss16(F&& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0;
    for (int i = 0; i < 8; ++i)
        s += gl16_w[i] * (f(c + h * gl16_x[i]) + f(c - h * gl16_x[i]));
    return s * h;
}

template <typename F>
double gauss_panels(F&& f, double a, double b, int panels) {
    double s = 0;
    const double h = (b - a) / panels;
    for (int i = 0; i < panels; ++i) s += gauss16(f, a + i * h, a + (i + 1) * h);
    return s;
}

/// Fixed quadrature grid on [-9, 9] (12 panels x 16 nodes) with the
/// w-independent factors of the range integrand precomputed.
struct RangeGrid {
    static constexpr int n = 12 * 16;
    double z[n];
    double wt[n];   // quadrature weight * normal_pdf(z)
    double cdf[n];  // normal_cdf(z)
    RangeGrid() {
        const double h = 18.0 / 12.0;
        int idx = 0;
        for (int p = 0; p < 12; ++p) {
            const double c = -9.0 + (p + 0.5) * h;
            for (int i = 0; i < 8; ++i) {
                for (double sign : {1.0, -1.0}) {
                    const double zi = c + sign * 0.5 * h * gl16_x[i];
                    z[idx] = zi;
                    wt[idx] = 0.5 * h * gl16_w[i] * normal_pdf(zi);
                    cdf[idx] = normal_cdf(zi);
                    ++idx;
                }
            }
        }
    }
};

inline double ipow(double x, int n) {
    double r = 1.0;
    for (double b = x; n > 0; n >>= 1, b *= b)
        if (n & 1) r *= b;
    return r;
}

/// P(range of k iid standard normals <= w).
inline double normal_range_cdf(double w, int k) {
    if (w <= 0.0) return 0.0;
    static const RangeGrid g;
    double s = 0.0;
    for (int i = 0; i < RangeGrid::n; ++i)
        s += g.wt[i] * ipow(g.cdf[i] - normal_cdf(g.z[i] - w), k - 1);
    return k * s;
}

}  // namespace detail

/// Studentized range distribution P(Q <= q) for k groups and df degrees of
/// freedom, by double numerical integration over the chi-scaled range.
inline double studentized_range_cdf(double q, int k, double df) {
    if (k < 2) throw std::invalid_argument("studentized_range_cdf: k >= 2 required");
    if (!(df > 0)) throw std::invalid_argument("studentized_range_cdf: df must be positive");
    if (q <= 0.0) return 0.0;
    // u = s/sigma with density c * u^{df-1} exp(-df u^2/2)
    const double ln_c = 0.5 * df * std::log(df) - std::lgamma(0.5 * df) - (0.5 * df - 1.0) * std::log(2.0);
    auto outer = [&](double u) {
        const double ln_d = ln_c + (df - 1.0) * std::log(u) - 0.5 * df * u * u;
        if (ln_d < -745.0) return 0.0;
        return std::exp(ln_d) * detail::normal_range_cdf(q * u, k);
    };
    double lo = 0.0, hi = std::max(4.0, 1.0 + 12.0 / std::sqrt(df));
    if (df > 50.0) {
        const double w = 12.0 / std::sqrt(2.0 * df);
        lo = std::max(0.0, 1.0 - w);
        hi = 1.0 + w;
    }
    double p = detail::gauss_panels(outer, lo, hi, 24);
    return std::min(1.0, std::max(0.0, p));
}

/// Quantile of the studentized range distribution (e.g. p = 0.95 for the
/// 5% critical value).
inline double studentized_range_quantile(double p, int k, double df) {
    if (!(p > 0) || !(p < 1)) throw std::invalid_argument("p in (0,1)");
    double lo = 0.0, hi = 10.0, fhi = studentized_range_cdf(hi, k, df) - p;
    while (fhi < 0.0) {
        hi *= 2.0;
        if (hi > 1e4) throw std::runtime_error("studentized_range_quantile: no bracket");
        fhi = studentized_range_cdf(hi, k, df) - p;
    }
    // Illinois false position: secant-rate convergence with a guaranteed bracket.
    double flo = -p;
    int side = 0;
    for (int i = 0; i < 100 && hi - lo > 1e-10; ++i) {
        const double mid = (lo * fhi - hi * flo) / (fhi - flo);
        const double fmid = studentized_range_cdf(mid, k, df) - p;
        if (fmid < 0.0) {
            if (side == -1) fhi *= 0.5;
            lo = mid;
            flo = fmid;
            side = -1;
        } else {
            if (side == 1) flo *= 0.5;
            hi = mid;
            fhi = fmid;
            side = 1;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace tabla
