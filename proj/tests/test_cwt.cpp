#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "tabla/audio.hpp"
#include "tabla/cwt.hpp"

using namespace tabla;

namespace {

AudioClip tone(double freq, double seconds = 0.5, int rate = 8000) {
    AudioClip c;
    c.sample_rate = rate;
    const std::size_t n = static_cast<std::size_t>(seconds * rate);
    c.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        c.samples[i] = std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(i) / rate);
    return c;
}

}  // namespace

TEST_CASE("scale/frequency conversion is self-inverse") {
    WaveletSpec w;
    CHECK(w.fourier_factor() == doctest::Approx(4.0 * std::numbers::pi /
                                                (6.0 + std::sqrt(38.0))).epsilon(1e-12));
    for (double f : {55.0, 440.0, 3520.0})
        CHECK(w.scale_to_frequency(w.frequency_to_scale(f)) == doctest::Approx(f).epsilon(1e-12));
}

TEST_CASE("tone ridge within 3 percent") {
    for (double f : {220.0, 440.0, 880.0}) {
        const auto sc = cwt_transform(tone(f));
        const auto ridge = ridge_frequency(sc);
        REQUIRE(ridge.has_value());
        CHECK(*ridge == doctest::Approx(f).epsilon(0.03));
    }
}

TEST_CASE("octave doubling halves the ridge scale") {
    WaveletSpec w;
    w.dj = 1.0 / 16.0;
    const auto s1 = cwt_transform(tone(300.0), w);
    const auto s2 = cwt_transform(tone(600.0), w);
    const auto r1 = ridge_frequency(s1);
    const auto r2 = ridge_frequency(s2);
    REQUIRE(r1.has_value());
    REQUIRE(r2.has_value());
    // equal fourier factor, so ratio of ridge scales = inverse frequency ratio
    CHECK((*r2 / *r1) == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("scalogram geometry and COI") {
    const auto sc = cwt_transform(tone(440.0, 0.25));
    CHECK(sc.num_scales() > 10);
    CHECK(sc.num_times() == 2000);
    for (std::size_t j = 1; j < sc.num_scales(); ++j) {
        CHECK(sc.scales[j] > sc.scales[j - 1]);
        CHECK(sc.frequencies[j] < sc.frequencies[j - 1]);
        CHECK(sc.scales[j] / sc.scales[j - 1] == doctest::Approx(std::pow(2.0, 0.125)).epsilon(1e-12));
    }
    CHECK(sc.coi.front() == 0.0);
    CHECK(sc.coi.back() == 0.0);
    const std::size_t mid = sc.num_times() / 2;
    const double edge = std::min(mid, sc.num_times() - 1 - mid) * sc.dt;
    CHECK(sc.coi[mid] == doctest::Approx(edge / std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("global wavelet spectrum peaks at the tone") {
    const auto sc = cwt_transform(tone(440.0));
    const auto gws = global_wavelet_spectrum(sc);
    REQUIRE(!gws.empty());
    double best_f = 0, best_p = -1;
    for (const auto& [f, p] : gws)
        if (p > best_p) { best_p = p; best_f = f; }
    CHECK(best_f == doctest::Approx(440.0).epsilon(0.05));
}

TEST_CASE("parameter validation") {
    const AudioClip c = tone(440.0, 0.1);
    WaveletSpec w;
    w.omega0 = 3.0;
    CHECK_THROWS_AS(cwt_transform(c, w), std::invalid_argument);
    w = WaveletSpec{};
    w.dj = 0.0;
    CHECK_THROWS_AS(cwt_transform(c, w), std::invalid_argument);
    w = WaveletSpec{};
    w.s0 = 0.5 / c.sample_rate;  // below 2*dt
    CHECK_THROWS_AS(cwt_transform(c, w), std::invalid_argument);
    AudioClip empty;
    empty.sample_rate = 8000;
    CHECK_THROWS_AS(cwt_transform(empty), std::invalid_argument);
}

TEST_CASE("oversized scales set the flag instead of failing") {
    WaveletSpec w;
    w.s0 = 0.05;
    w.num_scales = 8;
    const auto sc = cwt_transform(tone(440.0, 0.2), w);
    CHECK(sc.scale_exceeds_half_duration);
}

TEST_CASE("Morlet admissibility at omega0 = 6") {
    const auto r = check_admissibility(6.0);
    CHECK(r.admissible);
    CHECK(r.zero_frequency_magnitude * r.zero_frequency_magnitude <= 1e-10);
    CHECK(r.band_pass_shape);
    // analytic value: pi^{-1/4} e^{-18}
    CHECK(r.zero_frequency_magnitude ==
          doctest::Approx(std::pow(std::numbers::pi, -0.25) * std::exp(-18.0)).epsilon(1e-12));
    // omega0 = 3 fails the admissibility threshold
    CHECK_FALSE(check_admissibility(3.0).admissible);
}

TEST_CASE("Morlet moments") {
    const auto m = compute_moments(6.0, 2);
    // analytic M0 = pi^{-1/4} sqrt(2 pi) e^{-omega0^2/2}
    const double m0 = std::pow(std::numbers::pi, -0.25) * std::sqrt(2.0 * std::numbers::pi) *
                      std::exp(-18.0);
    CHECK(std::abs(m[0]) <= 1e-6);
    CHECK(std::abs(m[0]) == doctest::Approx(m0).epsilon(1e-6));
    CHECK_THROWS_AS(compute_moments(6.0, 9), std::invalid_argument);
    // translation moves the first moment: M1(center c) = c*M0 + M1(0)
    const auto mc = compute_moments(6.0, 1, 2.0);
    const cplx expect = 2.0 * m[0] + m[1];
    CHECK(std::abs(mc[1] - expect) < 1e-9);
}

TEST_CASE("nearest scale lookup") {
    const auto sc = cwt_transform(tone(440.0, 0.25));
    const std::size_t j = sc.nearest_scale_index(440.0);
    CHECK(sc.frequencies[j] / 440.0 < std::pow(2.0, 0.0626));
    CHECK(440.0 / sc.frequencies[j] < std::pow(2.0, 0.0626));
    CHECK_THROWS_AS(sc.nearest_scale_index(1e6), std::out_of_range);
}
