#include <algorithm>
#include <cmath>
#include <vector>

#include "dgf/errors.hpp"
#include "dgf/rng.hpp"
#include "dgf/sysid.hpp"
#include "doctest.h"

using namespace dgf;
using sysid::IdentifiedModel;

namespace {

constexpr double kPole = 0.8280520657087856;   // exp(-0.1/0.53)
constexpr double kInput = 0.6344878775345809;  // 3.69*(1 - pole)

// Noise-free plant record around the nominal point (42.6 W, 888 C).
std::vector<double> plant_response(const std::vector<double>& u, double p = kPole,
                                   double b = kInput, double Ln = 42.6,
                                   double Tn = 888.0) {
    std::vector<double> y(u.size());
    y[0] = Tn;
    for (std::size_t k = 0; k + 1 < u.size(); ++k)
        y[k + 1] = Tn + p * (y[k] - Tn) + b * (u[k] - Ln);
    return y;
}

}  // namespace

TEST_SUITE("sysid") {

TEST_CASE("pseudo-random excitation has exactly two levels") {
    const auto u = sysid::gen_prbs(30.0, 60.0, 0.1, 100.0, 0.1, 7);
    REQUIRE(u.size() == 1000);
    int highs = 0, lows = 0;
    for (double v : u) {
        CHECK((v == 30.0 || v == 60.0));
        (v == 60.0 ? highs : lows) += 1;
    }
    // a maximal-length register spends roughly half its time at each level
    CHECK(highs > 300);
    CHECK(lows > 300);
}

TEST_CASE("excitation is reproducible per seed") {
    const auto a = sysid::gen_prbs(30.0, 60.0, 0.1, 50.0, 0.1, 12);
    const auto b = sysid::gen_prbs(30.0, 60.0, 0.1, 50.0, 0.1, 12);
    const auto c = sysid::gen_prbs(30.0, 60.0, 0.1, 50.0, 0.1, 13);
    CHECK(a == b);
    CHECK(a != c);
}

TEST_CASE("dwell keeps each register bit for whole chips") {
    const auto u = sysid::gen_prbs(0.0, 1.0, 0.3, 30.0, 0.1, 5);
    for (std::size_t k = 1; k < u.size(); ++k)
        if (u[k] != u[k - 1]) CHECK(k % 3 == 0);
}

TEST_CASE("degenerate excitation parameters") {
    const auto flat = sysid::gen_prbs(40.0, 40.0, 0.1, 10.0, 0.1, 3);
    for (double v : flat) CHECK(v == 40.0);
    CHECK_THROWS_AS(sysid::gen_prbs(30.0, 60.0, 0.1, 0.05, 0.1, 3), DomainError);
    CHECK_THROWS_AS(sysid::gen_prbs(30.0, 60.0, 0.05, 10.0, 0.1, 3), DomainError);
    CHECK_THROWS_AS(sysid::gen_prbs(60.0, 30.0, 0.1, 10.0, 0.1, 3), DomainError);
}

TEST_CASE("excitation whiteness: zero-lag autocorrelation dominates") {
    const auto u = sysid::gen_prbs(30.0, 60.0, 0.1, 200.0, 0.1, 21);
    double mean = 0.0;
    for (double v : u) mean += v;
    mean /= double(u.size());
    auto corr = [&](std::size_t lag) {
        double acc = 0.0;
        for (std::size_t k = 0; k + lag < u.size(); ++k)
            acc += (u[k] - mean) * (u[k + lag] - mean);
        return acc / double(u.size() - lag);
    };
    const double c0 = corr(0);
    for (std::size_t lag = 1; lag <= 20; ++lag) CHECK(std::abs(corr(lag)) < 0.5 * c0);
}

TEST_CASE("frequency sweep starts at the mean and counts its crossings") {
    const auto u = sysid::gen_chirp(0.0, 0.2, 120.0, 45.0, 15.0, 0.1);
    REQUIRE(u.size() == 1200);
    CHECK(u[0] == doctest::Approx(45.0));
    for (double v : u) {
        CHECK(v >= 30.0 - 1e-9);
        CHECK(v <= 60.0 + 1e-9);
    }
    int crossings = 0;
    for (std::size_t k = 1; k < u.size(); ++k) {
        const double a = u[k - 1] - 45.0, b = u[k] - 45.0;
        if (a != 0.0 && ((a < 0.0) != (b < 0.0))) ++crossings;
    }
    // phase at the end: 2*pi*(0.2*120/2) = 12 cycles -> about 24 crossings
    CHECK(crossings >= 23);
    CHECK(crossings <= 25);
}

TEST_CASE("constant-frequency sweep degenerates to a sine") {
    const auto a = sysid::gen_chirp(0.1, 0.1, 40.0, 45.0, 15.0, 0.1);
    const auto b = sysid::gen_sine(10.0, 45.0, 15.0, 40.0, 0.1);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k)
        CHECK(a[k] == doctest::Approx(b[k]).epsilon(1e-9));
}

TEST_CASE("sine hits its quarter-period peak and stays inside the band") {
    const auto u = sysid::gen_sine(4.0, 45.0, 15.0, 8.0, 0.1);
    CHECK(u[10] == doctest::Approx(60.0).epsilon(1e-12));  // t = 1 s = period/4
    CHECK(u[30] == doctest::Approx(30.0).epsilon(1e-12));

    const auto band = sysid::gen_sine(31.4, 45.0, 15.0, 120.0, 0.1);
    const auto [lo, hi] = std::minmax_element(band.begin(), band.end());
    CHECK(*lo >= 30.0 - 1e-9);
    CHECK(*hi <= 60.0 + 1e-9);

    const auto flat = sysid::gen_sine(31.4, 45.0, 0.0, 10.0, 0.1);
    for (double v : flat) CHECK(v == 45.0);

    CHECK_THROWS_AS(sysid::gen_sine(0.2, 45.0, 15.0, 10.0, 0.1), DomainError);
}

TEST_CASE("track trimming removes the approach and pull-off") {
    std::vector<double> u(1200), y(1200);
    for (std::size_t k = 0; k < u.size(); ++k) {
        u[k] = double(k);
        y[k] = 2.0 * double(k);
    }
    const auto [ut, yt] = sysid::trim_track(u, y, 0.5, 60.0, 0.1, 10.0);
    REQUIRE(ut.size() == 800);  // 10 mm at 0.5 mm/s = 200 samples each end
    REQUIRE(yt.size() == 800);
    CHECK(ut.front() == 200.0);
    CHECK(ut.back() == 999.0);
    CHECK(yt.front() == 400.0);

    const auto [u0, y0] = sysid::trim_track(u, y, 0.5, 60.0, 0.1, 0.0);
    CHECK(u0 == u);
    CHECK(y0 == y);

    CHECK_THROWS_AS(sysid::trim_track(u, y, 0.5, 60.0, 0.1, 30.0), DomainError);
    CHECK_THROWS_AS(sysid::trim_track(u, y, 0.5, 50.0, 0.1, 10.0), DomainError);
    std::vector<double> shorter(1199, 1.0);
    CHECK_THROWS_AS(sysid::trim_track(u, shorter, 0.5, 60.0, 0.1, 10.0), DomainError);
}

TEST_CASE("noise-free records are recovered exactly") {
    const auto u = sysid::gen_prbs(30.0, 60.0, 0.1, 120.0, 0.1, 3);
    const auto y = plant_response(u);
    const auto m = sysid::fit_first_order(u, y, 0.1);
    CHECK(m.gain_C_per_W == doctest::Approx(3.69).epsilon(1e-6));
    CHECK(m.time_constant_s == doctest::Approx(0.53).epsilon(1e-6));
    CHECK(m.pole == doctest::Approx(kPole).epsilon(1e-9));
    CHECK(m.input_coeff == doctest::Approx(kInput).epsilon(1e-9));
    // the constant term only absorbs what the finite record's means leave over
    CHECK(std::abs(m.intercept_C) < 1.0);
    CHECK(m.fit_percent_train == doctest::Approx(100.0).epsilon(1e-6));
    CHECK(m.n_samples == u.size());

    double um = 0.0, ym = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        um += u[k];
        ym += y[k];
    }
    CHECK(m.nominal_power_W == doctest::Approx(um / double(u.size())).epsilon(1e-12));
    CHECK(m.nominal_temp_C == doctest::Approx(ym / double(y.size())).epsilon(1e-12));
}

TEST_CASE("round-trip identifiability across the parameter box") {
    rng::SplitMix64 g(31);
    for (int trial = 0; trial < 20; ++trial) {
        const double K = 1.0 + 24.0 * g.uniform();
        const double tau = 0.2 + 1.8 * g.uniform();
        const double p = std::exp(-0.1 / tau);
        const double b = K * (1.0 - p);
        const auto u = sysid::gen_prbs(30.0, 60.0, 0.1, 120.0, 0.1, 100 + trial);
        const auto y = plant_response(u, p, b);
        const auto m = sysid::fit_first_order(u, y, 0.1);
        CHECK(m.gain_C_per_W == doctest::Approx(K).epsilon(1e-6));
        CHECK(m.time_constant_s == doctest::Approx(tau).epsilon(1e-6));
    }
}

TEST_CASE("five degrees of sensor noise keeps estimates within five percent") {
    const auto u = sysid::gen_prbs(30.0, 60.0, 0.1, 120.0, 0.1, 3);
    const auto clean = plant_response(u);
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        rng::SplitMix64 g(rng::derive_seed(seed, 3));
        auto y = clean;
        for (auto& v : y) v += 5.0 * g.normal();
        const auto m = sysid::fit_first_order(u, y, 0.1);
        CHECK(m.gain_C_per_W == doctest::Approx(3.69).epsilon(0.05));
        CHECK(m.time_constant_s == doctest::Approx(0.53).epsilon(0.05));
    }
}

TEST_CASE("unidentifiable or unstable records are refused") {
    std::vector<double> u(100, 42.6);
    const auto y = plant_response(u);
    CHECK_THROWS_AS(sysid::fit_first_order(u, y, 0.1), FitError);

    const auto up = sysid::gen_prbs(30.0, 60.0, 0.1, 50.0, 0.1, 3);
    std::vector<double> diverging(up.size());
    diverging[0] = 1.0;
    for (std::size_t k = 0; k + 1 < up.size(); ++k)
        diverging[k + 1] = 1.05 * diverging[k] + 0.5 * (up[k] - 45.0);
    CHECK_THROWS_AS(sysid::fit_first_order(up, diverging, 0.1), FitError);

    std::vector<double> tiny(5, 1.0);
    CHECK_THROWS_AS(sysid::fit_first_order(tiny, tiny, 0.1), FitError);
}

TEST_CASE("model simulation reproduces its own training data") {
    const auto u = sysid::gen_prbs(30.0, 60.0, 0.1, 60.0, 0.1, 9);
    const auto y = plant_response(u);
    const auto m = sysid::fit_first_order(u, y, 0.1);
    const auto yhat = sysid::simulate_model(m, u, y.front());
    REQUIRE(yhat.size() == y.size());
    for (std::size_t k = 0; k < y.size(); ++k)
        CHECK(yhat[k] == doctest::Approx(y[k]).epsilon(1e-6));
}

TEST_CASE("fit metric definition and affine invariance") {
    const auto u = sysid::gen_prbs(30.0, 60.0, 0.1, 60.0, 0.1, 9);
    const auto y = plant_response(u);
    CHECK(sysid::fit_percent(y, y) == doctest::Approx(100.0));

    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= double(y.size());
    const std::vector<double> flat(y.size(), mean);
    CHECK(sysid::fit_percent(y, flat) == doctest::Approx(0.0).epsilon(1e-9));

    auto ym = y;
    for (auto& v : ym) v += 3.0;  // an imperfect model
    const double base = sysid::fit_percent(y, ym);
    for (double a : {3.7, -2.0}) {
        std::vector<double> ys(y.size()), ms(y.size());
        for (std::size_t k = 0; k < y.size(); ++k) {
            ys[k] = a * y[k] - 50.0;
            ms[k] = a * ym[k] - 50.0;
        }
        CHECK(sysid::fit_percent(ys, ms) == doctest::Approx(base).epsilon(1e-9));
    }

    // a record that never moves has no spread to normalize by
    const std::vector<double> frozen(y.size(), 888.0);
    CHECK_THROWS_AS(sysid::fit_percent(frozen, y), FitError);
    const std::vector<double> one{1.0};
    CHECK_THROWS_AS(sysid::fit_percent(y, one), DomainError);
}

TEST_CASE("fit table serializes one numeric row") {
    const auto u = sysid::gen_prbs(30.0, 60.0, 0.1, 60.0, 0.1, 9);
    const auto m = sysid::fit_first_order(u, plant_response(u), 0.1);
    const auto csv = sysid::fit_csv(m);
    CHECK(csv.rfind("gain_C_per_W,tau_s,pole,", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
}

}  // TEST_SUITE
