// test_thermometry.cpp — Sideband readout, nbar extraction and cooling fits.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "eitcool/fock.hpp"
#include "eitcool/thermometry.hpp"
#include "eitcool/units.hpp"

using namespace eitcool;
using Eigen::VectorXd;

namespace {
const double eta_sb = 0.06;
const double omega_sb = units::khz(50.0);
} // namespace

TEST_CASE("sideband excitation limits") {
    VectorXd ground = VectorXd::Zero(30);
    ground(0) = 1.0;

    SUBCASE("RSB from the ground state vanishes for every probe time") {
        for (double t : {1e-6, 1e-4, 3e-3}) {
            CHECK(thermometry::sideband_excitation(ground, eta_sb, omega_sb, t, -1) == 0.0);
        }
    }
    SUBCASE("BSB pi-pulse fully excites the ground state") {
        const double t_pi = units::pi / (eta_sb * omega_sb);
        CHECK(thermometry::sideband_excitation(ground, eta_sb, omega_sb, t_pi, +1) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("only orders ±1 are accepted") {
        CHECK_THROWS_AS(
            (void)thermometry::sideband_excitation(ground, eta_sb, omega_sb, 1e-5, 2),
            std::invalid_argument);
    }
}

TEST_CASE("thermal nbar = 2 is recovered by the sideband pipeline") {
    const VectorXd thermal = fock::thermal_distribution(2.0, 400);
    const double nbar_true = fock::nbar_of(thermal);
    const double t_r = 0.05 / (eta_sb * omega_sb);
    const double rsb = thermometry::sideband_excitation(thermal, eta_sb, omega_sb, t_r, -1);
    const double bsb = thermometry::sideband_excitation(thermal, eta_sb, omega_sb, t_r, +1);
    const double nbar = thermometry::nbar_from_sidebands(rsb, bsb);
    CHECK(std::abs(nbar - nbar_true) <= 0.02 * nbar_true);
}

TEST_CASE("sideband ratio is exact in the short-pulse limit for any distribution") {
    std::mt19937 rng(19);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        VectorXd populations(25);
        for (int n = 0; n < populations.size(); ++n) {
            populations(n) = uniform(rng) * std::exp(-0.15 * n);
        }
        populations /= populations.sum();
        const double nbar_true = fock::nbar_of(populations);
        const double t_r = 1e-3 / (eta_sb * omega_sb); // well inside sin x ~ x
        const double rsb = thermometry::sideband_excitation(populations, eta_sb, omega_sb, t_r, -1);
        const double bsb = thermometry::sideband_excitation(populations, eta_sb, omega_sb, t_r, +1);
        CHECK(std::abs(thermometry::nbar_from_sidebands(rsb, bsb) - nbar_true) <=
              1e-4 * std::max(nbar_true, 1.0));
    }
}

TEST_CASE("nbar_from_sidebands") {
    CHECK(thermometry::nbar_from_sidebands(0.0, 0.4) == 0.0);
    CHECK(thermometry::nbar_from_sidebands(0.2, 0.4) == doctest::Approx(1.0));
    CHECK_THROWS_AS((void)thermometry::nbar_from_sidebands(0.5, 0.3), PhysicsError);
    CHECK_THROWS_AS((void)thermometry::nbar_from_sidebands(-0.1, 0.3), std::invalid_argument);
}

TEST_CASE("exact exponential is recovered to 1e-6 with the analytic cut-off") {
    const double amplitude = 3.0, rate = 1.0e4, offset = 0.1;
    std::vector<double> times, nbar;
    for (int k = 0; k <= 60; ++k) {
        const double t = 1.4e-3 * k / 60.0;
        times.push_back(t);
        nbar.push_back(amplitude * std::exp(-rate * t) + offset);
    }
    const auto fit = thermometry::fit_cooling_curve(times, nbar);
    CHECK(fit.amplitude == doctest::Approx(amplitude).epsilon(1e-6));
    CHECK(fit.rate == doctest::Approx(rate).epsilon(1e-6));
    CHECK(fit.n_infinity == doctest::Approx(offset).epsilon(1e-6));
    CHECK(fit.t_cut == doctest::Approx(std::log(amplitude / 0.005) / rate).epsilon(1e-6));
    REQUIRE(fit.n_ss_valid);
    CHECK(std::abs(fit.n_ss - offset) <= 0.005); // residual decay just past t_cut

    // Plateau average never leaves the range of the data it averages.
    double lo = 1e300, hi = -1e300;
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (times[k] > fit.t_cut) {
            lo = std::min(lo, nbar[k]);
            hi = std::max(hi, nbar[k]);
        }
    }
    CHECK(fit.n_ss >= lo);
    CHECK(fit.n_ss <= hi);
}

TEST_CASE("fit is exactly equivariant under power-of-two time rescaling") {
    std::vector<double> times, nbar;
    std::mt19937 rng(5);
    std::normal_distribution<double> noise(0.0, 0.01);
    for (int k = 0; k <= 30; ++k) {
        const double t = 2.0e-4 * k / 30.0;
        times.push_back(t);
        nbar.push_back(2.0 * std::exp(-3.0e4 * t) + 0.2 + noise(rng));
    }
    const auto fit = thermometry::fit_cooling_curve(times, nbar);

    const double scale = 1048576.0; // 2^20
    std::vector<double> scaled(times);
    for (auto& t : scaled) t *= scale;
    const auto fit_scaled = thermometry::fit_cooling_curve(scaled, nbar);
    CHECK(fit_scaled.rate == fit.rate / scale); // bit-exact
    CHECK(fit_scaled.amplitude == fit.amplitude);
    CHECK(fit_scaled.n_infinity == fit.n_infinity);
}

TEST_CASE("fit guards its inputs") {
    CHECK_THROWS_AS((void)thermometry::fit_cooling_curve({0, 1e-4, 2e-4}, {1, 2, 3}),
                    std::invalid_argument);

    // Too-early truncation: every sample before t_cut leaves the plateau empty.
    std::vector<double> times, nbar;
    for (int k = 0; k < 8; ++k) {
        times.push_back(1e-6 * k);
        nbar.push_back(5.0 * std::exp(-1e4 * times.back()) + 0.3);
    }
    const auto fit = thermometry::fit_cooling_curve(times, nbar);
    CHECK_FALSE(fit.n_ss_valid);
}

TEST_CASE("rate at nbar = 1") {
    const double rate = 2.0e4, offset = 0.08, amplitude = 4.0;
    std::vector<double> times, nbar;
    for (int k = 0; k <= 120; ++k) {
        const double t = 4.0e-4 * k / 120.0;
        times.push_back(t);
        nbar.push_back(amplitude * std::exp(-rate * t) + offset);
    }

    SUBCASE("exact exponential reproduces the fitted rate at the crossing") {
        const auto fit = thermometry::fit_cooling_curve(times, nbar);
        const double r1 = thermometry::rate_at_nbar_one(times, nbar, fit.n_ss);
        CHECK(r1 == doctest::Approx(rate).epsilon(5e-3));
    }
    SUBCASE("stencil refinement changes the result by less than 1%") {
        const double coarse = thermometry::rate_at_nbar_one(times, nbar, offset, 0.02);
        const double fine = thermometry::rate_at_nbar_one(times, nbar, offset, 0.01);
        CHECK(std::abs(coarse - fine) <= 0.01 * std::abs(fine));
    }
    SUBCASE("a trajectory that never crosses throws") {
        std::vector<double> high(nbar);
        for (auto& value : high) value += 10.0;
        CHECK_THROWS_AS((void)thermometry::rate_at_nbar_one(times, high, offset), PhysicsError);
    }
}

TEST_CASE("default probe time matches the initial-temperature pi-time") {
    const double t_r = thermometry::default_rabi_time(eta_sb, omega_sb, 3.0);
    CHECK(t_r == doctest::Approx(units::pi / (eta_sb * omega_sb * 2.0)));
}

TEST_CASE("hopeless data is rejected with a residual report") {
    std::vector<double> times, nbar;
    for (int k = 0; k < 12; ++k) {
        times.push_back(1e-5 * (k + 1));
        nbar.push_back(k % 2 ? 1e6 : 0.0);
    }
    try {
        (void)thermometry::fit_cooling_curve(times, nbar);
        FAIL("expected PhysicsError");
    } catch (const PhysicsError& error) {
        CHECK(std::string(error.what()).find("residual") != std::string::npos);
    }
}

TEST_CASE("fitted-sideband pipeline matches the direct ratio on exponential data") {
    thermometry::SidebandSeries series;
    series.sideband_eta = eta_sb;
    const double rate = 1.5e4;
    for (int k = 0; k <= 30; ++k) {
        const double t = 3e-4 * k / 30.0;
        series.times.push_back(t);
        series.rsb.push_back(0.3 * std::exp(-rate * t) + 0.02);
        series.bsb.push_back(0.25 * std::exp(-rate * t) + 0.3);
    }
    const auto fitted = thermometry::nbar_from_fitted_sidebands(series, series.times);
    REQUIRE(fitted.size() == series.times.size());
    for (std::size_t k = 0; k < fitted.size(); ++k) {
        const double direct = thermometry::nbar_from_sidebands(series.rsb[k], series.bsb[k]);
        CHECK(fitted[k] == doctest::Approx(direct).epsilon(1e-6));
    }
}
