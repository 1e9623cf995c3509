// test_lambdicke.cpp — Analytic spectra against the regression-theorem oracle,
// rate-equation exactness and the closed-form rate/tuning formulas.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "eitcool/fock.hpp"
#include "eitcool/lambdicke.hpp"
#include "eitcool/lindblad.hpp"
#include "eitcool/model.hpp"
#include "eitcool/units.hpp"

using namespace eitcool;
using lambdicke::complexd;

namespace {

constexpr complexd I{0.0, 1.0};

struct RandomDeit {
    model::CoolingScheme scheme;
    lambdicke::DeitParams params;
    lambdicke::LambDickeEtas etas;
};

// Random resonant D-EIT configuration with nonzero Zeeman splitting.
RandomDeit random_deit(std::mt19937& rng, bool axial_mode) {
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    model::SchemeParams params;
    params.gamma_total = units::mhz(10.0 + 20.0 * uniform(rng));
    params.delta = (1.0 + 2.5 * uniform(rng)) * params.gamma_total;
    params.field = 2e-4 + 4e-4 * uniform(rng);
    params.omega_pi = units::mhz(1.0 + 4.0 * uniform(rng));
    params.omega_sigma = units::mhz(8.0 + 18.0 * uniform(rng));
    params.omega_d = units::mhz(5.0 + 12.0 * uniform(rng));
    if (axial_mode) {
        params.eta_pi_axial = 0.1 + 0.15 * uniform(rng);
        params.eta_d_axial = -(0.04 + 0.08 * uniform(rng));
        params.mode = {model::ModeLabel::axial, units::khz(904.6), 0.0};
    } else {
        params.eta_sigma_radial = 0.05 + 0.1 * uniform(rng);
        params.mode = {model::ModeLabel::radial1, units::mhz(2.552), 0.0};
    }
    RandomDeit result{model::make_scheme(params), {}, {}};
    result.params = lambdicke::DeitParams::from_scheme(result.scheme);
    result.etas = lambdicke::LambDickeEtas::from_scheme(result.scheme);
    return result;
}

// Frequency grid avoiding the guard bands around the real poles.
std::vector<double> omega_grid(const lambdicke::DeitParams& params, int n_points) {
    const double span = 1.5 * std::abs(params.delta) + 2.0 * std::abs(params.delta_s);
    std::vector<double> grid;
    for (int k = 0; k < n_points; ++k) {
        const double omega = -span + 2.0 * span * (k + 0.5) / n_points;
        bool keep = true;
        for (double pole : lambdicke::deit_pole_set(params)) {
            if (std::abs(omega - pole) < 1e-3 * params.gamma) keep = false;
        }
        if (keep) grid.push_back(omega);
    }
    return grid;
}

} // namespace

// ------------------------------ single EIT -----------------------------------

TEST_CASE("single-EIT spectrum matches the three-level regression oracle") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    for (int trial = 0; trial < 12; ++trial) {
        const double gamma = units::mhz(5.0 + 15.0 * uniform(rng));
        const double delta = (0.5 + 3.0 * uniform(rng)) * gamma;
        const double om_pi = units::mhz(0.5 + 4.0 * uniform(rng));
        const double om_sigma = units::mhz(4.0 + 16.0 * uniform(rng));
        const double eta_pi = 0.3 * uniform(rng);
        const double eta_sigma = 0.3 * uniform(rng);

        const auto system = model::lambda_system(delta, om_pi, om_sigma, gamma, eta_pi, eta_sigma);
        lambdicke::RegressionSpectrum oracle(system);

        // Peak scale for the relative comparison.
        double peak = 0.0;
        std::vector<double> grid;
        for (int k = 0; k < 60; ++k) {
            const double omega = -2.5 * delta + 5.0 * delta * (k + 0.5) / 60.0;
            if (std::abs(omega) < 1e-3 * gamma) continue;
            grid.push_back(omega);
        }
        std::vector<double> numeric(grid.size());
        for (std::size_t k = 0; k < grid.size(); ++k) {
            numeric[k] = std::real(oracle(grid[k]));
            peak = std::max(peak, std::abs(numeric[k]));
        }
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const double analytic = lambdicke::single_eit_spectrum(grid[k], delta, om_pi, om_sigma,
                                                                   gamma, eta_pi, eta_sigma);
            CHECK(std::abs(analytic - numeric[k]) <=
                  1e-6 * std::max(std::abs(numeric[k]), 1e-9 * peak));
        }
    }
}

TEST_CASE("single-EIT spectrum vanishes at omega = 0 and peaks at the dressed states") {
    const double gamma = units::mhz(10.35);
    const double delta = 2.0 * gamma;
    const double om_pi = units::mhz(2.0), om_sigma = units::mhz(12.0);
    CHECK(lambdicke::single_eit_spectrum(0.0, delta, om_pi, om_sigma, gamma, 0.1, 0.0) == 0.0);

    const double om2 = om_pi * om_pi + om_sigma * om_sigma;
    const double root = std::sqrt(delta * delta + om2);
    for (double sign : {1.0, -1.0}) {
        const double peak_pos = 0.5 * delta + sign * 0.5 * root;
        // The Lorentzian argument vanishes exactly at the dressed-state roots,
        // so the spectrum there takes its maximum value amp^2/gamma.
        const double value = lambdicke::single_eit_spectrum(peak_pos, delta, om_pi, om_sigma, gamma,
                                                            0.1, 0.0);
        const double left = lambdicke::single_eit_spectrum(peak_pos - 0.3 * gamma, delta, om_pi,
                                                           om_sigma, gamma, 0.1, 0.0);
        const double right = lambdicke::single_eit_spectrum(peak_pos + 0.3 * gamma, delta, om_pi,
                                                            om_sigma, gamma, 0.1, 0.0);
        CHECK(value > left);
        CHECK(value > right);
    }
}

// ------------------------------ D-EIT a, b -----------------------------------

TEST_CASE("deit_ab reduces to the single-EIT denominator for omega_d = 0, delta_s = 0") {
    lambdicke::DeitParams params;
    params.delta = units::mhz(40.0);
    params.delta_s = 0.0;
    params.gamma = units::mhz(10.0);
    params.omega_pi = units::mhz(3.0);
    params.omega_sigma = units::mhz(12.0);
    params.omega_d = 0.0;
    const double om2 = params.omega_pi * params.omega_pi + params.omega_sigma * params.omega_sigma;
    for (double omega : {units::mhz(-3.0), units::mhz(0.7), units::mhz(35.0)}) {
        const auto [a, b] = lambdicke::deit_ab(omega, params);
        const complexd reduced =
            lambdicke::single_eit_denominator(omega, params.delta, std::sqrt(om2), params.gamma);
        CHECK(std::abs(b - reduced) <= 1e-12 * std::abs(reduced));
    }
}

TEST_CASE("deit_ab real part at omega = delta for delta_s = 0") {
    lambdicke::DeitParams params;
    params.delta = units::mhz(50.0);
    params.delta_s = 0.0;
    params.gamma = units::mhz(10.0);
    params.omega_pi = units::mhz(4.0);
    params.omega_sigma = units::mhz(10.0);
    params.omega_d = units::mhz(8.0);
    const auto [a, b] = lambdicke::deit_ab(params.delta, params);
    const double expected_b = -(params.omega_pi * params.omega_pi +
                                params.omega_sigma * params.omega_sigma) /
                                  (4.0 * params.delta) -
                              params.omega_d * params.omega_d / params.delta;
    CHECK(std::real(b) == doctest::Approx(expected_b).epsilon(1e-12));
    const double expected_a = -(params.omega_pi * params.omega_pi +
                                params.omega_d * params.omega_d) /
                                  (4.0 * params.delta) -
                              3.0 * params.omega_d * params.omega_d / (4.0 * params.delta);
    CHECK(std::real(a) == doctest::Approx(expected_a).epsilon(1e-12));
}

TEST_CASE("deit_ab agrees with the block-resolvent matrix route") {
    std::mt19937 rng(3);
    auto config = random_deit(rng, true);
    const auto& p = config.params;

    // Independent route: eliminate the six ground levels from the dressed
    // Hamiltonian blocks and read off the diagonal of the 2x2 Schur
    // complement in the (P-, P+) sector.
    Eigen::Vector2cd e_diag;
    e_diag << -p.delta + p.delta_s / 3.0 - I * p.gamma, -p.delta - p.delta_s / 3.0 - I * p.gamma;
    Eigen::VectorXd g_diag(6); // S-, S+, D-3, D-, D+, D+3
    g_diag << 0.0, 0.0, -0.8 * p.delta_s, -1.4 * p.delta_s, 0.0, -0.6 * p.delta_s;
    Eigen::MatrixXd v(2, 6); // rows: P-, P+
    const double s3 = std::sqrt(3.0);
    v << p.omega_pi, 0.0, s3 * p.omega_d, 0.0, p.omega_d, 0.0,
         p.omega_sigma, p.omega_pi, 0.0, p.omega_d, 0.0, s3 * p.omega_d;
    v *= 0.5;

    for (double omega : omega_grid(p, 40)) {
        Eigen::Matrix2cd schur = Eigen::Matrix2cd::Zero();
        schur.diagonal() = Eigen::Vector2cd::Constant(omega) + e_diag;
        for (int g = 0; g < 6; ++g) {
            for (int r = 0; r < 2; ++r) {
                for (int c = 0; c < 2; ++c) {
                    schur(r, c) -= v(r, g) * v(c, g) / (omega + g_diag(g));
                }
            }
        }
        const auto [a, b] = lambdicke::deit_ab(omega, p);
        CHECK(std::abs(a - schur(0, 0)) <= 1e-10 * std::abs(schur(0, 0)));
        CHECK(std::abs(b - schur(1, 1)) <= 1e-10 * std::abs(schur(1, 1)));
        const complexd det = lambdicke::deit_determinant(omega, p);
        CHECK(std::abs(det - schur.determinant()) <= 1e-10 * std::abs(schur.determinant()));
    }
}

TEST_CASE("deit_ab throws a named pole error inside the guard band") {
    std::mt19937 rng(5);
    auto config = random_deit(rng, true);
    for (double pole : lambdicke::deit_pole_set(config.params)) {
        const double omega = pole + 0.3 * lambdicke::pole_guard * config.params.gamma;
        CHECK_THROWS_AS((void)lambdicke::deit_ab(omega, config.params), PoleError);
        try {
            (void)lambdicke::deit_ab(omega, config.params);
        } catch (const PoleError& error) {
            CHECK(error.pole() == doctest::Approx(pole));
        }
    }
}

// --------------------------- D-EIT spectra vs oracle --------------------------

TEST_CASE("general D-EIT spectrum matches the eight-level regression oracle") {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 6; ++trial) {
        const bool axial = trial % 2 == 0;
        auto config = random_deit(rng, axial);
        lambdicke::RegressionSpectrum oracle(model::electronic_system(config.scheme));

        const auto grid = omega_grid(config.params, 50);
        std::vector<complexd> numeric(grid.size());
        double peak = 0.0;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            numeric[k] = oracle(grid[k]);
            peak = std::max(peak, std::abs(numeric[k]));
        }
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const complexd analytic =
                lambdicke::deit_spectrum(grid[k], config.params, config.etas);
            CHECK(std::abs(analytic - numeric[k]) <=
                  1e-6 * std::max(std::abs(numeric[k]), 1e-9 * peak));
        }
    }
}

TEST_CASE("general, matrix, radial and axial spectra are mutually consistent") {
    std::mt19937 rng(23);

    SUBCASE("matrix form equals the scalar form") {
        auto config = random_deit(rng, true);
        for (double omega : omega_grid(config.params, 30)) {
            const complexd scalar = lambdicke::deit_spectrum(omega, config.params, config.etas);
            const complexd matrix =
                lambdicke::deit_spectrum_matrix(omega, config.params, config.etas);
            CHECK(std::abs(scalar - matrix) <= 1e-10 * std::max(std::abs(scalar), 1e-300));
        }
    }

    SUBCASE("radial geometry reduces the general formula to the radial one") {
        auto config = random_deit(rng, false);
        REQUIRE(config.etas.eta_pi == 0.0);
        REQUIRE(config.etas.eta_d == 0.0);
        for (double omega : omega_grid(config.params, 100)) {
            const double general =
                std::real(lambdicke::deit_spectrum(omega, config.params, config.etas));
            const double radial =
                lambdicke::deit_spectrum_radial(omega, config.params, config.etas.eta_sigma);
            CHECK(general == doctest::Approx(radial).epsilon(1e-10));
        }
    }

    SUBCASE("axial geometry reduces the general formula to the axial one") {
        auto config = random_deit(rng, true);
        REQUIRE(config.etas.eta_sigma == 0.0);
        for (double omega : omega_grid(config.params, 100)) {
            const double general =
                std::real(lambdicke::deit_spectrum(omega, config.params, config.etas));
            const double axial = lambdicke::deit_spectrum_axial(omega, config.params,
                                                                config.etas.eta_pi,
                                                                config.etas.eta_d);
            CHECK(general == doctest::Approx(axial).epsilon(1e-10));
        }
    }
}

TEST_CASE("alpha for the default beam geometry has magnitude 1.46") {
    model::SchemeParams params;
    params.delta = 3.0 * params.gamma_total;
    params.omega_pi = units::mhz(2.0);
    params.omega_sigma = units::mhz(14.0);
    params.omega_d = units::mhz(10.0);
    // First-principles projections for a 40Ca+ ion: co-axial 397 pi and
    // counter-propagating 866 on the 904.6 kHz axial mode.
    const double nu_a = units::khz(904.6);
    params.eta_pi_axial = units::lamb_dicke(396.847e-9, 1.0, units::ca40_ion_mass, nu_a);
    params.eta_d_axial = units::lamb_dicke(866.214e-9, -1.0, units::ca40_ion_mass, nu_a);
    params.mode = {model::ModeLabel::axial, nu_a, 0.0};
    const auto scheme = model::make_scheme(params);
    const auto optimum = lambdicke::optimal_rates_deit(scheme);
    CHECK(std::abs(optimum.alpha) == doctest::Approx(1.46).epsilon(0.01));
}

TEST_CASE("dark point: Re S(0+) is at the 1e-10 level of the peak") {
    std::mt19937 rng(29);
    auto config = random_deit(rng, false);
    lambdicke::RegressionSpectrum oracle(model::electronic_system(config.scheme));
    double peak = 0.0;
    for (double omega : omega_grid(config.params, 60)) {
        peak = std::max(peak, std::abs(std::real(oracle(omega))));
    }
    const double near_zero = 2.0 * lambdicke::pole_guard * config.params.gamma;
    for (double sign : {1.0, -1.0}) {
        const double analytic = std::real(
            lambdicke::deit_spectrum(sign * near_zero, config.params, config.etas));
        CHECK(std::abs(analytic) <= 1e-10 * peak);
    }
}

// ------------------------------ rates ----------------------------------------

TEST_CASE("heating_cooling_rates conventions") {
    SUBCASE("symmetric spectrum and zero diffusion give no cooling") {
        auto symmetric = [](double omega) { return complexd{1.0 / (1.0 + omega * omega), 0.0}; };
        const auto rates = lambdicke::heating_cooling_rates(symmetric, 0.0, 0.5);
        CHECK(rates.a_plus == doctest::Approx(rates.a_minus));
        CHECK(rates.cooling_rate() == doctest::Approx(0.0));
    }

    SUBCASE("bright state tuned to nu makes A- dominate (convention test)") {
        const double gamma = units::mhz(10.35);
        const double delta = 3.0 * 2.0 * gamma;
        const double nu = units::mhz(2.0);
        const double om_sigma = lambdicke::bright_state_tuning(delta, nu);
        const double om_pi = 0.15 * om_sigma;
        auto spectrum = [&](double omega) {
            return complexd{
                lambdicke::single_eit_spectrum(omega, delta, om_pi, om_sigma, gamma, 0.1, 0.0), 0.0};
        };
        const auto rates = lambdicke::heating_cooling_rates(spectrum, 0.0, nu);
        CHECK(rates.a_minus > 10.0 * rates.a_plus);
        CHECK(rates.n_ss() < 0.2);
        CHECK(rates.p0_ss() > 0.8);
        CHECK(rates.n_ss() * rates.cooling_rate() == doctest::Approx(rates.a_plus));
    }

    SUBCASE("negative spectral input is flagged") {
        auto bogus = [](double omega) { return complexd{omega > 0 ? 1.0 : -2.0, 0.0}; };
        CHECK_THROWS_AS((void)lambdicke::heating_cooling_rates(bogus, 0.0, 1.0), PhysicsError);
    }
}

TEST_CASE("diffusion coefficient") {
    SUBCASE("dark state gives zero") {
        CHECK(lambdicke::diffusion_coefficient({{model::PPlus, 0.0}},
                                               {{model::PPlus, model::SMinus, 0.1, 1e8}}) == 0.0);
    }
    SUBCASE("single-channel arithmetic") {
        const double d = lambdicke::diffusion_coefficient({{model::PPlus, 0.1}},
                                                          {{model::PPlus, model::SMinus, 0.1, 1e8}});
        CHECK(d == doctest::Approx(0.1 * 0.01 * 1e8));
    }
    SUBCASE("negative inputs rejected") {
        CHECK_THROWS_AS((void)lambdicke::diffusion_coefficient(
                            {{model::PPlus, -0.1}}, {{model::PPlus, model::SMinus, 0.1, 1e8}}),
                        std::invalid_argument);
        CHECK_THROWS_AS((void)lambdicke::diffusion_coefficient(
                            {{model::PPlus, 0.1}}, {{model::PPlus, model::SMinus, 0.1, -1e8}}),
                        std::invalid_argument);
    }
}

// ---------------------------- rate equation -----------------------------------

TEST_CASE("rate matrix columns conserve probability and the null vector is thermal") {
    for (double ratio : {0.1, 0.5, 0.9}) {
        const double a_minus = 1.0e4;
        const double a_plus = ratio * a_minus;
        const auto matrix = lambdicke::rate_matrix(a_plus, a_minus, 60);
        const Eigen::VectorXd column_sums = matrix.entries.colwise().sum();
        CHECK(column_sums.cwiseAbs().maxCoeff() <= 1e-9 * a_minus);

        const Eigen::VectorXd null_vec = lambdicke::rate_matrix_null_vector(matrix);
        Eigen::VectorXd geometric(61);
        for (int n = 0; n <= 60; ++n) geometric(n) = std::pow(ratio, n);
        geometric /= geometric.sum();
        CHECK((null_vec - geometric).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("rate-equation nbar(t) follows the exponential law") {
    const double a_plus = 3.0e3, a_minus = 1.2e4;
    const double rate = a_minus - a_plus;
    const double n_ss = a_plus / rate;
    const auto matrix = lambdicke::rate_matrix(a_plus, a_minus, 60);
    const Eigen::VectorXd p0 = fock::thermal_distribution(3.0, 61);
    const double n0 = fock::nbar_of(p0);

    // Independent oracle: eigendecomposition of the generator.
    const Eigen::EigenSolver<Eigen::MatrixXd> eigen(matrix.entries);
    const Eigen::MatrixXcd vectors = eigen.eigenvectors();
    const Eigen::VectorXcd coefficients = vectors.partialPivLu().solve(p0.cast<complexd>());

    double previous = n0;
    for (double t : {5e-6, 2e-5, 1e-4, 3e-4, 1e-3}) {
        const Eigen::VectorXd p = lambdicke::evolve_rate_eq(p0, matrix, t);
        CHECK(std::abs(p.sum() - 1.0) <= 1e-8);

        const Eigen::VectorXcd modal =
            vectors * (eigen.eigenvalues().array() * t).exp().matrix().asDiagonal() * coefficients;
        CHECK((p - modal.real()).cwiseAbs().maxCoeff() <= 1e-8);

        const double expected = (n0 - n_ss) * std::exp(-rate * t) + n_ss;
        const double nbar = fock::nbar_of(p);
        CHECK(nbar == doctest::Approx(expected).epsilon(1e-6));
        CHECK(nbar < previous); // monotone approach from above
        previous = nbar;
    }
}

TEST_CASE("evolve_rate_eq guards input") {
    const auto matrix = lambdicke::rate_matrix(1.0, 2.0, 10);
    Eigen::VectorXd bad = Eigen::VectorXd::Zero(11);
    bad(0) = 0.5;
    CHECK_THROWS_AS((void)lambdicke::evolve_rate_eq(bad, matrix, 1.0), std::invalid_argument);

    Eigen::VectorXd edge = Eigen::VectorXd::Zero(11);
    edge(10) = 1.0;
    std::vector<std::string> warnings;
    (void)lambdicke::evolve_rate_eq(edge, matrix, 1e-6, &warnings);
    CHECK(!warnings.empty());
}

// ------------------------- optimal rates and tuning ---------------------------

TEST_CASE("optimal single-EIT rate in the asymmetric-drive limit") {
    const double gamma = units::mhz(10.35);
    const double delta = 6.0 * gamma;
    const double om_sigma = units::mhz(20.0);
    const double om_pi = 0.02 * om_sigma;
    const double eta = 0.1;
    const auto optimum = lambdicke::single_eit_optimum(delta, om_pi, om_sigma, gamma, eta);
    CHECK(optimum.rate ==
          doctest::Approx(eta * eta * om_pi * om_pi / (2.0 * gamma)).epsilon(1e-3));
    CHECK(optimum.n_pi < 0.02); // spurious-coupling contribution stays small
}

TEST_CASE("single-EIT optimum against the full A± computation") {
    const double gamma = units::mhz(10.35);
    const double delta = 3.0 * 2.0 * gamma;
    const double nu = units::mhz(1.5);
    const double om_sigma = lambdicke::bright_state_tuning(delta, nu);
    const double om_pi = 0.1 * om_sigma;
    const double eta_pi = 0.12;

    auto spectrum = [&](double omega) {
        return complexd{
            lambdicke::single_eit_spectrum(omega, delta, om_pi, om_sigma, gamma, eta_pi, 0.0), 0.0};
    };
    const auto rates = lambdicke::heating_cooling_rates(spectrum, 0.0, nu);
    const auto optimum = lambdicke::single_eit_optimum(delta, om_pi, om_sigma, gamma, eta_pi);
    CHECK(std::abs(optimum.rate - rates.cooling_rate()) <= 0.2 * rates.cooling_rate());
    CHECK(std::abs(optimum.n_ss - rates.n_ss()) <= 0.2 * std::max(optimum.n_ss, rates.n_ss()));
}

TEST_CASE("bright-state tuning") {
    const double gamma = units::mhz(10.35);
    const double delta = 3.0 * 2.0 * gamma;
    const double nu = units::khz(904.6);
    const double omega = lambdicke::bright_state_tuning(delta, nu);
    CHECK(lambdicke::stark_shift(omega, delta) == doctest::Approx(nu).epsilon(1e-14));

    // Exact dressed-state position versus the small-shift approximation.
    const double root = 0.5 * delta - 0.5 * std::sqrt(delta * delta + omega * omega);
    CHECK(omega <= delta);
    CHECK(std::abs(std::abs(root) - nu) <= 0.05 * nu);

    // Stark-shift inversion round-trips.
    const double shift = lambdicke::stark_shift(omega, delta);
    CHECK(lambdicke::bright_state_tuning(delta, shift) == doctest::Approx(omega).epsilon(1e-14));

    CHECK(lambdicke::bright_width(delta, omega, nu, gamma) ==
          doctest::Approx(nu * gamma / (4.0 * std::sqrt(delta * delta + omega * omega))));
}

// --------------------------- reduction chain ----------------------------------

TEST_CASE("three-feature denominator reduction reproduces the single-EIT spectrum") {
    lambdicke::DeitParams params;
    params.delta = units::mhz(45.0);
    params.delta_s = 0.0;
    params.gamma = units::mhz(10.35);
    params.omega_pi = units::mhz(3.0);
    params.omega_sigma = units::mhz(13.0);
    params.omega_d = 0.0;
    const double eta_pi = 0.15, eta_sigma = 0.02;
    const double om2 = params.omega_pi * params.omega_pi + params.omega_sigma * params.omega_sigma;
    const double eta = eta_pi - eta_sigma;
    const double amp2 = 0.25 * eta * eta * params.omega_pi * params.omega_pi *
                        params.omega_sigma * params.omega_sigma / om2;
    for (int k = 0; k < 80; ++k) {
        const double omega = -2.0 * params.delta + 4.0 * params.delta * (k + 0.5) / 80.0;
        if (std::abs(omega) < 1e-3 * params.gamma) continue;
        const auto [a, b] = lambdicke::deit_ab(omega, params);
        const double via_b = amp2 * std::imag(1.0 / b);
        const double direct = lambdicke::single_eit_spectrum(omega, params.delta, params.omega_pi,
                                                             params.omega_sigma, params.gamma,
                                                             eta_pi, eta_sigma);
        CHECK(std::abs(via_b - direct) <= 1e-8 * std::max(std::abs(direct), 1e-12));
    }
}

TEST_CASE("numeric spectrum at omega = 0 vanishes for resonant single EIT") {
    const double gamma = units::mhz(10.35);
    const double delta = 2.5 * gamma;
    const auto system = model::lambda_system(delta, units::mhz(3.0), units::mhz(12.0), gamma,
                                             0.12, 0.0);
    lambdicke::RegressionSpectrum oracle(system);
    double peak = 0.0;
    for (int k = 1; k <= 40; ++k) peak = std::max(peak, std::abs(oracle(-delta * k / 20.0)));
    CHECK(std::abs(oracle(0.0)) <= 1e-10 * peak);
}

TEST_CASE("steady-state temperature reproduces the occupation") {
    lambdicke::RateModel rates;
    rates.a_plus = 2.0e3;
    rates.a_minus = 9.0e3;
    const double nu = units::mhz(1.2);
    const double t_ss = rates.t_ss_temperature(nu);
    const double occupation =
        1.0 / (std::exp(units::hbar * nu / (units::boltzmann * t_ss)) - 1.0);
    CHECK(occupation == doctest::Approx(rates.n_ss()).epsilon(1e-12));
}
