// lambdicke.hpp — Closed-form Lamb-Dicke cooling theory: absorption spectra for
// single EIT and D-EIT, carrier-scattering diffusion, heating/cooling rates,
// the birth-death rate equation, steady states and optimal-rate formulas.
//
// Spectrum sign conventions (used consistently across this module and the
// regression-theorem oracle): S(omega) is the one-sided Fourier transform of
// the steady-state coupling correlation with kernel exp(-i omega t). The
// dressed bright state then appears at negative omega, so the cooling rate
// samples S(-nu) and the heating rate S(+nu). Spectral denominators carry
// -i gamma, which makes Re S >= 0.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <utility>
#include <vector>

#include "eitcool/errors.hpp"
#include "eitcool/model.hpp"

namespace eitcool::lambdicke {

using complexd = std::complex<double>;

// ------------------------------- spectra ------------------------------------

// Electronic parameters of the D-EIT spectra. delta_s is the dressed-frame
// Zeeman splitting (2 mu_B B); gamma the optical-coherence decay rate.
struct DeitParams {
    double delta{0.0};
    double delta_s{0.0};
    double gamma{0.0};
    double omega_pi{0.0};
    double omega_sigma{0.0};
    double omega_d{0.0};

    static DeitParams from_scheme(const model::CoolingScheme& scheme);
};

// Mode-projected Lamb-Dicke parameters entering the spectra.
struct LambDickeEtas {
    double eta_pi{0.0};
    double eta_sigma{0.0};
    double eta_d{0.0};

    static LambDickeEtas from_scheme(const model::CoolingScheme& scheme);
};

// Real poles of a(omega) / b(omega): omega = 0 and the Zeeman-shifted ground
// resonances. Evaluation closer than pole_guard * gamma throws PoleError.
std::vector<double> deit_pole_set(const DeitParams& params);

inline constexpr double pole_guard = 1e-6;

// Denominator functions of the D-EIT scattering spectrum. a(omega) carries the
// P- sector (two EIT features), b(omega) the P+ sector (three EIT features).
std::pair<complexd, complexd> deit_ab(double omega, const DeitParams& params);

// D(omega) = a b - (Opi Osigma)^2 / (16 omega^2).
complexd deit_determinant(double omega, const DeitParams& params);

// General complex D-EIT spectrum S(omega) for arbitrary eta projections.
complexd deit_spectrum(double omega, const DeitParams& params, const LambDickeEtas& etas);

// Same quantity evaluated through the 2x2 resolvent matrix inversion
// S = -i <E| M(omega)^-1 |E>; algebraic cross-check of deit_spectrum.
complexd deit_spectrum_matrix(double omega, const DeitParams& params, const LambDickeEtas& etas);

// Radial specialization (eta_pi = eta_d = 0), real part.
double deit_spectrum_radial(double omega, const DeitParams& params, double eta_sigma);

// Axial specialization (eta_sigma = 0), real part.
double deit_spectrum_axial(double omega, const DeitParams& params, double eta_pi, double eta_d);

// Spectrum record for CSV export.
struct SpectralResponse {
    double omega{0.0};
    complexd s_value{0.0};
    complexd a_value{0.0};
    complexd b_value{0.0};
    complexd det_value{0.0};
};
SpectralResponse evaluate_deit(double omega, const DeitParams& params, const LambDickeEtas& etas);

// Single-EIT denominator omega - delta - i gamma - Omega^2/(4 omega) with
// Omega^2 = Omega_pi^2 + Omega_sigma^2; b(omega) reduces to it for
// Omega_d = 0, delta_s = 0.
complexd single_eit_denominator(double omega, double delta, double omega_total, double gamma);

// Re S(omega) of the closed-form single-EIT spectrum; returns 0 at omega = 0
// (continuity limit).
double single_eit_spectrum(double omega, double delta, double omega_pi, double omega_sigma,
                           double gamma, double eta_pi, double eta_sigma);

// ---------------------- regression-theorem oracle ----------------------------

// Numeric spectrum from the electronic Liouvillian: one linear solve per
// omega of S(omega) = Tr{ sigma_eta (i omega - L)^-1 [sigma_eta rho_ss] }.
// Ground truth for every analytic spectrum above.
class RegressionSpectrum {
public:
    explicit RegressionSpectrum(const model::ElectronicSystem& system);

    complexd operator()(double omega) const; // throws PhysicsError near-singular

    const Eigen::MatrixXcd& steady_state() const { return rho_ss_; }

private:
    Eigen::MatrixXcd liouvillian_;
    Eigen::MatrixXcd coupling_;
    Eigen::MatrixXcd rho_ss_;
    Eigen::VectorXcd source_;
    double scale_{0.0};
};

complexd numeric_spectrum(const model::ElectronicSystem& system, double omega);

// ------------------------------ rates ---------------------------------------

// Diffusion and sideband rates of the second-order theory.
struct RateModel {
    double diffusion{0.0}; // D
    double a_plus{0.0};    // heating rate A+
    double a_minus{0.0};   // cooling rate A-

    double cooling_rate() const { return a_minus - a_plus; }
    double n_ss() const;                        // A+ / (A- - A+), requires A- > A+
    double p0_ss() const;                       // (A- - A+) / A-
    double t_ss_temperature(double nu) const;   // kelvin
};

// One spontaneous-decay channel entering the carrier-scattering diffusion:
// effective Lamb-Dicke parameter and amplitude-convention scattering rate
// (rates out of one excited level sum to gamma, not gamma_total).
struct ScatterChannel {
    int excited{0};
    int ground{0};
    double eta_eff{0.0};
    double rate{0.0};
};

// D = sum_e p_e sum_g eta_eff^2 gamma_eg.
double diffusion_coefficient(const std::vector<std::pair<int, double>>& excited_populations,
                             const std::vector<ScatterChannel>& channels);

// Diffusion from an electronic steady state with one effective emission eta
// applied to every decay dipole of the scheme.
double diffusion_from_steady_state(const model::CoolingScheme& scheme,
                                   const Eigen::MatrixXcd& rho_ss, double emission_eta);

// A- = 2 Re S(-nu) + 2D (cooling), A+ = 2 Re S(+nu) + 2D (heating). The
// assignment of -nu to cooling is fixed by the convention test: a bright
// state tuned to the oscillator frequency must yield A- > A+.
template <class SpectrumFn>
RateModel heating_cooling_rates(SpectrumFn&& spectrum, double diffusion, double nu) {
    if (nu <= 0.0) throw std::invalid_argument("heating_cooling_rates: nu must be positive");
    RateModel rates;
    rates.diffusion = diffusion;
    rates.a_minus = 2.0 * std::real(complexd(spectrum(-nu))) + 2.0 * diffusion;
    rates.a_plus = 2.0 * std::real(complexd(spectrum(nu))) + 2.0 * diffusion;
    const double scale = std::abs(rates.a_minus) + std::abs(rates.a_plus);
    if (rates.a_minus < -1e-9 * scale || rates.a_plus < -1e-9 * scale) {
        throw PhysicsError("heating_cooling_rates: negative rate, spectrum convention misuse");
    }
    return rates;
}

// ---------------------------- rate equation ----------------------------------

// Tridiagonal birth-death generator on Fock populations, dimension n_max + 1.
struct RateMatrix {
    Eigen::MatrixXd entries;
    double a_plus{0.0};
    double a_minus{0.0};

    int dimension() const { return static_cast<int>(entries.rows()); }
};

RateMatrix rate_matrix(double a_plus, double a_minus, int n_max);

// Populations at time t by matrix exponential; warns (if a sink is provided)
// when the initial distribution has significant weight at the truncation edge.
Eigen::VectorXd evolve_rate_eq(const Eigen::VectorXd& p0, const RateMatrix& matrix, double t,
                               std::vector<std::string>* warnings = nullptr);

// Normalized null vector (steady state) of the rate matrix.
Eigen::VectorXd rate_matrix_null_vector(const RateMatrix& matrix);

// --------------------------- optimal-rate formulas ---------------------------

struct EitOptimum {
    double rate{0.0};
    double n_ss{0.0};
    double n_pi{0.0};
};
EitOptimum single_eit_optimum(double delta, double omega_pi, double omega_sigma, double gamma,
                              double eta);

struct DeitOptimum {
    double rate_radial{0.0};
    double rate_axial{0.0};
    double n_ss{0.0};
    double alpha{0.0}; // (eta_d - eta_pi) / eta_pi
};
DeitOptimum deit_optimum(const DeitParams& params, double eta_pi_axial, double eta_d_axial,
                         double eta_sigma_radial);

// Scheme-level wrappers using the scheme's mode projections.
EitOptimum optimal_rates_single(const model::CoolingScheme& scheme);
DeitOptimum optimal_rates_deit(const model::CoolingScheme& scheme);

// ------------------------------ bright-state tuning --------------------------

// Rabi frequency placing the bright state at nu_target: Omega = sqrt(4 delta nu).
double bright_state_tuning(double delta, double nu_target);

// AC Stark shift Omega^2 / (4 delta) of the bright state.
double stark_shift(double omega, double delta);

// Width of the bright-state cooling resonance, nu gamma / (4 sqrt(delta^2 + Omega^2)).
double bright_width(double delta, double omega, double nu, double gamma);

} // namespace eitcool::lambdicke
