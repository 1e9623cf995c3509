// lambdicke.cpp — Analytic Lamb-Dicke theory and the regression-theorem oracle.

#include "eitcool/lambdicke.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "eitcool/lindblad.hpp"
#include "eitcool/units.hpp"

namespace eitcool::lambdicke {

namespace {
constexpr complexd I{0.0, 1.0};
}

DeitParams DeitParams::from_scheme(const model::CoolingScheme& scheme) {
    return {scheme.delta,
            scheme.zeeman.delta_s(),
            scheme.gamma(),
            scheme.rabi(model::LaserLabel::pi397),
            scheme.rabi(model::LaserLabel::sigma397),
            scheme.rabi(model::LaserLabel::d866)};
}

LambDickeEtas LambDickeEtas::from_scheme(const model::CoolingScheme& scheme) {
    return {scheme.eta(model::LaserLabel::pi397), scheme.eta(model::LaserLabel::sigma397),
            scheme.eta(model::LaserLabel::d866)};
}

std::vector<double> deit_pole_set(const DeitParams& params) {
    std::vector<double> poles{0.0};
    if (params.delta_s != 0.0) {
        const double ds = params.delta_s;
        poles.push_back(0.6 * ds);
        poles.push_back(0.8 * ds);
        poles.push_back(1.4 * ds);
    }
    return poles;
}

namespace {

void guard_poles(double omega, const DeitParams& params) {
    const double guard = pole_guard * params.gamma;
    for (double pole : deit_pole_set(params)) {
        if (std::abs(omega - pole) < guard) {
            std::ostringstream msg;
            msg << "deit spectrum evaluated at omega = " << omega
                << ", within the guard band of the real pole at " << pole;
            throw PoleError(msg.str(), pole);
        }
    }
}

} // namespace

// The two diagonal resolvent functions, written in the dressed frame where the
// dark-state ground levels sit at zero energy. The ground-state Zeeman shifts
// place the spectator D levels at (3/5, 7/5, 4/5) delta_s below zero, which is
// where the extra EIT poles come from; P+ sits delta_s/3 below P- in this
// frame. The -i gamma convention keeps Re S non-negative.
std::pair<complexd, complexd> deit_ab(double omega, const DeitParams& params) {
    guard_poles(omega, params);
    const double ds = params.delta_s;
    const double op2 = params.omega_pi * params.omega_pi;
    const double os2 = params.omega_sigma * params.omega_sigma;
    const double od2 = params.omega_d * params.omega_d;
    const complexd common = omega - params.delta - I * params.gamma;

    const complexd a = common + ds / 3.0 - (op2 + od2) / (4.0 * omega) -
                       (0.75 * od2) / (omega - 0.8 * ds);
    const complexd b = common - ds / 3.0 - (op2 + os2) / (4.0 * omega) -
                       0.25 * od2 * (3.0 / (omega - 0.6 * ds) + 1.0 / (omega - 1.4 * ds));
    return {a, b};
}

complexd deit_determinant(double omega, const DeitParams& params) {
    const auto [a, b] = deit_ab(omega, params);
    const double c = params.omega_pi * params.omega_sigma / (4.0 * omega);
    return a * b - c * c;
}

namespace {

double omega_minus_sq(const DeitParams& params) {
    const double op2 = params.omega_pi * params.omega_pi;
    const double os2 = params.omega_sigma * params.omega_sigma;
    const double od2 = params.omega_d * params.omega_d;
    return std::sqrt(od2 * os2 + od2 * op2 + op2 * op2);
}

} // namespace

complexd deit_spectrum(double omega, const DeitParams& params, const LambDickeEtas& etas) {
    const auto [a, b] = deit_ab(omega, params);
    const double c = params.omega_pi * params.omega_sigma / (4.0 * omega);
    const complexd det = a * b - c * c;

    const double om2 = omega_minus_sq(params);
    const double e_minus = params.omega_pi * (etas.eta_d - etas.eta_pi);   // P- amplitude
    const double e_plus = params.omega_sigma * (etas.eta_pi - etas.eta_sigma); // P+ amplitude
    const double prefactor =
        params.omega_pi * params.omega_pi * params.omega_d * params.omega_d / (4.0 * om2 * om2);

    const complexd bracket = e_minus * e_minus * b + e_plus * e_plus * a +
                             e_minus * e_plus * params.omega_pi * params.omega_sigma /
                                 (2.0 * omega);
    return -I * prefactor * bracket / det;
}

complexd deit_spectrum_matrix(double omega, const DeitParams& params, const LambDickeEtas& etas) {
    const auto [a, b] = deit_ab(omega, params);
    Eigen::Matrix2cd m;
    m << a, -params.omega_pi * params.omega_sigma / (4.0 * omega),
        -params.omega_pi * params.omega_sigma / (4.0 * omega), b;
    const double om2 = omega_minus_sq(params);
    Eigen::Vector2cd e;
    e << params.omega_pi * (etas.eta_d - etas.eta_pi),
        params.omega_sigma * (etas.eta_pi - etas.eta_sigma);
    e *= params.omega_pi * params.omega_d / (2.0 * om2);
    return -I * (e.transpose() * m.inverse() * e)(0, 0);
}

double deit_spectrum_radial(double omega, const DeitParams& params, double eta_sigma) {
    const auto [a, b] = deit_ab(omega, params);
    const double op2 = params.omega_pi * params.omega_pi;
    const double os2 = params.omega_sigma * params.omega_sigma;
    const double od2 = params.omega_d * params.omega_d;
    const double om2 = omega_minus_sq(params);
    const double prefactor = 0.25 * eta_sigma * eta_sigma * op2 * od2 * os2 / (om2 * om2);
    return prefactor * std::imag(1.0 / (b - op2 * os2 / (16.0 * omega * omega * a)));
}

double deit_spectrum_axial(double omega, const DeitParams& params, double eta_pi, double eta_d) {
    if (eta_pi == 0.0) {
        throw std::invalid_argument("deit_spectrum_axial: eta_pi must be nonzero");
    }
    const auto [a, b] = deit_ab(omega, params);
    const double c = params.omega_pi * params.omega_sigma / (4.0 * omega);
    const complexd det = a * b - c * c;
    const double op2 = params.omega_pi * params.omega_pi;
    const double os2 = params.omega_sigma * params.omega_sigma;
    const double od2 = params.omega_d * params.omega_d;
    const double om2 = omega_minus_sq(params);
    const double alpha = (eta_d - eta_pi) / eta_pi;
    const double prefactor = 0.25 * eta_pi * eta_pi * op2 * od2 / (om2 * om2);
    const complexd bracket = op2 * alpha * (alpha * b + os2 / (2.0 * omega)) + os2 * a;
    return prefactor * std::imag(bracket / det);
}

SpectralResponse evaluate_deit(double omega, const DeitParams& params, const LambDickeEtas& etas) {
    SpectralResponse response;
    response.omega = omega;
    const auto [a, b] = deit_ab(omega, params);
    response.a_value = a;
    response.b_value = b;
    const double c = params.omega_pi * params.omega_sigma / (4.0 * omega);
    response.det_value = a * b - c * c;
    response.s_value = deit_spectrum(omega, params, etas);
    return response;
}

complexd single_eit_denominator(double omega, double delta, double omega_total, double gamma) {
    return omega - delta - I * gamma - omega_total * omega_total / (4.0 * omega);
}

double single_eit_spectrum(double omega, double delta, double omega_pi, double omega_sigma,
                           double gamma, double eta_pi, double eta_sigma) {
    if (omega == 0.0) return 0.0; // continuity limit at the dark point
    const double om2 = omega_pi * omega_pi + omega_sigma * omega_sigma;
    const double eta = eta_pi - eta_sigma;
    const double amp2 = 0.25 * eta * eta * omega_pi * omega_pi * omega_sigma * omega_sigma / om2;
    const double u = omega - delta - om2 / (4.0 * omega);
    return amp2 * gamma / (u * u + gamma * gamma);
}

// ---------------------- regression-theorem oracle ----------------------------

RegressionSpectrum::RegressionSpectrum(const model::ElectronicSystem& system) {
    liouvillian_ = lindblad::liouvillian_matrix(system);
    coupling_ = system.coupling;
    rho_ss_ = lindblad::steady_state_electronic(system);
    const Eigen::MatrixXcd seeded = coupling_ * rho_ss_;
    source_ = Eigen::Map<const Eigen::VectorXcd>(seeded.data(), seeded.size());
    scale_ = liouvillian_.cwiseAbs().maxCoeff();
}

complexd RegressionSpectrum::operator()(double omega) const {
    Eigen::MatrixXcd shifted = -liouvillian_;
    shifted.diagonal().array() += I * omega;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(shifted);
    Eigen::VectorXcd solution;
    const double rcond = lu.rcond();
    if (rcond > 1e-14) {
        solution = lu.solve(source_);
    } else {
        // The generator itself is singular at omega = 0 (stationary state);
        // the minimal-norm solution drops the irrelevant null component. A
        // large residual means the source overlaps an undamped resonance.
        solution = shifted.completeOrthogonalDecomposition().solve(source_);
        const double residual = (shifted * solution - source_).norm();
        if (residual > 1e-8 * std::max(source_.norm(), 1e-300)) {
            std::ostringstream msg;
            msg << "numeric_spectrum: singular resolvent at omega = " << omega
                << " (reciprocal condition number " << rcond << ", residual " << residual << ")";
            throw PhysicsError(msg.str());
        }
    }
    const int dim = static_cast<int>(coupling_.rows());
    const Eigen::Map<const Eigen::MatrixXcd> x(solution.data(), dim, dim);
    return (coupling_ * x).trace();
}

complexd numeric_spectrum(const model::ElectronicSystem& system, double omega) {
    return RegressionSpectrum(system)(omega);
}

// ------------------------------ rates ---------------------------------------

double RateModel::n_ss() const {
    if (!(a_minus > a_plus)) {
        throw PhysicsError("RateModel::n_ss: no cooling (A- <= A+), steady state undefined");
    }
    return a_plus / (a_minus - a_plus);
}

double RateModel::p0_ss() const {
    if (!(a_minus > a_plus)) {
        throw PhysicsError("RateModel::p0_ss: no cooling (A- <= A+)");
    }
    return (a_minus - a_plus) / a_minus;
}

double RateModel::t_ss_temperature(double nu) const {
    if (!(a_minus > a_plus) || a_plus <= 0.0) {
        throw PhysicsError("RateModel::t_ss_temperature: requires A- > A+ > 0");
    }
    return units::hbar * nu / (units::boltzmann * std::log(a_minus / a_plus));
}

double diffusion_coefficient(const std::vector<std::pair<int, double>>& excited_populations,
                             const std::vector<ScatterChannel>& channels) {
    for (const auto& [level, population] : excited_populations) {
        if (population < 0.0 || population > 1.0) {
            throw std::invalid_argument("diffusion_coefficient: populations must lie in [0,1]");
        }
    }
    double total = 0.0;
    for (const auto& channel : channels) {
        if (channel.rate < 0.0 || channel.eta_eff < 0.0) {
            throw std::invalid_argument("diffusion_coefficient: negative channel inputs");
        }
        for (const auto& [level, population] : excited_populations) {
            if (level == channel.excited) {
                total += population * channel.eta_eff * channel.eta_eff * channel.rate;
            }
        }
    }
    return total;
}

double diffusion_from_steady_state(const model::CoolingScheme& scheme,
                                   const Eigen::MatrixXcd& rho_ss, double emission_eta) {
    // Null-space round-off can leave populations a hair outside [0, 1].
    auto population = [&](int level) {
        return std::clamp(std::real(rho_ss(level, level)), 0.0, 1.0);
    };
    std::vector<std::pair<int, double>> populations = {
        {model::PMinus, population(model::PMinus)},
        {model::PPlus, population(model::PPlus)},
    };
    // Amplitude-convention scattering rates: half the population decay rates,
    // so that the diffusion enters A± as 2D and reproduces one recoil kick of
    // eta_eff per scattering event.
    std::vector<ScatterChannel> channels;
    for (const auto& decay : model::decay_channels(scheme)) {
        channels.push_back({decay.excited, decay.ground, std::abs(emission_eta), 0.5 * decay.rate});
    }
    return diffusion_coefficient(populations, channels);
}

// ---------------------------- rate equation ----------------------------------

RateMatrix rate_matrix(double a_plus, double a_minus, int n_max) {
    if (n_max < 1) throw std::invalid_argument("rate_matrix: n_max must be >= 1");
    if (a_plus < 0.0 || a_minus < 0.0) {
        throw std::invalid_argument("rate_matrix: rates must be non-negative");
    }
    const int dim = n_max + 1;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
    for (int j = 0; j < dim; ++j) {
        double out = j * a_minus;
        if (j < n_max) out += (j + 1) * a_plus; // no heating out of the truncation edge
        a(j, j) = -out;
        if (j < n_max) {
            a(j, j + 1) = (j + 1) * a_minus;
            a(j + 1, j) = (j + 1) * a_plus;
        }
    }
    return {a, a_plus, a_minus};
}

Eigen::VectorXd evolve_rate_eq(const Eigen::VectorXd& p0, const RateMatrix& matrix, double t,
                               std::vector<std::string>* warnings) {
    if (p0.size() != matrix.entries.rows()) {
        throw std::invalid_argument("evolve_rate_eq: dimension mismatch");
    }
    if (std::abs(p0.sum() - 1.0) > 1e-9) {
        throw std::invalid_argument("evolve_rate_eq: p0 must be normalized");
    }
    if (warnings && p0(p0.size() - 1) > 1e-6) {
        warnings->push_back("evolve_rate_eq: initial distribution has significant weight at the "
                            "truncation edge; results are truncation-limited");
    }
    const Eigen::MatrixXd propagator = (matrix.entries * t).exp();
    return propagator * p0;
}

Eigen::VectorXd rate_matrix_null_vector(const RateMatrix& matrix) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(matrix.entries);
    lu.setThreshold(1e-12 * matrix.entries.cwiseAbs().maxCoeff());
    Eigen::VectorXd null;
    if (lu.dimensionOfKernel() >= 1) {
        null = lu.kernel().col(0);
    } else {
        // Fall back to the eigenvector of the smallest-magnitude eigenvalue.
        Eigen::EigenSolver<Eigen::MatrixXd> solver(matrix.entries);
        int best = 0;
        for (int k = 1; k < solver.eigenvalues().size(); ++k) {
            if (std::abs(solver.eigenvalues()(k)) < std::abs(solver.eigenvalues()(best))) best = k;
        }
        null = solver.eigenvectors().col(best).real();
    }
    if (null.sum() < 0.0) null = -null;
    return null / null.sum();
}

// --------------------------- optimal-rate formulas ---------------------------

EitOptimum single_eit_optimum(double delta, double omega_pi, double omega_sigma, double gamma,
                              double eta) {
    const double om2 = omega_pi * omega_pi + omega_sigma * omega_sigma;
    EitOptimum result;
    result.rate = 0.5 * eta * eta * omega_pi * omega_pi * omega_sigma * omega_sigma / (om2 * gamma);
    const double lorentz = gamma * gamma / (4.0 * delta * delta + gamma * gamma);
    result.n_pi = 2.0 * lorentz * omega_pi * omega_pi / om2;
    result.n_ss = lorentz + result.n_pi;
    return result;
}

DeitOptimum deit_optimum(const DeitParams& params, double eta_pi_axial, double eta_d_axial,
                         double eta_sigma_radial) {
    const double op2 = params.omega_pi * params.omega_pi;
    const double os2 = params.omega_sigma * params.omega_sigma;
    const double od2 = params.omega_d * params.omega_d;
    const double om4 = od2 * os2 + od2 * op2 + op2 * op2;

    DeitOptimum result;
    result.alpha = eta_pi_axial != 0.0 ? (eta_d_axial - eta_pi_axial) / eta_pi_axial : 0.0;
    result.rate_radial =
        0.5 * eta_sigma_radial * eta_sigma_radial * op2 * od2 * os2 / (om4 * params.gamma);
    result.rate_axial = 0.5 * eta_pi_axial * eta_pi_axial * op2 * od2 / (om4 * params.gamma) *
                        std::max(op2 * result.alpha * result.alpha, os2);
    result.n_ss =
        params.gamma * params.gamma / (4.0 * params.delta * params.delta + params.gamma * params.gamma);
    return result;
}

EitOptimum optimal_rates_single(const model::CoolingScheme& scheme) {
    const double eta =
        scheme.eta(model::LaserLabel::pi397) - scheme.eta(model::LaserLabel::sigma397);
    return single_eit_optimum(scheme.delta, scheme.rabi(model::LaserLabel::pi397),
                              scheme.rabi(model::LaserLabel::sigma397), scheme.gamma(), eta);
}

DeitOptimum optimal_rates_deit(const model::CoolingScheme& scheme) {
    return deit_optimum(DeitParams::from_scheme(scheme),
                        scheme.eta(model::LaserLabel::pi397, model::ModeLabel::axial),
                        scheme.eta(model::LaserLabel::d866, model::ModeLabel::axial),
                        scheme.eta(model::LaserLabel::sigma397, model::ModeLabel::radial1));
}

// ------------------------------ bright-state tuning --------------------------

double bright_state_tuning(double delta, double nu_target) {
    if (delta <= 0.0 || nu_target <= 0.0) {
        throw std::invalid_argument("bright_state_tuning: delta and nu_target must be positive");
    }
    return std::sqrt(4.0 * delta * nu_target);
}

double stark_shift(double omega, double delta) {
    if (delta == 0.0) throw std::invalid_argument("stark_shift: delta must be nonzero");
    return omega * omega / (4.0 * delta);
}

double bright_width(double delta, double omega, double nu, double gamma) {
    return nu * gamma / (4.0 * std::sqrt(delta * delta + omega * omega));
}

} // namespace eitcool::lambdicke
