// model.cpp — Operator construction for the eight-level ⊗ oscillator system.

#include "eitcool/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace eitcool::model {

namespace {

constexpr std::complex<double> I{0.0, 1.0};
const double sqrt3 = std::sqrt(3.0);

// One laser-driven dipole |ground><excited|. weight multiplies Omega/2 and
// carries the Clebsch-Gordan amplitude ratios within the D manifold.
struct Coupling {
    int ground;
    int excited;
    LaserLabel laser;
    double weight;
};

// All laser couplings of the level scheme. pi397 drives both pi transitions,
// sigma397 the sigma+ transition into P+, and d866 (sigma+/sigma- light) the
// four allowed D3/2 dipoles with amplitudes sqrt(3) : 1.
const Coupling kCouplings[] = {
    {SMinus, PMinus, LaserLabel::pi397, 1.0},
    {SPlus, PPlus, LaserLabel::pi397, 1.0},
    {SMinus, PPlus, LaserLabel::sigma397, 1.0},
    {DMinus3, PMinus, LaserLabel::d866, sqrt3},
    {DMinus, PPlus, LaserLabel::d866, 1.0},
    {DPlus, PMinus, LaserLabel::d866, 1.0},
    {DPlus3, PPlus, LaserLabel::d866, sqrt3},
};

// Zeeman shift of each level in units of mu_B B: g-factors 2 (S1/2),
// 2/3 (P1/2) and 4/5 (D3/2) times m.
constexpr double kZeemanWeight[n_levels] = {
    -1.0, 1.0, -1.0 / 3.0, 1.0 / 3.0, -6.0 / 5.0, -2.0 / 5.0, 2.0 / 5.0, 6.0 / 5.0,
};

} // namespace

const char* level_name(int level) {
    static const char* names[n_levels] = {"S-", "S+", "P-", "P+", "D-3", "D-", "D+", "D+3"};
    if (level < 0 || level >= n_levels) throw std::invalid_argument("level_name: index out of range");
    return names[level];
}

const char* laser_name(LaserLabel label) {
    switch (label) {
        case LaserLabel::pi397: return "pi397";
        case LaserLabel::sigma397: return "sigma397";
        case LaserLabel::d866: return "d866";
    }
    throw std::invalid_argument("laser_name: unknown laser label");
}

const LaserDrive* CoolingScheme::find(LaserLabel label) const {
    for (const auto& laser : lasers) {
        if (laser.label == label) return &laser;
    }
    return nullptr;
}

const LaserDrive& CoolingScheme::require(LaserLabel label) const {
    const LaserDrive* laser = find(label);
    if (!laser) {
        throw std::invalid_argument(std::string("CoolingScheme: missing laser ") + laser_name(label));
    }
    return *laser;
}

double CoolingScheme::rabi(LaserLabel label) const {
    const LaserDrive* laser = find(label);
    return laser ? laser->rabi_frequency : 0.0;
}

double CoolingScheme::eta(LaserLabel label, ModeLabel which) const {
    const LaserDrive* laser = find(label);
    if (!laser) return 0.0;
    return which == ModeLabel::axial ? laser->lamb_dicke_axial : laser->lamb_dicke_radial;
}

double CoolingScheme::eta(LaserLabel label) const { return eta(label, mode.label); }

void CoolingScheme::validate() const {
    if (gamma_total <= 0.0 || !std::isfinite(gamma_total)) {
        throw std::invalid_argument("CoolingScheme: gamma_total must be positive and finite");
    }
    if (branch_s <= 0.0 || branch_s > 1.0 || branch_d < 0.0 || branch_d >= 1.0 ||
        std::abs(branch_s + branch_d - 1.0) > 1e-12) {
        throw std::invalid_argument("CoolingScheme: branch fractions must sum to 1, with "
                                    "branch_s in (0,1] and branch_d in [0,1)");
    }
    if (mode.frequency <= 0.0) {
        throw std::invalid_argument("CoolingScheme: trap mode frequency must be positive");
    }
    if (mode.background_heating < 0.0) {
        throw std::invalid_argument("CoolingScheme: background heating must be non-negative");
    }
    for (std::size_t i = 0; i < lasers.size(); ++i) {
        const auto& laser = lasers[i];
        if (laser.rabi_frequency < 0.0 || !std::isfinite(laser.rabi_frequency)) {
            throw std::invalid_argument("CoolingScheme: Rabi frequencies must be non-negative and finite");
        }
        if (!std::isfinite(laser.detuning)) {
            throw std::invalid_argument("CoolingScheme: laser detunings must be finite");
        }
        for (std::size_t j = i + 1; j < lasers.size(); ++j) {
            if (lasers[j].label == laser.label) {
                throw std::invalid_argument(std::string("CoolingScheme: duplicate laser ") +
                                            laser_name(laser.label));
            }
        }
    }
}

// Two-photon resonance conditions. With the diagonal of the rotating-frame
// Hamiltonian written out, the dark-state ground levels sit at
//   E(S+) = delta_pi + x,  E(S-) = delta_sigma - x,
//   E(D+) = -delta_pi + delta_sigma + delta_d + 2x/5,       x = mu_B B.
// Degeneracy of the three requires delta_sigma = delta_pi + 2x and
// delta_d = delta_pi - 7x/5; delta_pi itself is the blue detuning of the
// virtual level from the B = 0 P resonance.
ResonantDetunings resonant_detunings(double delta, const ZeemanField& zeeman) {
    const double x = zeeman.zeeman_unit();
    return {delta, delta + 2.0 * x, delta - 1.4 * x};
}

CoolingScheme make_scheme(const SchemeParams& params) {
    const ZeemanField zeeman{params.field};
    const ResonantDetunings det = resonant_detunings(params.delta, zeeman);

    CoolingScheme scheme;
    scheme.zeeman = zeeman;
    scheme.mode = params.mode;
    scheme.gamma_total = params.gamma_total;
    scheme.branch_s = params.branch_s;
    scheme.branch_d = params.branch_d;
    scheme.delta = params.delta;
    scheme.lasers = {
        {LaserLabel::pi397, params.omega_pi, det.pi397, params.eta_pi_axial, 0.0, Polarization::pi},
        {LaserLabel::sigma397, params.omega_sigma, det.sigma397, 0.0, params.eta_sigma_radial,
         Polarization::sigma_plus},
        {LaserLabel::d866, params.omega_d, det.d866, params.eta_d_axial, 0.0, Polarization::sigma_both},
    };
    scheme.validate();
    return scheme;
}

// ------------------------------ operators -----------------------------------

MatrixXcd lowering_operator(int fock_dim) {
    MatrixXcd b = MatrixXcd::Zero(fock_dim, fock_dim);
    for (int n = 1; n < fock_dim; ++n) b(n - 1, n) = std::sqrt(double(n));
    return b;
}

MatrixXcd number_operator(int fock_dim) {
    MatrixXcd n = MatrixXcd::Zero(fock_dim, fock_dim);
    for (int k = 0; k < fock_dim; ++k) n(k, k) = double(k);
    return n;
}

MatrixXcd displacement_operator(double eta, int fock_dim) {
    if (fock_dim < 1) throw std::invalid_argument("displacement_operator: fock_dim must be >= 1");
    if (eta == 0.0) return MatrixXcd::Identity(fock_dim, fock_dim);
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(fock_dim, fock_dim);
    for (int n = 1; n < fock_dim; ++n) {
        x(n - 1, n) = std::sqrt(double(n));
        x(n, n - 1) = x(n - 1, n);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(x);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("displacement_operator: eigendecomposition failed");
    }
    const Eigen::MatrixXd& v = solver.eigenvectors();
    VectorXcd phases(fock_dim);
    for (int k = 0; k < fock_dim; ++k) phases(k) = std::exp(I * eta * solver.eigenvalues()(k));
    return v.cast<std::complex<double>>() * phases.asDiagonal() *
           v.transpose().cast<std::complex<double>>();
}

double displacement_truncation_defect(double eta, int fock_dim, int margin) {
    if (fock_dim <= margin) throw std::invalid_argument("displacement_truncation_defect: fock_dim too small");
    // Compare against the same operator built on a larger space. The exact
    // exponential is unitary on the truncated space by construction, so the
    // truncation error shows up as a mismatch with the enlarged-space matrix.
    const int big = 2 * fock_dim + 8;
    const MatrixXcd small = displacement_operator(eta, fock_dim);
    const MatrixXcd large = displacement_operator(eta, big);
    const int keep = fock_dim - margin;
    return (small.topLeftCorner(keep, keep) - large.topLeftCorner(keep, keep)).norm();
}

namespace {

// Rotating-frame diagonal of the electronic Hamiltonian (detunings + Zeeman).
Eigen::Matrix<double, n_levels, 1> electronic_diagonal(const CoolingScheme& scheme) {
    const double d_pi = scheme.require(LaserLabel::pi397).detuning;
    const double d_sigma = scheme.require(LaserLabel::sigma397).detuning;
    const LaserDrive* d866 = scheme.find(LaserLabel::d866);
    const double d_d = d866 ? d866->detuning : 0.0;
    const double x = scheme.zeeman.zeeman_unit();

    Eigen::Matrix<double, n_levels, 1> diag;
    diag(SMinus) = d_sigma;
    diag(SPlus) = d_pi;
    diag(PMinus) = -d_pi + d_sigma;
    diag(PPlus) = 0.0;
    diag(DMinus3) = -d_pi + d_sigma + d_d;
    diag(DMinus) = d_d;
    diag(DPlus) = -d_pi + d_sigma + d_d;
    diag(DPlus3) = d_d;
    for (int level = 0; level < n_levels; ++level) diag(level) += x * kZeemanWeight[level];
    return diag;
}

} // namespace

MatrixXcd electronic_hamiltonian(const CoolingScheme& scheme) {
    scheme.validate();
    MatrixXcd h = MatrixXcd::Zero(n_levels, n_levels);
    h.diagonal() = electronic_diagonal(scheme).cast<std::complex<double>>();
    for (const auto& coupling : kCouplings) {
        const double amp = 0.5 * coupling.weight * scheme.rabi(coupling.laser);
        if (amp == 0.0) continue;
        h(coupling.ground, coupling.excited) += amp;
        h(coupling.excited, coupling.ground) += amp;
    }
    return h;
}

MatrixXcd build_hamiltonian(const CoolingScheme& scheme, int fock_dim) {
    scheme.validate();
    if (fock_dim < 2) throw std::invalid_argument("build_hamiltonian: fock_dim must be >= 2");

    const int dim = n_levels * fock_dim;
    MatrixXcd h = MatrixXcd::Zero(dim, dim);

    const auto diag = electronic_diagonal(scheme);
    for (int level = 0; level < n_levels; ++level) {
        for (int n = 0; n < fock_dim; ++n) {
            h(level * fock_dim + n, level * fock_dim + n) = diag(level) + scheme.mode.frequency * n;
        }
    }
    for (const auto& coupling : kCouplings) {
        const double amp = 0.5 * coupling.weight * scheme.rabi(coupling.laser);
        if (amp == 0.0) continue;
        const MatrixXcd recoil = displacement_operator(scheme.eta(coupling.laser), fock_dim);
        h.block(coupling.ground * fock_dim, coupling.excited * fock_dim, fock_dim, fock_dim) +=
            amp * recoil;
        h.block(coupling.excited * fock_dim, coupling.ground * fock_dim, fock_dim, fock_dim) +=
            amp * recoil.adjoint();
    }
    return h;
}

std::vector<DecayChannel> decay_channels(const CoolingScheme& scheme) {
    scheme.validate();
    const double gs = scheme.branch_s * scheme.gamma_total;
    const double gd = scheme.branch_d * scheme.gamma_total;
    // Clebsch-Gordan branching within each manifold: pi/sigma = 1/3 : 2/3 for
    // P1/2 -> S1/2 and sigma/pi/sigma = 1/2 : 1/3 : 1/6 for P1/2 -> D3/2,
    // consistent with the amplitude weights of the Hamiltonian couplings.
    return {
        {PPlus, SPlus, gs / 3.0}, {PPlus, SMinus, 2.0 * gs / 3.0},
        {PPlus, DPlus3, gd / 2.0}, {PPlus, DPlus, gd / 3.0}, {PPlus, DMinus, gd / 6.0},
        {PMinus, SMinus, gs / 3.0}, {PMinus, SPlus, 2.0 * gs / 3.0},
        {PMinus, DMinus3, gd / 2.0}, {PMinus, DMinus, gd / 3.0}, {PMinus, DPlus, gd / 6.0},
    };
}

std::vector<MatrixXcd> build_collapse_ops(const CoolingScheme& scheme, int fock_dim,
                                          double emission_eta) {
    if (fock_dim < 2) throw std::invalid_argument("build_collapse_ops: fock_dim must be >= 2");
    std::vector<MatrixXcd> ops;
    auto add = [&](const DecayChannel& channel, double rate, const MatrixXcd& recoil) {
        MatrixXcd c = MatrixXcd::Zero(n_levels * fock_dim, n_levels * fock_dim);
        c.block(channel.ground * fock_dim, channel.excited * fock_dim, fock_dim, fock_dim) =
            std::sqrt(rate) * recoil;
        ops.push_back(std::move(c));
    };
    if (emission_eta == 0.0) {
        const MatrixXcd identity = MatrixXcd::Identity(fock_dim, fock_dim);
        for (const auto& channel : decay_channels(scheme)) add(channel, channel.rate, identity);
    } else {
        // Emission recoil must be direction-averaged: a single fixed
        // displacement per decay is a coherent momentum kick, not diffusion.
        // Each dipole splits into ± kicks at half rate, which cancels the
        // odd-moment drift and leaves d nbar/dt = eta^2 * rate per channel.
        const MatrixXcd kick_up = displacement_operator(emission_eta, fock_dim);
        const MatrixXcd kick_down = displacement_operator(-emission_eta, fock_dim);
        for (const auto& channel : decay_channels(scheme)) {
            add(channel, 0.5 * channel.rate, kick_up);
            add(channel, 0.5 * channel.rate, kick_down);
        }
    }
    return ops;
}

OperatorSet build_operator_set(const CoolingScheme& scheme, int fock_dim, double emission_eta) {
    return {build_hamiltonian(scheme, fock_dim), build_collapse_ops(scheme, fock_dim, emission_eta),
            fock_dim, n_levels};
}

bool d_manifold_idle(const CoolingScheme& scheme) {
    return scheme.branch_d == 0.0 && scheme.rabi(LaserLabel::d866) == 0.0;
}

OperatorSet build_reduced_operator_set(const CoolingScheme& scheme, int fock_dim,
                                       double emission_eta) {
    if (!d_manifold_idle(scheme)) {
        throw std::invalid_argument("build_reduced_operator_set: D manifold is not idle");
    }
    OperatorSet full = build_operator_set(scheme, fock_dim, emission_eta);
    const int keep = 4 * fock_dim;
    OperatorSet reduced;
    reduced.fock_dim = fock_dim;
    reduced.n_active_levels = 4;
    reduced.hamiltonian = full.hamiltonian.topLeftCorner(keep, keep);
    for (const auto& op : full.collapse_ops) {
        MatrixXcd block = op.topLeftCorner(keep, keep);
        if (block.cwiseAbs().maxCoeff() > 0.0) reduced.collapse_ops.push_back(std::move(block));
    }
    return reduced;
}

// ------------------------------ dark states ---------------------------------

VectorXcd dark_state_single(double omega_pi, double omega_sigma) {
    const double norm = std::hypot(omega_pi, omega_sigma);
    if (norm <= 0.0) {
        throw std::invalid_argument("dark_state_single: both Rabi frequencies are zero");
    }
    VectorXcd state = VectorXcd::Zero(n_levels);
    state(SMinus) = omega_pi / norm;
    state(SPlus) = -omega_sigma / norm;
    return state;
}

VectorXcd dark_state_deit(double omega_pi, double omega_sigma, double omega_d) {
    const double norm2 = std::sqrt(omega_d * omega_d * omega_sigma * omega_sigma +
                                   omega_d * omega_d * omega_pi * omega_pi +
                                   omega_pi * omega_pi * omega_pi * omega_pi);
    if (norm2 <= 0.0) {
        throw std::invalid_argument("dark_state_deit: degenerate all-zero Rabi frequencies");
    }
    VectorXcd state = VectorXcd::Zero(n_levels);
    state(SPlus) = omega_d * omega_sigma / norm2;
    state(SMinus) = -omega_d * omega_pi / norm2;
    state(DPlus) = omega_pi * omega_pi / norm2;
    return state;
}

MatrixXcd lamb_dicke_coupling_operator(const CoolingScheme& scheme) {
    scheme.validate();
    MatrixXcd sigma = MatrixXcd::Zero(n_levels, n_levels);
    for (const auto& coupling : kCouplings) {
        const double amp =
            0.5 * coupling.weight * scheme.rabi(coupling.laser) * scheme.eta(coupling.laser);
        if (amp == 0.0) continue;
        sigma(coupling.ground, coupling.excited) += I * amp;
        sigma(coupling.excited, coupling.ground) += -I * amp;
    }
    return sigma;
}

VectorXcd lamb_dicke_coupling_state(const CoolingScheme& scheme) {
    const double om_pi = scheme.rabi(LaserLabel::pi397);
    const double om_sigma = scheme.rabi(LaserLabel::sigma397);
    const double om_d = scheme.rabi(LaserLabel::d866);
    const double eta_pi = scheme.eta(LaserLabel::pi397);
    const double eta_sigma = scheme.eta(LaserLabel::sigma397);
    const double eta_d = scheme.eta(LaserLabel::d866);
    const double norm2 = std::sqrt(om_d * om_d * om_sigma * om_sigma +
                                   om_d * om_d * om_pi * om_pi + std::pow(om_pi, 4));
    if (norm2 <= 0.0) {
        throw std::invalid_argument("lamb_dicke_coupling_state: degenerate Rabi frequencies");
    }
    const double prefactor = om_pi * om_d / (2.0 * norm2);
    VectorXcd e = VectorXcd::Zero(n_levels);
    e(PPlus) = prefactor * om_sigma * (eta_pi - eta_sigma);
    e(PMinus) = prefactor * om_pi * (eta_d - eta_pi);
    return e;
}

// --------------------------- electronic systems -----------------------------

ElectronicSystem electronic_system(const CoolingScheme& scheme) {
    ElectronicSystem sys;
    sys.hamiltonian = electronic_hamiltonian(scheme);
    for (const auto& channel : decay_channels(scheme)) {
        if (channel.rate == 0.0) continue;
        MatrixXcd c = MatrixXcd::Zero(n_levels, n_levels);
        c(channel.ground, channel.excited) = std::sqrt(channel.rate);
        sys.collapse_ops.push_back(std::move(c));
    }
    sys.coupling = lamb_dicke_coupling_operator(scheme);
    if (d_manifold_idle(scheme)) {
        sys.hamiltonian = sys.hamiltonian.topLeftCorner(4, 4).eval();
        sys.coupling = sys.coupling.topLeftCorner(4, 4).eval();
        for (auto& c : sys.collapse_ops) c = c.topLeftCorner(4, 4).eval();
    }
    return sys;
}

ElectronicSystem lambda_system(double delta, double omega_pi, double omega_sigma, double gamma,
                               double eta_pi, double eta_sigma) {
    if (gamma <= 0.0) throw std::invalid_argument("lambda_system: gamma must be positive");
    ElectronicSystem sys;
    sys.hamiltonian = MatrixXcd::Zero(3, 3);
    sys.hamiltonian(2, 2) = -delta;
    sys.hamiltonian(0, 2) = 0.5 * omega_sigma;
    sys.hamiltonian(2, 0) = 0.5 * omega_sigma;
    sys.hamiltonian(1, 2) = 0.5 * omega_pi;
    sys.hamiltonian(2, 1) = 0.5 * omega_pi;

    // Total population decay 2 gamma, split 2/3 : 1/3 (sigma : pi dipole).
    const double total = 2.0 * gamma;
    MatrixXcd c0 = MatrixXcd::Zero(3, 3);
    c0(0, 2) = std::sqrt(2.0 * total / 3.0);
    MatrixXcd c1 = MatrixXcd::Zero(3, 3);
    c1(1, 2) = std::sqrt(total / 3.0);
    sys.collapse_ops = {c0, c1};

    sys.coupling = MatrixXcd::Zero(3, 3);
    sys.coupling(0, 2) = 0.5 * eta_sigma * omega_sigma;
    sys.coupling(1, 2) = 0.5 * eta_pi * omega_pi;
    sys.coupling(2, 0) = 0.5 * eta_sigma * omega_sigma;
    sys.coupling(2, 1) = 0.5 * eta_pi * omega_pi;
    return sys;
}

} // namespace eitcool::model
