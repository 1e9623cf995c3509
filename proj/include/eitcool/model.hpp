// model.hpp — Physical configuration of the cooling schemes and construction of
// the operators of the electronic ⊗ vibrational master equation.
//
// Electronic basis ordering (part of the public contract):
//     0: |S->   1: |S+>   2: |P->   3: |P+>
//     4: |D-3>  5: |D->   6: |D+>   7: |D+3>
// The full Hilbert space is electronic ⊗ Fock with the Fock index fastest:
// global index = level * fock_dim + n, Fock states n = 0 .. fock_dim-1.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <vector>

#include "eitcool/errors.hpp"
#include "eitcool/units.hpp"

namespace eitcool::model {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

enum Level : int {
    SMinus = 0,
    SPlus = 1,
    PMinus = 2,
    PPlus = 3,
    DMinus3 = 4,
    DMinus = 5,
    DPlus = 6,
    DPlus3 = 7,
};
inline constexpr int n_levels = 8;

const char* level_name(int level);

enum class Polarization { pi, sigma_plus, sigma_minus, sigma_both };
enum class LaserLabel { pi397, sigma397, d866 };

const char* laser_name(LaserLabel label);

struct LaserDrive {
    LaserLabel label{LaserLabel::pi397};
    double rabi_frequency{0.0};    // rad/s, >= 0
    double detuning{0.0};          // rad/s, blue positive
    double lamb_dicke_axial{0.0};  // signed projection onto the axial mode
    double lamb_dicke_radial{0.0}; // signed projection onto the radial mode
    Polarization polarization{Polarization::pi};
};

struct ZeemanField {
    double field_strength{0.0}; // tesla
    double bohr_magneton_over_hbar{units::bohr_magneton_over_hbar};

    // mu_B B in rad/s; the unit of every Zeeman shift in the Hamiltonian.
    double zeeman_unit() const { return bohr_magneton_over_hbar * field_strength; }

    // Ground-state S-manifold splitting, 2 mu_B B. This is the delta_s that
    // parametrizes the dressed-frame spectra (see resonant_detunings for the
    // frame derivation).
    double delta_s() const { return 2.0 * zeeman_unit(); }
};

enum class ModeLabel { axial, radial1, radial2 };

struct TrapMode {
    ModeLabel label{ModeLabel::axial};
    double frequency{0.0};          // rad/s, > 0
    double background_heating{0.0}; // phonons/s, >= 0
};

// Fraction of the total linewidth Gamma that enters the analytic spectra as
// the Lorentzian half-width gamma. gamma is the optical-coherence decay rate,
// i.e. half the population decay rate; flip the convention here if ever needed.
inline constexpr double coherence_decay_fraction = 0.5;

struct CoolingScheme {
    std::vector<LaserDrive> lasers;
    ZeemanField zeeman;
    TrapMode mode;
    double gamma_total{0.0}; // total P-state population decay rate, rad/s
    double branch_s{0.935};  // fraction of gamma_total decaying to the S manifold
    double branch_d{0.065};  // fraction decaying to the D3/2 manifold
    double delta{0.0};       // common blue detuning of the virtual level, rad/s

    double gamma() const { return coherence_decay_fraction * gamma_total; }

    const LaserDrive* find(LaserLabel label) const;
    const LaserDrive& require(LaserLabel label) const; // throws if absent
    double rabi(LaserLabel label) const;               // 0 if laser absent
    double eta(LaserLabel label) const;                // projection for scheme.mode
    double eta(LaserLabel label, ModeLabel mode) const;

    void validate() const; // throws std::invalid_argument
};

// Laser detunings that put every ground state participating in the dark state
// at the same dressed-frame energy (two-photon resonance conditions).
struct ResonantDetunings {
    double pi397;
    double sigma397;
    double d866;
};
ResonantDetunings resonant_detunings(double delta, const ZeemanField& zeeman);

// Convenience constructors for the two schemes in the Fig.-1 beam geometry
// (sigma397 purely radial, pi397 and d866 purely axial, d866 counter-
// propagating to pi397). Individual fields can be edited afterwards.
struct SchemeParams {
    double delta{0.0};
    double gamma_total{units::mhz(20.7)};
    double field{416e-6}; // tesla
    double omega_pi{0.0};
    double omega_sigma{0.0};
    double omega_d{0.0};
    double branch_s{0.935};
    double branch_d{0.065};
    double eta_pi_axial{0.0};
    double eta_sigma_radial{0.0};
    double eta_d_axial{0.0};
    TrapMode mode{};
};
CoolingScheme make_scheme(const SchemeParams& params);

// ------------------------------ operators -----------------------------------

MatrixXcd lowering_operator(int fock_dim); // b
MatrixXcd number_operator(int fock_dim);   // b†b

// exp(i eta (b + b†)) on the truncated Fock space, computed as the exact
// matrix exponential of the truncated generator (exactly unitary).
MatrixXcd displacement_operator(double eta, int fock_dim);

// Unitarity defect of the displacement operator restricted to the lowest
// fock_dim - margin states; a cheap truncation-convergence check.
double displacement_truncation_defect(double eta, int fock_dim, int margin = 2);

// 8x8 electronic Hamiltonian (eta = 0 sector): detunings, Zeeman shifts and
// laser couplings with Clebsch-Gordan weights.
MatrixXcd electronic_hamiltonian(const CoolingScheme& scheme);

// Full Hamiltonian on the (8 x fock_dim)-dimensional space, including the
// trap term nu b†b and the recoil factors exp(i eta_i (b + b†)).
MatrixXcd build_hamiltonian(const CoolingScheme& scheme, int fock_dim);

// One radiative decay dipole |excited> -> |ground>.
struct DecayChannel {
    int excited;
    int ground;
    double rate; // rad/s; rates out of each excited level sum to gamma_total
};
std::vector<DecayChannel> decay_channels(const CoolingScheme& scheme);

// Collapse operators sqrt(rate) |g><e| ⊗ R with R = exp(i emission_eta (b+b†))
// (identity by default: decay recoil at zeroth Lamb-Dicke order).
std::vector<MatrixXcd> build_collapse_ops(const CoolingScheme& scheme, int fock_dim,
                                          double emission_eta = 0.0);

struct OperatorSet {
    MatrixXcd hamiltonian;
    std::vector<MatrixXcd> collapse_ops;
    int fock_dim{0};
    int n_active_levels{n_levels};
};
OperatorSet build_operator_set(const CoolingScheme& scheme, int fock_dim,
                               double emission_eta = 0.0);

// True when the D3/2 manifold never participates: no d866 drive and no
// branching into it. The dynamics then closes on the four S/P levels.
bool d_manifold_idle(const CoolingScheme& scheme);

// Operators restricted to the S/P sector (first four levels); requires
// d_manifold_idle. Physics is identical for states prepared in that sector,
// at a quarter of the propagation cost.
OperatorSet build_reduced_operator_set(const CoolingScheme& scheme, int fock_dim,
                                       double emission_eta = 0.0);

// ------------------------------ dark states ---------------------------------

// Single-EIT dark state (Omega_pi |S-> - Omega_sigma |S+>) / Omega, as an
// 8-component electronic vector.
VectorXcd dark_state_single(double omega_pi, double omega_sigma);

// D-EIT dark state (Od Os |S+> - Od Op |S-> + Op^2 |D+>) / Ominus^2.
VectorXcd dark_state_deit(double omega_pi, double omega_sigma, double omega_d);

// First-order Lamb-Dicke coupling operator sigma_eta for scheme.mode (8x8,
// Hermitian): sum over lasers of i eta_i Omega_i/2 (|g><e| - |e><g|) with the
// same Clebsch-Gordan weights as the Hamiltonian couplings.
MatrixXcd lamb_dicke_coupling_operator(const CoolingScheme& scheme);

// Unnormalized excited-state vector |E> = i sigma_eta |dark>, in closed form.
VectorXcd lamb_dicke_coupling_state(const CoolingScheme& scheme);

// --------------------------- electronic systems -----------------------------

// Electronic-only open system: Hamiltonian, collapse operators and the
// Lamb-Dicke coupling operator. Input to the regression-theorem spectrum and
// the electronic steady-state solver.
struct ElectronicSystem {
    MatrixXcd hamiltonian;
    std::vector<MatrixXcd> collapse_ops;
    MatrixXcd coupling; // sigma_eta

    int dim() const { return static_cast<int>(hamiltonian.rows()); }
};

// Electronic system of the scheme (eta = 0 Hamiltonian): the full 8 levels,
// or the 4-level S/P restriction when the D manifold is idle (a fully idle
// manifold would otherwise make the steady state degenerate).
ElectronicSystem electronic_system(const CoolingScheme& scheme);

// Reduced three-level Lambda system {S-, S+, P+} underlying the closed-form
// single-EIT spectrum: couplings Omega_sigma (S- <-> P+), Omega_pi (S+ <-> P+),
// common detuning delta, coherence decay gamma.
ElectronicSystem lambda_system(double delta, double omega_pi, double omega_sigma,
                               double gamma, double eta_pi, double eta_sigma);

} // namespace eitcool::model
