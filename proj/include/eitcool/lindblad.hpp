// lindblad.hpp — Master-equation engine: adaptive propagation of the
// electronic ⊗ vibrational density operator, electronic steady states,
// scattering-rate scans and cooling trajectories.

#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "eitcool/errors.hpp"
#include "eitcool/model.hpp"

namespace eitcool::lindblad {

using Eigen::MatrixXcd;
using Eigen::VectorXd;

struct QuantumState {
    MatrixXcd rho;
    double time{0.0};
    int fock_dim{0};

    // Hermiticity, unit trace and positivity up to numerical tolerance.
    void validate(double hermiticity_tol = 1e-10, double trace_tol = 1e-9,
                  double positivity_tol = 1e-8) const;
};

// |level> ⊗ (diagonal Fock mixture with the given populations).
QuantumState product_state(int level, const VectorXd& fock_populations, int fock_dim,
                           int n_levels = model::n_levels);

// ------------------------------ observables ----------------------------------

double nbar_of(const MatrixXcd& rho, int fock_dim);
double excited_population(const MatrixXcd& rho, int fock_dim);
VectorXd fock_populations(const MatrixXcd& rho, int fock_dim);

struct Trajectory {
    std::vector<double> times;
    std::vector<double> nbar;
    std::vector<double> p_excited;
    std::vector<VectorXd> fock_populations;
    bool truncation_warning{false};
};

// ------------------------------ propagation ----------------------------------

struct PropagateOptions {
    double tolerance{1e-8};          // relative local-error control of the integrator
    int n_samples{60};               // output samples over the run (plus t = 0)
    double background_heating{0.0};  // phonons/s added as b/b† Lindblad pair
    bool check_positivity{true};
    double positivity_tolerance{1e-6};
    double truncation_threshold{1e-3}; // top-Fock population that flags truncation
};

// Integrate d rho/dt = -i[H, rho] + sum_j (C_j rho C_j† - 1/2 {C_j†C_j, rho})
// with an embedded adaptive Runge-Kutta scheme and a block-structured
// right-hand side (the d^2 x d^2 superoperator is never materialized).
// `state` is advanced to time + duration; the returned trajectory samples
// observables along the way.
Trajectory propagate(QuantumState& state, const model::OperatorSet& ops, double duration,
                     const PropagateOptions& options = {});

// One application of the generator; used for stationarity checks.
MatrixXcd apply_liouvillian(const model::OperatorSet& ops, const MatrixXcd& rho,
                            double background_heating = 0.0);

// Thermal vibrational state ⊗ pumped electronic level, then propagate.
Trajectory cooling_trajectory(const model::CoolingScheme& scheme, double nbar0, double duration,
                              int fock_dim, const PropagateOptions& options = {},
                              int initial_level = model::SPlus);

// -------------------------- electronic steady state ---------------------------

// Dense superoperator matrix of an electronic-only system (column-major vec).
MatrixXcd liouvillian_matrix(const model::ElectronicSystem& system);

// Trace-one steady state by shifted-inverse null-space iteration. Throws
// PhysicsError if the iteration does not reach the residual target or if the
// null space is degenerate (more than one stationary direction).
MatrixXcd steady_state_electronic(const model::ElectronicSystem& system,
                                  double* residual = nullptr);

// ------------------------------- scans ---------------------------------------

// Photon scattering rate Gamma * (total P population) of the electronic
// steady state.
double scattering_rate(const model::CoolingScheme& scheme);

struct ScanPoint {
    double offset{0.0}; // probe (pi397) detuning offset from two-photon resonance
    double rate{0.0};   // photons/s
    bool converged{true};
};

// Steady-state scattering rate versus probe detuning offset; non-convergent
// grid points are flagged and the scan continues.
std::vector<ScanPoint> spectrum_scan(const model::CoolingScheme& scheme,
                                     const std::vector<double>& probe_offsets);

// Golden-section refinement of a scattering-rate extremum within [lo, hi].
double refine_extremum(const model::CoolingScheme& scheme, double lo, double hi, bool maximize,
                       double* rate_out = nullptr);

// ----------------------------- checkpointing ---------------------------------

// Flat binary checkpoint: header (magic, electronic dim, fock dim, time,
// basis-ordering string) followed by row-major re/im pairs of rho.
void save_state(const std::string& path, const QuantumState& state);
QuantumState load_state(const std::string& path);

} // namespace eitcool::lindblad
