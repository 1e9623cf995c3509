// ttm.hpp — Transfer-tensor analysis of discrete-time dynamical maps:
// extraction from short simulations, memory-tensor decomposition, long-time
// extrapolation and the generalized (time- and temperature-dependent) cooling
// rate from the corrected fluctuation-dissipation relation.

#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

#include "eitcool/errors.hpp"
#include "eitcool/lambdicke.hpp"
#include "eitcool/model.hpp"

namespace eitcool::ttm {

// Population propagators E_k on the vibrational Fock populations at uniform
// times k dt, k = 1..K (E_0 is the identity, implied). Columns of every map
// sum to one.
struct DynamicalMapSeries {
    double dt{0.0};
    std::vector<Eigen::MatrixXd> maps;

    int size() const { return static_cast<int>(maps.size()); }
    int dim() const { return maps.empty() ? 0 : static_cast<int>(maps.front().rows()); }

    // 1-based accessor: map(0) is the identity.
    Eigen::MatrixXd map(int k) const;
};

// Column-by-column extraction: propagate_basis(m) returns the population
// vectors at times k dt, k = 1..K, for the initial Fock state m.
DynamicalMapSeries extract_maps(
    const std::function<std::vector<Eigen::VectorXd>(int)>& propagate_basis, double dt, int steps,
    int dim);

// Markovian reference: E_k = exp(A k dt) from a birth-death rate matrix.
DynamicalMapSeries extract_maps_rate_equation(const lambdicke::RateMatrix& matrix, double dt,
                                              int steps);

// Full master-equation maps: each basis Fock state is tensored with the
// pumped electronic level, propagated, and read out as vibrational
// populations.
DynamicalMapSeries extract_maps_master_equation(const model::CoolingScheme& scheme, int fock_dim,
                                                double dt, int steps, double tolerance = 1e-8,
                                                int initial_level = model::SPlus);

struct TransferTensors {
    std::vector<Eigen::MatrixXd> tensors; // tensors[k-1] = T_k
};

// T_1 = E_1, T_k = E_k - sum_{m=1}^{k-1} T_m E_{k-m}.
TransferTensors transfer_tensors(const DynamicalMapSeries& maps);

// Largest reconstruction defect ||E_k - sum_m T_m E_{k-m}|| on the training
// window (identically zero up to round-off, asserted by tests).
double reconstruction_defect(const TransferTensors& tensors, const DynamicalMapSeries& maps);

// Extend the series to `horizon` steps through the memory convolution
// E_k = sum_{m=1}^{K} T_m E_{k-m}. Throws when the extrapolated maps grow,
// which signals an unstable memory truncation (increase the window).
DynamicalMapSeries extrapolate(const TransferTensors& tensors, const DynamicalMapSeries& maps,
                               int horizon);

// nbar(t_k) for k = 0..K from an initial population vector.
std::vector<double> nbar_series(const DynamicalMapSeries& maps, const Eigen::VectorXd& p0);

// Flat binary checkpoints for map series, laid out like the density-matrix
// checkpoints: magic, dimensions, dt, then row-major doubles per map.
void save_maps(const std::string& path, const DynamicalMapSeries& maps);
DynamicalMapSeries load_maps(const std::string& path);

// ------------------------- generalized cooling rate ---------------------------

struct ThermoResponse {
    double t{0.0};
    double var_dh{0.0};        // two-time energy-jump variance <(dH)^2>(t), J^2
    double var_transfer{0.0};  // transferred-energy variance <H^2>(t), J^2
    double capacitance{0.0};   // C(t) = d<H>(t)/dT, J/K
    double conductance{0.0};   // kappa(t) = dJ/dT = -dC/dt, W/K
    double rate{0.0};          // R(t, nbar0) = kappa/C, 1/s
    bool rate_valid{true};     // false where C(t) crosses zero or at the ends
};

// R(t, nbar0) for a thermal initial distribution of mean occupation nbar0.
// C(t) is evaluated by analytic differentiation of the initial thermal
// distribution with respect to temperature (a two-time covariance), kappa(t)
// by centered differences of C on the map grid; their ratio is the
// instantaneous cooling rate and reduces to A- - A+ for semigroup maps.
std::vector<ThermoResponse> generalized_rate(const DynamicalMapSeries& maps, double nbar0,
                                             double nu);

// ------------------------- long-horizon asymptotics ---------------------------

// One-step map at the end of the training window, M = E_K E_{K-1}^{-1},
// valid once the transfer tensors have decayed. Provides the asymptotic
// cooling rate (spectral gap), the stationary occupation, and cheap
// evaluation of nbar at arbitrary late times.
struct AsymptoticModel {
    Eigen::MatrixXd step;
    double dt{0.0};
    double window_end{0.0}; // K dt
    double rate{0.0};       // -ln|lambda_1| / dt of the slowest decaying mode
    double n_ss{0.0};
    Eigen::VectorXd stationary;
    Eigen::VectorXd window_population; // E_K p0 placeholder; set by nbar_at

    Eigen::MatrixXcd eigenvectors;
    Eigen::VectorXcd eigenvalues;
};

AsymptoticModel asymptotic_model(const DynamicalMapSeries& maps);

// nbar(t) for t >= window_end through eigen-decomposed powers of the step map.
std::vector<double> nbar_at(const AsymptoticModel& m, const DynamicalMapSeries& maps,
                            const Eigen::VectorXd& p0, const std::vector<double>& times);

} // namespace eitcool::ttm
