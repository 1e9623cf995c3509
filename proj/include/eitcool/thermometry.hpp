// thermometry.hpp — Sideband thermometry on simulated data: Rabi-flop readout
// of Fock distributions, nbar extraction, exponential cooling-curve fits with
// the cut-off-time rule, and the rate-at-nbar-one convention.

#pragma once

#include <Eigen/Dense>

#include <vector>

#include "eitcool/errors.hpp"

namespace eitcool::thermometry {

// RSB/BSB excitation series versus cooling time.
struct SidebandSeries {
    std::vector<double> times; // cooling durations, s
    std::vector<double> rsb;   // red-sideband excitation probabilities
    std::vector<double> bsb;   // blue-sideband excitation probabilities
    double rabi_time{0.0};     // s
    double sideband_eta{0.0};  // logic-transition Lamb-Dicke factor
};

// Ideal first-order sideband flop: P = sum_n p_n sin^2(Omega_{n,n±order} t/2)
// with Omega_{n,n-1} = eta sqrt(n) Omega (RSB) and Omega_{n,n+1} =
// eta sqrt(n+1) Omega (BSB). order must be -1 (RSB) or +1 (BSB).
double sideband_excitation(const Eigen::VectorXd& populations, double eta_sb, double omega_sb,
                           double rabi_time, int order);

// nbar = rsb / (bsb - rsb); requires bsb > rsb >= 0.
double nbar_from_sidebands(double rsb, double bsb);

// Default probe time: pi-time of the initial-temperature Rabi flop,
// pi / (eta Omega sqrt(nbar0 + 1)).
double default_rabi_time(double eta_sb, double omega_sb, double nbar0);

struct FitResult {
    double amplitude{0.0};  // A
    double rate{0.0};       // R, 1/s
    double n_infinity{0.0}; // fitted offset
    double t_cut{0.0};      // first t with |fit(t) - n_infinity| <= 0.005
    double n_ss{0.0};       // mean of data beyond t_cut
    bool n_ss_valid{false}; // false when no data lies beyond t_cut
    double residual_rms{0.0};
};

// Nonlinear least-squares fit of nbar(t) = A exp(-R t) + n_inf, followed by
// the cut-off rule and plateau averaging. Times are normalized internally, so
// the fit is exactly equivariant under rescaling of the time axis.
FitResult fit_cooling_curve(const std::vector<double>& times, const std::vector<double>& nbar);

// High-temperature pipeline: fit each sideband series with its own
// exponential first, then form nbar(t) from the fitted curves. Improves on
// the direct ratio when the individual excitations are smoother than their
// ratio.
std::vector<double> nbar_from_fitted_sidebands(const SidebandSeries& series,
                                               const std::vector<double>& eval_times);

// Instantaneous rate R = -(dnbar/dt) / (nbar - n_ss) evaluated where the
// trajectory crosses nbar = 1, with the derivative from a centered five-point
// stencil on a log-spaced local resample of the interpolated curve.
double rate_at_nbar_one(const std::vector<double>& times, const std::vector<double>& nbar,
                        double n_ss, double stencil_step = 0.02);

// Natural cubic-spline interpolant used by rate_at_nbar_one; exposed for the
// stencil-refinement checks.
class CubicSpline {
public:
    CubicSpline(const std::vector<double>& x, const std::vector<double>& y);
    double operator()(double x) const;

private:
    std::vector<double> x_, y_, second_;
};

} // namespace eitcool::thermometry
