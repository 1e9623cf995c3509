// thermometry.cpp — Sideband readout, cooling-curve fits and instantaneous rates.

#include "eitcool/thermometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "eitcool/units.hpp"

namespace eitcool::thermometry {

double sideband_excitation(const Eigen::VectorXd& populations, double eta_sb, double omega_sb,
                           double rabi_time, int order) {
    if (order != 1 && order != -1) {
        throw std::invalid_argument("sideband_excitation: order must be +1 (BSB) or -1 (RSB)");
    }
    if (std::abs(populations.sum() - 1.0) > 1e-6) {
        throw std::invalid_argument("sideband_excitation: populations must be normalized");
    }
    double excitation = 0.0;
    for (int n = 0; n < populations.size(); ++n) {
        const double quanta = order > 0 ? double(n + 1) : double(n);
        if (quanta == 0.0) continue; // RSB from n = 0 drives nothing
        const double rabi = eta_sb * std::sqrt(quanta) * omega_sb;
        const double s = std::sin(0.5 * rabi * rabi_time);
        excitation += populations(n) * s * s;
    }
    return excitation;
}

double nbar_from_sidebands(double rsb, double bsb) {
    if (rsb < 0.0) throw std::invalid_argument("nbar_from_sidebands: rsb must be >= 0");
    if (!(bsb > rsb)) {
        std::ostringstream msg;
        msg << "nbar_from_sidebands: undefined for bsb <= rsb (rsb = " << rsb << ", bsb = " << bsb
            << ")";
        throw PhysicsError(msg.str());
    }
    return rsb / (bsb - rsb);
}

double default_rabi_time(double eta_sb, double omega_sb, double nbar0) {
    if (eta_sb <= 0.0 || omega_sb <= 0.0) {
        throw std::invalid_argument("default_rabi_time: eta and Omega must be positive");
    }
    return units::pi / (eta_sb * omega_sb * std::sqrt(nbar0 + 1.0));
}

FitResult fit_cooling_curve(const std::vector<double>& times, const std::vector<double>& nbar) {
    const std::size_t n = times.size();
    if (n != nbar.size()) throw std::invalid_argument("fit_cooling_curve: size mismatch");
    if (n < 5) throw std::invalid_argument("fit_cooling_curve: need at least 5 points");

    const double t_scale = *std::max_element(times.begin(), times.end());
    if (!(t_scale > 0.0)) throw std::invalid_argument("fit_cooling_curve: non-positive time span");
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = times[i] / t_scale;

    // Initial guess: offset from the tail, amplitude from the head, rate from
    // the 1/e crossing of the head-to-tail decay.
    double c = nbar.back();
    double a = nbar.front() - c;
    double r = 1.0;
    if (std::abs(a) > 0.0) {
        const double target = c + a / std::exp(1.0);
        for (std::size_t i = 1; i < n; ++i) {
            const bool crossed = a > 0.0 ? nbar[i] <= target : nbar[i] >= target;
            if (crossed && t[i] > 0.0) {
                r = 1.0 / t[i];
                break;
            }
        }
    }
    r = std::clamp(r, 1e-3, 1e4);

    auto residual_norm = [&](double aa, double rr, double cc) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = nbar[i] - (aa * std::exp(-rr * t[i]) + cc);
            sum += d * d;
        }
        return sum;
    };

    // Levenberg-Marquardt on (A, R, c) in normalized time.
    double lambda = 1e-3;
    double cost = residual_norm(a, r, c);
    bool converged = false;
    for (int iteration = 0; iteration < 200; ++iteration) {
        Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
        Eigen::Vector3d jtr = Eigen::Vector3d::Zero();
        for (std::size_t i = 0; i < n; ++i) {
            const double e = std::exp(-r * t[i]);
            const Eigen::Vector3d grad(e, -a * t[i] * e, 1.0);
            const double res = nbar[i] - (a * e + c);
            jtj += grad * grad.transpose();
            jtr += grad * res;
        }
        Eigen::Matrix3d damped = jtj;
        damped.diagonal() += lambda * jtj.diagonal();
        damped.diagonal().array() += 1e-300;
        const Eigen::Vector3d step = damped.ldlt().solve(jtr);
        const double a_new = a + step(0), r_new = r + step(1), c_new = c + step(2);
        const double cost_new = residual_norm(a_new, r_new, c_new);
        if (cost_new <= cost) {
            const double rel = step.norm() / (1.0 + std::abs(a) + std::abs(r) + std::abs(c));
            a = a_new;
            r = r_new;
            c = c_new;
            cost = cost_new;
            lambda = std::max(lambda * 0.3, 1e-12);
            if (rel < 1e-13) {
                converged = true;
                break;
            }
        } else {
            lambda *= 8.0;
            if (lambda > 1e12) break;
        }
    }
    // Reject fits that never found a meaningful exponential, converged or
    // not: data with real structure (spread comparable to its mean) whose
    // best fit explains no more than a constant carries no cooling curve.
    (void)converged;
    const double rms = std::sqrt(cost / double(n));
    double mean = 0.0;
    for (double y : nbar) mean += y;
    mean /= double(n);
    double variance = 0.0;
    for (double y : nbar) variance += (y - mean) * (y - mean);
    const double spread = std::sqrt(variance / double(n));
    if (rms > 0.8 * spread && spread > 0.25 * std::abs(mean)) {
        std::ostringstream msg;
        msg << "fit_cooling_curve: no acceptable fit (residual rms " << rms
            << " against data spread " << spread << ")";
        throw PhysicsError(msg.str());
    }

    FitResult result;
    result.amplitude = a;
    result.rate = r / t_scale;
    result.n_infinity = c;
    result.residual_rms = std::sqrt(cost / double(n));

    // Cut-off rule: |fit(t) - n_inf| = |A| exp(-R t) <= 0.005.
    if (result.rate > 0.0) {
        result.t_cut = std::abs(a) <= 0.005 ? 0.0 : std::log(std::abs(a) / 0.005) / result.rate;
        double sum = 0.0;
        int count = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (times[i] > result.t_cut) {
                sum += nbar[i];
                ++count;
            }
        }
        if (count > 0) {
            result.n_ss = sum / count;
            result.n_ss_valid = true;
        }
    }
    return result;
}

std::vector<double> nbar_from_fitted_sidebands(const SidebandSeries& series,
                                               const std::vector<double>& eval_times) {
    if (series.times.size() != series.rsb.size() || series.times.size() != series.bsb.size()) {
        throw std::invalid_argument("nbar_from_fitted_sidebands: ragged series");
    }
    const FitResult red = fit_cooling_curve(series.times, series.rsb);
    const FitResult blue = fit_cooling_curve(series.times, series.bsb);
    std::vector<double> nbar;
    nbar.reserve(eval_times.size());
    for (double t : eval_times) {
        const double rsb = red.amplitude * std::exp(-red.rate * t) + red.n_infinity;
        const double bsb = blue.amplitude * std::exp(-blue.rate * t) + blue.n_infinity;
        nbar.push_back(nbar_from_sidebands(std::max(rsb, 0.0), bsb));
    }
    return nbar;
}

CubicSpline::CubicSpline(const std::vector<double>& x, const std::vector<double>& y)
    : x_(x), y_(y), second_(x.size(), 0.0) {
    const std::size_t n = x.size();
    if (n < 3 || y.size() != n) throw std::invalid_argument("CubicSpline: need >= 3 points");
    for (std::size_t i = 1; i < n; ++i) {
        if (!(x[i] > x[i - 1])) {
            throw std::invalid_argument("CubicSpline: abscissae must be strictly increasing");
        }
    }
    // Natural spline: tridiagonal solve for the second derivatives.
    std::vector<double> u(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double sig = (x[i] - x[i - 1]) / (x[i + 1] - x[i - 1]);
        const double p = sig * second_[i - 1] + 2.0;
        second_[i] = (sig - 1.0) / p;
        u[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]) - (y[i] - y[i - 1]) / (x[i] - x[i - 1]);
        u[i] = (6.0 * u[i] / (x[i + 1] - x[i - 1]) - sig * u[i - 1]) / p;
    }
    second_[n - 1] = 0.0;
    for (std::size_t k = n - 1; k-- > 0;) {
        second_[k] = second_[k] * second_[k + 1] + u[k];
    }
}

double CubicSpline::operator()(double x) const {
    const auto upper = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t hi = std::clamp<std::size_t>(std::size_t(upper - x_.begin()), 1, x_.size() - 1);
    const std::size_t lo = hi - 1;
    const double h = x_[hi] - x_[lo];
    const double a = (x_[hi] - x) / h;
    const double b = (x - x_[lo]) / h;
    return a * y_[lo] + b * y_[hi] +
           ((a * a * a - a) * second_[lo] + (b * b * b - b) * second_[hi]) * h * h / 6.0;
}

double rate_at_nbar_one(const std::vector<double>& times, const std::vector<double>& nbar,
                        double n_ss, double stencil_step) {
    if (times.size() != nbar.size() || times.size() < 4) {
        throw std::invalid_argument("rate_at_nbar_one: need a sampled trajectory");
    }
    // Locate the first downward crossing of nbar = 1.
    std::size_t bracket = 0;
    bool found = false;
    for (std::size_t i = 1; i < nbar.size(); ++i) {
        if (nbar[i - 1] > 1.0 && nbar[i] <= 1.0) {
            bracket = i;
            found = true;
            break;
        }
    }
    if (!found) throw PhysicsError("rate_at_nbar_one: trajectory never crosses nbar = 1");

    const CubicSpline spline(times, nbar);
    double lo = times[bracket - 1], hi = times[bracket];
    for (int iteration = 0; iteration < 200; ++iteration) {
        const double mid = 0.5 * (lo + hi);
        (spline(mid) > 1.0 ? lo : hi) = mid;
    }
    const double t_star = 0.5 * (lo + hi);

    // Centered five-point derivative on a log-spaced local resample:
    // d nbar/dt = (1/t) d nbar/du with u = ln t.
    const double u0 = std::log(t_star);
    const double h = stencil_step;
    auto f = [&](double u) { return spline(std::exp(u)); };
    const double dnbar_du =
        (f(u0 - 2.0 * h) - 8.0 * f(u0 - h) + 8.0 * f(u0 + h) - f(u0 + 2.0 * h)) / (12.0 * h);
    const double dnbar_dt = dnbar_du / t_star;

    const double denominator = 1.0 - n_ss;
    if (std::abs(denominator) < 1e-12) {
        throw PhysicsError("rate_at_nbar_one: nbar = 1 coincides with the steady state");
    }
    return -dnbar_dt / denominator;
}

} // namespace eitcool::thermometry
