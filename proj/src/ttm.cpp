// ttm.cpp — Dynamical maps, transfer tensors and the generalized rate.

#include "eitcool/ttm.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "eitcool/fock.hpp"
#include "eitcool/lindblad.hpp"
#include "eitcool/units.hpp"

namespace eitcool::ttm {

Eigen::MatrixXd DynamicalMapSeries::map(int k) const {
    if (k == 0) return Eigen::MatrixXd::Identity(dim(), dim());
    if (k < 0 || k > size()) throw std::invalid_argument("DynamicalMapSeries::map: out of range");
    return maps[std::size_t(k - 1)];
}

namespace {

void check_columns(const Eigen::MatrixXd& map, int k) {
    const Eigen::VectorXd sums = map.colwise().sum();
    for (int c = 0; c < sums.size(); ++c) {
        if (std::abs(sums(c) - 1.0) > 1e-8) {
            std::ostringstream msg;
            msg << "extract_maps: column " << c << " of E_" << k << " sums to " << sums(c)
                << " (not normalized)";
            throw PhysicsError(msg.str());
        }
    }
}

} // namespace

DynamicalMapSeries extract_maps(
    const std::function<std::vector<Eigen::VectorXd>(int)>& propagate_basis, double dt, int steps,
    int dim) {
    if (steps < 1 || dim < 2) throw std::invalid_argument("extract_maps: steps >= 1, dim >= 2");
    if (!(dt > 0.0)) throw std::invalid_argument("extract_maps: dt must be positive");

    DynamicalMapSeries series;
    series.dt = dt;
    series.maps.assign(std::size_t(steps), Eigen::MatrixXd::Zero(dim, dim));
    for (int m = 0; m < dim; ++m) {
        const std::vector<Eigen::VectorXd> columns = propagate_basis(m);
        if (static_cast<int>(columns.size()) != steps) {
            throw std::invalid_argument("extract_maps: propagator returned wrong step count");
        }
        for (int k = 0; k < steps; ++k) {
            if (columns[std::size_t(k)].size() != dim) {
                throw std::invalid_argument("extract_maps: propagator returned wrong dimension");
            }
            series.maps[std::size_t(k)].col(m) = columns[std::size_t(k)];
        }
    }
    for (int k = 1; k <= steps; ++k) check_columns(series.maps[std::size_t(k - 1)], k);
    return series;
}

DynamicalMapSeries extract_maps_rate_equation(const lambdicke::RateMatrix& matrix, double dt,
                                              int steps) {
    if (steps < 1) throw std::invalid_argument("extract_maps_rate_equation: steps >= 1");
    DynamicalMapSeries series;
    series.dt = dt;
    series.maps.reserve(std::size_t(steps));
    const Eigen::MatrixXd step = (matrix.entries * dt).exp();
    Eigen::MatrixXd accumulated = Eigen::MatrixXd::Identity(step.rows(), step.cols());
    for (int k = 0; k < steps; ++k) {
        accumulated = step * accumulated;
        series.maps.push_back(accumulated);
    }
    return series;
}

DynamicalMapSeries extract_maps_master_equation(const model::CoolingScheme& scheme, int fock_dim,
                                                double dt, int steps, double tolerance,
                                                int initial_level) {
    const bool reduced = model::d_manifold_idle(scheme) && initial_level < 4;
    const model::OperatorSet ops = reduced ? model::build_reduced_operator_set(scheme, fock_dim)
                                           : model::build_operator_set(scheme, fock_dim);
    lindblad::PropagateOptions options;
    options.tolerance = tolerance;
    options.n_samples = steps;
    options.check_positivity = false; // columns are checked for normalization instead

    auto propagate_basis = [&](int m) {
        Eigen::VectorXd pops = Eigen::VectorXd::Zero(fock_dim);
        pops(m) = 1.0;
        lindblad::QuantumState state =
            lindblad::product_state(initial_level, pops, fock_dim, ops.n_active_levels);
        const lindblad::Trajectory trajectory =
            lindblad::propagate(state, ops, dt * steps, options);
        std::vector<Eigen::VectorXd> columns;
        columns.reserve(std::size_t(steps));
        for (int k = 1; k <= steps; ++k) {
            columns.push_back(trajectory.fock_populations[std::size_t(k)]);
        }
        return columns;
    };
    return extract_maps(propagate_basis, dt, steps, fock_dim);
}

TransferTensors transfer_tensors(const DynamicalMapSeries& maps) {
    if (maps.size() < 2) throw std::invalid_argument("transfer_tensors: need at least 2 maps");
    TransferTensors result;
    result.tensors.reserve(std::size_t(maps.size()));
    for (int k = 1; k <= maps.size(); ++k) {
        Eigen::MatrixXd tensor = maps.map(k);
        for (int m = 1; m < k; ++m) {
            tensor -= result.tensors[std::size_t(m - 1)] * maps.map(k - m);
        }
        result.tensors.push_back(std::move(tensor));
    }
    return result;
}

double reconstruction_defect(const TransferTensors& tensors, const DynamicalMapSeries& maps) {
    double worst = 0.0;
    for (int k = 1; k <= maps.size(); ++k) {
        Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(maps.dim(), maps.dim());
        for (int m = 1; m <= k; ++m) {
            sum += tensors.tensors[std::size_t(m - 1)] * maps.map(k - m);
        }
        worst = std::max(worst, (maps.map(k) - sum).norm());
    }
    return worst;
}

DynamicalMapSeries extrapolate(const TransferTensors& tensors, const DynamicalMapSeries& maps,
                               int horizon) {
    if (horizon < maps.size()) throw std::invalid_argument("extrapolate: horizon < training window");
    DynamicalMapSeries extended = maps;
    extended.maps.reserve(std::size_t(horizon));
    const int memory = static_cast<int>(tensors.tensors.size());
    for (int k = maps.size() + 1; k <= horizon; ++k) {
        Eigen::MatrixXd next = Eigen::MatrixXd::Zero(maps.dim(), maps.dim());
        for (int m = 1; m <= memory; ++m) {
            next += tensors.tensors[std::size_t(m - 1)] * extended.map(k - m);
        }
        const double column_defect = (next.colwise().sum().array() - 1.0).abs().maxCoeff();
        if (column_defect > 1e-3) {
            std::ostringstream msg;
            msg << "extrapolate: map norm drift " << column_defect << " at step " << k
                << "; memory truncation unstable, enlarge the training window";
            throw PhysicsError(msg.str());
        }
        extended.maps.push_back(std::move(next));
    }
    return extended;
}

std::vector<double> nbar_series(const DynamicalMapSeries& maps, const Eigen::VectorXd& p0) {
    if (p0.size() != maps.dim()) throw std::invalid_argument("nbar_series: dimension mismatch");
    std::vector<double> result;
    result.reserve(std::size_t(maps.size()) + 1);
    result.push_back(fock::nbar_of(p0));
    for (const auto& map : maps.maps) result.push_back(fock::nbar_of(map * p0));
    return result;
}

namespace {
constexpr char kMapsMagic[8] = {'E', 'I', 'T', 'M', 'A', 'P', '0', '1'};
}

void save_maps(const std::string& path, const DynamicalMapSeries& maps) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_maps: cannot open " + path);
    out.write(kMapsMagic, sizeof(kMapsMagic));
    const std::uint32_t dim = static_cast<std::uint32_t>(maps.dim());
    const std::uint32_t count = static_cast<std::uint32_t>(maps.size());
    out.write(reinterpret_cast<const char*>(&dim), sizeof(dim));
    out.write(reinterpret_cast<const char*>(&count), sizeof(count));
    out.write(reinterpret_cast<const char*>(&maps.dt), sizeof(maps.dt));
    for (const auto& map : maps.maps) {
        for (Eigen::Index r = 0; r < map.rows(); ++r) {
            for (Eigen::Index c = 0; c < map.cols(); ++c) {
                const double value = map(r, c);
                out.write(reinterpret_cast<const char*>(&value), sizeof(value));
            }
        }
    }
    if (!out) throw std::runtime_error("save_maps: write failed for " + path);
}

DynamicalMapSeries load_maps(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_maps: cannot open " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMapsMagic, sizeof(kMapsMagic)) != 0) {
        throw std::runtime_error("load_maps: bad magic in " + path);
    }
    std::uint32_t dim = 0, count = 0;
    DynamicalMapSeries maps;
    in.read(reinterpret_cast<char*>(&dim), sizeof(dim));
    in.read(reinterpret_cast<char*>(&count), sizeof(count));
    in.read(reinterpret_cast<char*>(&maps.dt), sizeof(maps.dt));
    maps.maps.assign(count, Eigen::MatrixXd::Zero(dim, dim));
    for (auto& map : maps.maps) {
        for (std::uint32_t r = 0; r < dim; ++r) {
            for (std::uint32_t c = 0; c < dim; ++c) {
                double value = 0.0;
                in.read(reinterpret_cast<char*>(&value), sizeof(value));
                map(r, c) = value;
            }
        }
    }
    if (!in) throw std::runtime_error("load_maps: truncated file " + path);
    return maps;
}

// ------------------------- generalized cooling rate ---------------------------

std::vector<ThermoResponse> generalized_rate(const DynamicalMapSeries& maps, double nbar0,
                                             double nu) {
    if (!(nbar0 > 0.0)) {
        throw std::invalid_argument("generalized_rate: nbar0 must be positive (the capacitance "
                                    "degenerates at exactly zero temperature)");
    }
    if (!(nu > 0.0)) throw std::invalid_argument("generalized_rate: nu must be positive");
    const int dim = maps.dim();
    const Eigen::VectorXd p = fock::thermal_distribution(nbar0, dim);

    Eigen::VectorXd levels(dim);
    for (int n = 0; n < dim; ++n) levels(n) = double(n);
    const Eigen::VectorXd dp_dir = (levels.array() - nbar0).matrix().cwiseProduct(p);

    const double quantum = units::hbar * nu;                     // J per phonon
    const double beta = std::log1p(1.0 / nbar0) / quantum;       // 1/J
    const double c_prefactor = units::boltzmann * beta * beta * quantum * quantum;

    const int count = maps.size() + 1;
    std::vector<ThermoResponse> response(static_cast<std::size_t>(count));
    std::vector<double> covariance(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        const Eigen::MatrixXd map = maps.map(k);
        auto& row = response[std::size_t(k)];
        row.t = k * maps.dt;

        double var_jump = 0.0, var_abs = 0.0;
        for (int m = 0; m < dim; ++m) {
            for (int j = 0; j < dim; ++j) {
                const double w = map(j, m) * p(m);
                var_jump += double(j - m) * double(j - m) * w;
                var_abs += double(j) * double(j) * w;
            }
        }
        row.var_dh = quantum * quantum * var_jump;
        row.var_transfer = quantum * quantum * var_abs;

        // C(t) = d<H>(t)/dT via the analytic temperature derivative of the
        // initial thermal distribution: a two-time occupation covariance.
        covariance[std::size_t(k)] = levels.dot(map * dp_dir);
        row.capacitance = c_prefactor * covariance[std::size_t(k)];
    }

    // kappa(t) = -dC/dt by centered differences on the map grid.
    const double c_scale = std::abs(covariance[0]);
    for (int k = 0; k < count; ++k) {
        auto& row = response[std::size_t(k)];
        if (k == 0 || k == count - 1) {
            row.rate_valid = false;
            continue;
        }
        const double dc =
            (covariance[std::size_t(k + 1)] - covariance[std::size_t(k - 1)]) / (2.0 * maps.dt);
        row.conductance = -c_prefactor * dc;
        if (std::abs(covariance[std::size_t(k)]) < 1e-12 * c_scale) {
            row.rate_valid = false; // C(t) crossing zero: rate undefined here
            continue;
        }
        row.rate = row.conductance / row.capacitance;
    }
    return response;
}

// ------------------------- long-horizon asymptotics ---------------------------

AsymptoticModel asymptotic_model(const DynamicalMapSeries& maps) {
    if (maps.size() < 2) throw std::invalid_argument("asymptotic_model: need at least 2 maps");
    const int k = maps.size();
    AsymptoticModel m;
    m.dt = maps.dt;
    m.window_end = k * maps.dt;
    m.step = maps.map(k) * maps.map(k - 1).partialPivLu().inverse();

    Eigen::EigenSolver<Eigen::MatrixXd> solver(m.step);
    m.eigenvalues = solver.eigenvalues();
    m.eigenvectors = solver.eigenvectors();

    int stationary_index = 0;
    for (int i = 1; i < m.eigenvalues.size(); ++i) {
        if (std::abs(m.eigenvalues(i) - 1.0) < std::abs(m.eigenvalues(stationary_index) - 1.0)) {
            stationary_index = i;
        }
    }
    Eigen::VectorXd pss = m.eigenvectors.col(stationary_index).real();
    if (pss.sum() < 0.0) pss = -pss;
    m.stationary = pss / pss.sum();
    m.n_ss = fock::nbar_of(m.stationary);

    double best = 0.0;
    for (int i = 0; i < m.eigenvalues.size(); ++i) {
        if (i == stationary_index) continue;
        best = std::max(best, std::abs(m.eigenvalues(i)));
    }
    if (!(best > 0.0) || best >= 1.0) {
        throw PhysicsError("asymptotic_model: no decaying mode below the stationary one");
    }
    m.rate = -std::log(best) / maps.dt;
    return m;
}

std::vector<double> nbar_at(const AsymptoticModel& m, const DynamicalMapSeries& maps,
                            const Eigen::VectorXd& p0, const std::vector<double>& times) {
    const Eigen::VectorXd window_p = maps.map(maps.size()) * p0;
    const Eigen::VectorXcd coefficients =
        m.eigenvectors.partialPivLu().solve(window_p.cast<std::complex<double>>());

    std::vector<double> result;
    result.reserve(times.size());
    for (double t : times) {
        if (t < m.window_end) {
            throw std::invalid_argument("nbar_at: time precedes the training window");
        }
        const double steps = (t - m.window_end) / m.dt;
        Eigen::VectorXcd scaled = coefficients;
        for (int i = 0; i < scaled.size(); ++i) {
            scaled(i) *= std::pow(std::complex<double>(m.eigenvalues(i)), steps);
        }
        const Eigen::VectorXd p = (m.eigenvectors * scaled).real();
        result.push_back(fock::nbar_of(p));
    }
    return result;
}

} // namespace eitcool::ttm
