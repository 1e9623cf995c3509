// lindblad.cpp — Block-structured master-equation propagation and electronic
// steady states.

#include "eitcool/lindblad.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <random>
#include <fstream>
#include <limits>
#include <sstream>

#include "eitcool/fock.hpp"

namespace eitcool::lindblad {

namespace {

constexpr std::complex<double> I{0.0, 1.0};

// Dissipation channel |g><e| ⊗ B extracted from a dense collapse operator.
struct Channel {
    int excited;
    int ground;
    bool scalar;           // B = sqrt(rate) * identity
    double rate;           // |B|^2 when scalar
    Eigen::MatrixXcd b;    // N x N block
    Eigen::MatrixXcd bdag;
    Eigen::MatrixXcd g;    // B†B (Hermitian, acts on the excited block)
};

// Right-hand side of the master equation with the 8 x 8 block structure of the
// operators exploited; never forms the d^2 x d^2 superoperator.
class BlockLiouvillian {
public:
    BlockLiouvillian(const model::OperatorSet& ops, double background_heating)
        : fock_dim_(ops.fock_dim), heating_(background_heating) {
        const int dim = static_cast<int>(ops.hamiltonian.rows());
        if (fock_dim_ < 1 || dim % fock_dim_ != 0) {
            throw std::invalid_argument("BlockLiouvillian: inconsistent operator dimensions");
        }
        levels_ = dim / fock_dim_;

        diagonal_ = ops.hamiltonian.diagonal();
        for (int r = 0; r < levels_; ++r) {
            for (int c = 0; c < levels_; ++c) {
                Eigen::MatrixXcd block =
                    ops.hamiltonian.block(r * fock_dim_, c * fock_dim_, fock_dim_, fock_dim_);
                if (r == c) block.diagonal().setZero(); // diagonal handled separately
                if (block.cwiseAbs().maxCoeff() > 0.0) {
                    blocks_.push_back({r, c, block});
                }
            }
        }

        for (const auto& op : ops.collapse_ops) {
            Channel channel{-1, -1, false, 0.0, {}, {}, {}};
            for (int r = 0; r < levels_ && channel.excited < 0; ++r) {
                for (int c = 0; c < levels_; ++c) {
                    const auto block = op.block(r * fock_dim_, c * fock_dim_, fock_dim_, fock_dim_);
                    if (block.cwiseAbs().maxCoeff() > 0.0) {
                        channel.ground = r;
                        channel.excited = c;
                        channel.b = block;
                        break;
                    }
                }
            }
            if (channel.excited < 0) continue; // zero operator
            channel.bdag = channel.b.adjoint();
            channel.g = channel.bdag * channel.b;
            Eigen::MatrixXcd defect = channel.b;
            defect.diagonal().array() -= channel.b(0, 0);
            channel.scalar = defect.cwiseAbs().maxCoeff() <= 1e-14 * std::abs(channel.b(0, 0));
            channel.rate = std::norm(channel.b(0, 0));
            channels_.push_back(std::move(channel));
        }
    }

    int dim() const { return levels_ * fock_dim_; }

    // out = L(rho). Assumes rho Hermitian; the commutator is assembled as
    // -i (H rho - (H rho)†), which both halves the work and projects out
    // round-off non-Hermiticity.
    void apply(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out, Eigen::MatrixXcd& work) const {
        const int n = fock_dim_;
        work.noalias() = diagonal_.asDiagonal() * rho;
        for (const auto& [r, c, block] : blocks_) {
            work.middleRows(r * n, n).noalias() += block * rho.middleRows(c * n, n);
        }
        out = -I * (work - work.adjoint());

        for (const auto& channel : channels_) {
            const auto rho_ee = rho.block(channel.excited * n, channel.excited * n, n, n);
            auto refill = out.block(channel.ground * n, channel.ground * n, n, n);
            if (channel.scalar) {
                refill += channel.rate * rho_ee;
                out.middleRows(channel.excited * n, n) -= (0.5 * channel.rate) *
                    rho.middleRows(channel.excited * n, n);
                out.middleCols(channel.excited * n, n) -= (0.5 * channel.rate) *
                    rho.middleCols(channel.excited * n, n);
            } else {
                refill += channel.b * rho_ee * channel.bdag;
                out.middleRows(channel.excited * n, n).noalias() -=
                    0.5 * channel.g * rho.middleRows(channel.excited * n, n);
                out.middleCols(channel.excited * n, n).noalias() -=
                    0.5 * rho.middleCols(channel.excited * n, n) * channel.g;
            }
        }

        if (heating_ > 0.0) add_heating(rho, out);
    }

private:
    // h (b rho b† - 1/2{b†b, rho}) + h (b† rho b - 1/2{b b†, rho}) applied
    // blockwise through index shifts; equal up/down rates give a constant
    // occupation drift of h phonons/s.
    void add_heating(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out) const {
        const int n = fock_dim_;
        const double h = heating_;
        for (int r = 0; r < levels_; ++r) {
            for (int c = 0; c < levels_; ++c) {
                const auto x = rho.block(r * n, c * n, n, n);
                auto y = out.block(r * n, c * n, n, n);
                for (int m = 0; m < n; ++m) {
                    for (int k = 0; k < n; ++k) {
                        std::complex<double> gain{0.0, 0.0};
                        if (m + 1 < n && k + 1 < n) {
                            gain += std::sqrt(double((m + 1) * (k + 1))) * x(m + 1, k + 1);
                        }
                        if (m > 0 && k > 0) {
                            gain += std::sqrt(double(m * k)) * x(m - 1, k - 1);
                        }
                        const double nn = double(m + k);
                        const double up = (m + 1 < n ? m + 1 : 0) + (k + 1 < n ? k + 1 : 0);
                        y(m, k) += h * (gain - 0.5 * (nn + up) * x(m, k));
                    }
                }
            }
        }
    }

    int fock_dim_;
    int levels_;
    double heating_;
    Eigen::VectorXcd diagonal_;
    std::vector<std::tuple<int, int, Eigen::MatrixXcd>> blocks_;
    std::vector<Channel> channels_;
};

// Dormand-Prince 5(4) tableau.
constexpr double kA21 = 1.0 / 5.0;
constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0, kA53 = 64448.0 / 6561.0,
                 kA54 = -212.0 / 729.0;
constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0, kA63 = 46732.0 / 5247.0,
                 kA64 = 49.0 / 176.0, kA65 = -5103.0 / 18656.0;
constexpr double kB1 = 35.0 / 384.0, kB3 = 500.0 / 1113.0, kB4 = 125.0 / 192.0,
                 kB5 = -2187.0 / 6784.0, kB6 = 11.0 / 84.0;
constexpr double kE1 = 71.0 / 57600.0, kE3 = -71.0 / 16695.0, kE4 = 71.0 / 1920.0,
                 kE5 = -17253.0 / 339200.0, kE6 = 22.0 / 525.0, kE7 = -1.0 / 40.0;

struct Integrator {
    const BlockLiouvillian& rhs;
    double rtol;
    double atol;

    Eigen::MatrixXcd k1, k2, k3, k4, k5, k6, k7, ytmp, work, err;
    bool have_k1{false};

    explicit Integrator(const BlockLiouvillian& liouvillian, double tolerance)
        : rhs(liouvillian), rtol(tolerance), atol(1e-16) {
        const int d = rhs.dim();
        for (auto* m : {&k1, &k2, &k3, &k4, &k5, &k6, &k7, &ytmp, &work, &err}) {
            m->resize(d, d);
        }
    }

    double error_norm(const Eigen::MatrixXcd& y, const Eigen::MatrixXcd& ynew) const {
        double sum = 0.0;
        const auto* e = err.data();
        const auto* a = y.data();
        const auto* b = ynew.data();
        const Eigen::Index size = err.size();
        for (Eigen::Index i = 0; i < size; ++i) {
            const double sc = atol + rtol * std::max(std::abs(a[i]), std::abs(b[i]));
            const double q = std::abs(e[i]) / sc;
            sum += q * q;
        }
        return std::sqrt(sum / double(size));
    }

    // One accepted step from (t, y) with adaptive size; h carries the next
    // step suggestion. Returns the accepted step size.
    double step(double& t, Eigen::MatrixXcd& y, double& h, double t_end) {
        while (true) {
            if (t + h > t_end) h = t_end - t;
            if (!(h > 0.0) || h < 1e-15 * std::max(std::abs(t), std::abs(t_end))) {
                throw PhysicsError("propagate: step-size underflow");
            }
            if (!have_k1) {
                rhs.apply(y, k1, work);
                have_k1 = true;
            }
            ytmp = y + h * kA21 * k1;
            rhs.apply(ytmp, k2, work);
            ytmp = y + h * (kA31 * k1 + kA32 * k2);
            rhs.apply(ytmp, k3, work);
            ytmp = y + h * (kA41 * k1 + kA42 * k2 + kA43 * k3);
            rhs.apply(ytmp, k4, work);
            ytmp = y + h * (kA51 * k1 + kA52 * k2 + kA53 * k3 + kA54 * k4);
            rhs.apply(ytmp, k5, work);
            ytmp = y + h * (kA61 * k1 + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5);
            rhs.apply(ytmp, k6, work);
            ytmp = y + h * (kB1 * k1 + kB3 * k3 + kB4 * k4 + kB5 * k5 + kB6 * k6);
            rhs.apply(ytmp, k7, work); // FSAL
            err = h * (kE1 * k1 + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 + kE7 * k7);

            const double en = error_norm(y, ytmp);
            if (en <= 1.0) {
                const double accepted = h;
                t += h;
                y.swap(ytmp);
                k1.swap(k7);
                const double grow = en > 0.0 ? 0.9 * std::pow(en, -0.2) : 4.0;
                h *= std::min(4.0, std::max(0.25, grow));
                return accepted;
            }
            h *= std::max(0.1, 0.9 * std::pow(en, -0.2));
        }
    }
};

double initial_step(const BlockLiouvillian& rhs, const Eigen::MatrixXcd& y, double duration,
                    double tolerance) {
    Eigen::MatrixXcd f(y.rows(), y.cols()), work(y.rows(), y.cols());
    rhs.apply(y, f, work);
    const double rate = f.norm() / std::max(y.norm(), 1e-300);
    const double h = 0.1 * std::pow(tolerance, 0.2) / std::max(rate, 1.0 / duration);
    return std::min(h, duration);
}

} // namespace

// ------------------------------ states ---------------------------------------

void QuantumState::validate(double hermiticity_tol, double trace_tol,
                            double positivity_tol) const {
    const double scale = std::max(rho.norm(), 1e-300);
    if ((rho - rho.adjoint()).norm() > hermiticity_tol * scale) {
        throw PhysicsError("QuantumState: density matrix is not Hermitian");
    }
    if (std::abs(rho.trace().real() - 1.0) > trace_tol || std::abs(rho.trace().imag()) > trace_tol) {
        throw PhysicsError("QuantumState: density matrix trace is not 1");
    }
    Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(0.5 * (rho + rho.adjoint()));
    if (solver.eigenvalues().minCoeff() < -positivity_tol) {
        std::ostringstream msg;
        msg << "QuantumState: negative eigenvalue " << solver.eigenvalues().minCoeff();
        throw PhysicsError(msg.str());
    }
}

QuantumState product_state(int level, const VectorXd& fock_pops, int fock_dim, int n_levels) {
    if (level < 0 || level >= n_levels) {
        throw std::invalid_argument("product_state: level index out of range");
    }
    if (fock_pops.size() != fock_dim) {
        throw std::invalid_argument("product_state: population vector size mismatch");
    }
    QuantumState state;
    state.fock_dim = fock_dim;
    state.rho = MatrixXcd::Zero(n_levels * fock_dim, n_levels * fock_dim);
    for (int n = 0; n < fock_dim; ++n) {
        state.rho(level * fock_dim + n, level * fock_dim + n) = fock_pops(n);
    }
    return state;
}

// ------------------------------ observables ----------------------------------

double nbar_of(const MatrixXcd& rho, int fock_dim) {
    const int levels = static_cast<int>(rho.rows()) / fock_dim;
    double total = 0.0;
    for (int level = 0; level < levels; ++level) {
        for (int n = 0; n < fock_dim; ++n) {
            total += n * std::real(rho(level * fock_dim + n, level * fock_dim + n));
        }
    }
    return total;
}

double excited_population(const MatrixXcd& rho, int fock_dim) {
    double total = 0.0;
    for (int level : {model::PMinus, model::PPlus}) {
        for (int n = 0; n < fock_dim; ++n) {
            total += std::real(rho(level * fock_dim + n, level * fock_dim + n));
        }
    }
    return total;
}

VectorXd fock_populations(const MatrixXcd& rho, int fock_dim) {
    const int levels = static_cast<int>(rho.rows()) / fock_dim;
    VectorXd populations = VectorXd::Zero(fock_dim);
    for (int level = 0; level < levels; ++level) {
        for (int n = 0; n < fock_dim; ++n) {
            populations(n) += std::real(rho(level * fock_dim + n, level * fock_dim + n));
        }
    }
    return populations;
}

// ------------------------------ propagation ----------------------------------

MatrixXcd apply_liouvillian(const model::OperatorSet& ops, const MatrixXcd& rho,
                            double background_heating) {
    BlockLiouvillian liouvillian(ops, background_heating);
    MatrixXcd out(rho.rows(), rho.cols()), work(rho.rows(), rho.cols());
    liouvillian.apply(rho, out, work);
    return out;
}

Trajectory propagate(QuantumState& state, const model::OperatorSet& ops, double duration,
                     const PropagateOptions& options) {
    if (!(duration > 0.0)) throw std::invalid_argument("propagate: duration must be positive");
    if (state.rho.rows() != ops.hamiltonian.rows()) {
        throw std::invalid_argument("propagate: state/operator dimension mismatch");
    }
    state.validate(1e-8, 1e-6, options.positivity_tolerance);

    BlockLiouvillian liouvillian(ops, options.background_heating);
    Integrator integrator(liouvillian, options.tolerance);

    Trajectory trajectory;
    const int n_samples = std::max(options.n_samples, 2);
    const double t0 = state.time;

    auto record = [&](double t) {
        trajectory.times.push_back(t);
        trajectory.nbar.push_back(nbar_of(state.rho, state.fock_dim));
        trajectory.p_excited.push_back(excited_population(state.rho, state.fock_dim));
        VectorXd pops = fock_populations(state.rho, state.fock_dim);
        if (pops(state.fock_dim - 1) > options.truncation_threshold) {
            trajectory.truncation_warning = true;
        }
        trajectory.fock_populations.push_back(std::move(pops));
        if (options.check_positivity) {
            Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(state.rho);
            const double min_eig = solver.eigenvalues().minCoeff();
            if (min_eig < -options.positivity_tolerance) {
                std::ostringstream msg;
                msg << "propagate: positivity violation at t = " << t << " s (min eigenvalue "
                    << min_eig << ", trace " << state.rho.trace().real() << ")";
                throw PhysicsError(msg.str());
            }
        }
    };

    record(t0);
    double t = t0;
    double h = initial_step(liouvillian, state.rho, duration, options.tolerance);
    for (int sample = 1; sample <= n_samples; ++sample) {
        const double t_target = t0 + duration * sample / n_samples;
        while (t < t_target - 1e-12 * duration) {
            integrator.step(t, state.rho, h, t_target);
        }
        state.time = t;
        record(t);
    }
    return trajectory;
}

Trajectory cooling_trajectory(const model::CoolingScheme& scheme, double nbar0, double duration,
                              int fock_dim, const PropagateOptions& options, int initial_level) {
    const bool reduced = model::d_manifold_idle(scheme) && initial_level < 4;
    const model::OperatorSet ops = reduced ? model::build_reduced_operator_set(scheme, fock_dim)
                                           : model::build_operator_set(scheme, fock_dim);
    QuantumState state = product_state(initial_level, fock::thermal_distribution(nbar0, fock_dim),
                                       fock_dim, ops.n_active_levels);
    return propagate(state, ops, duration, options);
}

// -------------------------- electronic steady state ---------------------------

MatrixXcd liouvillian_matrix(const model::ElectronicSystem& system) {
    const int dim = system.dim();
    const MatrixXcd identity = MatrixXcd::Identity(dim, dim);
    const MatrixXcd& h = system.hamiltonian;

    MatrixXcd liouvillian =
        -I * (Eigen::kroneckerProduct(identity, h) - Eigen::kroneckerProduct(h.transpose(), identity));
    for (const auto& c : system.collapse_ops) {
        const MatrixXcd cdc = c.adjoint() * c;
        liouvillian += Eigen::kroneckerProduct(c.conjugate(), c);
        liouvillian -= 0.5 * Eigen::kroneckerProduct(identity, cdc);
        liouvillian -= 0.5 * Eigen::kroneckerProduct(cdc.transpose(), identity);
    }
    return liouvillian;
}

MatrixXcd steady_state_electronic(const model::ElectronicSystem& system, double* residual) {
    const int dim = system.dim();
    const MatrixXcd liouvillian = liouvillian_matrix(system);
    const double scale = liouvillian.cwiseAbs().maxCoeff();
    if (scale <= 0.0) throw PhysicsError("steady_state_electronic: zero generator");

    // Shifted-inverse iteration: the tiny shift regularizes the exactly
    // singular generator while leaving the null direction dominant.
    MatrixXcd shifted = liouvillian;
    shifted.diagonal().array() -= scale * 1e-12;
    Eigen::PartialPivLU<MatrixXcd> lu(shifted);

    auto iterate = [&](Eigen::VectorXcd v, const Eigen::VectorXcd* deflate) {
        for (int iteration = 0; iteration < 6; ++iteration) {
            v = lu.solve(v);
            if (deflate) v -= deflate->dot(v) * (*deflate);
            v /= v.norm();
        }
        return v;
    };

    Eigen::VectorXcd seed = Eigen::VectorXcd::Ones(dim * dim);
    seed /= seed.norm();
    Eigen::VectorXcd null_vec = iterate(seed, nullptr);
    const double res = (liouvillian * null_vec).norm() / scale;
    if (res > 1e-10) {
        std::ostringstream msg;
        msg << "steady_state_electronic: null-space iteration residual " << res;
        throw PhysicsError(msg.str());
    }

    // Probe for a second stationary direction.
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    Eigen::VectorXcd probe(dim * dim);
    for (int k = 0; k < dim * dim; ++k) probe(k) = {uniform(rng), uniform(rng)};
    probe -= null_vec.dot(probe) * null_vec;
    probe /= probe.norm();
    Eigen::VectorXcd second = iterate(probe, &null_vec);
    if ((liouvillian * second).norm() / scale < 1e-10) {
        throw PhysicsError("steady_state_electronic: degenerate null space (more than one "
                           "stationary state)");
    }

    MatrixXcd rho = Eigen::Map<MatrixXcd>(null_vec.data(), dim, dim);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    const double trace = rho.trace().real();
    if (std::abs(trace) < 1e-12) {
        throw PhysicsError("steady_state_electronic: traceless null vector");
    }
    rho /= trace;
    if (residual) {
        Eigen::Map<const Eigen::VectorXcd> flat(rho.data(), dim * dim);
        *residual = (liouvillian * flat).norm() / (scale * rho.norm());
    }
    return rho;
}

// ------------------------------- scans ---------------------------------------

double scattering_rate(const model::CoolingScheme& scheme) {
    const MatrixXcd rho = steady_state_electronic(model::electronic_system(scheme));
    const double p_excited =
        std::real(rho(model::PMinus, model::PMinus)) + std::real(rho(model::PPlus, model::PPlus));
    return scheme.gamma_total * p_excited;
}

namespace {

model::CoolingScheme with_probe_offset(const model::CoolingScheme& scheme, double offset) {
    model::CoolingScheme shifted = scheme;
    for (auto& laser : shifted.lasers) {
        if (laser.label == model::LaserLabel::pi397) laser.detuning += offset;
    }
    return shifted;
}

} // namespace

std::vector<ScanPoint> spectrum_scan(const model::CoolingScheme& scheme,
                                     const std::vector<double>& probe_offsets) {
    if (probe_offsets.empty()) throw std::invalid_argument("spectrum_scan: empty grid");
    std::vector<ScanPoint> points;
    points.reserve(probe_offsets.size());
    for (double offset : probe_offsets) {
        ScanPoint point{offset, 0.0, true};
        try {
            point.rate = scattering_rate(with_probe_offset(scheme, offset));
        } catch (const PhysicsError&) {
            point.converged = false;
            point.rate = std::numeric_limits<double>::quiet_NaN();
        }
        points.push_back(point);
    }
    return points;
}

double refine_extremum(const model::CoolingScheme& scheme, double lo, double hi, bool maximize,
                       double* rate_out) {
    const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
    auto value = [&](double offset) {
        const double rate = scattering_rate(with_probe_offset(scheme, offset));
        return maximize ? -rate : rate;
    };
    double a = lo, b = hi;
    double x1 = b - golden * (b - a), x2 = a + golden * (b - a);
    double f1 = value(x1), f2 = value(x2);
    const double tol = 1e-10 * std::max({std::abs(lo), std::abs(hi), 1.0});
    while (b - a > tol) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - golden * (b - a);
            f1 = value(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + golden * (b - a);
            f2 = value(x2);
        }
    }
    const double best = 0.5 * (a + b);
    if (rate_out) *rate_out = scattering_rate(with_probe_offset(scheme, best));
    return best;
}

// ----------------------------- checkpointing ---------------------------------

namespace {
constexpr char kMagic[8] = {'E', 'I', 'T', 'R', 'H', 'O', '0', '1'};
const char* kBasisOrdering = "S-,S+,P-,P+,D-3,D-,D+,D+3 x fock(0..N-1)";
} // namespace

void save_state(const std::string& path, const QuantumState& state) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_state: cannot open " + path);
    out.write(kMagic, sizeof(kMagic));
    const std::uint32_t levels =
        static_cast<std::uint32_t>(state.rho.rows() / std::max(state.fock_dim, 1));
    const std::uint32_t fock = static_cast<std::uint32_t>(state.fock_dim);
    const std::uint32_t basis_len = static_cast<std::uint32_t>(std::string(kBasisOrdering).size());
    out.write(reinterpret_cast<const char*>(&levels), sizeof(levels));
    out.write(reinterpret_cast<const char*>(&fock), sizeof(fock));
    out.write(reinterpret_cast<const char*>(&state.time), sizeof(state.time));
    out.write(reinterpret_cast<const char*>(&basis_len), sizeof(basis_len));
    out.write(kBasisOrdering, basis_len);
    const Eigen::Index dim = state.rho.rows();
    for (Eigen::Index r = 0; r < dim; ++r) {
        for (Eigen::Index c = 0; c < dim; ++c) {
            const double re = state.rho(r, c).real();
            const double im = state.rho(r, c).imag();
            out.write(reinterpret_cast<const char*>(&re), sizeof(re));
            out.write(reinterpret_cast<const char*>(&im), sizeof(im));
        }
    }
    if (!out) throw std::runtime_error("save_state: write failed for " + path);
}

QuantumState load_state(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_state: cannot open " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw std::runtime_error("load_state: bad magic in " + path);
    }
    std::uint32_t levels = 0, fock = 0, basis_len = 0;
    double time = 0.0;
    in.read(reinterpret_cast<char*>(&levels), sizeof(levels));
    in.read(reinterpret_cast<char*>(&fock), sizeof(fock));
    in.read(reinterpret_cast<char*>(&time), sizeof(time));
    in.read(reinterpret_cast<char*>(&basis_len), sizeof(basis_len));
    std::string basis(basis_len, '\0');
    in.read(basis.data(), basis_len);
    if ((levels != model::n_levels && levels != 4) || basis != kBasisOrdering) {
        throw std::runtime_error("load_state: incompatible basis ordering in " + path);
    }
    QuantumState state;
    state.time = time;
    state.fock_dim = static_cast<int>(fock);
    const Eigen::Index dim = Eigen::Index(levels) * fock;
    state.rho.resize(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
        for (Eigen::Index c = 0; c < dim; ++c) {
            double re = 0.0, im = 0.0;
            in.read(reinterpret_cast<char*>(&re), sizeof(re));
            in.read(reinterpret_cast<char*>(&im), sizeof(im));
            state.rho(r, c) = {re, im};
        }
    }
    if (!in) throw std::runtime_error("load_state: truncated file " + path);
    return state;
}

} // namespace eitcool::lindblad
