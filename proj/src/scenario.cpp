// scenario.cpp — Scenario parsing, tuning, pulse sequences and experiment
// runners.

#include "eitcool/scenario.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "eitcool/csv.hpp"
#include "eitcool/fock.hpp"
#include "eitcool/lindblad.hpp"
#include "eitcool/thermometry.hpp"
#include "eitcool/ttm.hpp"
#include "eitcool/units.hpp"

namespace eitcool::cli {

namespace {

// Dispatch n independent grid points over a small worker pool; results land
// in pre-sized slots so output order (and bytes) stay deterministic.
template <class Fn>
void parallel_for(int n, int workers, Fn&& fn) {
    workers = std::max(1, std::min(workers, n));
    if (workers == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(std::size_t(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& thread : pool) thread.join();
}

std::vector<double> linspace(double lo, double hi, int points) {
    if (points < 2) throw std::invalid_argument("linspace: need at least 2 points");
    std::vector<double> grid(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) grid[std::size_t(i)] = lo + (hi - lo) * i / (points - 1);
    return grid;
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

void write_gnuplot_stub(const std::string& csv_path, const std::string& ylabel) {
    const std::string stub = csv_path + ".gp";
    std::ofstream out(stub);
    out << "set datafile separator ','\n"
        << "set key autotitle columnhead\n"
        << "set ylabel '" << ylabel << "'\n"
        << "plot '" << std::filesystem::path(csv_path).filename().string()
        << "' using 1:2 with lines\n";
}

} // namespace

int worker_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("EITCOOL_WORKERS")) {
        const int value = std::atoi(env);
        if (value > 0) return value;
    }
    return 1;
}

Experiment experiment_from_string(const std::string& name) {
    if (name == "spectrum_scan") return Experiment::spectrum_scan;
    if (name == "cooling_trajectory") return Experiment::cooling_trajectory;
    if (name == "rabi_map") return Experiment::rabi_map;
    if (name == "detuning_sweep") return Experiment::detuning_sweep;
    if (name == "ttm_rate") return Experiment::ttm_rate;
    if (name == "thermometry_replay") return Experiment::thermometry_replay;
    if (name == "pulse_sequence") return Experiment::pulse_sequence;
    throw ConfigError("unknown experiment '" + name + "'", 0, "experiment");
}

const char* experiment_name(Experiment experiment) {
    switch (experiment) {
        case Experiment::spectrum_scan: return "spectrum_scan";
        case Experiment::cooling_trajectory: return "cooling_trajectory";
        case Experiment::rabi_map: return "rabi_map";
        case Experiment::detuning_sweep: return "detuning_sweep";
        case Experiment::ttm_rate: return "ttm_rate";
        case Experiment::thermometry_replay: return "thermometry_replay";
        case Experiment::pulse_sequence: return "pulse_sequence";
    }
    return "unknown";
}

// ------------------------------ scheme parsing --------------------------------

namespace {

model::ModeLabel mode_from_string(const std::string& name) {
    if (name == "axial") return model::ModeLabel::axial;
    if (name == "radial1") return model::ModeLabel::radial1;
    if (name == "radial2") return model::ModeLabel::radial2;
    throw ConfigError("unknown trap mode '" + name + "'", 0, "trap.mode");
}

} // namespace

Scenario parse_scenario(const config::Config& file) {
    Scenario scenario;
    scenario.file = file;
    scenario.experiment = experiment_from_string(file.get_string("", "experiment"));
    scenario.output_prefix = file.get_string("", "output_prefix", "run");
    scenario.seed = file.get_integer("", "seed", 0);

    const double gamma_total =
        file.get_angular_frequency("scheme", "gamma_total", 0.0, units::mhz(20.7));

    scenario.nu_axial = file.get_angular_frequency("trap", "nu_axial", gamma_total);
    scenario.nu_radial = file.get_angular_frequency("trap", "nu_radial", gamma_total);
    scenario.heating_axial = file.get_number("trap", "heating_axial", 0.0);
    scenario.heating_radial = file.get_number("trap", "heating_radial", 0.0);
    scenario.doppler_nbar_axial = file.get_number("trap", "doppler_nbar_axial", 11.1);
    scenario.doppler_nbar_radial = file.get_number("trap", "doppler_nbar_radial", 3.6);

    model::SchemeParams params;
    params.gamma_total = gamma_total;
    params.delta = file.get_angular_frequency("scheme", "delta", gamma_total);
    params.field = file.has("scheme", "field") ? file.get_field("scheme", "field") : 416e-6;
    params.branch_s = file.get_number("scheme", "branch_s", 0.935);
    params.branch_d = file.get_number("scheme", "branch_d", 0.065);
    params.eta_pi_axial = file.get_number("scheme", "eta_pi_axial", 0.0);
    params.eta_sigma_radial = file.get_number("scheme", "eta_sigma_radial", 0.0);
    params.eta_d_axial = file.get_number("scheme", "eta_d_axial", 0.0);

    const std::string mode_name = file.get_string("trap", "mode", "axial");
    params.mode.label = mode_from_string(mode_name);
    params.mode.frequency =
        params.mode.label == model::ModeLabel::axial ? scenario.nu_axial : scenario.nu_radial;
    params.mode.background_heating = params.mode.label == model::ModeLabel::axial
                                         ? scenario.heating_axial
                                         : scenario.heating_radial;

    scenario.scheme_type = file.get_string("scheme", "type", "deit");
    if (scenario.scheme_type != "deit" && scenario.scheme_type != "single_eit") {
        throw ConfigError("scheme type must be 'deit' or 'single_eit'", 0, "scheme.type");
    }

    params.omega_pi = file.get_angular_frequency("scheme", "omega_pi", gamma_total);
    const std::string sigma_text = file.get_string("scheme", "omega_sigma", "auto");
    const std::string d_text = file.get_string("scheme", "omega_d",
                                               scenario.scheme_type == "deit" ? "auto" : "0 MHz");
    if (sigma_text != "auto") {
        params.omega_sigma = file.get_angular_frequency("scheme", "omega_sigma", gamma_total);
    } else {
        const double target =
            scenario.scheme_type == "deit" ? scenario.nu_radial : params.mode.frequency;
        params.omega_sigma = lambdicke::bright_state_tuning(params.delta, target);
    }
    if (d_text != "auto") {
        params.omega_d = file.get_angular_frequency("scheme", "omega_d", gamma_total, 0.0);
    } else {
        params.omega_d = params.omega_sigma; // refined by tune_scheme below
    }

    scenario.scheme = model::make_scheme(params);

    if (scenario.scheme_type == "deit" && d_text == "auto") {
        scenario.scheme = tune_scheme(scenario.nu_radial, scenario.nu_axial, params.delta,
                                      scenario.scheme);
    }
    if (scenario.scheme_type == "single_eit") {
        // Detune the repump off every two-photon condition so no spurious
        // dark state involving the D manifold forms.
        const double offset =
            file.get_angular_frequency("scheme", "repump_offset", gamma_total, units::mhz(10.0));
        for (auto& laser : scenario.scheme.lasers) {
            if (laser.label == model::LaserLabel::d866) {
                laser.detuning = scenario.scheme.require(model::LaserLabel::pi397).detuning + offset;
            }
        }
    }
    scenario.scheme.validate();
    return scenario;
}

Scenario load_scenario(const std::string& path) {
    return parse_scenario(config::Config::parse_file(path));
}

namespace {

// Bisection on a function that grows monotonically with the squared Rabi
// frequency; returns the zero, or throws with a short scan of the function.
double dispersive_root(const std::function<double(double)>& f, double seed, const char* what) {
    double lo = 0.0, hi = seed;
    int expansions = 0;
    while (f(hi) < 0.0 && expansions++ < 60) hi *= 1.4;
    if (f(lo + 1e-9 * seed) > 0.0 || f(hi) < 0.0) {
        std::ostringstream msg;
        msg << "tune_scheme: no dispersive zero bracketed for the " << what << "; scan:";
        for (double w = 0.1 * hi; w <= hi; w += 0.15 * hi) msg << " (" << w << ", " << f(w) << ")";
        throw PhysicsError(msg.str());
    }
    for (int iteration = 0; iteration < 200; ++iteration) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

model::CoolingScheme tune_scheme(double nu_radial, double nu_axial, double delta,
                                 model::CoolingScheme base) {
    if (delta <= 0.0) throw std::invalid_argument("tune_scheme: delta must be positive");
    lambdicke::DeitParams params = lambdicke::DeitParams::from_scheme(base);
    params.delta = delta;

    // Dispersive zeros of the two sector denominators at the target
    // sidebands: Re b(-nu_radial) = 0 places the radial (P+) bright state,
    // Re a(-nu_axial) = 0 the axial (P-) one. Both are monotone in the
    // respective squared pump Rabi frequency; the closed-form Stark-shift
    // tuning seeds the iteration and the pumps are relaxed alternately since
    // each also dresses the other sector.
    const double sigma_seed = lambdicke::bright_state_tuning(delta, nu_radial);
    params.omega_sigma = sigma_seed;

    if (base.rabi(model::LaserLabel::d866) == 0.0) {
        // Single-EIT degenerate case: only the sigma pump to place.
        params.omega_sigma = dispersive_root(
            [&](double omega) {
                lambdicke::DeitParams trial = params;
                trial.omega_sigma = omega;
                return std::real(lambdicke::deit_ab(-nu_radial, trial).second);
            },
            sigma_seed, "radial bright state");
    } else {
        for (int sweep = 0; sweep < 6; ++sweep) {
            params.omega_d = dispersive_root(
                [&](double omega) {
                    lambdicke::DeitParams trial = params;
                    trial.omega_d = omega;
                    return std::real(lambdicke::deit_ab(-nu_axial, trial).first);
                },
                lambdicke::bright_state_tuning(delta, nu_axial), "axial bright state");
            params.omega_sigma = dispersive_root(
                [&](double omega) {
                    lambdicke::DeitParams trial = params;
                    trial.omega_sigma = omega;
                    return std::real(lambdicke::deit_ab(-nu_radial, trial).second);
                },
                sigma_seed, "radial bright state");
        }
    }

    for (auto& laser : base.lasers) {
        if (laser.label == model::LaserLabel::sigma397) laser.rabi_frequency = params.omega_sigma;
        if (laser.label == model::LaserLabel::d866) laser.rabi_frequency = params.omega_d;
    }
    base.validate();
    return base;
}

lambdicke::RateModel rates_for_mode(const model::CoolingScheme& scheme,
                                    const model::TrapMode& mode) {
    model::CoolingScheme projected = scheme;
    projected.mode = mode;
    lambdicke::RegressionSpectrum spectrum(model::electronic_system(projected));
    const double diffusion =
        lambdicke::diffusion_from_steady_state(projected, spectrum.steady_state(), 0.0);
    return lambdicke::heating_cooling_rates([&](double w) { return spectrum(w); }, diffusion,
                                            mode.frequency);
}

// ----------------------------- pulse sequences --------------------------------

std::vector<ModeTrajectory> run_sequence(const std::vector<PulseSegment>& segments,
                                         const std::vector<model::TrapMode>& modes,
                                         const std::vector<double>& nbar0, int n_max,
                                         int samples_per_segment) {
    if (modes.size() != nbar0.size()) {
        throw std::invalid_argument("run_sequence: one initial nbar per mode required");
    }
    std::vector<ModeTrajectory> trajectories;
    for (std::size_t m = 0; m < modes.size(); ++m) {
        ModeTrajectory trajectory;
        trajectory.mode = modes[m];
        Eigen::VectorXd p = fock::thermal_distribution(nbar0[m], n_max + 1);
        double t = 0.0;
        trajectory.times.push_back(t);
        trajectory.nbar.push_back(fock::nbar_of(p));
        for (const auto& segment : segments) {
            if (segment.duration < 0.0) {
                throw std::invalid_argument("run_sequence: negative segment duration");
            }
            const auto rates = rates_for_mode(segment.scheme, modes[m]);
            trajectory.segment_n_ss.push_back(rates.a_minus > rates.a_plus
                                                  ? rates.n_ss()
                                                  : std::numeric_limits<double>::infinity());
            if (segment.duration == 0.0) continue;
            const auto matrix = lambdicke::rate_matrix(rates.a_plus, rates.a_minus, n_max);
            const Eigen::MatrixXd step =
                (matrix.entries * (segment.duration / samples_per_segment)).exp();
            for (int k = 0; k < samples_per_segment; ++k) {
                p = step * p;
                t += segment.duration / samples_per_segment;
                trajectory.times.push_back(t);
                trajectory.nbar.push_back(fock::nbar_of(p));
            }
        }
        trajectories.push_back(std::move(trajectory));
    }
    return trajectories;
}

// ------------------------------- experiments ----------------------------------

namespace {

struct Context {
    const Scenario& scenario;
    const RunOptions& options;
    RunSummary& summary;
    int fock_dim;
    double tolerance;
    int workers;

    std::string path(const std::string& suffix) const {
        return join_path(options.out_dir, scenario.output_prefix + suffix);
    }
    void emit(const std::string& file, const std::string& ylabel) const {
        summary.output_files.push_back(file);
        if (options.gnuplot_stub) write_gnuplot_stub(file, ylabel);
    }
};

void run_spectrum_scan(Context& ctx) {
    const auto& file = ctx.scenario.file;
    const double gamma_total = ctx.scenario.scheme.gamma_total;
    const double lo =
        file.get_angular_frequency("spectrum_scan", "offset_min", gamma_total, -units::mhz(2.0));
    const double hi =
        file.get_angular_frequency("spectrum_scan", "offset_max", gamma_total, units::mhz(3.5));
    const int points = static_cast<int>(file.get_integer("spectrum_scan", "points", 600));
    const auto offsets = linspace(lo, hi, points);

    std::vector<lindblad::ScanPoint> results(offsets.size());
    std::atomic<int> failures{0};
    parallel_for(points, ctx.workers, [&](int i) {
        model::CoolingScheme shifted = ctx.scenario.scheme;
        for (auto& laser : shifted.lasers) {
            if (laser.label == model::LaserLabel::pi397) laser.detuning += offsets[std::size_t(i)];
        }
        lindblad::ScanPoint point{offsets[std::size_t(i)], 0.0, true};
        try {
            point.rate = lindblad::scattering_rate(shifted);
        } catch (const PhysicsError&) {
            point.converged = false;
            point.rate = std::numeric_limits<double>::quiet_NaN();
            failures.fetch_add(1);
        }
        results[std::size_t(i)] = point;
    });

    const std::string path = ctx.path("_scan.csv");
    csv::Writer writer(path, {"delta_rad_s", "scatter_rate"});
    for (const auto& point : results) writer.row({point.offset, point.rate});
    ctx.emit(path, "scatter rate (1/s)");
    if (failures > 0) {
        ctx.summary.notes.push_back(std::to_string(failures.load()) +
                                    " scan points did not converge (emitted as nan)");
    }

    // Companion spectral response over the same window: the analytic
    // absorption spectrum with its denominator functions.
    if (ctx.scenario.scheme_type == "deit") {
        const auto params = lambdicke::DeitParams::from_scheme(ctx.scenario.scheme);
        const auto etas = lambdicke::LambDickeEtas::from_scheme(ctx.scenario.scheme);
        const std::string spectrum_path = ctx.path("_spectrum.csv");
        csv::Writer spectrum_writer(
            spectrum_path, {"omega_rad_s", "re_s", "im_s", "re_a", "im_a", "re_b", "im_b"});
        for (double omega : offsets) {
            try {
                const auto row = lambdicke::evaluate_deit(omega, params, etas);
                spectrum_writer.row({omega, row.s_value.real(), row.s_value.imag(),
                                     row.a_value.real(), row.a_value.imag(), row.b_value.real(),
                                     row.b_value.imag()});
            } catch (const PoleError&) {
                // inside a pole guard band: skip the point
            }
        }
        ctx.emit(spectrum_path, "Re S(omega)");
    }
}

void run_cooling_trajectory(Context& ctx) {
    const auto& file = ctx.scenario.file;
    const auto& scheme = ctx.scenario.scheme;
    const bool axial = scheme.mode.label == model::ModeLabel::axial;
    const double nbar_default =
        axial ? ctx.scenario.doppler_nbar_axial : ctx.scenario.doppler_nbar_radial;
    const double nbar0 = file.get_number("cooling_trajectory", "nbar0", nbar_default);
    const double duration = file.get_time("cooling_trajectory", "duration", 5e-4);
    const int samples = static_cast<int>(file.get_integer("cooling_trajectory", "samples", 120));
    const std::string engine =
        file.get_string("cooling_trajectory", "engine", "master_equation");

    int initial_level = model::SPlus;
    if (file.has("cooling_trajectory", "initial_level")) {
        const std::string name = file.get_string("cooling_trajectory", "initial_level");
        initial_level = -1;
        for (int level = 0; level < model::n_levels; ++level) {
            if (name == model::level_name(level)) initial_level = level;
        }
        if (initial_level < 0) {
            throw ConfigError("unknown initial_level '" + name + "'", 0,
                              "cooling_trajectory.initial_level");
        }
    }

    std::vector<double> times, nbars, p_excited;
    std::vector<Eigen::VectorXd> fock;
    if (engine == "master_equation") {
        lindblad::PropagateOptions options;
        options.tolerance = ctx.tolerance;
        options.n_samples = samples;
        if (file.get_string("cooling_trajectory", "background_heating", "off") == "on") {
            options.background_heating = scheme.mode.background_heating;
        }
        const auto trajectory = lindblad::cooling_trajectory(scheme, nbar0, duration,
                                                             ctx.fock_dim, options, initial_level);
        times = trajectory.times;
        nbars = trajectory.nbar;
        p_excited = trajectory.p_excited;
        fock = trajectory.fock_populations;
        if (trajectory.truncation_warning) {
            ctx.summary.notes.push_back(
                "truncation warning: top Fock state exceeded 1e-3 population; axial rates "
                "are overestimated under truncation");
        }
    } else if (engine == "rate_equation") {
        const auto rates = rates_for_mode(scheme, scheme.mode);
        const int n_max = std::max(ctx.fock_dim - 1, 59);
        const auto matrix = lambdicke::rate_matrix(rates.a_plus, rates.a_minus, n_max);
        Eigen::VectorXd p = fock::thermal_distribution(nbar0, n_max + 1);
        const Eigen::MatrixXd step = (matrix.entries * (duration / samples)).exp();
        for (int k = 0; k <= samples; ++k) {
            times.push_back(duration * k / samples);
            nbars.push_back(fock::nbar_of(p));
            p_excited.push_back(0.0);
            fock.push_back(p);
            p = step * p;
        }
        ctx.summary.notes.push_back("rate-equation engine: p_excited column is zero");
    } else {
        throw ConfigError("cooling_trajectory.engine must be master_equation or rate_equation", 0,
                          "cooling_trajectory.engine");
    }

    const std::string trajectory_path = ctx.path("_trajectory.csv");
    {
        csv::Writer writer(trajectory_path, {"t_s", "nbar", "p_excited"});
        for (std::size_t k = 0; k < times.size(); ++k) {
            writer.row({times[k], nbars[k], p_excited[k]});
        }
    }
    ctx.emit(trajectory_path, "nbar");

    const std::string fock_path = ctx.path("_fock.csv");
    {
        std::vector<std::string> columns{"t_s"};
        for (int n = 0; n < fock.front().size(); ++n) columns.push_back("p" + std::to_string(n));
        csv::Writer writer(fock_path, columns);
        for (std::size_t k = 0; k < times.size(); ++k) {
            std::vector<double> row{times[k]};
            for (int n = 0; n < fock[k].size(); ++n) row.push_back(fock[k](n));
            writer.row(row);
        }
    }
    ctx.emit(fock_path, "Fock populations");

    const auto fit = thermometry::fit_cooling_curve(times, nbars);
    ctx.summary.metrics["fit_rate"] = fit.rate;
    ctx.summary.metrics["fit_amplitude"] = fit.amplitude;
    ctx.summary.metrics["fit_n_infinity"] = fit.n_infinity;
    ctx.summary.metrics["t_cut"] = fit.t_cut;
    if (fit.n_ss_valid) ctx.summary.metrics["n_ss"] = fit.n_ss;
    try {
        ctx.summary.metrics["rate_at_nbar_one"] =
            thermometry::rate_at_nbar_one(times, nbars, fit.n_ss_valid ? fit.n_ss : fit.n_infinity);
    } catch (const PhysicsError&) {
        ctx.summary.notes.push_back("trajectory does not cross nbar = 1; no rate at nbar = 1");
    }
}

void run_rabi_map(Context& ctx) {
    const auto& file = ctx.scenario.file;
    const auto& scheme = ctx.scenario.scheme;
    const double gamma_total = scheme.gamma_total;
    const double pump_min =
        file.get_angular_frequency("rabi_map", "pump_min", gamma_total, units::mhz(5.0));
    const double pump_max =
        file.get_angular_frequency("rabi_map", "pump_max", gamma_total, units::mhz(25.0));
    const double probe_min =
        file.get_angular_frequency("rabi_map", "probe_min", gamma_total, units::mhz(0.5));
    const double probe_max =
        file.get_angular_frequency("rabi_map", "probe_max", gamma_total, units::mhz(6.0));
    const int pump_points = static_cast<int>(file.get_integer("rabi_map", "pump_points", 12));
    const int probe_points = static_cast<int>(file.get_integer("rabi_map", "probe_points", 12));
    const double cooling_time = file.get_time("rabi_map", "cooling_time", 3e-4);
    const bool axial = scheme.mode.label == model::ModeLabel::axial;
    const double nbar0 = file.get_number(
        "rabi_map", "nbar0", axial ? ctx.scenario.doppler_nbar_axial : ctx.scenario.doppler_nbar_radial);
    const double eta_sb = file.get_number("rabi_map", "eta_sb", 0.06);
    const double omega_sb =
        file.get_angular_frequency("rabi_map", "omega_sb", gamma_total, units::khz(50.0));
    const double rabi_time =
        file.has("rabi_map", "rabi_time")
            ? file.get_time("rabi_map", "rabi_time")
            : thermometry::default_rabi_time(eta_sb, omega_sb, nbar0);

    const auto pumps = linspace(pump_min, pump_max, pump_points);
    const auto probes = linspace(probe_min, probe_max, probe_points);
    const int total = pump_points * probe_points;
    std::vector<std::array<double, 4>> rows(static_cast<std::size_t>(total));
    const int n_max = 60;

    parallel_for(total, ctx.workers, [&](int index) {
        const double pump = pumps[std::size_t(index / probe_points)];
        const double probe = probes[std::size_t(index % probe_points)];
        model::CoolingScheme trial = scheme;
        for (auto& laser : trial.lasers) {
            if (laser.label == model::LaserLabel::sigma397) laser.rabi_frequency = pump;
            if (laser.label == model::LaserLabel::pi397) laser.rabi_frequency = probe;
        }
        double rsb = std::numeric_limits<double>::quiet_NaN();
        try {
            const auto rates = rates_for_mode(trial, trial.mode);
            const auto matrix = lambdicke::rate_matrix(rates.a_plus, rates.a_minus, n_max);
            const Eigen::VectorXd p0 = fock::thermal_distribution(nbar0, n_max + 1);
            const Eigen::VectorXd p = lambdicke::evolve_rate_eq(p0, matrix, cooling_time);
            rsb = thermometry::sideband_excitation(p, eta_sb, omega_sb, rabi_time, -1);
        } catch (const PhysicsError&) {
        }
        const double stark = lambdicke::stark_shift(pump, trial.delta) +
                             lambdicke::stark_shift(probe, trial.delta);
        rows[std::size_t(index)] = {pump, probe, rsb, stark};
    });

    const std::string path = ctx.path("_rabi_map.csv");
    csv::Writer writer(path,
                       {"omega_pump_rad_s", "omega_probe_rad_s", "rsb_excitation",
                        "stark_shift_rad_s"});
    for (const auto& row : rows) writer.row({row[0], row[1], row[2], row[3]});
    ctx.emit(path, "RSB excitation");
    ctx.summary.metrics["stark_target_rad_s"] = scheme.mode.frequency;
}

void run_detuning_sweep(Context& ctx) {
    const auto& file = ctx.scenario.file;
    const auto& base = ctx.scenario.scheme;
    const double gamma_total = base.gamma_total;
    const double lo = file.get_angular_frequency("detuning_sweep", "delta_min", gamma_total,
                                                 1.0 * gamma_total);
    const double hi = file.get_angular_frequency("detuning_sweep", "delta_max", gamma_total,
                                                 3.4 * gamma_total);
    const int points = static_cast<int>(file.get_integer("detuning_sweep", "points", 9));
    const auto deltas = linspace(lo, hi, points);

    std::vector<std::array<double, 3>> rows(static_cast<std::size_t>(points));
    parallel_for(points, ctx.workers, [&](int i) {
        const double delta = deltas[std::size_t(i)];
        model::SchemeParams params;
        params.delta = delta;
        params.gamma_total = gamma_total;
        params.field = base.zeeman.field_strength;
        params.branch_s = base.branch_s;
        params.branch_d = base.branch_d;
        params.omega_pi = base.rabi(model::LaserLabel::pi397);
        params.omega_sigma = 1.0; // replaced by tuning below
        params.omega_d = base.rabi(model::LaserLabel::d866);
        params.eta_pi_axial = base.eta(model::LaserLabel::pi397, model::ModeLabel::axial);
        params.eta_sigma_radial = base.eta(model::LaserLabel::sigma397, model::ModeLabel::radial1);
        params.eta_d_axial = base.eta(model::LaserLabel::d866, model::ModeLabel::axial);
        params.mode = base.mode;

        double rate = std::numeric_limits<double>::quiet_NaN();
        double n_ss = std::numeric_limits<double>::quiet_NaN();
        try {
            model::CoolingScheme scheme;
            if (ctx.scenario.scheme_type == "deit") {
                params.omega_sigma =
                    lambdicke::bright_state_tuning(delta, ctx.scenario.nu_radial);
                scheme = tune_scheme(ctx.scenario.nu_radial, ctx.scenario.nu_axial, delta,
                                     model::make_scheme(params));
            } else {
                params.omega_sigma =
                    lambdicke::bright_state_tuning(delta, base.mode.frequency);
                params.omega_d = 0.0;
                params.branch_s = 1.0;
                params.branch_d = 0.0;
                scheme = model::make_scheme(params);
            }
            const auto rates = rates_for_mode(scheme, scheme.mode);
            rate = rates.cooling_rate();
            n_ss = rates.n_ss();
        } catch (const PhysicsError&) {
        }
        rows[std::size_t(i)] = {delta, rate, n_ss};
    });

    const std::string path = ctx.path("_detuning_sweep.csv");
    csv::Writer writer(path, {"delta_rad_s", "cooling_rate", "n_ss"});
    for (const auto& row : rows) writer.row({row[0], row[1], row[2]});
    ctx.emit(path, "cooling rate (1/s)");
}

void run_ttm_rate(Context& ctx) {
    const auto& file = ctx.scenario.file;
    const auto& scheme = ctx.scenario.scheme;
    const double dt =
        file.get_time("ttm_rate", "dt", 0.05 / scheme.gamma_total);
    const int window = static_cast<int>(file.get_integer("ttm_rate", "window", 200));
    const int horizon_factor = static_cast<int>(file.get_integer("ttm_rate", "horizon_factor", 5));
    std::vector<double> nbar0_list{0.5, 1.0, 2.0};
    if (file.has("ttm_rate", "nbar0_list")) {
        nbar0_list = file.get_number_list("ttm_rate", "nbar0_list");
    }

    ttm::DynamicalMapSeries maps;
    if (file.has("ttm_rate", "maps_in")) {
        maps = ttm::load_maps(file.get_string("ttm_rate", "maps_in"));
    } else {
        maps = ttm::extract_maps_master_equation(scheme, ctx.fock_dim, dt, window, ctx.tolerance);
    }
    if (file.has("ttm_rate", "maps_out")) {
        const std::string maps_path = join_path(ctx.options.out_dir,
                                                file.get_string("ttm_rate", "maps_out"));
        ttm::save_maps(maps_path, maps);
        ctx.summary.output_files.push_back(maps_path);
    }
    const auto tensors = ttm::transfer_tensors(maps);
    const auto extended = ttm::extrapolate(tensors, maps, horizon_factor * maps.size());

    for (double nbar0 : nbar0_list) {
        const auto response = ttm::generalized_rate(extended, nbar0, scheme.mode.frequency);
        std::ostringstream name;
        name << "_ttm_nbar" << nbar0 << ".csv";
        const std::string path = ctx.path(name.str());
        csv::Writer writer(path, {"t_s", "capacitance_j_per_k", "conductance_w_per_k", "rate"});
        for (const auto& row : response) {
            writer.row({row.t, row.capacitance, row.conductance,
                        row.rate_valid ? row.rate : std::numeric_limits<double>::quiet_NaN()});
        }
        ctx.emit(path, "R(t, nbar0) (1/s)");
    }

    const auto asymptotic = ttm::asymptotic_model(maps);
    ctx.summary.metrics["asymptotic_rate"] = asymptotic.rate;
    ctx.summary.metrics["n_ss"] = asymptotic.n_ss;
}

void run_thermometry_replay(Context& ctx) {
    const auto& file = ctx.scenario.file;
    const std::string input = file.get_string("thermometry_replay", "fock_csv");
    const double eta_sb = file.get_number("thermometry_replay", "eta_sb", 0.06);
    const double omega_sb = file.get_angular_frequency("thermometry_replay", "omega_sb",
                                                       ctx.scenario.scheme.gamma_total,
                                                       units::khz(50.0));
    const long repetitions = file.get_integer("thermometry_replay", "repetitions", 0);

    const csv::Table table = csv::read(input);
    const int t_col = table.column("t_s");
    const int first_p = t_col + 1;
    const int n_states = static_cast<int>(table.columns.size()) - first_p;
    if (n_states < 2) throw ConfigError("fock CSV has no population columns", 0, "fock_csv");

    std::vector<double> times, rsb_series, bsb_series, nbar_series;
    std::mt19937 rng(static_cast<unsigned>(ctx.scenario.seed));
    double rabi_time = 0.0;
    for (const auto& row : table.rows) {
        Eigen::VectorXd p(n_states);
        for (int n = 0; n < n_states; ++n) p(n) = row[std::size_t(first_p + n)];
        const double total = p.sum();
        if (total <= 0.0) continue;
        p /= total;
        if (rabi_time == 0.0) {
            const double nbar0_hint =
                file.get_number("thermometry_replay", "nbar0_hint", fock::nbar_of(p));
            rabi_time = file.has("thermometry_replay", "rabi_time")
                            ? file.get_time("thermometry_replay", "rabi_time")
                            : thermometry::default_rabi_time(eta_sb, omega_sb, nbar0_hint);
        }
        double rsb = thermometry::sideband_excitation(p, eta_sb, omega_sb, rabi_time, -1);
        double bsb = thermometry::sideband_excitation(p, eta_sb, omega_sb, rabi_time, +1);
        if (repetitions > 0) {
            std::binomial_distribution<long> red(repetitions, rsb), blue(repetitions, bsb);
            rsb = double(red(rng)) / double(repetitions);
            bsb = double(blue(rng)) / double(repetitions);
        }
        times.push_back(row[std::size_t(t_col)]);
        rsb_series.push_back(rsb);
        bsb_series.push_back(bsb);
        try {
            nbar_series.push_back(thermometry::nbar_from_sidebands(rsb, bsb));
        } catch (const PhysicsError&) {
            nbar_series.push_back(std::numeric_limits<double>::quiet_NaN());
        }
    }

    const std::string sideband_path = ctx.path("_sidebands.csv");
    {
        csv::Writer writer(sideband_path, {"t_s", "rsb", "bsb", "nbar"});
        for (std::size_t k = 0; k < times.size(); ++k) {
            writer.row({times[k], rsb_series[k], bsb_series[k], nbar_series[k]});
        }
    }
    ctx.emit(sideband_path, "sideband excitation");

    // Fit on the valid points only.
    std::vector<double> t_fit, n_fit;
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (std::isfinite(nbar_series[k])) {
            t_fit.push_back(times[k]);
            n_fit.push_back(nbar_series[k]);
        }
    }
    const auto fit = thermometry::fit_cooling_curve(t_fit, n_fit);
    const std::string fit_path = ctx.path("_fit.csv");
    {
        csv::Writer writer(fit_path, {"amplitude", "rate", "n_infinity", "t_cut", "n_ss"});
        writer.row({fit.amplitude, fit.rate, fit.n_infinity, fit.t_cut,
                    fit.n_ss_valid ? fit.n_ss : std::numeric_limits<double>::quiet_NaN()});
    }
    ctx.emit(fit_path, "fit report");
    ctx.summary.metrics["fit_rate"] = fit.rate;
    if (fit.n_ss_valid) ctx.summary.metrics["n_ss"] = fit.n_ss;
}

void run_pulse_sequence(Context& ctx) {
    const auto& file = ctx.scenario.file;
    const auto& scenario = ctx.scenario;
    const double gamma_total = scenario.scheme.gamma_total;
    const double delta = scenario.scheme.delta;

    std::stringstream pulse_stream(file.get_string("pulse_sequence", "pulses", "radial, axial"));
    std::vector<std::string> pulse_names;
    std::string token;
    while (std::getline(pulse_stream, token, ',')) {
        token.erase(0, token.find_first_not_of(" \t"));
        token.erase(token.find_last_not_of(" \t") + 1);
        if (!token.empty()) pulse_names.push_back(token);
    }
    std::vector<double> durations;
    std::stringstream duration_stream(
        file.get_string("pulse_sequence", "durations", "1 ms, 2 ms"));
    while (std::getline(duration_stream, token, ',')) {
        durations.push_back(config::parse_time(token, "pulse_sequence.durations", 0));
    }
    if (durations.size() != pulse_names.size()) {
        throw ConfigError("pulse_sequence: one duration per pulse required", 0,
                          "pulse_sequence.durations");
    }

    // Single-EIT pulses carry the 866 repump detuned off the two-photon
    // condition; its dressed resonances between the spectator sidebands are
    // what leaves the off-resonant class hot. repump = 0 MHz gives the
    // idealized repump-free pulses instead.
    const double repump =
        file.get_angular_frequency("pulse_sequence", "repump", gamma_total, units::mhz(10.0));
    const double mismatch_axial = file.get_angular_frequency(
        "pulse_sequence", "repump_mismatch_axial", gamma_total, units::mhz(12.0));
    const double mismatch_radial = file.get_angular_frequency(
        "pulse_sequence", "repump_mismatch_radial", gamma_total, units::mhz(5.0));

    auto tuned_single = [&](double nu_target, model::ModeLabel label, double mismatch) {
        model::CoolingScheme scheme = scenario.scheme;
        scheme.mode.label = label;
        scheme.mode.frequency = nu_target;
        for (auto& laser : scheme.lasers) {
            if (laser.label == model::LaserLabel::sigma397) {
                laser.rabi_frequency = lambdicke::bright_state_tuning(delta, nu_target);
            }
            if (laser.label == model::LaserLabel::d866) {
                laser.rabi_frequency = repump;
                laser.detuning += mismatch;
            }
        }
        if (repump == 0.0) {
            scheme.branch_s = 1.0;
            scheme.branch_d = 0.0;
        }
        return scheme;
    };

    std::vector<PulseSegment> segments;
    for (std::size_t k = 0; k < pulse_names.size(); ++k) {
        PulseSegment segment;
        segment.label = pulse_names[k];
        segment.duration = durations[k];
        if (pulse_names[k] == "radial") {
            segment.scheme =
                tuned_single(scenario.nu_radial, model::ModeLabel::radial1, mismatch_radial);
        } else if (pulse_names[k] == "axial") {
            segment.scheme =
                tuned_single(scenario.nu_axial, model::ModeLabel::axial, mismatch_axial);
        } else if (pulse_names[k] == "deit") {
            segment.scheme =
                tune_scheme(scenario.nu_radial, scenario.nu_axial, delta, scenario.scheme);
        } else {
            throw ConfigError("pulse_sequence: unknown pulse '" + pulse_names[k] + "'", 0,
                              "pulse_sequence.pulses");
        }
        segments.push_back(std::move(segment));
    }

    const std::vector<model::TrapMode> modes = {
        {model::ModeLabel::axial, scenario.nu_axial, scenario.heating_axial},
        {model::ModeLabel::radial1, scenario.nu_radial, scenario.heating_radial},
    };
    const std::vector<double> nbar0 = {scenario.doppler_nbar_axial, scenario.doppler_nbar_radial};
    const int n_max = static_cast<int>(file.get_integer("pulse_sequence", "n_max", 60));
    const auto trajectories = run_sequence(segments, modes, nbar0, n_max);

    const char* mode_names[] = {"axial", "radial"};
    for (std::size_t m = 0; m < trajectories.size(); ++m) {
        const std::string path = ctx.path(std::string("_mode_") + mode_names[m] + ".csv");
        csv::Writer writer(path, {"t_s", "nbar"});
        for (std::size_t k = 0; k < trajectories[m].times.size(); ++k) {
            writer.row({trajectories[m].times[k], trajectories[m].nbar[k]});
        }
        ctx.emit(path, "nbar");
        ctx.summary.metrics[std::string("final_nbar_") + mode_names[m]] =
            trajectories[m].nbar.back();
        for (std::size_t s = 0; s < trajectories[m].segment_n_ss.size(); ++s) {
            ctx.summary.metrics[std::string("n_ss_") + mode_names[m] + "_segment" +
                                std::to_string(s)] = trajectories[m].segment_n_ss[s];
        }
    }
    ctx.summary.notes.push_back(
        "modes evolve independently: spectator-mode cross-talk (hot neighbors degrading the "
        "dark state) is outside the single-oscillator model");
}

} // namespace

namespace {

// Patch one named physical parameter of the scheme; two-photon resonance is
// re-derived for delta and field changes with the repump offset preserved.
void apply_sweep_value(Scenario& scenario, const std::string& parameter, double value) {
    auto& scheme = scenario.scheme;
    auto set_rabi = [&](model::LaserLabel label) {
        for (auto& laser : scheme.lasers) {
            if (laser.label == label) laser.rabi_frequency = value;
        }
    };
    if (parameter == "omega_pi") {
        set_rabi(model::LaserLabel::pi397);
    } else if (parameter == "omega_sigma") {
        set_rabi(model::LaserLabel::sigma397);
    } else if (parameter == "omega_d") {
        set_rabi(model::LaserLabel::d866);
    } else if (parameter == "probe_offset") {
        for (auto& laser : scheme.lasers) {
            if (laser.label == model::LaserLabel::pi397) laser.detuning += value;
        }
    } else if (parameter == "delta" || parameter == "field") {
        const auto old = model::resonant_detunings(scheme.delta, scheme.zeeman);
        const double repump_offset = scheme.require(model::LaserLabel::d866).detuning - old.d866;
        if (parameter == "delta") scheme.delta = value;
        if (parameter == "field") scheme.zeeman.field_strength = value;
        const auto detunings = model::resonant_detunings(scheme.delta, scheme.zeeman);
        for (auto& laser : scheme.lasers) {
            if (laser.label == model::LaserLabel::pi397) laser.detuning = detunings.pi397;
            if (laser.label == model::LaserLabel::sigma397) laser.detuning = detunings.sigma397;
            if (laser.label == model::LaserLabel::d866) {
                laser.detuning = detunings.d866 + repump_offset;
            }
        }
    } else {
        throw ConfigError("unknown sweep parameter '" + parameter + "'", 0, "sweep.parameter");
    }
    scheme.validate();
}

std::vector<double> sweep_values(const Scenario& scenario, const std::string& parameter) {
    const auto& entry = scenario.file.entry("sweep", "values");
    std::vector<double> values;
    std::stringstream ss(entry.value);
    std::string token;
    while (std::getline(ss, token, ',')) {
        if (token.find_first_not_of(" \t") == std::string::npos) continue;
        if (parameter == "field") {
            values.push_back(config::parse_field(token, "sweep.values", entry.line));
        } else {
            values.push_back(config::parse_angular_frequency(
                token, scenario.scheme.gamma_total, "sweep.values", entry.line));
        }
    }
    if (values.empty()) throw ConfigError("sweep.values is empty", entry.line, "sweep.values");
    return values;
}

RunSummary run_single(const Scenario& scenario, const RunOptions& options);

RunSummary run_sweep(const Scenario& scenario, const RunOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    const std::string parameter = scenario.file.get_string("sweep", "parameter");
    const auto values = sweep_values(scenario, parameter);

    RunSummary combined;
    combined.experiment = experiment_name(scenario.experiment);
    std::vector<std::map<std::string, double>> metrics;
    for (std::size_t k = 0; k < values.size(); ++k) {
        Scenario point = scenario;
        apply_sweep_value(point, parameter, values[k]);
        point.output_prefix = scenario.output_prefix + "_sweep" + std::to_string(k);
        const RunSummary one = run_single(point, options);
        combined.output_files.insert(combined.output_files.end(), one.output_files.begin(),
                                     one.output_files.end());
        for (const auto& note : one.notes) combined.notes.push_back(note);
        metrics.push_back(one.metrics);
    }

    // Per-point metric table, keyed by the swept value.
    std::vector<std::string> columns{parameter + "_value"};
    for (const auto& [key, value] : metrics.front()) columns.push_back(key);
    const std::string summary_path =
        join_path(options.out_dir, scenario.output_prefix + "_sweep_summary.csv");
    csv::Writer writer(summary_path, columns);
    for (std::size_t k = 0; k < values.size(); ++k) {
        std::vector<double> row{values[k]};
        for (std::size_t c = 1; c < columns.size(); ++c) {
            const auto found = metrics[k].find(columns[c]);
            row.push_back(found != metrics[k].end()
                              ? found->second
                              : std::numeric_limits<double>::quiet_NaN());
        }
        writer.row(row);
    }
    combined.output_files.push_back(summary_path);
    combined.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return combined;
}

} // namespace

RunSummary run(const Scenario& scenario, const RunOptions& options) {
    std::filesystem::create_directories(options.out_dir);
    if (scenario.file.has("sweep", "parameter")) {
        return run_sweep(scenario, options);
    }
    return run_single(scenario, options);
}

namespace {

RunSummary run_single(const Scenario& scenario, const RunOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    RunSummary summary;
    summary.experiment = experiment_name(scenario.experiment);

    std::filesystem::create_directories(options.out_dir);

    Context ctx{scenario,
                options,
                summary,
                options.fock_dim > 0
                    ? options.fock_dim
                    : static_cast<int>(scenario.file.get_integer("scheme", "fock_dim", 17)),
                options.tolerance > 0.0
                    ? options.tolerance
                    : scenario.file.get_number("scheme", "tolerance", 1e-8),
                worker_count(options.workers)};

    switch (scenario.experiment) {
        case Experiment::spectrum_scan: run_spectrum_scan(ctx); break;
        case Experiment::cooling_trajectory: run_cooling_trajectory(ctx); break;
        case Experiment::rabi_map: run_rabi_map(ctx); break;
        case Experiment::detuning_sweep: run_detuning_sweep(ctx); break;
        case Experiment::ttm_rate: run_ttm_rate(ctx); break;
        case Experiment::thermometry_replay: run_thermometry_replay(ctx); break;
        case Experiment::pulse_sequence: run_pulse_sequence(ctx); break;
    }

    summary.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return summary;
}

} // namespace

} // namespace eitcool::cli
