// scenario.hpp — Declarative scenario runner: scheme construction from config
// files, bright-state tuning, parameter sweeps, pulse sequences and CSV
// emission.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eitcool/config.hpp"
#include "eitcool/lambdicke.hpp"
#include "eitcool/model.hpp"

namespace eitcool::cli {

enum class Experiment {
    spectrum_scan,
    cooling_trajectory,
    rabi_map,
    detuning_sweep,
    ttm_rate,
    thermometry_replay,
    pulse_sequence,
};

Experiment experiment_from_string(const std::string& name);
const char* experiment_name(Experiment experiment);

struct Scenario {
    config::Config file;
    model::CoolingScheme scheme;
    Experiment experiment{Experiment::spectrum_scan};
    std::string output_prefix{"run"};
    long seed{0};
    std::string scheme_type{"deit"}; // "single_eit" or "deit"

    // Trap context shared by multi-mode experiments.
    double nu_axial{0.0};
    double nu_radial{0.0};
    double heating_axial{0.0};  // phonons/s
    double heating_radial{0.0};
    double doppler_nbar_axial{11.1};
    double doppler_nbar_radial{3.6};
};

Scenario parse_scenario(const config::Config& file);
Scenario load_scenario(const std::string& path);

// Pump Rabi frequencies placing the bright states at the mode frequencies:
// omega_sigma = sqrt(4 delta nu_radial) and, for D-EIT, omega_d from a root
// find on the dispersive zero of the axial-sector denominator at -nu_axial.
model::CoolingScheme tune_scheme(double nu_radial, double nu_axial, double delta,
                                 model::CoolingScheme base);

// Sideband rates of `scheme` evaluated for an arbitrary mode: the coupling
// operator is rebuilt with that mode's Lamb-Dicke projections and fed through
// the regression-theorem spectrum.
lambdicke::RateModel rates_for_mode(const model::CoolingScheme& scheme,
                                    const model::TrapMode& mode);

// ----------------------------- pulse sequences --------------------------------

struct PulseSegment {
    model::CoolingScheme scheme;
    double duration{0.0}; // s; zero-duration segments are no-ops
    std::string label;
};

struct ModeTrajectory {
    model::TrapMode mode;
    std::vector<double> times;
    std::vector<double> nbar;
    std::vector<double> segment_n_ss; // per-segment steady state of this mode
};

// Each mode evolves independently under each segment's sideband rates
// (single-oscillator birth-death dynamics). Spectator-mode cross-talk is
// deliberately not modeled; runners report that caveat.
std::vector<ModeTrajectory> run_sequence(const std::vector<PulseSegment>& segments,
                                         const std::vector<model::TrapMode>& modes,
                                         const std::vector<double>& nbar0, int n_max = 60,
                                         int samples_per_segment = 50);

// ------------------------------- execution ------------------------------------

struct RunOptions {
    std::string out_dir{"."};
    int workers{0};       // 0: EITCOOL_WORKERS environment variable, then 1
    int fock_dim{0};      // 0: value from the scenario file (default 17)
    double tolerance{0.0}; // 0: value from the scenario file (default 1e-8)
    bool gnuplot_stub{false};
};

struct RunSummary {
    std::string experiment;
    std::vector<std::string> output_files;
    std::map<std::string, double> metrics;
    std::vector<std::string> notes;
    double wall_seconds{0.0};
};

RunSummary run(const Scenario& scenario, const RunOptions& options = {});

int worker_count(int requested);

} // namespace eitcool::cli
