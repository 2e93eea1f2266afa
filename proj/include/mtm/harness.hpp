#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mtm/core.hpp"

namespace mtm {

enum class Scenario {
    radiation_asymptotics,   // decay of the field minus its light-cone prediction
    soliton_track,           // simulator against the closed-form multi-soliton
    two_soliton_resolution,  // per-cone match against modified one-solitons
    roundtrip,               // scatter then reconstruct at t = 0
    b_equality,              // the two computation routes for the amplitude pair
};

const char* scenario_name(Scenario s);

// One experiment = one JSON config file. Missing keys take the documented
// defaults below; every tolerance used by a scenario is echoed into its
// summary so no hidden constants enter a verdict.
struct ExperimentConfig {
    Scenario scenario = Scenario::radiation_asymptotics;

    // simulation grid
    double x_min = -40.0, x_max = 40.0, dx = 1.0 / 64.0;

    // initial data: family "gaussian" (amp * exp(-(x/width)^2) exp(i chirp x)
    // in both components) or "solitons" (reflectionless data from the
    // eigenvalue / norming-constant lists)
    std::string family = "gaussian";
    double amplitude = 0.1, width = 1.0, chirp = 0.0;
    std::vector<cplx> lambda, C;

    std::vector<double> times;   // tau samples (radiation) or t samples
    double speed = 0.2;          // ray x/t for radiation_asymptotics
    std::vector<double> speeds;  // sample speeds for b_equality
    double window_half_width = 8.0;  // cone window for two_soliton_resolution

    std::string output_dir = "runs/out";

    // tolerances (summaries echo exactly these)
    double exponent_min = 0.6;      // radiation decay exponent lower bound
    double residual_max = 1e-3;     // sup-error bound (track / roundtrip)
    double agreement_max = 1e-8;    // route agreement bound (b_equality)
    double stability_factor = 2.0;  // max/min spread of fitted K

    // spectral grids for the scattering side
    double w_max = 12.0;
    std::size_t n_grid = 2048;
    bool find_spectrum = false;

    // reconstruction window and contour (roundtrip)
    double recon_x_min = -3.0, recon_x_max = 3.0, recon_dx = 0.5;
    double recon_s_max = 16.0;
    std::size_t recon_n_nodes = 4096;

    void validate() const;  // throws std::invalid_argument naming the field
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

// Least-squares slope of log(residual) against log(tau), sign-flipped so a
// tau^{-p} law returns p. Needs >= 4 strictly positive points.
double fit_decay(const std::vector<std::pair<double, double>>& points);

struct ScenarioResult {
    double exponent = 0.0;      // fitted decay exponent (0 when not fitted)
    double max_residual = 0.0;  // worst residual driving the verdict
    bool pass = false;
    std::string csv_path, summary_path, log_path;
};

// Runs the configured scenario and writes data.csv, summary.json and run.log
// under output_dir (created if needed). Output bytes depend only on the
// config: fixed iteration orders, fixed formatting, no timestamps.
ScenarioResult run_scenario(const ExperimentConfig& cfg);

}  // namespace mtm
