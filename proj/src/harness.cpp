#include "mtm/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "mtm/asymptotics.hpp"
#include "mtm/rhp.hpp"
#include "mtm/scattering.hpp"
#include "mtm/simulator.hpp"
#include "mtm/solitons.hpp"

namespace mtm {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

const std::vector<std::pair<Scenario, const char*>> kScenarios = {
    {Scenario::radiation_asymptotics, "radiation_asymptotics"},
    {Scenario::soliton_track, "soliton_track"},
    {Scenario::two_soliton_resolution, "two_soliton_resolution"},
    {Scenario::roundtrip, "roundtrip"},
    {Scenario::b_equality, "b_equality"},
};

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12e", x);
    return buf;
}

std::vector<cplx> parse_complex_list(const json& arr, const char* field) {
    if (!arr.is_array()) throw std::invalid_argument(std::string("config: ") + field +
                                                     " must be an array of [re, im] pairs");
    std::vector<cplx> out;
    for (const json& e : arr) {
        if (!e.is_array() || e.size() != 2)
            throw std::invalid_argument(std::string("config: ") + field +
                                        " entries must be [re, im] pairs");
        out.emplace_back(e[0].get<double>(), e[1].get<double>());
    }
    return out;
}

// Deterministic single-writer output bundle: everything is accumulated in
// memory and flushed once, so partial scenarios leave no files behind.
struct RunOutput {
    std::string csv_header;
    std::vector<std::string> csv_rows;
    std::vector<std::string> log_lines;
    ordered_json summary;

    void log(const std::string& line) { log_lines.push_back(line); }

    ScenarioResult flush(const ExperimentConfig& cfg) const {
        namespace fs = std::filesystem;
        ScenarioResult res;
        res.exponent = summary.at("exponent").get<double>();
        res.max_residual = summary.at("max_residual").get<double>();
        res.pass = summary.at("pass").get<bool>();
        std::error_code ec;
        fs::create_directories(cfg.output_dir, ec);
        if (ec) throw std::runtime_error("output_dir not creatable: " + cfg.output_dir);
        auto write_file = [&](const char* name, const std::string& body) -> std::string {
            const std::string path = (fs::path(cfg.output_dir) / name).string();
            std::ofstream f(path, std::ios::binary | std::ios::trunc);
            if (!f) throw std::runtime_error("output_dir not writable: " + path);
            f << body;
            return path;
        };
        std::string csv = csv_header + "\n";
        for (const std::string& r : csv_rows) csv += r + "\n";
        std::string log_text;
        for (const std::string& l : log_lines) log_text += l + "\n";
        res.csv_path = write_file("data.csv", csv);
        res.summary_path = write_file("summary.json", summary.dump(2) + "\n");
        res.log_path = write_file("run.log", log_text);
        return res;
    }
};

FieldState initial_state(const ExperimentConfig& cfg) {
    if (cfg.family == "gaussian") {
        FieldState s = make_state(cfg.x_min, cfg.x_max, cfg.dx);
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double x = s.x(i);
            const cplx val = cfg.amplitude * std::exp(-(x / cfg.width) * (x / cfg.width)) *
                             std::exp(cplx(0.0, cfg.chirp * x));
            s.u[i] = val;
            s.v[i] = val;
        }
        return s;
    }
    SolitonData D{cfg.lambda, cfg.C};
    D.validate();
    const std::size_t n = static_cast<std::size_t>(std::llround((cfg.x_max - cfg.x_min) / cfg.dx)) + 1;
    return n_soliton(D, 0.0, cfg.x_min, cfg.dx, n);
}

// analytic value of the configured initial data (grid-free reference)
std::pair<cplx, cplx> initial_point(const ExperimentConfig& cfg, double x) {
    if (cfg.family == "gaussian") {
        const cplx val = cfg.amplitude * std::exp(-(x / cfg.width) * (x / cfg.width)) *
                         std::exp(cplx(0.0, cfg.chirp * x));
        return {val, val};
    }
    return n_soliton_point(SolitonData{cfg.lambda, cfg.C}, 0.0, x);
}

double round_to_step(double t, double dx) { return std::round(t / dx) * dx; }

double soliton_velocity(cplx lambda) {
    const double d2 = std::norm(lambda);
    return (1.0 / d2 - d2) / (1.0 / d2 + d2);
}

ordered_json base_summary(const ExperimentConfig& cfg) {
    ordered_json s;
    s["scenario"] = scenario_name(cfg.scenario);
    s["exponent"] = 0.0;
    s["max_residual"] = 0.0;
    s["pass"] = false;
    s["tolerances"] = ordered_json::object();
    s["details"] = ordered_json::object();
    return s;
}

void run_radiation(const ExperimentConfig& cfg, RunOutput& out) {
    FieldState state = initial_state(cfg);
    out.log("computing z-side reflection coefficient on [" + fmt(-cfg.w_max) + ", " +
            fmt(cfg.w_max) + "], " + std::to_string(cfg.n_grid) + " nodes");
    const SampledComplexFunction r_hat =
        reflection_z(state, -cfg.w_max, cfg.w_max, cfg.n_grid);

    std::vector<double> taus = cfg.times;
    std::sort(taus.begin(), taus.end());
    const double gamma = 1.0 / std::sqrt(1.0 - cfg.speed * cfg.speed);

    out.csv_header = "tau,t,x,residual_u,residual_v,abs_u_num,abs_u_pred";
    std::vector<std::pair<double, double>> pts_u;
    double max_res = 0.0;
    for (double tau : taus) {
        const double t = round_to_step(tau * gamma, cfg.dx);
        const std::size_t ix =
            static_cast<std::size_t>(std::llround((cfg.speed * t - cfg.x_min) / cfg.dx));
        const double x = state.x(ix);
        EvolveReport rep;
        state = evolve(state, t, &rep);
        if (rep.boundary_warning)
            out.log("warning: boundary amplitude exceeded threshold at t = " + fmt(t));
        const auto [up, vp] = predict_fields(r_hat, t, x);
        const double ru = std::abs(state.u[ix] - up);
        const double rv = std::abs(state.v[ix] - vp);
        const double tau_act = std::sqrt(t * t - x * x);
        pts_u.emplace_back(tau_act, ru);
        max_res = std::max(max_res, std::max(ru, rv));
        out.csv_rows.push_back(fmt(tau_act) + "," + fmt(t) + "," + fmt(x) + "," + fmt(ru) + "," +
                               fmt(rv) + "," + fmt(std::abs(state.u[ix])) + "," +
                               fmt(std::abs(up)));
        out.log("tau = " + fmt(tau_act) + ": residual_u = " + fmt(ru) +
                ", residual_v = " + fmt(rv));
    }
    const double exponent = fit_decay(pts_u);
    out.summary["exponent"] = exponent;
    out.summary["max_residual"] = max_res;
    out.summary["pass"] = exponent >= cfg.exponent_min;
    out.summary["tolerances"]["exponent_min"] = cfg.exponent_min;
    out.summary["details"]["speed"] = cfg.speed;
    out.summary["details"]["n_samples"] = taus.size();
    out.log("fitted decay exponent " + fmt(exponent) + " against bound " + fmt(cfg.exponent_min));
}

void run_soliton_track(const ExperimentConfig& cfg, RunOutput& out) {
    const SolitonData D{cfg.lambda, cfg.C};
    D.validate();
    FieldState state = initial_state(cfg);
    std::vector<double> ts = cfg.times;
    std::sort(ts.begin(), ts.end());
    out.csv_header = "t,sup_err_u,sup_err_v";
    double max_res = 0.0;
    for (double t_req : ts) {
        const double t = round_to_step(t_req, cfg.dx);
        EvolveReport rep;
        state = evolve(state, t, &rep);
        if (rep.boundary_warning)
            out.log("warning: boundary amplitude exceeded threshold at t = " + fmt(t));
        const FieldState exact = n_soliton(D, t, cfg.x_min, cfg.dx, state.size());
        double eu = 0.0, ev = 0.0;
        for (std::size_t i = 0; i < state.size(); ++i) {
            eu = std::max(eu, std::abs(state.u[i] - exact.u[i]));
            ev = std::max(ev, std::abs(state.v[i] - exact.v[i]));
        }
        max_res = std::max(max_res, std::max(eu, ev));
        out.csv_rows.push_back(fmt(t) + "," + fmt(eu) + "," + fmt(ev));
        out.log("t = " + fmt(t) + ": sup_err_u = " + fmt(eu) + ", sup_err_v = " + fmt(ev));
    }
    out.summary["max_residual"] = max_res;
    out.summary["pass"] = max_res <= cfg.residual_max;
    out.summary["tolerances"]["residual_max"] = cfg.residual_max;
    out.summary["details"]["n_solitons"] = D.size();
}

void run_resolution(const ExperimentConfig& cfg, RunOutput& out) {
    const SolitonData D{cfg.lambda, cfg.C};
    D.validate();
    // reflectionless scattering data carrying the full spectrum, for the
    // cone restriction that produces the modified norming constants
    const std::size_t nz = 8;
    std::vector<cplx> zeros(nz, cplx(0.0, 0.0));
    ScatteringData S{SampledComplexFunction(-cfg.w_max, 2.0 * cfg.w_max / (nz - 1), zeros),
                     SampledComplexFunction(-cfg.w_max, 2.0 * cfg.w_max / (nz - 1), zeros),
                     DiscreteSpectrum{cfg.lambda, cfg.C}};

    struct Cone {
        double velocity;
        cplx lambda, c_mod;
    };
    std::vector<Cone> cones;
    for (std::size_t j = 0; j < D.size(); ++j) {
        const double v = soliton_velocity(D.lambda[j]);
        const ScatteringData Sj = cone_restrict(S, v - 1e-3, v + 1e-3);
        if (Sj.spectrum.size() != 1)
            throw std::runtime_error("two_soliton_resolution: cone does not isolate one soliton");
        cones.push_back({v, Sj.spectrum.lambda[0], Sj.spectrum.C[0]});
        out.log("soliton " + std::to_string(j) + ": velocity " + fmt(v) + ", |C_mod/C| = " +
                fmt(std::abs(Sj.spectrum.C[0] / D.C[j])));
    }

    FieldState state = initial_state(cfg);
    std::vector<double> ts = cfg.times;
    std::sort(ts.begin(), ts.end());
    out.csv_header = "t,soliton,velocity,sup_err_u,sup_err_v,K";
    std::vector<std::vector<double>> K(cones.size());
    std::vector<std::pair<double, double>> pooled;
    double max_res = 0.0;
    for (double t_req : ts) {
        const double t = round_to_step(t_req, cfg.dx);
        EvolveReport rep;
        state = evolve(state, t, &rep);
        if (rep.boundary_warning)
            out.log("warning: boundary amplitude exceeded threshold at t = " + fmt(t));
        double pooled_err = 0.0;
        for (std::size_t j = 0; j < cones.size(); ++j) {
            const Cone& cn = cones[j];
            double eu = 0.0, ev = 0.0;
            for (std::size_t i = 0; i < state.size(); ++i) {
                const double x = state.x(i);
                if (std::abs(x - cn.velocity * t) > cfg.window_half_width) continue;
                const auto [up, vp] = one_soliton(cn.lambda, cn.c_mod, t, x);
                eu = std::max(eu, std::abs(state.u[i] - up));
                ev = std::max(ev, std::abs(state.v[i] - vp));
            }
            const double e = std::max(eu, ev);
            K[j].push_back(e * std::sqrt(t));
            pooled_err = std::max(pooled_err, e);
            max_res = std::max(max_res, e);
            out.csv_rows.push_back(fmt(t) + "," + std::to_string(j) + "," + fmt(cn.velocity) +
                                   "," + fmt(eu) + "," + fmt(ev) + "," + fmt(e * std::sqrt(t)));
            out.log("t = " + fmt(t) + ", soliton " + std::to_string(j) + ": sup_err = " + fmt(e) +
                    ", K = " + fmt(e * std::sqrt(t)));
        }
        pooled.emplace_back(t, pooled_err);
    }
    bool stable = true;
    double worst_spread = 1.0;
    for (std::size_t j = 0; j < K.size(); ++j) {
        const double kmax = *std::max_element(K[j].begin(), K[j].end());
        const double kmin = *std::min_element(K[j].begin(), K[j].end());
        const double spread = (kmin > 0.0) ? kmax / kmin
                                           : std::numeric_limits<double>::infinity();
        worst_spread = std::max(worst_spread, spread);
        if (spread > cfg.stability_factor) stable = false;
        out.log("soliton " + std::to_string(j) + ": K spread factor " + fmt(spread));
    }
    if (pooled.size() >= 4) out.summary["exponent"] = fit_decay(pooled);
    out.summary["max_residual"] = max_res;
    out.summary["pass"] = stable;
    out.summary["tolerances"]["stability_factor"] = cfg.stability_factor;
    out.summary["details"]["K_spread"] = worst_spread;
    out.summary["details"]["n_solitons"] = cones.size();
}

void run_roundtrip(const ExperimentConfig& cfg, RunOutput& out) {
    FieldState state = initial_state(cfg);
    ScatterParams sp;
    sp.w_min = -cfg.w_max;
    sp.w_max = cfg.w_max;
    sp.n_grid = cfg.n_grid;
    sp.find_spectrum = cfg.find_spectrum;
    out.log("scattering on w-grid [" + fmt(sp.w_min) + ", " + fmt(sp.w_max) + "], " +
            std::to_string(sp.n_grid) + " nodes");
    const ScatteringData S = scattering_data(state, sp);
    ReconstructParams rp;
    rp.s_max = cfg.recon_s_max;
    rp.n_nodes = cfg.recon_n_nodes;
    const FieldState rec =
        reconstruct_fields(S, 0.0, cfg.recon_x_min, cfg.recon_x_max, cfg.recon_dx, rp);
    out.csv_header = "x,err_u,err_v";
    double max_res = 0.0;
    for (std::size_t i = 0; i < rec.size(); ++i) {
        const double x = rec.x(i);
        const auto [u0, v0] = initial_point(cfg, x);
        const double eu = std::abs(rec.u[i] - u0);
        const double ev = std::abs(rec.v[i] - v0);
        max_res = std::max(max_res, std::max(eu, ev));
        out.csv_rows.push_back(fmt(x) + "," + fmt(eu) + "," + fmt(ev));
    }
    out.summary["max_residual"] = max_res;
    out.summary["pass"] = max_res <= cfg.residual_max;
    out.summary["tolerances"]["residual_max"] = cfg.residual_max;
    out.summary["details"]["n_points"] = rec.size();
    out.log("roundtrip sup-error " + fmt(max_res) + " against bound " + fmt(cfg.residual_max));
}

void run_b_equality(const ExperimentConfig& cfg, RunOutput& out) {
    FieldState state = initial_state(cfg);
    const SampledComplexFunction r = reflection_w(state, -cfg.w_max, cfg.w_max, cfg.n_grid);
    const SampledComplexFunction r_hat = reflection_z(state, -cfg.w_max, cfg.w_max, cfg.n_grid);
    out.csv_header = "speed,diff_f_minus,diff_f_plus";
    double max_res = 0.0;
    for (double v : cfg.speeds) {
        const auto [fm_z, fp_z] = f_pm(r_hat, v);
        const auto [fm_w, fp_w] = f_pm_w(r, v);
        const double dm = std::abs(fm_z - fm_w);
        const double dp = std::abs(fp_z - fp_w);
        max_res = std::max(max_res, std::max(dm, dp));
        out.csv_rows.push_back(fmt(v) + "," + fmt(dm) + "," + fmt(dp));
        out.log("speed " + fmt(v) + ": |df-| = " + fmt(dm) + ", |df+| = " + fmt(dp));
    }
    out.summary["max_residual"] = max_res;
    out.summary["pass"] = max_res <= cfg.agreement_max;
    out.summary["tolerances"]["agreement_max"] = cfg.agreement_max;
    out.summary["details"]["n_speeds"] = cfg.speeds.size();
}

}  // namespace

const char* scenario_name(Scenario s) {
    for (const auto& [sc, name] : kScenarios)
        if (sc == s) return name;
    return "unknown";
}

void ExperimentConfig::validate() const {
    auto bad = [](const std::string& field, const std::string& why) {
        throw std::invalid_argument("config: " + field + " " + why);
    };
    if (!(dx > 0.0)) bad("grid.dx", "must be positive");
    if (!(x_max > x_min)) bad("grid.x_max", "must exceed grid.x_min");
    if (family != "gaussian" && family != "solitons")
        bad("initial_data.family", "must be \"gaussian\" or \"solitons\"");
    if (family == "gaussian") {
        if (!(amplitude > 0.0)) bad("initial_data.amplitude", "must be positive");
        if (!(width > 0.0)) bad("initial_data.width", "must be positive");
    } else {
        if (lambda.empty() || lambda.size() != C.size())
            bad("initial_data.lambda", "and initial_data.C must be nonempty, equal-length lists");
    }
    if (!(w_max > 0.0)) bad("scattering.w_max", "must be positive");
    if (n_grid < 8) bad("scattering.n_grid", "must be at least 8");
    if (!(window_half_width > 0.0)) bad("window_half_width", "must be positive");
    if (!(recon_dx > 0.0)) bad("reconstruction.dx", "must be positive");
    if (!(recon_x_max > recon_x_min)) bad("reconstruction.x_max", "must exceed reconstruction.x_min");
    if (!(recon_s_max > 0.0)) bad("reconstruction.s_max", "must be positive");
    if (!(exponent_min > 0.0)) bad("tolerances.exponent_min", "must be positive");
    if (!(residual_max > 0.0)) bad("tolerances.residual_max", "must be positive");
    if (!(agreement_max > 0.0)) bad("tolerances.agreement_max", "must be positive");
    if (!(stability_factor >= 1.0)) bad("tolerances.stability_factor", "must be at least 1");
    if (std::abs(speed) >= 1.0) bad("speed", "must lie in (-1, 1)");
    for (double v : speeds)
        if (std::abs(v) >= 1.0) bad("speeds", "entries must lie in (-1, 1)");
    const bool needs_times = scenario != Scenario::b_equality && scenario != Scenario::roundtrip;
    if (needs_times && times.empty()) bad("times", "must be a nonempty list");
    for (double t : times)
        if (!(t > 0.0)) bad("times", "entries must be positive");
    if (scenario == Scenario::b_equality && speeds.empty())
        bad("speeds", "must be a nonempty list");
    if (scenario != Scenario::radiation_asymptotics && scenario != Scenario::roundtrip &&
        scenario != Scenario::b_equality && family != "solitons")
        bad("initial_data.family", "must be \"solitons\" for this scenario");
    if (output_dir.empty()) bad("output_dir", "must be nonempty");
}

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
    }
    ExperimentConfig cfg;
    if (!j.contains("scenario") || !j["scenario"].is_string())
        throw std::invalid_argument("config: scenario is required and must be a string");
    const std::string sname = j["scenario"].get<std::string>();
    bool found = false;
    for (const auto& [sc, name] : kScenarios)
        if (sname == name) {
            cfg.scenario = sc;
            found = true;
        }
    if (!found)
        throw std::invalid_argument("config: scenario \"" + sname + "\" is not recognized");
    if (j.contains("grid")) {
        const json& g = j["grid"];
        cfg.x_min = g.value("x_min", cfg.x_min);
        cfg.x_max = g.value("x_max", cfg.x_max);
        cfg.dx = g.value("dx", cfg.dx);
    }
    if (j.contains("initial_data")) {
        const json& d = j["initial_data"];
        cfg.family = d.value("family", cfg.family);
        cfg.amplitude = d.value("amplitude", cfg.amplitude);
        cfg.width = d.value("width", cfg.width);
        cfg.chirp = d.value("chirp", cfg.chirp);
        if (d.contains("lambda")) cfg.lambda = parse_complex_list(d["lambda"], "initial_data.lambda");
        if (d.contains("C")) cfg.C = parse_complex_list(d["C"], "initial_data.C");
    }
    cfg.times = j.value("times", cfg.times);
    cfg.speed = j.value("speed", cfg.speed);
    cfg.speeds = j.value("speeds", cfg.speeds);
    cfg.window_half_width = j.value("window_half_width", cfg.window_half_width);
    cfg.output_dir = j.value("output_dir", cfg.output_dir);
    if (j.contains("tolerances")) {
        const json& t = j["tolerances"];
        cfg.exponent_min = t.value("exponent_min", cfg.exponent_min);
        cfg.residual_max = t.value("residual_max", cfg.residual_max);
        cfg.agreement_max = t.value("agreement_max", cfg.agreement_max);
        cfg.stability_factor = t.value("stability_factor", cfg.stability_factor);
    }
    if (j.contains("scattering")) {
        const json& s = j["scattering"];
        cfg.w_max = s.value("w_max", cfg.w_max);
        cfg.n_grid = s.value("n_grid", cfg.n_grid);
        cfg.find_spectrum = s.value("find_spectrum", cfg.find_spectrum);
    }
    if (j.contains("reconstruction")) {
        const json& r = j["reconstruction"];
        cfg.recon_x_min = r.value("x_min", cfg.recon_x_min);
        cfg.recon_x_max = r.value("x_max", cfg.recon_x_max);
        cfg.recon_dx = r.value("dx", cfg.recon_dx);
        cfg.recon_s_max = r.value("s_max", cfg.recon_s_max);
        cfg.recon_n_nodes = r.value("n_nodes", cfg.recon_n_nodes);
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::invalid_argument("config: cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

double fit_decay(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 4) throw std::invalid_argument("fit_decay: need at least 4 points");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(points.size());
    for (const auto& [tau, r] : points) {
        if (!(tau > 0.0) || !(r > 0.0))
            throw std::invalid_argument("fit_decay: points must be strictly positive");
        const double lx = std::log(tau), ly = std::log(r);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return -slope;
}

ScenarioResult run_scenario(const ExperimentConfig& cfg) {
    cfg.validate();
    RunOutput out;
    out.summary = base_summary(cfg);
    out.log(std::string("scenario ") + scenario_name(cfg.scenario));
    out.log("grid [" + fmt(cfg.x_min) + ", " + fmt(cfg.x_max) + "], dx = " + fmt(cfg.dx));
    try {
        switch (cfg.scenario) {
            case Scenario::radiation_asymptotics: run_radiation(cfg, out); break;
            case Scenario::soliton_track: run_soliton_track(cfg, out); break;
            case Scenario::two_soliton_resolution: run_resolution(cfg, out); break;
            case Scenario::roundtrip: run_roundtrip(cfg, out); break;
            case Scenario::b_equality: run_b_equality(cfg, out); break;
        }
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("run_scenario(") + scenario_name(cfg.scenario) +
                                 "): " + e.what());
    }
    out.log(out.summary["pass"].get<bool>() ? "verdict: PASS" : "verdict: FAIL");
    return out.flush(cfg);
}

}  // namespace mtm
