#pragma once

#include <chrono>
#include <ctime>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sandwalk/io.hpp"
#include "sandwalk/optimizer.hpp"
#include "sandwalk/sim.hpp"

namespace sandwalk {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Fully resolved run configuration. Sources are encoded as single strings:
/// map is "test:<a>", "generic" or a CSV path; gait is "synth" or a CSV path;
/// a foot is a canonical shape name, "genome:k1,k2,...", or a contour JSON
/// path. Flat keys in a JSON config file mirror these fields one-to-one.
struct RunConfig {
    std::string map = "test:2e5";
    double zeta = 1.0;

    std::string gait = "synth";
    double step_length = 0.5;     // m
    double step_period = 0.6;     // s
    double lift_height = 0.05;    // m
    int n_steps = 3;
    double hip_height = 0.85;     // m

    std::string foot = "rectangle";
    std::string foot_left, foot_right;  // optional per-foot overrides
    double contact_length = 0.26;       // m, canonical shapes
    double ankle_height = 0.03;         // m, ankle above the contour's lowest point

    WalkerParams params;

    double domain_half_length = 0.13;  // L
    double domain_half_height = 0.03;  // H
    int waypoints = 11;                // n
    int depth_levels = 10;             // K

    GAConfig ga;

    std::vector<std::string> shapes{"ellipse", "rectangle", "circle", "reversed_L", "triangle"};
    std::string out_dir = "out";
};

// ---------------------------------------------------------------------------
// Config file
// ---------------------------------------------------------------------------

inline RunConfig run_config_from_json(const nlohmann::json& j) {
    RunConfig c;
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("map", c.map);
    get("zeta", c.zeta);
    get("gait", c.gait);
    get("step_length", c.step_length);
    get("step_period", c.step_period);
    get("lift_height", c.lift_height);
    get("n_steps", c.n_steps);
    get("hip_height", c.hip_height);
    get("foot", c.foot);
    get("foot_left", c.foot_left);
    get("foot_right", c.foot_right);
    get("contact_length", c.contact_length);
    get("ankle_height", c.ankle_height);
    get("mass", c.params.mass);
    get("l1", c.params.l1);
    get("l2", c.params.l2);
    get("gravity", c.params.gravity);
    get("dt", c.params.dt);
    get("tf", c.params.t_f);
    get("foot_width", c.params.foot_width);
    get("plates", c.params.plate_count);
    get("settle_time", c.params.settle_time);
    get("log_stride", c.params.log_stride);
    get("L", c.domain_half_length);
    get("H", c.domain_half_height);
    get("waypoints", c.waypoints);
    get("depth_levels", c.depth_levels);
    get("population", c.ga.population);
    get("generations", c.ga.generations);
    get("crossover_rate", c.ga.crossover_rate);
    get("mutation_rate", c.ga.mutation_rate);
    get("elites", c.ga.elites);
    get("seed", c.ga.seed);
    get("parallel", c.ga.parallel);
    get("shapes", c.shapes);
    get("out", c.out_dir);
    return c;
}

inline RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file '" + path + "': " + e.what());
    }
    try {
        return run_config_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file '" + path + "': " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Source resolution
// ---------------------------------------------------------------------------

inline StressMap resolve_map(const RunConfig& cfg) {
    StressMap m;
    if (cfg.map.rfind("test:", 0) == 0) {
        double a = 0.0;
        try {
            a = std::stod(cfg.map.substr(5));
        } catch (const std::exception&) {
            throw ConfigError("bad test map magnitude in '" + cfg.map + "'");
        }
        m = test_map(a);
    } else if (cfg.map == "generic") {
        m = generic_stress_map();
    } else {
        std::ifstream in(cfg.map);
        if (!in) throw ConfigError("cannot open stress map file '" + cfg.map + "'");
        m = load_stress_map(in);
    }
    if (!(cfg.zeta > 0.0)) throw ConfigError("zeta must be > 0");
    m.zeta = cfg.zeta;
    return m;
}

inline GaitProfile resolve_gait(const RunConfig& cfg) {
    const double reach = cfg.params.l1 + cfg.params.l2;
    if (cfg.gait == "synth")
        return synth_gait(cfg.step_length, cfg.step_period, cfg.lift_height, cfg.n_steps,
                          cfg.hip_height, reach);
    std::ifstream in(cfg.gait);
    if (!in) throw ConfigError("cannot open gait file '" + cfg.gait + "'");
    return load_gait(in, reach);
}

namespace detail {

inline bool is_canonical_name(const std::string& s) {
    return s == "ellipse" || s == "rectangle" || s == "circle" || s == "reversed_L" ||
           s == "reversed-l" || s == "reversed_l" || s == "triangle";
}

}  // namespace detail

/// Resolve one foot source. Canonical and genome feet get their ankle placed
/// `ankle_height` above the lowest contour point (so shapes of different
/// construction depth stand at comparable hip heights); contour files keep
/// their authored ankle offset and width.
inline FootContour resolve_foot(const RunConfig& cfg, const std::string& source) {
    FootContour c;
    if (detail::is_canonical_name(source)) {
        c = make_canonical(foot_shape_from_name(source), cfg.contact_length);
        c.width = cfg.params.foot_width;
        c.ankle_offset = {0.0, c.min_z() + cfg.ankle_height};
    } else if (source.rfind("genome:", 0) == 0) {
        std::vector<int> k;
        std::stringstream ss(source.substr(7));
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            try {
                k.push_back(std::stoi(tok));
            } catch (const std::exception&) {
                throw ConfigError("bad genome entry '" + tok + "' in foot source");
            }
        }
        try {
            c = from_waypoints(k, cfg.domain_half_length, cfg.domain_half_height,
                               cfg.depth_levels);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("genome foot: ") + e.what());
        }
        c.width = cfg.params.foot_width;
        c.ankle_offset = {0.0, c.min_z() + cfg.ankle_height};
    } else {
        std::ifstream in(source);
        if (!in) throw ConfigError("cannot open contour file '" + source + "'");
        c = load_contour(in);
    }
    return c;
}

inline std::pair<FootContour, FootContour> resolve_feet(const RunConfig& cfg) {
    const std::string left = cfg.foot_left.empty() ? cfg.foot : cfg.foot_left;
    const std::string right = cfg.foot_right.empty() ? cfg.foot : cfg.foot_right;
    return {resolve_foot(cfg, left), resolve_foot(cfg, right)};
}

// ---------------------------------------------------------------------------
// Output helpers
// ---------------------------------------------------------------------------

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot write '" + p.string() + "'");
    return out;
}

/// Timestamps and host details go only to this sidecar, keeping report and
/// CSV bodies byte-deterministic.
inline void append_run_log(const std::filesystem::path& dir, const std::string& command,
                           const std::string& detail_line) {
    std::ofstream log(dir / "run.log", std::ios::app);
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[64];
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%S", std::gmtime(&now));
    log << stamp << "Z " << command << " " << detail_line << "\n";
}

inline unsigned env_workers() {
    const char* w = std::getenv("SANDWALK_WORKERS");
    if (w == nullptr) return 0;
    const long v = std::strtol(w, nullptr, 10);
    return v > 0 ? static_cast<unsigned>(v) : 0;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

inline int cmd_simulate(const RunConfig& cfg, std::ostream& msg = std::cout) {
    cfg.params.validate();
    const StressMap map = resolve_map(cfg);
    const GaitProfile gait = resolve_gait(cfg);
    const auto [left, right] = resolve_feet(cfg);

    const SimTrajectory traj = simulate(gait, left, right, map, cfg.params);
    const CostBreakdown cost = metrics(traj);

    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    {
        auto out = detail::open_out(dir / "trajectory.csv");
        write_trajectory_csv(out, traj);
    }
    {
        auto out = detail::open_out(dir / "metrics.json");
        out << cost_to_json(cost).dump(2) << "\n";
    }
    detail::append_run_log(dir, "simulate", "map=" + cfg.map + " foot=" + cfg.foot);

    char line[256];
    std::snprintf(line, sizeof(line),
                  "x_tf=%.4f m  z_bar=%.4f m  |W|=%.3f J  p_max=%.3f W  dvx=%.4f m/s  J_W=%.6g",
                  cost.x_tf, cost.z_bar, cost.w_abs, cost.p_max, cost.dvx, cost.j_w);
    msg << line << "\n";
    return 0;
}

inline const std::vector<std::string>& canonical_shape_names() {
    static const std::vector<std::string> names{"ellipse", "rectangle", "circle", "reversed_L",
                                                "triangle"};
    return names;
}

inline int cmd_compare_shapes(const RunConfig& cfg, std::ostream& msg = std::cout) {
    cfg.params.validate();
    const std::vector<std::string>& shapes = cfg.shapes;
    if (shapes.empty()) throw ConfigError("compare-shapes: empty shape list");

    const StressMap map = resolve_map(cfg);
    const GaitProfile gait = resolve_gait(cfg);

    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);

    nlohmann::json rows = nlohmann::json::array();
    auto csv = detail::open_out(dir / "comparison.csv");
    csv << "shape,contact_length,x_tf,z_bar,w_abs_left,w_abs_right,w_abs,p_max,dvx,j_w\n";
    char buf[512];
    for (const auto& name : shapes) {
        const FootContour foot = resolve_foot(cfg, name);
        const SimTrajectory traj = simulate(gait, foot, foot, map, cfg.params);
        const CostBreakdown cost = metrics(traj);
        const auto& last = traj.samples.back();
        {
            auto out = detail::open_out(dir / ("traj_" + name + ".csv"));
            write_trajectory_csv(out, traj);
        }
        std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      name.c_str(), cfg.contact_length, cost.x_tf, cost.z_bar,
                      std::abs(last.w_left), std::abs(last.w_right), cost.w_abs, cost.p_max,
                      cost.dvx, cost.j_w);
        csv << buf;
        nlohmann::json row = cost_to_json(cost);
        row["shape"] = name;
        row["contact_length"] = cfg.contact_length;
        row["w_abs_left"] = std::abs(last.w_left);
        row["w_abs_right"] = std::abs(last.w_right);
        rows.push_back(row);
        msg << name << ": j_w=" << cost.j_w << " x_tf=" << cost.x_tf << "\n";
    }
    {
        auto out = detail::open_out(dir / "comparison.json");
        out << rows.dump(2) << "\n";
    }
    detail::append_run_log(dir, "compare-shapes", "map=" + cfg.map);
    return 0;
}

inline int cmd_optimize(const RunConfig& cfg, std::ostream& msg = std::cout) {
    cfg.params.validate();
    cfg.ga.validate();
    if (cfg.depth_levels < 1) throw ConfigError("depth_levels (K) must be >= 1");
    if (cfg.waypoints < 2) throw ConfigError("waypoints (n) must be >= 2");
    const StressMap map = resolve_map(cfg);
    const GaitProfile gait = resolve_gait(cfg);

    Scenario sc;
    sc.gait = &gait;
    sc.map = &map;
    sc.params = cfg.params;
    sc.domain_half_length = cfg.domain_half_length;
    sc.domain_half_height = cfg.domain_half_height;
    sc.waypoints = cfg.waypoints;
    sc.depth_levels = cfg.depth_levels;

    const OptimizeResult res = optimize(cfg.ga, sc, detail::env_workers());

    double incumbent = std::numeric_limits<double>::infinity();
    for (const auto& h : res.history) {
        incumbent = std::min(incumbent, h.best_j_w);
        msg << "gen " << h.generation << ": incumbent j_w=" << incumbent << "\n";
    }

    FootContour best = genome_contour(res.best, sc);
    best.ankle_offset = {0.0, best.min_z() + cfg.ankle_height};

    nlohmann::json report = optimize_report_json(cfg.ga, sc, res);
    report["config"]["map"] = cfg.map;
    report["config"]["zeta"] = cfg.zeta;
    report["config"]["gait"] = cfg.gait;
    report["config"]["dt"] = cfg.params.dt;
    report["config"]["tf"] = cfg.params.t_f;
    report["config"]["plates"] = cfg.params.plate_count;
    report["config"]["foot_width"] = cfg.params.foot_width;
    report["best_contour"] = contour_to_json(best);

    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    {
        auto out = detail::open_out(dir / "report.json");
        out << report.dump(2) << "\n";
    }
    {
        auto out = detail::open_out(dir / "best_contour.json");
        write_contour(out, best);
    }
    detail::append_run_log(dir, "optimize", "seed=" + std::to_string(cfg.ga.seed));
    msg << "best j_w=" << res.best_cost.j_w << " genome=";
    for (std::size_t i = 0; i < res.best.k.size(); ++i)
        msg << (i ? "," : "") << res.best.k[i];
    msg << "\n";
    return 0;
}

/// Write the resolved stress map as a CSV template. `cfg.out_dir` is the
/// output file path for this command.
inline int cmd_export_map_template(const RunConfig& cfg, std::ostream& msg = std::cout) {
    StressMap m = resolve_map(cfg);
    const std::filesystem::path p(cfg.out_dir);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    auto out = detail::open_out(p);
    write_stress_map(out, m);
    msg << "wrote " << p.string() << " (" << m.rows() << "x" << m.cols() << " grid)\n";
    return 0;
}

}  // namespace sandwalk
