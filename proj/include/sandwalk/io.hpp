#pragma once

#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sandwalk/foot_contour.hpp"
#include "sandwalk/optimizer.hpp"
#include "sandwalk/sim.hpp"

namespace sandwalk {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Contour JSON: {"label", "width_m", "ankle_offset": [x, z],
//                "vertices": [[x, z], ...]}
// ---------------------------------------------------------------------------

inline nlohmann::json contour_to_json(const FootContour& c) {
    nlohmann::json j;
    j["label"] = c.label;
    j["width_m"] = c.width;
    j["ankle_offset"] = {c.ankle_offset.x, c.ankle_offset.z};
    auto& verts = j["vertices"] = nlohmann::json::array();
    for (const auto& v : c.vertices) verts.push_back({v.x, v.z});
    return j;
}

inline FootContour contour_from_json(const nlohmann::json& j) {
    FootContour c;
    try {
        c.label = j.value("label", std::string{});
        c.width = j.at("width_m").get<double>();
        c.ankle_offset = {j.at("ankle_offset").at(0).get<double>(),
                          j.at("ankle_offset").at(1).get<double>()};
        for (const auto& v : j.at("vertices"))
            c.vertices.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("contour JSON: ") + e.what());
    }
    if (c.vertices.size() < 2) throw IoError("contour JSON: need at least 2 vertices");
    for (std::size_t i = 1; i < c.vertices.size(); ++i)
        if ((c.vertices[i] - c.vertices[i - 1]).norm() <= 1e-9)
            throw IoError("contour JSON: consecutive vertices coincide at index " +
                          std::to_string(i));
    if (!(c.width > 0.0)) throw IoError("contour JSON: width_m must be > 0");
    return c;
}

inline void write_contour(std::ostream& out, const FootContour& c) {
    out << contour_to_json(c).dump(2) << "\n";
}

inline FootContour load_contour(std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("contour JSON: ") + e.what());
    }
    return contour_from_json(j);
}

// ---------------------------------------------------------------------------
// Trajectory CSV: t,x_com,z_com,vx,vz,fx_l,fz_l,fx_r,fz_r,p_l,p_r,w_l,w_r
// Step events are carried as `# step_event=<t>` comment lines. Settle-phase
// rows (t < 0) are not written; the series starts at t = 0.
// ---------------------------------------------------------------------------

inline void write_trajectory_csv(std::ostream& out, const SimTrajectory& traj) {
    char buf[512];
    for (double te : traj.step_events) {
        std::snprintf(buf, sizeof(buf), "# step_event=%.17g\n", te);
        out << buf;
    }
    out << "t,x_com,z_com,vx,vz,fx_l,fz_l,fx_r,fz_r,p_l,p_r,w_l,w_r\n";
    for (const auto& s : traj.samples) {
        std::snprintf(buf, sizeof(buf),
                      "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      s.t, s.r.x, s.r.z, s.v.x, s.v.z, s.f_left.x, s.f_left.z, s.f_right.x,
                      s.f_right.z, s.p_left, s.p_right, s.w_left, s.w_right);
        out << buf;
    }
}

// ---------------------------------------------------------------------------
// Metrics / optimization report JSON
// ---------------------------------------------------------------------------

inline nlohmann::json cost_to_json(const CostBreakdown& c) {
    return {{"x_tf", c.x_tf},   {"z_bar", c.z_bar}, {"w_abs", c.w_abs},
            {"p_max", c.p_max}, {"dvx", c.dvx},     {"j_w", c.j_w}};
}

inline nlohmann::json ga_config_to_json(const GAConfig& cfg) {
    return {{"population", cfg.population},
            {"generations", cfg.generations},
            {"crossover_rate", cfg.crossover_rate},
            {"mutation_rate", cfg.mutation_rate},
            {"elites", cfg.elites},
            {"seed", cfg.seed},
            {"parallel", cfg.parallel}};
}

inline nlohmann::json optimize_report_json(const GAConfig& cfg, const Scenario& sc,
                                           const OptimizeResult& res) {
    nlohmann::json j;
    j["config"] = ga_config_to_json(cfg);
    j["config"]["waypoints"] = sc.waypoints;
    j["config"]["depth_levels"] = sc.depth_levels;
    j["config"]["domain_half_length"] = sc.domain_half_length;
    j["config"]["domain_half_height"] = sc.domain_half_height;
    auto& hist = j["history"] = nlohmann::json::array();
    for (const auto& h : res.history)
        hist.push_back({{"generation", h.generation},
                        {"best_j_w", h.best_j_w},
                        {"mean_j_w", h.mean_j_w}});
    j["evaluations"] = res.evaluations;
    j["best_genome"] = res.best.k;
    j["best_cost"] = cost_to_json(res.best_cost);
    return j;
}

}  // namespace sandwalk
