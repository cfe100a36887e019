// Command-line driver: simulate a walker on granular terrain, compare the
// canonical foot shapes, optimize a waypoint foot contour, or export a
// stress-map CSV template. Flags override values from --config <file.json>;
// flag names mirror the flat config keys.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sandwalk/runner.hpp"

namespace {

struct FlagBindings {
    std::string config_path;
    sandwalk::RunConfig cfg;

    std::string map, gait, foot, foot_left, foot_right, out, shapes_csv;
    double zeta = 0, dt = 0, tf = 0, mass = 0, foot_width = 0, settle = 0, log_stride = 0;
    double step_length = 0, step_period = 0, lift_height = 0, hip_height = 0;
    double contact_length = 0, ankle_height = 0, domain_L = 0, domain_H = 0;
    double crossover = 0, mutation = 0;
    int n_steps = 0, plates = 0, waypoints = 0, depth_levels = 0;
    int population = 0, generations = 0, elites = 0;
    std::uint64_t seed = 0;
};

void add_common_flags(CLI::App* cmd, FlagBindings& b) {
    cmd->add_option("--config", b.config_path, "JSON config file (flags override its keys)");
    cmd->add_option("--map", b.map, "stress map: test:<a>, generic, or CSV path");
    cmd->add_option("--zeta", b.zeta, "material scale factor (>0)");
    cmd->add_option("--gait", b.gait, "gait source: synth or CSV path");
    cmd->add_option("--dt", b.dt, "integration step, s");
    cmd->add_option("--tf", b.tf, "terminal time, s");
    cmd->add_option("--seed", b.seed, "random seed");
    cmd->add_option("--out", b.out, "output directory (file path for export-map-template)");
    cmd->add_option("--mass", b.mass, "walker mass, kg");
    cmd->add_option("--foot-width", b.foot_width, "out-of-plane foot width, m");
    cmd->add_option("--plates", b.plates, "plate count N");
    cmd->add_option("--settle", b.settle, "settle time before the gait, s");
    cmd->add_option("--log-stride", b.log_stride, "trajectory logging stride, s");
    cmd->add_option("--step-length", b.step_length, "synth gait step length, m");
    cmd->add_option("--step-period", b.step_period, "synth gait step period, s");
    cmd->add_option("--lift-height", b.lift_height, "synth gait swing lift, m");
    cmd->add_option("--n-steps", b.n_steps, "synth gait step count");
    cmd->add_option("--hip-height", b.hip_height, "synth gait hip height, m");
    cmd->add_option("--contact-length", b.contact_length, "canonical shape contact length, m");
    cmd->add_option("--ankle-height", b.ankle_height, "ankle height above contour low point, m");
}

void apply_overrides(const CLI::App* cmd, FlagBindings& b) {
    auto have = [&](const char* name) { return cmd->count(name) > 0; };
    if (have("--map")) b.cfg.map = b.map;
    if (have("--zeta")) b.cfg.zeta = b.zeta;
    if (have("--gait")) b.cfg.gait = b.gait;
    if (have("--dt")) b.cfg.params.dt = b.dt;
    if (have("--tf")) b.cfg.params.t_f = b.tf;
    if (have("--seed")) b.cfg.ga.seed = b.seed;
    if (have("--out")) b.cfg.out_dir = b.out;
    if (have("--mass")) b.cfg.params.mass = b.mass;
    if (have("--foot-width")) b.cfg.params.foot_width = b.foot_width;
    if (have("--plates")) b.cfg.params.plate_count = static_cast<std::size_t>(b.plates);
    if (have("--settle")) b.cfg.params.settle_time = b.settle;
    if (have("--log-stride")) b.cfg.params.log_stride = b.log_stride;
    if (have("--step-length")) b.cfg.step_length = b.step_length;
    if (have("--step-period")) b.cfg.step_period = b.step_period;
    if (have("--lift-height")) b.cfg.lift_height = b.lift_height;
    if (have("--n-steps")) b.cfg.n_steps = b.n_steps;
    if (have("--hip-height")) b.cfg.hip_height = b.hip_height;
    if (have("--contact-length")) b.cfg.contact_length = b.contact_length;
    if (have("--ankle-height")) b.cfg.ankle_height = b.ankle_height;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sandwalk: 2D bipedal walking on granular terrain (RFT) with "
                 "foot-contour optimization"};
    app.require_subcommand(1);

    FlagBindings b;

    CLI::App* sim = app.add_subcommand("simulate", "run one walking simulation");
    add_common_flags(sim, b);
    sim->add_option("--foot", b.foot, "foot: shape name, genome:k1,k2,..., or contour JSON path");
    sim->add_option("--foot-left", b.foot_left, "left foot override");
    sim->add_option("--foot-right", b.foot_right, "right foot override");

    CLI::App* cmp = app.add_subcommand("compare-shapes", "simulate the canonical foot shapes");
    add_common_flags(cmp, b);
    cmp->add_option("--shapes", b.shapes_csv, "comma-separated shape list (default: all five)");

    CLI::App* opt = app.add_subcommand("optimize", "genetic search over waypoint foot contours");
    add_common_flags(opt, b);
    opt->add_option("--pop", b.population, "GA population size");
    opt->add_option("--gens", b.generations, "GA generation count");
    opt->add_option("--crossover", b.crossover, "GA crossover rate");
    opt->add_option("--mutation", b.mutation, "GA per-gene mutation rate");
    opt->add_option("--elites", b.elites, "GA elite count");
    opt->add_option("--waypoints", b.waypoints, "waypoint count n");
    opt->add_option("--depth-levels", b.depth_levels, "depth levels K");
    opt->add_option("-L,--domain-half-length", b.domain_L, "foot domain half length, m");
    opt->add_option("-H,--domain-half-height", b.domain_H, "foot domain depth, m");

    CLI::App* exp = app.add_subcommand("export-map-template",
                                       "write the resolved stress map as a CSV template");
    add_common_flags(exp, b);

    CLI11_PARSE(app, argc, argv);
    CLI::App* cmd = app.get_subcommands().front();

    try {
        b.cfg = b.config_path.empty() ? sandwalk::RunConfig{}
                                      : sandwalk::load_run_config(b.config_path);
        apply_overrides(cmd, b);
        if (cmd == sim) {
            if (cmd->count("--foot")) b.cfg.foot = b.foot;
            if (cmd->count("--foot-left")) b.cfg.foot_left = b.foot_left;
            if (cmd->count("--foot-right")) b.cfg.foot_right = b.foot_right;
            return sandwalk::cmd_simulate(b.cfg);
        }
        if (cmd == cmp) {
            if (cmd->count("--shapes")) {
                b.cfg.shapes.clear();
                std::stringstream ss(b.shapes_csv);
                std::string tok;
                while (std::getline(ss, tok, ','))
                    if (!tok.empty()) b.cfg.shapes.push_back(tok);
            }
            return sandwalk::cmd_compare_shapes(b.cfg);
        }
        if (cmd == opt) {
            if (cmd->count("--pop")) b.cfg.ga.population = b.population;
            if (cmd->count("--gens")) b.cfg.ga.generations = b.generations;
            if (cmd->count("--crossover")) b.cfg.ga.crossover_rate = b.crossover;
            if (cmd->count("--mutation")) b.cfg.ga.mutation_rate = b.mutation;
            if (cmd->count("--elites")) b.cfg.ga.elites = b.elites;
            if (cmd->count("--waypoints")) b.cfg.waypoints = b.waypoints;
            if (cmd->count("--depth-levels")) b.cfg.depth_levels = b.depth_levels;
            if (cmd->count("--domain-half-length")) b.cfg.domain_half_length = b.domain_L;
            if (cmd->count("--domain-half-height")) b.cfg.domain_half_height = b.domain_H;
            return sandwalk::cmd_optimize(b.cfg);
        }
        return sandwalk::cmd_export_map_template(b.cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
