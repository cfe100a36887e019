#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include "sandwalk/sim.hpp"

namespace sandwalk {

/// Integer waypoint-depth vector; each gene k_i is in {1..K}.
struct Genome {
    std::vector<int> k;
    bool operator==(const Genome& o) const { return k == o.k; }
};

/// Everything a fitness evaluation needs besides the genome. The same
/// waypoint contour is mounted on both feet.
struct Scenario {
    const GaitProfile* gait = nullptr;
    const StressMap* map = nullptr;
    WalkerParams params;
    double domain_half_length = 0.13;  // L, m
    double domain_half_height = 0.03;  // H is the full depth of the waypoint box, m
    int waypoints = 11;                // n
    int depth_levels = 10;             // K
};

struct GAConfig {
    int population = 40;
    int generations = 60;
    double crossover_rate = 0.9;
    double mutation_rate = -1.0;  // per-gene; negative selects the 1/n default
    int elites = 2;
    std::uint64_t seed = 1;
    bool parallel = true;

    void validate() const {
        if (population < 2) throw std::invalid_argument("GAConfig: population must be >= 2");
        if (generations < 1) throw std::invalid_argument("GAConfig: generations must be >= 1");
        if (crossover_rate < 0.0 || crossover_rate > 1.0)
            throw std::invalid_argument("GAConfig: crossover_rate must be in [0, 1]");
        if (mutation_rate > 1.0)
            throw std::invalid_argument("GAConfig: mutation_rate must be in [0, 1]");
        if (elites < 0 || elites >= population)
            throw std::invalid_argument("GAConfig: elites must be in [0, population)");
    }
};

/// Build the foot contour a genome encodes.
inline FootContour genome_contour(const Genome& g, const Scenario& sc) {
    FootContour c = from_waypoints(g.k, sc.domain_half_length, sc.domain_half_height,
                                   sc.depth_levels);
    c.width = sc.params.foot_width;
    return c;
}

/// Simulate a genome and assemble its cost. Diverged or infeasible runs are
/// not surfaced as errors; they return a +inf-cost sentinel so the GA treats
/// them as worst fitness.
inline CostBreakdown evaluate(const Genome& g, const Scenario& sc) {
    try {
        const FootContour foot = genome_contour(g, sc);
        const SimTrajectory traj = simulate(*sc.gait, foot, foot, *sc.map, sc.params);
        return metrics(traj);
    } catch (const SimulationError&) {
    } catch (const GaitError&) {
    }
    CostBreakdown worst;
    worst.j_w = std::numeric_limits<double>::infinity();
    return worst;
}

struct GenerationStats {
    int generation = 0;
    double best_j_w = 0;
    double mean_j_w = 0;
};

struct OptimizeResult {
    Genome best;
    CostBreakdown best_cost;
    std::vector<GenerationStats> history;
    std::size_t evaluations = 0;  // distinct simulations run
};

namespace detail {

inline void evaluate_batch(const std::vector<Genome>& todo, const Scenario& sc,
                           std::vector<CostBreakdown>& out, unsigned workers) {
    out.resize(todo.size());
    if (workers <= 1 || todo.size() <= 1) {
        for (std::size_t i = 0; i < todo.size(); ++i) out[i] = evaluate(todo[i], sc);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t j = next.fetch_add(1); j < todo.size(); j = next.fetch_add(1))
            out[j] = evaluate(todo[j], sc);
    };
    std::vector<std::thread> pool;
    const unsigned n = std::min<unsigned>(workers, static_cast<unsigned>(todo.size()));
    pool.reserve(n);
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
}

}  // namespace detail

/// Genetic algorithm over integer genomes: tournament selection (size 3),
/// uniform crossover, per-gene uniform resampling mutation, elitism. Fitness
/// evaluations may run in parallel; genomes are reduced in index order and
/// the RNG is only consumed on the breeding thread, so equal seeds give
/// identical results at any worker count.
inline OptimizeResult optimize(const GAConfig& cfg, const Scenario& sc, unsigned workers = 0) {
    cfg.validate();
    if (sc.gait == nullptr || sc.map == nullptr)
        throw std::invalid_argument("optimize: scenario gait/map not set");
    if (workers == 0)
        workers = cfg.parallel ? std::max(1u, std::thread::hardware_concurrency()) : 1u;
    if (!cfg.parallel) workers = 1;

    const int n = sc.waypoints, K = sc.depth_levels;
    if (n < 2 || K < 1) throw std::invalid_argument("optimize: need waypoints >= 2, depth levels >= 1");
    const double mut = cfg.mutation_rate < 0.0 ? 1.0 / n : cfg.mutation_rate;

    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<int> gene_dist(1, K);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> pick(0, cfg.population - 1);

    std::vector<Genome> pop(cfg.population);
    for (auto& g : pop) {
        g.k.resize(n);
        for (int& v : g.k) v = gene_dist(rng);
    }

    std::map<std::vector<int>, CostBreakdown> cache;
    OptimizeResult result;
    result.best_cost.j_w = std::numeric_limits<double>::infinity();

    std::vector<double> fitness(cfg.population);
    for (int gen = 0; gen < cfg.generations; ++gen) {
        std::vector<Genome> todo;
        for (const auto& g : pop)
            if (!cache.count(g.k) &&
                std::none_of(todo.begin(), todo.end(), [&](const Genome& t) { return t == g; }))
                todo.push_back(g);
        std::vector<CostBreakdown> fresh;
        detail::evaluate_batch(todo, sc, fresh, workers);
        for (std::size_t i = 0; i < todo.size(); ++i) cache.emplace(todo[i].k, fresh[i]);
        result.evaluations += todo.size();

        double mean = 0.0;
        int best_idx = 0;
        for (int i = 0; i < cfg.population; ++i) {
            fitness[i] = cache.at(pop[i].k).j_w;
            mean += fitness[i];
            if (fitness[i] < fitness[best_idx]) best_idx = i;
        }
        result.history.push_back({gen, fitness[best_idx], mean / cfg.population});
        if (fitness[best_idx] < result.best_cost.j_w) {
            result.best = pop[best_idx];
            result.best_cost = cache.at(pop[best_idx].k);
        }
        if (gen + 1 == cfg.generations) break;

        // Breed the next generation.
        std::vector<int> order(cfg.population);
        for (int i = 0; i < cfg.population; ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return fitness[a] < fitness[b]; });
        std::vector<Genome> next;
        next.reserve(cfg.population);
        for (int e = 0; e < cfg.elites; ++e) next.push_back(pop[order[e]]);

        auto tournament = [&]() -> const Genome& {
            int best = pick(rng);
            for (int j = 1; j < 3; ++j) {
                const int c = pick(rng);
                if (fitness[c] < fitness[best]) best = c;
            }
            return pop[best];
        };
        auto mutate = [&](Genome& g) {
            for (int& v : g.k)
                if (unit(rng) < mut) v = gene_dist(rng);
        };
        while (static_cast<int>(next.size()) < cfg.population) {
            Genome a = tournament();
            Genome b = tournament();
            if (unit(rng) < cfg.crossover_rate) {
                for (int i = 0; i < n; ++i)
                    if (unit(rng) < 0.5) std::swap(a.k[i], b.k[i]);
            }
            mutate(a);
            mutate(b);
            next.push_back(std::move(a));
            if (static_cast<int>(next.size()) < cfg.population) next.push_back(std::move(b));
        }
        pop = std::move(next);
    }
    return result;
}

/// Exhaustive reference search for small instances (oracle for GA tests).
inline std::pair<Genome, CostBreakdown> brute_force_best(const Scenario& sc) {
    const int n = sc.waypoints, K = sc.depth_levels;
    Genome g;
    g.k.assign(n, 1);
    Genome best_g = g;
    CostBreakdown best_c;
    best_c.j_w = std::numeric_limits<double>::infinity();
    while (true) {
        const CostBreakdown c = evaluate(g, sc);
        if (c.j_w < best_c.j_w) {
            best_c = c;
            best_g = g;
        }
        int i = n - 1;
        while (i >= 0 && g.k[i] == K) {
            g.k[i] = 1;
            --i;
        }
        if (i < 0) break;
        ++g.k[i];
    }
    return {best_g, best_c};
}

}  // namespace sandwalk
