#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "spreadrank/graph.hpp"
#include "spreadrank/io.hpp"
#include "spreadrank/parallel.hpp"
#include "spreadrank/rng.hpp"

namespace spreadrank {

struct DiffusionConfig {
    std::uint64_t runs = 5000;
    std::uint64_t master_seed = 0;
    unsigned threads = 0; // 0 = all cores

    void validate() const {
        if (runs < 1) throw std::invalid_argument("diffusion runs must be >= 1");
    }
};

// Monte Carlo estimate of one seed set's spread, in percent of all nodes.
struct SpreadStats {
    double mean_spread_pct = 0.0;
    double std_error_pct = 0.0;
    std::uint64_t runs = 0;
};

inline void validate_seed_set(const Graph& g, const SeedSet& seeds) {
    if (seeds.members.empty()) throw std::invalid_argument("seed set '" + seeds.id + "' is empty");
    std::vector<bool> seen(g.node_count(), false);
    for (NodeId v : seeds.members) {
        if (v >= g.node_count())
            throw std::invalid_argument("seed set '" + seeds.id + "' has an out-of-range node");
        if (seen[v]) throw std::invalid_argument("seed set '" + seeds.id + "' has a repeated node");
        seen[v] = true;
    }
}

// One linear-threshold cascade, fully determined by rng_seed:
//  1. every node draws a threshold uniform in [0,1); every node with entering
//     arcs draws one uniform weight per entering arc, normalized to sum 1;
//  2. the seed nodes activate;
//  3. a node activates as soon as the weights of entering arcs from active
//     nodes sum to strictly more than its threshold, iterated to fixpoint;
//  4. the spread is the percentage of active nodes, seeds included.
// Propagation is frontier-based: only freshly activated nodes push weight.
inline double lt_single_run(const Graph& g, std::span<const NodeId> seeds, std::uint64_t rng_seed) {
    const std::size_t n = g.node_count();
    const std::size_t m = g.arc_count();
    Rng rng(rng_seed);

    std::vector<double> threshold(n);
    for (std::size_t v = 0; v < n; ++v) threshold[v] = rng.next_u01();

    // weights indexed by in-CSR slot, normalized per target node
    std::vector<double> weight(m);
    for (NodeId v = 0; v < n; ++v) {
        const std::size_t lo = g.in_offset(v);
        const std::size_t deg = g.in_degree(v);
        if (deg == 0) continue;
        double sum = 0.0;
        for (std::size_t j = 0; j < deg; ++j) {
            weight[lo + j] = rng.next_u01();
            sum += weight[lo + j];
        }
        if (sum <= 0.0) {
            // all-zero draw: fall back to equal weights
            for (std::size_t j = 0; j < deg; ++j) weight[lo + j] = 1.0 / static_cast<double>(deg);
        } else {
            for (std::size_t j = 0; j < deg; ++j) weight[lo + j] /= sum;
        }
    }

    std::vector<bool> active(n, false);
    std::vector<double> marked_weight(n, 0.0);
    std::vector<NodeId> frontier;
    frontier.reserve(n);
    for (NodeId v : seeds) {
        if (v >= n) throw std::invalid_argument("seed node out of range");
        if (!active[v]) {
            active[v] = true;
            frontier.push_back(v);
        }
    }

    std::size_t head = 0;
    while (head < frontier.size()) {
        NodeId u = frontier[head++];
        const auto neighbors = g.out_neighbors(u);
        for (std::size_t j = 0; j < neighbors.size(); ++j) {
            NodeId w = neighbors[j];
            if (active[w]) continue;
            marked_weight[w] += weight[g.out_arc_to_in_slot(u, j)];
            if (marked_weight[w] > threshold[w]) {
                active[w] = true;
                frontier.push_back(w);
            }
        }
    }

#ifndef NDEBUG
    // fixpoint check: no inactive node may have strictly exceeding marked mass
    for (NodeId v = 0; v < n; ++v) {
        if (active[v]) continue;
        double s = 0.0;
        const std::size_t lo = g.in_offset(v);
        const auto sources = g.in_neighbors(v);
        for (std::size_t j = 0; j < sources.size(); ++j)
            if (active[sources[j]]) s += weight[lo + j];
        assert(s <= threshold[v] + 1e-9);
    }
#endif

    return 100.0 * static_cast<double>(frontier.size()) / static_cast<double>(n);
}

inline std::uint64_t run_seed(std::uint64_t master_seed, const std::string& set_id,
                              std::uint64_t run_index) {
    return derive_seed(master_seed, fnv1a64(set_id), run_index);
}

// Mean and standard error over cfg.runs independent cascades. Run i draws its
// generator seed from (master seed, set id, i), so results do not depend on
// the thread count or on which other sets are simulated alongside.
inline SpreadStats lt_monte_carlo(const Graph& g, const SeedSet& seeds, const DiffusionConfig& cfg) {
    cfg.validate();
    validate_seed_set(g, seeds);

    std::vector<double> spread(cfg.runs);
    parallel_for(cfg.runs, cfg.threads, [&](std::size_t i) {
        spread[i] = lt_single_run(g, seeds.members, run_seed(cfg.master_seed, seeds.id, i));
    });

    double mean = 0.0;
    for (double s : spread) mean += s;
    mean /= static_cast<double>(cfg.runs);
    double ss = 0.0;
    for (double s : spread) ss += (s - mean) * (s - mean);
    const double stddev =
        cfg.runs > 1 ? std::sqrt(ss / static_cast<double>(cfg.runs - 1)) : 0.0;

    SpreadStats stats;
    stats.mean_spread_pct = mean;
    stats.std_error_pct = stddev / std::sqrt(static_cast<double>(cfg.runs));
    stats.runs = cfg.runs;
    return stats;
}

// Per-set results identical to individual lt_monte_carlo calls.
inline std::vector<SpreadStats> lt_monte_carlo_batch(const Graph& g,
                                                     const std::vector<SeedSet>& sets,
                                                     const DiffusionConfig& cfg) {
    cfg.validate();
    std::vector<SpreadStats> out(sets.size());
    for (std::size_t i = 0; i < sets.size(); ++i) out[i] = lt_monte_carlo(g, sets[i], cfg);
    return out;
}

inline std::string spread_csv(const std::vector<SeedSet>& sets,
                              const std::vector<SpreadStats>& stats) {
    std::string out = "set_id,mean_spread_pct,std_error_pct,runs\n";
    for (std::size_t i = 0; i < sets.size(); ++i) {
        out += sets[i].id + "," + format_sig6(stats[i].mean_spread_pct) + "," +
               format_sig6(stats[i].std_error_pct) + "," + std::to_string(stats[i].runs) + "\n";
    }
    return out;
}

} // namespace spreadrank
