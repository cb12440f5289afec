#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <queue>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "spreadrank/graph.hpp"
#include "spreadrank/parallel.hpp"

namespace spreadrank {

class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, std::size_t iterations, double residual)
        : std::runtime_error(what + " (iterations=" + std::to_string(iterations) +
                             ", residual=" + std::to_string(residual) + ")"),
          iterations(iterations), residual(residual) {}
    std::size_t iterations;
    double residual;
};

// Per-node scores of one influence measure, plus the parameters it ran with.
struct CentralityVector {
    std::string measure;
    std::map<std::string, double> params;
    std::vector<double> scores;
};

struct MeasureParams {
    double pagerank_alpha = 0.8;
    double pagerank_tol = 1e-10;
    double leaderrank_tol = 1e-10;
    double gdd_p = 0.05;
    double ltc_threshold_factor = 0.7;
    bool harmonic_normalized = true;
    unsigned threads = 0; // 0 = all cores
};

inline CentralityVector degree_centrality(const Graph& g) {
    CentralityVector cv;
    cv.measure = "degree";
    cv.scores.resize(g.node_count());
    for (NodeId v = 0; v < g.node_count(); ++v)
        cv.scores[v] = static_cast<double>(g.out_degree(v));
    return cv;
}

// Sum over reachable nodes of 1/d(v,u), unreachable pairs contributing zero;
// one BFS per source over out-arcs. Normalized mode divides by (n-1).
inline CentralityVector harmonic(const Graph& g, bool normalized = true, unsigned threads = 0) {
    const std::size_t n = g.node_count();
    CentralityVector cv;
    cv.measure = "harmonic";
    cv.params["normalized"] = normalized ? 1.0 : 0.0;
    cv.scores.assign(n, 0.0);

    parallel_for(n, threads, [&](std::size_t src) {
        std::vector<std::int32_t> dist(n, -1);
        std::queue<NodeId> frontier;
        NodeId s = static_cast<NodeId>(src);
        dist[s] = 0;
        frontier.push(s);
        double sum = 0.0;
        while (!frontier.empty()) {
            NodeId u = frontier.front();
            frontier.pop();
            for (NodeId w : g.out_neighbors(u)) {
                if (dist[w] >= 0) continue;
                dist[w] = dist[u] + 1;
                sum += 1.0 / dist[w];
                frontier.push(w);
            }
        }
        cv.scores[src] = (normalized && n > 1) ? sum / static_cast<double>(n - 1) : sum;
    });
    return cv;
}

// Stationary distribution of the damped walk. Sink nodes spread their mass
// uniformly over all nodes. Power iteration to L1 change < tol.
inline CentralityVector pagerank(const Graph& g, double alpha = 0.8, double tol = 1e-10,
                                 std::size_t max_iterations = 10000, unsigned threads = 0) {
    if (g.node_count() == 0) throw GraphError("pagerank on empty graph");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("pagerank alpha must be in (0,1)");
    const std::size_t n = g.node_count();
    const double inv_n = 1.0 / static_cast<double>(n);

    std::vector<double> x(n, inv_n), next(n, 0.0);
    double residual = 0.0;
    std::size_t iter = 0;
    for (; iter < max_iterations; ++iter) {
        double dangling = 0.0;
        for (NodeId u = 0; u < n; ++u)
            if (g.out_degree(u) == 0) dangling += x[u];
        const double base = (1.0 - alpha) * inv_n + alpha * dangling * inv_n;
        // pull form: each node's sum runs over its fixed in-list, so the
        // result does not depend on the thread count
        parallel_for(n, threads, [&](std::size_t vi) {
            NodeId v = static_cast<NodeId>(vi);
            double acc = 0.0;
            for (NodeId u : g.in_neighbors(v)) acc += x[u] / static_cast<double>(g.out_degree(u));
            next[vi] = base + alpha * acc;
        });
        residual = 0.0;
        for (std::size_t i = 0; i < n; ++i) residual += std::abs(next[i] - x[i]);
        x.swap(next);
        if (residual < tol) break;
    }
    if (residual >= tol)
        throw ConvergenceError("pagerank did not converge", iter, residual);

    CentralityVector cv;
    cv.measure = "pagerank";
    cv.params["alpha"] = alpha;
    cv.params["tol"] = tol;
    cv.params["iterations"] = static_cast<double>(iter + 1);
    cv.params["residual"] = residual;
    cv.scores = std::move(x);
    return cv;
}

// Undamped walk on the graph augmented with a ground node linked both ways to
// every other node; the ground node's stationary mass is then shared equally.
// The half-step (lazy) update keeps the iteration convergent on periodic
// graphs without moving the fixed point.
inline CentralityVector leaderrank(const Graph& g, double tol = 1e-10,
                                   std::size_t max_iterations = 50000, unsigned threads = 0) {
    if (g.node_count() == 0) throw GraphError("leaderrank on empty graph");
    const std::size_t n = g.node_count();
    const std::size_t ground = n;

    std::vector<double> x(n + 1, 0.0), next(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) x[i] = 1.0 / static_cast<double>(n);

    double residual = 0.0;
    std::size_t iter = 0;
    for (; iter < max_iterations; ++iter) {
        const double from_ground = x[ground] / static_cast<double>(n);
        parallel_for(n, threads, [&](std::size_t vi) {
            NodeId v = static_cast<NodeId>(vi);
            double acc = from_ground;
            for (NodeId u : g.in_neighbors(v))
                acc += x[u] / static_cast<double>(g.out_degree(u) + 1);
            next[vi] = 0.5 * x[vi] + 0.5 * acc;
        });
        double to_ground = 0.0;
        for (std::size_t u = 0; u < n; ++u)
            to_ground += x[u] / static_cast<double>(g.out_degree(static_cast<NodeId>(u)) + 1);
        next[ground] = 0.5 * x[ground] + 0.5 * to_ground;

        residual = 0.0;
        for (std::size_t i = 0; i <= n; ++i) residual += std::abs(next[i] - x[i]);
        x.swap(next);
        if (residual < tol) break;
    }
    if (residual >= tol)
        throw ConvergenceError("leaderrank did not converge", iter, residual);

    CentralityVector cv;
    cv.measure = "leaderrank";
    cv.params["tol"] = tol;
    cv.params["iterations"] = static_cast<double>(iter + 1);
    cv.params["residual"] = residual;
    cv.scores.assign(n, 0.0);
    const double share = x[ground] / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) cv.scores[i] = x[i] + share;
    return cv;
}

// Peeling decomposition: strip nodes of degree <= k for k = 0, 1, 2, ...,
// labeling each node with the k at which it falls out. Requires symmetric
// arcs (degree means undirected degree).
inline CentralityVector kcore(const Graph& g) {
    if (!g.arc_symmetric()) throw GraphError("kcore requires an arc-symmetric graph");
    const std::size_t n = g.node_count();
    std::vector<std::size_t> deg(n);
    for (NodeId v = 0; v < n; ++v) deg[v] = g.out_degree(v);

    std::vector<std::size_t> core(n, 0);
    std::vector<bool> removed(n, false);
    std::size_t remaining = n;
    std::size_t k = 0;
    std::vector<NodeId> stack;
    while (remaining > 0) {
        stack.clear();
        for (NodeId v = 0; v < n; ++v)
            if (!removed[v] && deg[v] <= k) stack.push_back(v);
        while (!stack.empty()) {
            NodeId v = stack.back();
            stack.pop_back();
            if (removed[v]) continue;
            removed[v] = true;
            core[v] = k;
            --remaining;
            for (NodeId w : g.out_neighbors(v)) {
                if (removed[w]) continue;
                if (--deg[w] <= k) stack.push_back(w);
            }
        }
        ++k;
    }

    CentralityVector cv;
    cv.measure = "kcore";
    cv.scores.resize(n);
    for (std::size_t i = 0; i < n; ++i) cv.scores[i] = static_cast<double>(core[i]);
    return cv;
}

// Generalized degree discount (Wang, Zhang, Zhao, Yi 2016). Greedy selection
// with, for each unselected node v,
//   gdd(v) = d_v - 2 t_v - (d_v - t_v) t_v p + t_v (t_v - 1) p / 2
//            - p * sum over unselected neighbors w of t_w
// where t_v counts v's selected neighbors and p is the spreading parameter.
// Selecting u updates t over N(u) and the neighbor-sum over N(N(u)). The
// output score of each node is its gdd value frozen when it was selected,
// which yields a full ordering when k = n. Ties pick the lowest index.
inline CentralityVector gdd(const Graph& g, double p = 0.05, std::size_t k = 0) {
    if (!(p >= 0.0 && p < 1.0)) throw std::invalid_argument("gdd spreading parameter must be in [0,1)");
    const std::size_t n = g.node_count();
    if (k == 0 || k > n) k = n;

    std::vector<double> deg(n), score(n);
    std::vector<std::size_t> t(n, 0);
    std::vector<double> neighbor_t_sum(n, 0.0); // sum of t_w over unselected neighbors w
    std::vector<bool> selected(n, false);
    for (NodeId v = 0; v < n; ++v) {
        deg[v] = static_cast<double>(g.out_degree(v));
        score[v] = deg[v];
    }
    auto recompute = [&](NodeId v) {
        const double tv = static_cast<double>(t[v]);
        score[v] = deg[v] - 2.0 * tv - (deg[v] - tv) * tv * p + 0.5 * tv * (tv - 1.0) * p -
                   p * neighbor_t_sum[v];
    };

    // lazy max-heap; stale entries are skipped via version counters
    using Entry = std::tuple<double, NodeId, std::uint64_t>; // (score, id, version)
    auto cmp = [](const Entry& a, const Entry& b) {
        if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
        return std::get<1>(a) > std::get<1>(b); // lower id wins ties
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> heap(cmp);
    std::vector<std::uint64_t> version(n, 0);
    for (NodeId v = 0; v < n; ++v) heap.emplace(score[v], v, 0);

    CentralityVector cv;
    cv.measure = "gdd";
    cv.params["p"] = p;
    cv.scores.assign(n, 0.0);
    std::vector<NodeId> touched;

    for (std::size_t step = 0; step < k; ++step) {
        NodeId u = 0;
        for (;;) {
            auto [s, v, ver] = heap.top();
            heap.pop();
            if (!selected[v] && ver == version[v]) {
                u = v;
                break;
            }
        }
        selected[u] = true;
        cv.scores[u] = score[u];

        // u leaves the unselected pool: drop its t from neighbor sums
        for (NodeId v : g.out_neighbors(u))
            if (!selected[v]) neighbor_t_sum[v] -= static_cast<double>(t[u]);

        touched.clear();
        for (NodeId v : g.out_neighbors(u)) {
            if (selected[v]) continue;
            ++t[v];
            touched.push_back(v);
            for (NodeId w : g.out_neighbors(v)) {
                if (selected[w]) continue;
                neighbor_t_sum[w] += 1.0;
                touched.push_back(w);
            }
        }
        std::sort(touched.begin(), touched.end());
        touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
        for (NodeId v : touched) {
            recompute(v);
            heap.emplace(score[v], v, ++version[v]);
        }
    }
    // nodes beyond the selection budget keep their current discounted score
    for (NodeId v = 0; v < n; ++v)
        if (!selected[v]) cv.scores[v] = score[v];
    return cv;
}

// Deterministic cascade used by linear threshold centrality: unit arc
// weights, threshold = factor * degree of the target, activation once the
// count of active in-neighbors reaches the threshold. Seeds are v and its
// out-neighbors. Returns the number of nodes active at the fixpoint.
inline std::size_t ltc_cascade_size(const Graph& g, NodeId v, double threshold_factor) {
    const std::size_t n = g.node_count();
    std::vector<std::size_t> active_in(n, 0);
    std::vector<bool> active(n, false);
    std::vector<NodeId> frontier;

    auto activate = [&](NodeId w) {
        active[w] = true;
        frontier.push_back(w);
    };
    activate(v);
    for (NodeId w : g.out_neighbors(v))
        if (!active[w]) activate(w);

    std::size_t head = 0;
    while (head < frontier.size()) {
        NodeId u = frontier[head++];
        for (NodeId w : g.out_neighbors(u)) {
            if (active[w]) continue;
            ++active_in[w];
            const double threshold = threshold_factor * static_cast<double>(g.out_degree(w));
            if (static_cast<double>(active_in[w]) >= threshold) activate(w);
        }
    }
    return frontier.size();
}

// Fraction of the network that v together with its out-neighbors activates
// under the deterministic unit-weight cascade.
inline CentralityVector ltc(const Graph& g, double threshold_factor = 0.7, unsigned threads = 0) {
    if (!(threshold_factor > 0.0 && threshold_factor <= 1.0))
        throw std::invalid_argument("ltc threshold factor must be in (0,1]");
    const std::size_t n = g.node_count();
    CentralityVector cv;
    cv.measure = "ltc";
    cv.params["threshold_factor"] = threshold_factor;
    cv.scores.assign(n, 0.0);

    parallel_for(n, threads, [&](std::size_t vi) {
        std::size_t reached = ltc_cascade_size(g, static_cast<NodeId>(vi), threshold_factor);
        cv.scores[vi] = static_cast<double>(reached) / static_cast<double>(n);
    });
    return cv;
}

inline const std::vector<std::string>& measure_order() {
    static const std::vector<std::string> order = {
        "pagerank", "kcore", "leaderrank", "harmonic", "gdd", "ltc", "degree"};
    return order;
}

inline CentralityVector compute_measure(const Graph& g, const std::string& name,
                                        const MeasureParams& params = {}) {
    if (name == "degree") return degree_centrality(g);
    if (name == "harmonic") return harmonic(g, params.harmonic_normalized, params.threads);
    if (name == "pagerank") return pagerank(g, params.pagerank_alpha, params.pagerank_tol, 10000, params.threads);
    if (name == "leaderrank") return leaderrank(g, params.leaderrank_tol, 50000, params.threads);
    if (name == "kcore") return kcore(g);
    if (name == "gdd") return gdd(g, params.gdd_p);
    if (name == "ltc") return ltc(g, params.ltc_threshold_factor, params.threads);
    throw std::invalid_argument("unknown measure: " + name);
}

// All seven measures with their default parameters, in a fixed order.
inline std::vector<CentralityVector> all_measures(const Graph& g, const MeasureParams& params = {}) {
    std::vector<CentralityVector> out;
    out.reserve(measure_order().size());
    for (const auto& name : measure_order()) out.push_back(compute_measure(g, name, params));
    return out;
}

} // namespace spreadrank
