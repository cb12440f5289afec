#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace spreadrank {

using NodeId = std::uint32_t;

class GraphError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Immutable directed graph in CSR form with dense 0-based node ids and an
// optional label table. Undirected inputs are stored as symmetric arc pairs.
// No self-loops, no duplicate arcs.
class Graph {
public:
    Graph() = default;

    // arcs must be free of self-loops and duplicates; node ids < node_count.
    Graph(std::size_t node_count, std::vector<std::pair<NodeId, NodeId>> arcs,
          std::vector<std::string> labels = {})
        : n_(node_count), labels_(std::move(labels)) {
        if (!labels_.empty() && labels_.size() != n_)
            throw GraphError("label table size does not match node count");
        build(arcs);
    }

    std::size_t node_count() const { return n_; }
    std::size_t arc_count() const { return out_targets_.size(); }

    std::span<const NodeId> out_neighbors(NodeId v) const {
        check(v);
        return {out_targets_.data() + out_offsets_[v], out_offsets_[v + 1] - out_offsets_[v]};
    }
    std::span<const NodeId> in_neighbors(NodeId v) const {
        check(v);
        return {in_sources_.data() + in_offsets_[v], in_offsets_[v + 1] - in_offsets_[v]};
    }

    std::size_t out_degree(NodeId v) const {
        check(v);
        return out_offsets_[v + 1] - out_offsets_[v];
    }
    std::size_t in_degree(NodeId v) const {
        check(v);
        return in_offsets_[v + 1] - in_offsets_[v];
    }

    // Offset of v's in-arc block; the diffusion engine indexes per-arc state
    // by in-CSR position.
    std::size_t in_offset(NodeId v) const { return in_offsets_[v]; }

    // For the j-th out-arc of u (CSR order), the absolute in-CSR slot of that
    // arc. Lets a frontier push look up the arc's weight in O(1).
    std::size_t out_arc_to_in_slot(NodeId u, std::size_t j) const {
        return out_to_in_slot_[out_offsets_[u] + j];
    }

    bool has_arc(NodeId u, NodeId v) const {
        auto nb = out_neighbors(u);
        return std::binary_search(nb.begin(), nb.end(), v);
    }

    // (u,v) present iff (v,u) present, for every arc
    bool arc_symmetric() const {
        for (NodeId u = 0; u < n_; ++u)
            for (NodeId v : out_neighbors(u))
                if (!has_arc(v, u)) return false;
        return true;
    }

    bool has_labels() const { return !labels_.empty(); }

    const std::string& label(NodeId v) const {
        check(v);
        static const std::string empty;
        return labels_.empty() ? empty : labels_[v];
    }

    // Label of v, or its decimal index when the graph is unlabeled.
    std::string display_label(NodeId v) const {
        if (!labels_.empty()) return labels_[v];
        return std::to_string(v);
    }

    NodeId node_by_label(const std::string& label) const {
        auto it = label_index_.find(label);
        if (it == label_index_.end()) throw GraphError("unknown node label: " + label);
        return it->second;
    }

    bool contains_label(const std::string& label) const {
        return label_index_.find(label) != label_index_.end();
    }

private:
    void check(NodeId v) const {
        if (v >= n_) throw GraphError("node id " + std::to_string(v) + " out of range");
    }

    void build(std::vector<std::pair<NodeId, NodeId>>& arcs) {
        for (auto [u, v] : arcs) {
            if (u >= n_ || v >= n_) throw GraphError("arc endpoint out of range");
            if (u == v) throw GraphError("self-loop in arc list");
        }
        // canonical adjacency order: sorted by (source, target)
        std::sort(arcs.begin(), arcs.end());
        if (std::adjacent_find(arcs.begin(), arcs.end()) != arcs.end())
            throw GraphError("duplicate arc in arc list");

        const std::size_t m = arcs.size();
        out_offsets_.assign(n_ + 1, 0);
        in_offsets_.assign(n_ + 1, 0);
        for (auto [u, v] : arcs) {
            ++out_offsets_[u + 1];
            ++in_offsets_[v + 1];
        }
        for (std::size_t i = 0; i < n_; ++i) {
            out_offsets_[i + 1] += out_offsets_[i];
            in_offsets_[i + 1] += in_offsets_[i];
        }
        out_targets_.resize(m);
        in_sources_.resize(m);
        out_to_in_slot_.resize(m);

        // arcs are sorted by (source, target); filling in-lists in this pass
        // leaves each in-list sorted by source as well. Record the absolute
        // in-CSR slot of every arc so out-traversal can address per-arc state.
        std::vector<std::size_t> out_fill(out_offsets_.begin(), out_offsets_.end() - 1);
        std::vector<std::size_t> in_fill(in_offsets_.begin(), in_offsets_.end() - 1);
        for (std::size_t a = 0; a < m; ++a) {
            auto [u, v] = arcs[a];
            const std::size_t slot = in_fill[v]++;
            in_sources_[slot] = u;
            out_targets_[out_fill[u]] = v;
            out_to_in_slot_[out_fill[u]] = slot;
            ++out_fill[u];
        }

        label_index_.clear();
        for (std::size_t i = 0; i < labels_.size(); ++i) {
            auto [it, inserted] = label_index_.emplace(labels_[i], static_cast<NodeId>(i));
            if (!inserted) throw GraphError("duplicate node label: " + labels_[i]);
        }
    }

    std::size_t n_ = 0;
    std::vector<std::size_t> out_offsets_{0};
    std::vector<std::size_t> in_offsets_{0};
    std::vector<NodeId> out_targets_;
    std::vector<NodeId> in_sources_;
    std::vector<std::size_t> out_to_in_slot_;
    std::vector<std::string> labels_;
    std::unordered_map<std::string, NodeId> label_index_;
};

inline std::size_t degree(const Graph& g, NodeId v) { return g.out_degree(v); }

struct NodeGroup {
    std::string name;
    std::vector<NodeId> members;
};

// Graph plus a partition of (some of) its nodes into labeled groups.
struct GroupedGraph {
    Graph graph;
    std::vector<NodeGroup> groups;
};

// The 15-node, 31-edge demonstration network: five towns of three agents
// each. Reds link to every orange and blue agent; the top green agent links
// to all oranges and the top/middle blues; the bottom green to all blues and
// the middle/bottom oranges; the middle green to all pinks. No edges inside
// a town. Stored as a symmetric digraph (62 arcs).
inline GroupedGraph toy_network() {
    const std::vector<std::string> labels = {
        "r_t", "r_m", "r_b", "o_t", "o_m", "o_b", "b_t", "b_m", "b_b",
        "g_t", "g_m", "g_b", "p_t", "p_m", "p_b"};
    auto id = [&](const char* s) -> NodeId {
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == s) return static_cast<NodeId>(i);
        throw GraphError("bad toy label");
    };
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (const char* r : {"r_t", "r_m", "r_b"})
        for (const char* x : {"o_t", "o_m", "o_b", "b_t", "b_m", "b_b"})
            edges.emplace_back(id(r), id(x));
    for (const char* x : {"o_t", "o_m", "o_b", "b_t", "b_m"})
        edges.emplace_back(id("g_t"), id(x));
    for (const char* x : {"b_t", "b_m", "b_b", "o_m", "o_b"})
        edges.emplace_back(id("g_b"), id(x));
    for (const char* x : {"p_t", "p_m", "p_b"})
        edges.emplace_back(id("g_m"), id(x));

    std::vector<std::pair<NodeId, NodeId>> arcs;
    arcs.reserve(edges.size() * 2);
    for (auto [u, v] : edges) {
        arcs.emplace_back(u, v);
        arcs.emplace_back(v, u);
    }
    GroupedGraph gg;
    gg.graph = Graph(labels.size(), std::move(arcs), labels);
    gg.groups = {
        {"red", {id("r_t"), id("r_m"), id("r_b")}},
        {"orange", {id("o_t"), id("o_m"), id("o_b")}},
        {"blue", {id("b_t"), id("b_m"), id("b_b")}},
        {"green", {id("g_t"), id("g_m"), id("g_b")}},
        {"pink", {id("p_t"), id("p_m"), id("p_b")}},
    };
    return gg;
}

} // namespace spreadrank
