#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp> // nlohmann/json, vendored

#include "spreadrank/graph.hpp"

namespace spreadrank {

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(std::string s) {
    auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && issp(s.back())) s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && issp(s[i])) ++i;
    return s.substr(i);
}

inline std::vector<std::string> split_fields(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

} // namespace detail

struct EdgeListResult {
    Graph graph;
    std::size_t duplicate_edges = 0; // deduplicated silently, count reported
};

// Line-oriented edge list: "u v" or "u,v", '#' comments, blank lines skipped.
// Endpoint labels are mapped to dense ids in first-appearance order. With
// undirected=true every input edge contributes both arcs.
inline EdgeListResult load_edge_list(const std::filesystem::path& path, bool undirected) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open edge list: " + path.string());

    std::vector<std::string> labels;
    std::unordered_map<std::string, NodeId> index;
    auto intern = [&](const std::string& s) -> NodeId {
        auto it = index.find(s);
        if (it != index.end()) return it->second;
        NodeId id = static_cast<NodeId>(labels.size());
        labels.push_back(s);
        index.emplace(s, id);
        return id;
    };

    std::set<std::pair<NodeId, NodeId>> seen;
    std::vector<std::pair<NodeId, NodeId>> arcs;
    std::size_t duplicates = 0;

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::string u_label, v_label;
        if (t.find(',') != std::string::npos) {
            auto fields = detail::split_fields(t, ',');
            if (fields.size() != 2 || fields[0].empty() || fields[1].empty())
                throw DataError(path.string() + ":" + std::to_string(lineno) +
                                ": expected two comma-separated endpoints");
            u_label = fields[0];
            v_label = fields[1];
        } else {
            std::istringstream ls(t);
            std::string extra;
            if (!(ls >> u_label >> v_label) || (ls >> extra))
                throw DataError(path.string() + ":" + std::to_string(lineno) +
                                ": expected two whitespace-separated endpoints");
        }
        NodeId u = intern(u_label);
        NodeId v = intern(v_label);
        if (u == v)
            throw DataError(path.string() + ":" + std::to_string(lineno) +
                            ": self-loop on '" + u_label + "'");
        std::pair<NodeId, NodeId> key{u, v};
        if (undirected && key.first > key.second) std::swap(key.first, key.second);
        if (!seen.insert(key).second) {
            ++duplicates;
            continue;
        }
        arcs.emplace_back(u, v);
        if (undirected) arcs.emplace_back(v, u);
    }

    EdgeListResult result;
    const std::size_t node_count = labels.size();
    result.graph = Graph(node_count, std::move(arcs), std::move(labels));
    result.duplicate_edges = duplicates;
    return result;
}

// Writes contents to a temp file in the target directory, then renames.
// Errors never leave a partial file at the destination.
inline void atomic_write(const std::filesystem::path& path, const std::string& contents) {
    namespace fs = std::filesystem;
    fs::path dir = path.parent_path();
    if (!dir.empty()) fs::create_directories(dir);
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write: " + tmp.string());
        out << contents;
        if (!out.flush()) {
            fs::remove(tmp);
            throw DataError("write failed: " + tmp.string());
        }
    }
    fs::rename(tmp, path);
}

inline std::string format_sig6(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return buf;
}

// One line per undirected edge (u index < v index) or per arc when directed.
inline std::string edge_list_text(const Graph& g, bool undirected) {
    std::string out;
    for (NodeId u = 0; u < g.node_count(); ++u) {
        for (NodeId v : g.out_neighbors(u)) {
            if (undirected && u > v) continue;
            out += g.display_label(u);
            out += ' ';
            out += g.display_label(v);
            out += '\n';
        }
    }
    return out;
}

// CSV "node_label,group_label"; nodes absent from the file belong to no group.
inline std::vector<NodeGroup> load_groups(const std::filesystem::path& path, const Graph& g) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open group file: " + path.string());
    std::vector<NodeGroup> groups;
    std::unordered_map<std::string, std::size_t> group_index;
    std::vector<bool> assigned(g.node_count(), false);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto fields = detail::split_fields(t, ',');
        if (fields.size() != 2 || fields[0].empty() || fields[1].empty())
            throw DataError(path.string() + ":" + std::to_string(lineno) +
                            ": expected 'node_label,group_label'");
        NodeId v;
        try {
            v = g.node_by_label(fields[0]);
        } catch (const GraphError& e) {
            throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
        if (assigned[v])
            throw DataError(path.string() + ":" + std::to_string(lineno) +
                            ": node '" + fields[0] + "' assigned to two groups");
        assigned[v] = true;
        auto it = group_index.find(fields[1]);
        if (it == group_index.end()) {
            group_index.emplace(fields[1], groups.size());
            groups.push_back({fields[1], {v}});
        } else {
            groups[it->second].members.push_back(v);
        }
    }
    return groups;
}

inline std::string groups_csv_text(const Graph& g, const std::vector<NodeGroup>& groups) {
    std::string out;
    for (const auto& grp : groups)
        for (NodeId v : grp.members) out += g.display_label(v) + "," + grp.name + "\n";
    return out;
}

// ---- score matrices -------------------------------------------------------

// n rows of m columns plus row/column ids; one column is the benchmark.
struct ScoreMatrix {
    std::vector<std::string> row_ids;
    std::vector<std::string> column_ids;
    std::vector<std::vector<double>> values; // values[row][col]
    std::size_t reference_column = 0;

    std::size_t rows() const { return row_ids.size(); }
    std::size_t cols() const { return column_ids.size(); }

    void validate() const {
        if (rows() < 2) throw DataError("score matrix needs at least 2 rows");
        if (cols() < 2) throw DataError("score matrix needs at least 2 columns");
        if (reference_column >= cols()) throw DataError("reference column out of range");
        if (values.size() != rows()) throw DataError("score matrix shape mismatch");
        for (const auto& row : values) {
            if (row.size() != cols()) throw DataError("score matrix shape mismatch");
            for (double x : row)
                if (!std::isfinite(x)) throw DataError("score matrix has non-finite value");
        }
    }

    std::vector<double> column(std::size_t j) const {
        std::vector<double> col(rows());
        for (std::size_t i = 0; i < rows(); ++i) col[i] = values[i][j];
        return col;
    }
};

// Header row carries column ids; first column carries row ids.
inline ScoreMatrix load_score_matrix(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open matrix: " + path.string());
    ScoreMatrix m;
    std::string line;
    std::size_t lineno = 0;
    bool header_done = false;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto fields = detail::split_fields(t, ',');
        if (!header_done) {
            if (fields.size() < 3)
                throw DataError(path.string() + ": header needs a row-id column and >= 2 data columns");
            m.column_ids.assign(fields.begin() + 1, fields.end());
            header_done = true;
            continue;
        }
        if (fields.size() != m.column_ids.size() + 1)
            throw DataError(path.string() + ":" + std::to_string(lineno) + ": wrong field count");
        m.row_ids.push_back(fields[0]);
        std::vector<double> row;
        row.reserve(m.column_ids.size());
        for (std::size_t j = 1; j < fields.size(); ++j) {
            try {
                std::size_t pos = 0;
                double x = std::stod(fields[j], &pos);
                if (pos != fields[j].size()) throw std::invalid_argument("trailing chars");
                row.push_back(x);
            } catch (const std::exception&) {
                throw DataError(path.string() + ":" + std::to_string(lineno) +
                                ": bad number '" + fields[j] + "'");
            }
        }
        m.values.push_back(std::move(row));
    }
    if (!header_done) throw DataError(path.string() + ": empty matrix file");
    m.reference_column = m.cols() - 1;
    m.validate();
    return m;
}

inline std::string score_matrix_csv(const ScoreMatrix& m, const std::string& id_header = "id") {
    std::string out = id_header;
    for (const auto& c : m.column_ids) out += "," + c;
    out += '\n';
    for (std::size_t i = 0; i < m.rows(); ++i) {
        out += m.row_ids[i];
        for (std::size_t j = 0; j < m.cols(); ++j) out += "," + format_sig6(m.values[i][j]);
        out += '\n';
    }
    return out;
}

// ---- seed sets -------------------------------------------------------------

struct SeedSet {
    std::string id;
    std::vector<NodeId> members;
};

// JSON array of {"id": ..., "members": [labels...]}
inline std::vector<SeedSet> load_seed_sets(const std::filesystem::path& path, const Graph& g) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open seed sets: " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    }
    if (!doc.is_array()) throw DataError(path.string() + ": expected a JSON array");
    std::vector<SeedSet> sets;
    for (const auto& item : doc) {
        SeedSet s;
        if (!item.contains("id") || !item.contains("members"))
            throw DataError(path.string() + ": each set needs 'id' and 'members'");
        s.id = item["id"].get<std::string>();
        std::set<NodeId> uniq;
        for (const auto& member : item["members"]) {
            NodeId v;
            if (member.is_number_unsigned() && !g.has_labels()) {
                v = member.get<NodeId>();
                if (v >= g.node_count())
                    throw DataError(path.string() + ": node id out of range in set '" + s.id + "'");
            } else {
                std::string label = member.is_string() ? member.get<std::string>()
                                                       : member.dump();
                try {
                    v = g.node_by_label(label);
                } catch (const GraphError& e) {
                    throw DataError(path.string() + ": " + e.what() + " in set '" + s.id + "'");
                }
            }
            uniq.insert(v);
        }
        s.members.assign(uniq.begin(), uniq.end());
        if (s.members.empty()) throw DataError(path.string() + ": empty set '" + s.id + "'");
        sets.push_back(std::move(s));
    }
    return sets;
}

inline std::string seed_sets_json(const std::vector<SeedSet>& sets, const Graph& g) {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& s : sets) {
        nlohmann::json members = nlohmann::json::array();
        for (NodeId v : s.members) members.push_back(g.display_label(v));
        doc.push_back({{"id", s.id}, {"members", members}});
    }
    return doc.dump(2) + "\n";
}

} // namespace spreadrank
