#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp> // vendored
#include <json.hpp>  // nlohmann/json, vendored

#include "spreadrank/experiment.hpp"

namespace spreadrank::cli {

// exit codes: 0 success, 1 usage, 2 data, 3 non-convergence
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitNoConvergence = 3;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::uint64_t resolve_seed(std::optional<std::uint64_t> seed) {
    if (seed) return *seed;
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

inline Graph load_graph_checked(const std::string& path, bool directed) {
    EdgeListResult loaded = load_edge_list(path, !directed);
    if (loaded.duplicate_edges > 0)
        std::cerr << "note: " << loaded.duplicate_edges << " duplicate edge(s) removed from "
                  << path << "\n";
    return std::move(loaded.graph);
}

inline std::size_t resolve_reference_column(const ScoreMatrix& m, const std::string& reference) {
    if (reference == "last") return m.cols() - 1;
    for (std::size_t j = 0; j < m.cols(); ++j)
        if (m.column_ids[j] == reference) return j;
    throw DataError("reference column '" + reference + "' not found");
}

inline void emit_summary(const std::string& command, std::optional<std::uint64_t> seed,
                         const std::vector<std::string>& outputs) {
    nlohmann::json j;
    j["command"] = command;
    if (seed) j["seed"] = *seed;
    j["outputs"] = outputs;
    std::cout << j.dump() << std::endl;
}

struct MeasureFlags {
    double alpha = 0.8;
    double pagerank_tol = 1e-10;
    double gdd_p = 0.05;
    double ltc_factor = 0.7;
    bool raw_harmonic = false;
    unsigned threads = 0;

    MeasureParams to_params() const {
        MeasureParams p;
        p.pagerank_alpha = alpha;
        p.pagerank_tol = pagerank_tol;
        p.gdd_p = gdd_p;
        p.ltc_threshold_factor = ltc_factor;
        p.harmonic_normalized = !raw_harmonic;
        p.threads = threads;
        return p;
    }

    void attach(CLI::App* sub) {
        sub->add_option("--alpha", alpha, "PageRank damping factor (default 0.8)");
        sub->add_option("--pagerank-tol", pagerank_tol, "PageRank L1 convergence threshold");
        sub->add_option("--gdd-p", gdd_p, "GDD spreading parameter (default 0.05)");
        sub->add_option("--ltc-factor", ltc_factor, "LTC threshold factor (default 0.7)");
        sub->add_flag("--raw-harmonic", raw_harmonic, "emit raw harmonic sums instead of /(n-1)");
        sub->add_option("--threads", threads, "worker threads (0 = all cores)");
    }
};

inline std::string centrality_csv(const Graph& g, const CentralityVector& cv) {
    std::string out = "node_label,score\n";
    for (NodeId v = 0; v < g.node_count(); ++v)
        out += g.display_label(v) + "," + format_sig6(cv.scores[v]) + "\n";
    return out;
}

inline std::string centrality_wide_csv(const Graph& g, const std::vector<CentralityVector>& cvs) {
    std::string out = "node_label";
    for (const auto& cv : cvs) out += "," + cv.measure;
    out += '\n';
    for (NodeId v = 0; v < g.node_count(); ++v) {
        out += g.display_label(v);
        for (const auto& cv : cvs) out += "," + format_sig6(cv.scores[v]);
        out += '\n';
    }
    return out;
}

// Published per-node scores of the demonstration network, for external
// cross-checking of a build.
inline std::string toy_expected_csv() {
    return "kind,id,pagerank_alpha0.8,harmonic_normalized\n"
           "node,r_t,0.0770,0.571429\n"
           "node,r_m,0.0770,0.571429\n"
           "node,r_b,0.0770,0.571429\n"
           "node,o_t,0.0547,0.488095\n"
           "node,o_m,0.0653,0.535714\n"
           "node,o_b,0.0653,0.535714\n"
           "node,b_t,0.0653,0.535714\n"
           "node,b_m,0.0653,0.535714\n"
           "node,b_b,0.0547,0.488095\n"
           "node,g_t,0.0660,0.52381\n"
           "node,g_m,0.1259,0.214286\n"
           "node,g_b,0.0660,0.52381\n"
           "node,p_t,0.0469,0.142857\n"
           "node,p_m,0.0469,0.142857\n"
           "node,p_b,0.0469,0.142857\n"
           "town_avg,red,0.0770,0.5714\n"
           "town_avg,orange,0.0617,0.5198\n"
           "town_avg,blue,0.0617,0.5198\n"
           "town_avg,green,0.0859,0.4206\n"
           "town_avg,pink,0.0469,0.1428\n";
}

} // namespace detail

inline int dispatch(const std::vector<std::string>& args) {
    CLI::App app{"spreadrank: influence-proxy evaluation under linear threshold diffusion.\n"
                 "Spread values are percentages of the node count throughout.",
                 "spreadrank"};
    app.require_subcommand(1);

    // ---- centrality ----
    auto* c_cmd = app.add_subcommand("centrality", "compute influence measures on a graph");
    std::string c_graph, c_measure = "all", c_out;
    bool c_directed = false;
    detail::MeasureFlags c_flags;
    c_cmd->add_option("--graph", c_graph, "edge list file")->required();
    c_cmd->add_flag("--directed", c_directed, "treat the edge list as directed");
    c_cmd->add_option("--measure", c_measure,
                      "one of degree|harmonic|pagerank|leaderrank|kcore|gdd|ltc, or 'all'");
    c_cmd->add_option("--out", c_out, "output directory")->required();
    c_flags.attach(c_cmd);
    c_cmd->callback([&] {
        if (c_measure != "all") {
            const auto& known = measure_order();
            if (std::find(known.begin(), known.end(), c_measure) == known.end())
                throw UsageError("unknown measure: " + c_measure);
        }
        Graph g = detail::load_graph_checked(c_graph, c_directed);
        const MeasureParams params = c_flags.to_params();
        std::vector<CentralityVector> cvs;
        if (c_measure == "all")
            cvs = all_measures(g, params);
        else
            cvs.push_back(compute_measure(g, c_measure, params));

        std::vector<std::string> outputs;
        std::filesystem::path dir(c_out);
        for (const auto& cv : cvs) {
            auto path = dir / (cv.measure + ".csv");
            atomic_write(path, detail::centrality_csv(g, cv));
            outputs.push_back(path.string());
        }
        if (cvs.size() > 1) {
            auto path = dir / "centrality_wide.csv";
            atomic_write(path, detail::centrality_wide_csv(g, cvs));
            outputs.push_back(path.string());
        }
        detail::emit_summary("centrality", std::nullopt, outputs);
    });

    // ---- simulate ----
    auto* s_cmd = app.add_subcommand("simulate", "Monte Carlo spread of seed sets");
    std::string s_graph, s_sets, s_out;
    bool s_directed = false;
    std::uint64_t s_runs = 5000;
    unsigned s_threads = 0;
    std::optional<std::uint64_t> s_seed;
    s_cmd->add_option("--graph", s_graph, "edge list file")->required();
    s_cmd->add_flag("--directed", s_directed, "treat the edge list as directed");
    s_cmd->add_option("--sets", s_sets, "seed set JSON file")->required();
    s_cmd->add_option("--runs", s_runs, "simulation runs per set (default 5000)");
    s_cmd->add_option("--seed", s_seed, "master seed (default: drawn from entropy)");
    s_cmd->add_option("--threads", s_threads, "worker threads (0 = all cores)");
    s_cmd->add_option("--out", s_out, "output CSV (mean spread in % of nodes)")->required();
    s_cmd->callback([&] {
        Graph g = detail::load_graph_checked(s_graph, s_directed);
        auto sets = load_seed_sets(s_sets, g);
        DiffusionConfig cfg;
        cfg.runs = s_runs;
        cfg.master_seed = detail::resolve_seed(s_seed);
        cfg.threads = s_threads;
        auto stats = lt_monte_carlo_batch(g, sets, cfg);
        std::string csv = "# seed: " + std::to_string(cfg.master_seed) + "\n" +
                          spread_csv(sets, stats);
        atomic_write(s_out, csv);
        detail::emit_summary("simulate", cfg.master_seed, {s_out});
    });

    // ---- sample ----
    auto* n_cmd = app.add_subcommand("sample", "draw uniform node samples");
    std::string n_graph, n_out;
    bool n_directed = false;
    std::size_t n_n = 21, n_q = 500;
    std::optional<std::uint64_t> n_seed;
    n_cmd->add_option("--graph", n_graph, "edge list file")->required();
    n_cmd->add_flag("--directed", n_directed, "treat the edge list as directed");
    n_cmd->add_option("--n", n_n, "number of sample sets (default 21)");
    n_cmd->add_option("--q", n_q, "sample size (default 500)");
    n_cmd->add_option("--seed", n_seed, "sampling seed (default: drawn from entropy)");
    n_cmd->add_option("--out", n_out, "output JSON")->required();
    n_cmd->callback([&] {
        Graph g = detail::load_graph_checked(n_graph, n_directed);
        const std::uint64_t seed = detail::resolve_seed(n_seed);
        auto sets = sample_node_sets(g, n_n, n_q, seed);
        atomic_write(n_out, seed_sets_json(sets, g));
        detail::emit_summary("sample", seed, {n_out});
    });

    // ---- srd ----
    auto* r_cmd = app.add_subcommand("srd", "sum of ranking differences against a reference column");
    std::string r_matrix, r_reference = "last", r_out = "srd.json";
    double r_eps_ref = 0.005, r_eps_sol = 0.0;
    r_cmd->add_option("--matrix", r_matrix, "score matrix CSV")->required();
    r_cmd->add_option("--reference", r_reference, "reference column id or 'last'");
    r_cmd->add_option("--eps-ref", r_eps_ref, "tie epsilon for the reference column (default 0.005)");
    r_cmd->add_option("--eps-sol", r_eps_sol, "tie epsilon for solution columns (default 0)");
    r_cmd->add_option("--out", r_out, "output JSON (default srd.json)");
    r_cmd->callback([&] {
        ScoreMatrix m = load_score_matrix(r_matrix);
        m.reference_column = detail::resolve_reference_column(m, r_reference);
        SrdResult result = srd(m, r_eps_ref, r_eps_sol);
        atomic_write(r_out, srd_json(result).dump(2) + "\n");
        detail::emit_summary("srd", std::nullopt, {r_out});
    });

    // ---- crrn ----
    auto* p_cmd = app.add_subcommand("crrn", "SRD with the random-ranking permutation test");
    std::string p_matrix, p_reference = "last", p_out = "srd.json", p_cdf = "crrn_cdf.csv";
    double p_eps_ref = 0.005, p_eps_sol = 0.0;
    std::size_t p_mc = 1000000;
    unsigned p_threads = 0;
    std::optional<std::uint64_t> p_seed;
    p_cmd->add_option("--matrix", p_matrix, "score matrix CSV")->required();
    p_cmd->add_option("--reference", p_reference, "reference column id or 'last'");
    p_cmd->add_option("--eps-ref", p_eps_ref, "tie epsilon for the reference column (default 0.005)");
    p_cmd->add_option("--eps-sol", p_eps_sol, "tie epsilon for solution columns (default 0)");
    p_cmd->add_option("--mc", p_mc, "Monte Carlo permutation samples (default 1000000)");
    p_cmd->add_option("--seed", p_seed, "permutation seed (default: drawn from entropy)");
    p_cmd->add_option("--threads", p_threads, "worker threads (0 = all cores)");
    p_cmd->add_option("--out", p_out, "output JSON (default srd.json)");
    p_cmd->add_option("--cdf-out", p_cdf, "null CDF sample CSV (default crrn_cdf.csv)");
    p_cmd->callback([&] {
        ScoreMatrix m = load_score_matrix(p_matrix);
        m.reference_column = detail::resolve_reference_column(m, p_reference);
        const std::uint64_t seed = detail::resolve_seed(p_seed);
        SrdResult result = crrn(srd(m, p_eps_ref, p_eps_sol), p_mc, seed, p_threads);
        nlohmann::json j = srd_json(result);
        j["crrn"]["seed"] = seed;
        atomic_write(p_out, j.dump(2) + "\n");
        atomic_write(p_cdf, crrn_cdf_csv(result));
        detail::emit_summary("crrn", seed, {p_out, p_cdf});
    });

    // ---- cv ----
    auto* v_cmd = app.add_subcommand("cv", "cross-validated SRD with Wilcoxon pair tests");
    std::string v_matrix, v_reference = "last", v_out = "cv.json";
    double v_eps_ref = 0.005, v_eps_sol = 0.0;
    std::size_t v_folds = 8;
    std::optional<std::uint64_t> v_seed;
    v_cmd->add_option("--matrix", v_matrix, "score matrix CSV")->required();
    v_cmd->add_option("--reference", v_reference, "reference column id or 'last'");
    v_cmd->add_option("--folds", v_folds, "fold count (default 8; n <= 7 uses leave-one-out)");
    v_cmd->add_option("--seed", v_seed, "fold sampling seed (default: drawn from entropy)");
    v_cmd->add_option("--eps-ref", v_eps_ref, "tie epsilon for the reference column (default 0.005)");
    v_cmd->add_option("--eps-sol", v_eps_sol, "tie epsilon for solution columns (default 0)");
    v_cmd->add_option("--out", v_out, "output JSON (default cv.json)");
    v_cmd->callback([&] {
        ScoreMatrix m = load_score_matrix(v_matrix);
        m.reference_column = detail::resolve_reference_column(m, v_reference);
        const std::uint64_t seed = detail::resolve_seed(v_seed);
        CvResult result = cross_validate(m, v_folds, seed, v_eps_ref, v_eps_sol);
        nlohmann::json j = cv_json(result);
        j["seed"] = seed;
        atomic_write(v_out, j.dump(2) + "\n");
        detail::emit_summary("cv", seed, {v_out});
    });

    // ---- pipeline ----
    auto* e_cmd = app.add_subcommand("pipeline", "full experiment from a JSON config");
    std::string e_config, e_out;
    unsigned e_threads = 0;
    e_cmd->add_option("--config", e_config, "experiment config JSON")->required();
    e_cmd->add_option("--out", e_out, "report directory")->required();
    e_cmd->add_option("--threads", e_threads, "worker threads (0 = all cores)");
    e_cmd->callback([&] {
        std::ifstream in(e_config);
        if (!in) throw DataError("cannot open config: " + e_config);
        nlohmann::json doc;
        try {
            in >> doc;
        } catch (const nlohmann::json::exception& ex) {
            throw DataError(std::string("bad config: ") + ex.what());
        }
        if (!doc.contains("graph")) throw DataError("config needs a 'graph' path");
        const bool undirected = doc.value("undirected", true);
        Graph g = detail::load_graph_checked(doc["graph"].get<std::string>(), !undirected);
        std::vector<NodeGroup> groups;
        if (doc.contains("groups"))
            groups = load_groups(doc["groups"].get<std::string>(), g);

        ExperimentConfig cfg = config_from_json(doc);
        cfg.threads = e_threads;
        if (!doc.contains("master_seed")) cfg.master_seed = detail::resolve_seed(std::nullopt);

        ExperimentReport report = run_sp_experiment(g, cfg, groups.empty() ? nullptr : &groups);

        const std::size_t top_k = doc.value("top_k", static_cast<std::size_t>(0));
        std::vector<TopKRow> topk_rows;
        if (top_k > 0) {
            DiffusionConfig dc;
            dc.runs = cfg.runs;
            dc.master_seed = cfg.master_seed;
            dc.threads = cfg.threads;
            topk_rows = im_external_validation(
                g, report.vectors, top_k, dc, report.srd_result,
                derive_seed(cfg.master_seed, 0x746f706bULL /* "topk" */));
        }
        write_report(report, e_out, top_k > 0 ? &topk_rows : nullptr, top_k);
        std::vector<std::string> outputs = {e_out + "/matrix.csv",   e_out + "/ranking.csv",
                                            e_out + "/srd.json",     e_out + "/cv.json",
                                            e_out + "/crrn_cdf.csv", e_out + "/spread.csv",
                                            e_out + "/provenance.json"};
        if (top_k > 0) outputs.push_back(e_out + "/topk.csv");
        detail::emit_summary("pipeline", cfg.master_seed, outputs);
    });

    // ---- topk ----
    auto* t_cmd = app.add_subcommand("topk", "highest-ranked nodes of one measure");
    std::string t_graph, t_measure, t_out;
    bool t_directed = false, t_simulate = false;
    std::size_t t_k = 500;
    std::uint64_t t_runs = 5000;
    std::optional<std::uint64_t> t_seed;
    detail::MeasureFlags t_flags;
    t_cmd->add_option("--graph", t_graph, "edge list file")->required();
    t_cmd->add_flag("--directed", t_directed, "treat the edge list as directed");
    t_cmd->add_option("--measure", t_measure, "measure name")->required();
    t_cmd->add_option("--k", t_k, "selection size (default 500)");
    t_cmd->add_flag("--simulate", t_simulate, "also simulate the selected set");
    t_cmd->add_option("--runs", t_runs, "simulation runs (default 5000)");
    t_cmd->add_option("--seed", t_seed, "seed for tie thinning and simulation");
    t_cmd->add_option("--out", t_out, "output directory")->required();
    t_flags.attach(t_cmd);
    t_cmd->callback([&] {
        const auto& known = measure_order();
        if (std::find(known.begin(), known.end(), t_measure) == known.end())
            throw UsageError("unknown measure: " + t_measure);
        Graph g = detail::load_graph_checked(t_graph, t_directed);
        const std::uint64_t seed = detail::resolve_seed(t_seed);
        CentralityVector cv = compute_measure(g, t_measure, t_flags.to_params());
        SeedSet set = top_k_selection(cv, t_k, seed);

        std::filesystem::path dir(t_out);
        std::vector<std::string> outputs;
        auto set_path = dir / "topk_set.json";
        atomic_write(set_path, seed_sets_json({set}, g));
        outputs.push_back(set_path.string());
        if (t_simulate) {
            DiffusionConfig dc;
            dc.runs = t_runs;
            dc.master_seed = seed;
            dc.threads = t_flags.threads;
            auto stats = lt_monte_carlo(g, set, dc);
            auto spread_path = dir / "topk_spread.csv";
            atomic_write(spread_path, spread_csv({set}, {stats}));
            outputs.push_back(spread_path.string());
        }
        detail::emit_summary("topk", seed, outputs);
    });

    // ---- toy ----
    auto* y_cmd = app.add_subcommand("toy", "write the built-in demonstration network");
    std::string y_out;
    y_cmd->add_option("--out", y_out, "output directory")->required();
    y_cmd->callback([&] {
        GroupedGraph gg = toy_network();
        std::filesystem::path dir(y_out);
        atomic_write(dir / "toy.edges",
                     "# five towns of three agents each; 31 undirected edges\n" +
                         edge_list_text(gg.graph, true));
        atomic_write(dir / "toy_groups.csv", groups_csv_text(gg.graph, gg.groups));
        atomic_write(dir / "toy_expected.csv", detail::toy_expected_csv());
        detail::emit_summary("toy", std::nullopt,
                             {(dir / "toy.edges").string(), (dir / "toy_groups.csv").string(),
                              (dir / "toy_expected.csv").string()});
    });

    // argv-style parse: CLI11 wants mutable copies in reverse order
    std::vector<std::string> parse_args(args.rbegin(), args.rend());
    try {
        app.parse(parse_args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ConvergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNoConvergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitOk;
}

inline int dispatch(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return dispatch(args);
}

} // namespace spreadrank::cli
