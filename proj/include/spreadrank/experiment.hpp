#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp> // nlohmann/json, vendored

#include "spreadrank/centrality.hpp"
#include "spreadrank/diffusion.hpp"
#include "spreadrank/graph.hpp"
#include "spreadrank/io.hpp"
#include "spreadrank/srd.hpp"

namespace spreadrank {

enum class Aggregator { kMean, kSum, kMedian };

inline Aggregator aggregator_from_string(const std::string& s) {
    if (s == "mean") return Aggregator::kMean;
    if (s == "sum") return Aggregator::kSum;
    if (s == "median") return Aggregator::kMedian;
    throw std::invalid_argument("unknown aggregator: " + s);
}

inline const char* to_string(Aggregator a) {
    switch (a) {
        case Aggregator::kMean: return "mean";
        case Aggregator::kSum: return "sum";
        case Aggregator::kMedian: return "median";
    }
    return "?";
}

struct ExperimentConfig {
    std::size_t n_samples = 21;
    std::size_t sample_size = 500; // q
    std::uint64_t runs = 5000;
    std::uint64_t master_seed = 0;
    std::vector<std::string> measures = measure_order();
    MeasureParams params;
    Aggregator aggregator = Aggregator::kMean;
    double tie_epsilon_reference = 0.005;
    double tie_epsilon_solutions = 0.0;
    std::size_t cv_folds = 8;
    std::size_t crrn_mc_samples = 1000000;
    bool use_groups = false; // rank the groups of a GroupedGraph instead of random samples
    unsigned threads = 0;

    void validate(std::size_t node_count) const {
        if (n_samples < 2) throw std::invalid_argument("n_samples must be >= 2");
        if (!use_groups && sample_size > node_count)
            throw std::invalid_argument("sample size q exceeds the node count");
        if (runs < 1) throw std::invalid_argument("runs must be >= 1");
        if (measures.empty()) throw std::invalid_argument("no measures selected");
    }
};

// n sets of q distinct nodes, drawn uniformly and independently (sets may
// overlap). Set i depends only on (seed, i).
inline std::vector<SeedSet> sample_node_sets(const Graph& g, std::size_t n, std::size_t q,
                                             std::uint64_t seed) {
    if (q == 0) throw std::invalid_argument("sample size q must be >= 1");
    if (q > g.node_count()) throw std::invalid_argument("sample size q exceeds the node count");
    std::vector<SeedSet> sets;
    sets.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng(derive_seed(seed, 0x73616d706c65ULL /* "sample" */, i));
        std::vector<NodeId> pool(g.node_count());
        std::iota(pool.begin(), pool.end(), 0);
        for (std::size_t j = 0; j < q; ++j) {
            const std::size_t pick = j + static_cast<std::size_t>(rng.next_below(pool.size() - j));
            std::swap(pool[j], pool[pick]);
        }
        SeedSet s;
        s.id = "S" + std::to_string(i + 1);
        s.members.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(q));
        std::sort(s.members.begin(), s.members.end());
        sets.push_back(std::move(s));
    }
    return sets;
}

// cell(i, j) = aggregate of measure j's scores over the members of set i.
inline ScoreMatrix aggregate_scores(const std::vector<SeedSet>& sets,
                                    const std::vector<CentralityVector>& vectors,
                                    Aggregator aggregator) {
    ScoreMatrix m;
    for (const auto& cv : vectors) m.column_ids.push_back(cv.measure);
    for (const auto& s : sets) {
        if (s.members.empty()) throw std::invalid_argument("empty sample set '" + s.id + "'");
        m.row_ids.push_back(s.id);
        std::vector<double> row;
        row.reserve(vectors.size());
        for (const auto& cv : vectors) {
            std::vector<double> vals;
            vals.reserve(s.members.size());
            for (NodeId v : s.members) {
                if (v >= cv.scores.size())
                    throw std::invalid_argument("set '" + s.id + "' references unknown node");
                vals.push_back(cv.scores[v]);
            }
            double cell = 0.0;
            switch (aggregator) {
                case Aggregator::kMean:
                    cell = std::accumulate(vals.begin(), vals.end(), 0.0) /
                           static_cast<double>(vals.size());
                    break;
                case Aggregator::kSum:
                    cell = std::accumulate(vals.begin(), vals.end(), 0.0);
                    break;
                case Aggregator::kMedian: {
                    std::sort(vals.begin(), vals.end());
                    const std::size_t h = vals.size() / 2;
                    cell = vals.size() % 2 ? vals[h] : 0.5 * (vals[h - 1] + vals[h]);
                    break;
                }
            }
            row.push_back(cell);
        }
        m.values.push_back(std::move(row));
    }
    m.reference_column = 0;
    return m;
}

// The k nodes with the highest scores. When the boundary score is tied, the
// tied class is thinned by discarding uniformly chosen members one at a time;
// fully distinct boundaries consume no randomness.
inline SeedSet top_k_selection(const CentralityVector& vector, std::size_t k, std::uint64_t seed) {
    const std::size_t n = vector.scores.size();
    if (k == 0) throw std::invalid_argument("top-k selection needs k >= 1");
    if (k > n) throw std::invalid_argument("k exceeds the node count");

    std::vector<NodeId> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
        if (vector.scores[a] != vector.scores[b]) return vector.scores[a] > vector.scores[b];
        return a < b;
    });

    const double boundary = vector.scores[order[k - 1]];
    std::size_t above = 0;
    while (above < n && vector.scores[order[above]] > boundary) ++above;
    std::size_t class_end = above;
    while (class_end < n && vector.scores[order[class_end]] == boundary) ++class_end;

    SeedSet out;
    out.id = "top" + std::to_string(k) + "_" + vector.measure;
    out.members.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(above));
    const std::size_t needed = k - above;
    if (above + (class_end - above) == k) {
        out.members.insert(out.members.end(), order.begin() + static_cast<std::ptrdiff_t>(above),
                           order.begin() + static_cast<std::ptrdiff_t>(class_end));
    } else {
        std::vector<NodeId> tied(order.begin() + static_cast<std::ptrdiff_t>(above),
                                 order.begin() + static_cast<std::ptrdiff_t>(class_end));
        Rng rng(derive_seed(seed, 0x746f706bULL /* "topk" */, fnv1a64(vector.measure)));
        while (tied.size() > needed) {
            const std::size_t drop = static_cast<std::size_t>(rng.next_below(tied.size()));
            tied.erase(tied.begin() + static_cast<std::ptrdiff_t>(drop));
        }
        out.members.insert(out.members.end(), tied.begin(), tied.end());
    }
    std::sort(out.members.begin(), out.members.end());
    return out;
}

struct TopKRow {
    std::string measure;
    SpreadStats stats;
    double im_rank = 0.0; // by average spread, descending, fractional ties
    double sp_rank = 0.0; // by SRD score, ascending, fractional ties
};

// Simulates each measure's top-k choice and puts the resulting influence-
// maximization ranking next to the spreading-potential ranking from the SRD
// scores.
inline std::vector<TopKRow> im_external_validation(const Graph& g,
                                                   const std::vector<CentralityVector>& vectors,
                                                   std::size_t k, const DiffusionConfig& cfg,
                                                   const SrdResult& sp, std::uint64_t topk_seed) {
    std::vector<TopKRow> rows(vectors.size());
    std::vector<double> spreads(vectors.size());
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        SeedSet set = top_k_selection(vectors[i], k, topk_seed);
        // simulate under a shared id: every measure sees the same per-run
        // randomness, and duplicated measures produce identical rows
        SeedSet sim{"topk", std::move(set.members)};
        rows[i].measure = vectors[i].measure;
        rows[i].stats = lt_monte_carlo(g, sim, cfg);
        spreads[i] = rows[i].stats.mean_spread_pct;
    }
    std::vector<double> negated(spreads.size());
    for (std::size_t i = 0; i < spreads.size(); ++i) negated[i] = -spreads[i];
    const auto im_ranks = fractional_ranks(negated);
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i].im_rank = im_ranks[i];

    // SP ranks follow the SRD result's column order, matched by measure id
    const auto sp_ranks = fractional_ranks(sp.srd);
    for (auto& row : rows) {
        auto it = std::find(sp.solution_ids.begin(), sp.solution_ids.end(), row.measure);
        if (it == sp.solution_ids.end())
            throw std::invalid_argument("measure '" + row.measure + "' missing from SRD result");
        row.sp_rank = sp_ranks[static_cast<std::size_t>(it - sp.solution_ids.begin())];
    }
    return rows;
}

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<SeedSet> sets;
    std::vector<CentralityVector> vectors;
    std::vector<SpreadStats> spreads;
    ScoreMatrix matrix; // solutions + reference column "spread_pct"
    SrdResult srd_result;
    bool has_cv = false; // cross-validation needs at least 4 rows
    CvResult cv_result;
    std::map<std::string, double> timings_ms;
};

// The full testing pipeline: measures, samples, per-set aggregation, Monte
// Carlo reference spreads, then SRD with its permutation test and
// cross-validation. Reproducible from the config alone.
inline ExperimentReport run_sp_experiment(const Graph& g, const ExperimentConfig& cfg,
                                          const std::vector<NodeGroup>* groups = nullptr) {
    cfg.validate(g.node_count());
    using clock = std::chrono::steady_clock;
    auto ms_since = [](clock::time_point t0) {
        return std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    };

    ExperimentReport report;
    report.config = cfg;

    auto t0 = clock::now();
    MeasureParams params = cfg.params;
    params.threads = cfg.threads;
    for (const auto& name : cfg.measures)
        report.vectors.push_back(compute_measure(g, name, params));
    report.timings_ms["centrality"] = ms_since(t0);

    t0 = clock::now();
    if (cfg.use_groups) {
        if (groups == nullptr || groups->empty())
            throw std::invalid_argument("group mode requires a grouped graph");
        for (const auto& grp : *groups) {
            if (grp.members.empty()) continue;
            SeedSet s;
            s.id = grp.name;
            s.members = grp.members;
            std::sort(s.members.begin(), s.members.end());
            report.sets.push_back(std::move(s));
        }
        if (report.sets.size() < 2)
            throw std::invalid_argument("group mode needs at least two non-empty groups");
    } else {
        report.sets = sample_node_sets(g, cfg.n_samples, cfg.sample_size, cfg.master_seed);
    }
    report.timings_ms["sampling"] = ms_since(t0);

    t0 = clock::now();
    report.matrix = aggregate_scores(report.sets, report.vectors, cfg.aggregator);
    report.timings_ms["aggregation"] = ms_since(t0);

    t0 = clock::now();
    DiffusionConfig dc;
    dc.runs = cfg.runs;
    dc.master_seed = cfg.master_seed;
    dc.threads = cfg.threads;
    report.spreads = lt_monte_carlo_batch(g, report.sets, dc);
    report.timings_ms["diffusion"] = ms_since(t0);

    report.matrix.column_ids.push_back("spread_pct");
    for (std::size_t i = 0; i < report.matrix.rows(); ++i)
        report.matrix.values[i].push_back(report.spreads[i].mean_spread_pct);
    report.matrix.reference_column = report.matrix.cols() - 1;

    t0 = clock::now();
    report.srd_result =
        crrn(srd(report.matrix, cfg.tie_epsilon_reference, cfg.tie_epsilon_solutions),
             cfg.crrn_mc_samples, derive_seed(cfg.master_seed, 0x6372726eULL /* "crrn" */),
             cfg.threads);
    report.timings_ms["srd"] = ms_since(t0);

    if (report.matrix.rows() >= 4) {
        t0 = clock::now();
        report.cv_result =
            cross_validate(report.matrix, cfg.cv_folds,
                           derive_seed(cfg.master_seed, 0x6376ULL /* "cv" */),
                           cfg.tie_epsilon_reference, cfg.tie_epsilon_solutions);
        report.has_cv = true;
        report.timings_ms["cv"] = ms_since(t0);
    }

    return report;
}

// ---- serialization ---------------------------------------------------------

inline nlohmann::json srd_json(const SrdResult& r) {
    nlohmann::json j;
    j["n"] = r.n;
    j["max_distance"] = max_distance(r.n);
    j["reference_ranks"] = r.reference_ranks;
    nlohmann::json cols = nlohmann::json::array();
    for (std::size_t i = 0; i < r.solution_ids.size(); ++i) {
        nlohmann::json c;
        c["id"] = r.solution_ids[i];
        c["srd"] = r.srd[i];
        c["nsrd"] = r.nsrd[i];
        c["ranks"] = r.solution_ranks[i];
        if (r.has_crrn) {
            c["percentile"] = r.percentile[i];
            c["verdict"] = to_string(r.verdicts[i]);
        }
        cols.push_back(std::move(c));
    }
    j["solutions"] = std::move(cols);
    if (r.has_crrn) {
        j["crrn"] = {{"model", r.null_model},
                     {"xx1", r.xx1},
                     {"median", r.median},
                     {"xx19", r.xx19}};
    }
    return j;
}

inline nlohmann::json cv_json(const CvResult& cv) {
    nlohmann::json j;
    j["folds"] = cv.folds;
    j["leave_one_out"] = cv.leave_one_out;
    j["solution_ids"] = cv.solution_ids;
    j["fold_nsrd"] = cv.fold_nsrd;
    nlohmann::json stats = nlohmann::json::array();
    for (std::size_t i = 0; i < cv.solution_ids.size(); ++i) {
        stats.push_back({{"id", cv.solution_ids[i]},
                         {"median", cv.stats[i].median},
                         {"q1", cv.stats[i].q1},
                         {"q3", cv.stats[i].q3},
                         {"min", cv.stats[i].min},
                         {"max", cv.stats[i].max}});
    }
    j["stats"] = std::move(stats);
    j["wilcoxon_p"] = cv.wilcoxon_p;
    nlohmann::json ranking = nlohmann::json::array();
    for (std::size_t i = 0; i < cv.order.size(); ++i) {
        ranking.push_back({{"id", cv.solution_ids[cv.order[i]]},
                           {"median", cv.stats[cv.order[i]].median},
                           {"tied_with_next", i + 1 < cv.order.size() ? cv.tie_with_next[i] : false}});
    }
    j["ranking"] = std::move(ranking);
    return j;
}

inline std::string ranking_matrix_csv(const SrdResult& r, const std::vector<std::string>& row_ids) {
    std::string out = "id";
    for (const auto& c : r.solution_ids) out += "," + c;
    out += ",reference\n";
    for (std::size_t i = 0; i < row_ids.size(); ++i) {
        out += row_ids[i];
        for (std::size_t j = 0; j < r.solution_ids.size(); ++j)
            out += "," + format_sig6(r.solution_ranks[j][i]);
        out += "," + format_sig6(r.reference_ranks[i]) + "\n";
    }
    return out;
}

inline std::string crrn_cdf_csv(const SrdResult& r) {
    std::string out = "nsrd,cumulative_probability\n";
    for (const auto& [x, p] : r.null_cdf) out += format_sig6(x) + "," + format_sig6(p) + "\n";
    return out;
}

inline std::string topk_csv(const std::vector<TopKRow>& rows, std::size_t k) {
    std::string out = "measure,k,avg_spread_pct,std_error_pct,runs,im_rank,sp_rank\n";
    for (const auto& row : rows) {
        out += row.measure + "," + std::to_string(k) + "," +
               format_sig6(row.stats.mean_spread_pct) + "," +
               format_sig6(row.stats.std_error_pct) + "," + std::to_string(row.stats.runs) + "," +
               format_sig6(row.im_rank) + "," + format_sig6(row.sp_rank) + "\n";
    }
    return out;
}

inline nlohmann::json config_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["n_samples"] = cfg.n_samples;
    j["sample_size"] = cfg.sample_size;
    j["runs"] = cfg.runs;
    j["master_seed"] = cfg.master_seed;
    j["measures"] = cfg.measures;
    j["params"] = {{"pagerank_alpha", cfg.params.pagerank_alpha},
                   {"pagerank_tol", cfg.params.pagerank_tol},
                   {"gdd_p", cfg.params.gdd_p},
                   {"ltc_threshold_factor", cfg.params.ltc_threshold_factor},
                   {"harmonic_normalized", cfg.params.harmonic_normalized}};
    j["aggregator"] = to_string(cfg.aggregator);
    j["tie_epsilon_reference"] = cfg.tie_epsilon_reference;
    j["tie_epsilon_solutions"] = cfg.tie_epsilon_solutions;
    j["cv_folds"] = cfg.cv_folds;
    j["crrn_mc_samples"] = cfg.crrn_mc_samples;
    j["use_groups"] = cfg.use_groups;
    return j;
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    if (j.contains("n_samples")) cfg.n_samples = j["n_samples"].get<std::size_t>();
    if (j.contains("sample_size")) cfg.sample_size = j["sample_size"].get<std::size_t>();
    if (j.contains("runs")) cfg.runs = j["runs"].get<std::uint64_t>();
    if (j.contains("master_seed")) cfg.master_seed = j["master_seed"].get<std::uint64_t>();
    if (j.contains("measures")) cfg.measures = j["measures"].get<std::vector<std::string>>();
    if (j.contains("params")) {
        const auto& p = j["params"];
        if (p.contains("pagerank_alpha")) cfg.params.pagerank_alpha = p["pagerank_alpha"].get<double>();
        if (p.contains("pagerank_tol")) cfg.params.pagerank_tol = p["pagerank_tol"].get<double>();
        if (p.contains("gdd_p")) cfg.params.gdd_p = p["gdd_p"].get<double>();
        if (p.contains("ltc_threshold_factor"))
            cfg.params.ltc_threshold_factor = p["ltc_threshold_factor"].get<double>();
        if (p.contains("harmonic_normalized"))
            cfg.params.harmonic_normalized = p["harmonic_normalized"].get<bool>();
    }
    if (j.contains("aggregator")) cfg.aggregator = aggregator_from_string(j["aggregator"].get<std::string>());
    if (j.contains("tie_epsilon_reference"))
        cfg.tie_epsilon_reference = j["tie_epsilon_reference"].get<double>();
    if (j.contains("tie_epsilon_solutions"))
        cfg.tie_epsilon_solutions = j["tie_epsilon_solutions"].get<double>();
    if (j.contains("cv_folds")) cfg.cv_folds = j["cv_folds"].get<std::size_t>();
    if (j.contains("crrn_mc_samples")) cfg.crrn_mc_samples = j["crrn_mc_samples"].get<std::size_t>();
    if (j.contains("use_groups")) cfg.use_groups = j["use_groups"].get<bool>();
    return cfg;
}

// Writes the report directory; timings and environment go to provenance.json
// only, so the data files are byte-identical across replays.
inline void write_report(const ExperimentReport& report, const std::filesystem::path& dir,
                         const std::vector<TopKRow>* topk = nullptr, std::size_t topk_k = 0) {
    atomic_write(dir / "matrix.csv", score_matrix_csv(report.matrix));
    atomic_write(dir / "ranking.csv", ranking_matrix_csv(report.srd_result, report.matrix.row_ids));
    atomic_write(dir / "srd.json", srd_json(report.srd_result).dump(2) + "\n");
    if (report.has_cv) atomic_write(dir / "cv.json", cv_json(report.cv_result).dump(2) + "\n");
    atomic_write(dir / "crrn_cdf.csv", crrn_cdf_csv(report.srd_result));
    atomic_write(dir / "spread.csv", spread_csv(report.sets, report.spreads));
    if (topk != nullptr) atomic_write(dir / "topk.csv", topk_csv(*topk, topk_k));

    nlohmann::json prov;
    prov["config"] = config_json(report.config);
    prov["master_seed"] = report.config.master_seed;
    prov["threads"] = resolve_thread_count(report.config.threads);
    prov["timings_ms"] = report.timings_ms;
    prov["set_ids"] = nlohmann::json::array();
    for (const auto& s : report.sets) prov["set_ids"].push_back(s.id);
    atomic_write(dir / "provenance.json", prov.dump(2) + "\n");
}

} // namespace spreadrank
