#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "spreadrank/io.hpp"
#include "spreadrank/parallel.hpp"
#include "spreadrank/rng.hpp"
#include "spreadrank/wilcoxon.hpp"

namespace spreadrank {

// Ascending fractional ranks (rank 1 = smallest value). Values are grouped
// into tie classes by chaining along the sorted column: a new class starts
// when the gap to the previous value reaches tie_epsilon; epsilon 0 means
// exact equality only. Each class receives the mean of its positional ranks.
inline std::vector<double> fractional_ranks(std::span<const double> column, double tie_epsilon = 0.0) {
    if (tie_epsilon < 0.0) throw std::invalid_argument("tie epsilon must be nonnegative");
    for (double x : column)
        if (!std::isfinite(x)) throw std::invalid_argument("fractional_ranks: non-finite value");

    const std::size_t n = column.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return column[a] < column[b]; });

    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n) {
            const double gap = column[order[j + 1]] - column[order[j]];
            const bool new_class = tie_epsilon == 0.0 ? gap > 0.0 : gap >= tie_epsilon;
            if (new_class) break;
            ++j;
        }
        const double mean_rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = mean_rank;
        i = j + 1;
    }
    return ranks;
}

// Maximum Manhattan distance between two rankings of 1..n.
inline std::size_t max_distance(std::size_t n) {
    if (n < 2) throw std::invalid_argument("max_distance needs n >= 2");
    return n * n / 2;
}

enum class CrrnVerdict { kBelow5, kRandomZone, kAbove95 };

inline const char* to_string(CrrnVerdict v) {
    switch (v) {
        case CrrnVerdict::kBelow5: return "below_5pct";
        case CrrnVerdict::kRandomZone: return "random_zone";
        case CrrnVerdict::kAbove95: return "above_95pct";
    }
    return "?";
}

struct SrdResult {
    std::size_t n = 0;
    std::vector<std::string> solution_ids;
    std::vector<double> srd;
    std::vector<double> nsrd;
    std::vector<double> reference_ranks;
    std::vector<std::vector<double>> solution_ranks; // per solution column

    // permutation-test fields, filled by crrn()
    bool has_crrn = false;
    std::string null_model; // "exact", "monte_carlo", "normal"
    double xx1 = 0.0, median = 0.0, xx19 = 0.0; // normalized null markers
    std::vector<double> percentile;
    std::vector<CrrnVerdict> verdicts;
    std::vector<std::pair<double, double>> null_cdf; // (normalized srd, cum. probability)
};

// Manhattan distance of each solution column's ranking to the reference
// ranking, with the normalization divisor fixed at floor(n^2/2).
inline SrdResult srd(const ScoreMatrix& matrix, double tie_epsilon_reference = 0.0,
                     double tie_epsilon_solutions = 0.0) {
    matrix.validate();
    const std::size_t n = matrix.rows();
    const double divisor = static_cast<double>(max_distance(n));

    SrdResult result;
    result.n = n;
    const auto ref_column = matrix.column(matrix.reference_column);
    result.reference_ranks = fractional_ranks(ref_column, tie_epsilon_reference);

    for (std::size_t j = 0; j < matrix.cols(); ++j) {
        if (j == matrix.reference_column) continue;
        auto ranks = fractional_ranks(matrix.column(j), tie_epsilon_solutions);
        double dist = 0.0;
        for (std::size_t i = 0; i < n; ++i) dist += std::abs(ranks[i] - result.reference_ranks[i]);
        result.solution_ids.push_back(matrix.column_ids[j]);
        result.srd.push_back(dist);
        result.nsrd.push_back(dist / divisor);
        result.solution_ranks.push_back(std::move(ranks));
    }
    return result;
}

namespace detail {

inline bool has_ties(std::span<const double> ranks) {
    for (double r : ranks)
        if (r != std::floor(r)) return true;
    std::vector<double> sorted(ranks.begin(), ranks.end());
    std::sort(sorted.begin(), sorted.end());
    return std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
}

// Distribution of 2*SRD between a uniform random permutation of 1..n and the
// given reference ranks, as counts over the doubled-value grid.
struct NullHistogram {
    std::vector<std::uint64_t> count; // index = 2 * srd value
    std::uint64_t samples = 0;

    double cdf(double x) const {
        // P(SRD <= x)
        const long long cut = static_cast<long long>(std::floor(2.0 * x + 1e-9));
        std::uint64_t acc = 0;
        for (long long s = 0; s <= cut && s < static_cast<long long>(count.size()); ++s)
            acc += count[s];
        return static_cast<double>(acc) / static_cast<double>(samples);
    }

    double mean() const {
        long double acc = 0.0;
        for (std::size_t s = 0; s < count.size(); ++s)
            acc += static_cast<long double>(count[s]) * static_cast<long double>(s);
        return static_cast<double>(acc / (2.0L * static_cast<long double>(samples)));
    }

    double variance() const {
        const long double m = mean();
        long double acc = 0.0;
        for (std::size_t s = 0; s < count.size(); ++s) {
            const long double v = static_cast<long double>(s) / 2.0L - m;
            acc += static_cast<long double>(count[s]) * v * v;
        }
        return static_cast<double>(acc / static_cast<long double>(samples));
    }
};

inline double srd_of_permutation(std::span<const int> perm, std::span<const double> ref) {
    double d = 0.0;
    for (std::size_t i = 0; i < perm.size(); ++i)
        d += std::abs(static_cast<double>(perm[i]) - ref[i]);
    return d;
}

inline NullHistogram exact_null(std::span<const double> ref) {
    const std::size_t n = ref.size();
    NullHistogram hist;
    hist.count.assign(2 * n * n + 1, 0);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 1);
    do {
        const double d = srd_of_permutation(perm, ref);
        ++hist.count[static_cast<std::size_t>(std::llround(2.0 * d))];
        ++hist.samples;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return hist;
}

inline NullHistogram monte_carlo_null(std::span<const double> ref, std::size_t samples,
                                      std::uint64_t seed, unsigned threads) {
    const std::size_t n = ref.size();
    NullHistogram hist;
    hist.count.assign(2 * n * n + 1, 0);
    hist.samples = samples;

    // one generator per sample, so the result is schedule-independent
    std::vector<std::uint32_t> scaled(samples);
    parallel_for(samples, threads, [&](std::size_t i) {
        Rng rng(derive_seed(seed, 0x7065726dULL /* "perm" */, i));
        std::vector<int> perm(n);
        std::iota(perm.begin(), perm.end(), 1);
        for (std::size_t j = n - 1; j > 0; --j) {
            const std::size_t pick = static_cast<std::size_t>(rng.next_below(j + 1));
            std::swap(perm[j], perm[pick]);
        }
        scaled[i] = static_cast<std::uint32_t>(std::llround(2.0 * srd_of_permutation(perm, ref)));
    });
    for (std::uint32_t s : scaled) ++hist.count[s];
    return hist;
}

// Null markers on the whole-number grid: XX1 is the largest whole score still
// inside the lower 5% tail (so 3 -> 0.25 for the tie-free n=5 null), the
// median and XX19 the smallest whole scores reaching 50% and 95% coverage.
inline void grid_quantiles(const NullHistogram& hist, std::size_t max_dist_n, double& xx1,
                           double& med, double& xx19) {
    const double divisor = static_cast<double>(max_dist_n);
    const std::size_t top = hist.count.size() / 2 + 1;
    xx1 = 0.0;
    for (std::size_t x = top; x-- > 0;) {
        if (hist.cdf(static_cast<double>(x)) <= 0.05) {
            xx1 = static_cast<double>(x) / divisor;
            break;
        }
    }
    med = 0.0;
    xx19 = 0.0;
    for (std::size_t x = 0; x <= top; ++x) {
        if (hist.cdf(static_cast<double>(x)) >= 0.5) {
            med = static_cast<double>(x) / divisor;
            break;
        }
    }
    for (std::size_t x = 0; x <= top; ++x) {
        if (hist.cdf(static_cast<double>(x)) >= 0.95) {
            xx19 = static_cast<double>(x) / divisor;
            break;
        }
    }
}

} // namespace detail

// Completes an SrdResult with the permutation test: locates each solution's
// SRD inside the null distribution of rankings drawn at random against the
// reference. Exact enumeration for n <= 9; Monte Carlo when the reference has
// ties or 9 < n <= 13; otherwise the normal approximation with mean
// (n^2-1)/3 and variance (n+1)(2n^2+7)/45.
inline SrdResult crrn(SrdResult result, std::size_t mc_samples = 1000000,
                      std::uint64_t seed = 0x5244u /* fixed default stream */,
                      unsigned threads = 0) {
    if (result.n < 2) throw std::invalid_argument("crrn needs n >= 2");
    if (mc_samples < 10000) throw std::invalid_argument("crrn needs mc_samples >= 10000");
    const std::size_t n = result.n;
    const double divisor = static_cast<double>(max_distance(n));
    const bool ties = detail::has_ties(result.reference_ranks);

    result.percentile.assign(result.srd.size(), 0.0);
    result.verdicts.assign(result.srd.size(), CrrnVerdict::kRandomZone);
    result.null_cdf.clear();

    if (n <= 13 || ties) {
        detail::NullHistogram hist;
        if (n <= 9) {
            hist = detail::exact_null(result.reference_ranks);
            result.null_model = "exact";
        } else {
            hist = detail::monte_carlo_null(result.reference_ranks, mc_samples, seed, threads);
            result.null_model = "monte_carlo";
        }
        detail::grid_quantiles(hist, max_distance(n), result.xx1, result.median, result.xx19);
        for (std::size_t j = 0; j < result.srd.size(); ++j)
            result.percentile[j] = hist.cdf(result.srd[j]);
        for (std::size_t s = 0; s < hist.count.size(); ++s) {
            if (hist.count[s] == 0) continue;
            result.null_cdf.emplace_back(static_cast<double>(s) / 2.0 / divisor,
                                         hist.cdf(static_cast<double>(s) / 2.0));
        }
    } else {
        const double nn = static_cast<double>(n);
        const double mu = (nn * nn - 1.0) / 3.0;
        const double var = (nn + 1.0) * (2.0 * nn * nn + 7.0) / 45.0;
        const double sigma = std::sqrt(var);
        const double z05 = 1.6448536269514722;
        result.null_model = "normal";
        result.xx1 = (mu - z05 * sigma) / divisor;
        result.median = mu / divisor;
        result.xx19 = (mu + z05 * sigma) / divisor;
        for (std::size_t j = 0; j < result.srd.size(); ++j)
            result.percentile[j] = detail::normal_cdf((result.srd[j] - mu) / sigma);
        const double lo = std::max(0.0, mu - 4.0 * sigma);
        const double hi = std::min(divisor, mu + 4.0 * sigma);
        for (int i = 0; i <= 200; ++i) {
            const double x = lo + (hi - lo) * static_cast<double>(i) / 200.0;
            result.null_cdf.emplace_back(x / divisor, detail::normal_cdf((x - mu) / sigma));
        }
    }

    for (std::size_t j = 0; j < result.srd.size(); ++j) {
        if (result.percentile[j] <= 0.05)
            result.verdicts[j] = CrrnVerdict::kBelow5;
        else if (result.percentile[j] >= 0.95)
            result.verdicts[j] = CrrnVerdict::kAbove95;
        else
            result.verdicts[j] = CrrnVerdict::kRandomZone;
    }
    result.has_crrn = true;
    return result;
}

struct CvColumnStats {
    double median = 0.0, q1 = 0.0, q3 = 0.0, min = 0.0, max = 0.0;
};

struct CvResult {
    std::vector<std::string> solution_ids;
    std::size_t folds = 0;
    bool leave_one_out = false;
    std::vector<std::vector<double>> fold_nsrd; // [fold][solution]
    std::vector<CvColumnStats> stats;           // per solution
    std::vector<std::vector<double>> wilcoxon_p; // symmetric, diagonal 1
    std::vector<std::size_t> order;             // solutions sorted by median nsrd
    std::vector<bool> tie_with_next;            // no significant difference to next in order
};

namespace detail {

// linear-interpolation quantile (R type 7)
inline double quantile_type7(std::vector<double> sorted, double p) {
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    const double h = (static_cast<double>(n) - 1.0) * p;
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, n - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

} // namespace detail

// Repeated SRD on row subsets: leave-one-out for n <= 7, otherwise `folds`
// iterations each dropping ceil(n/folds) uniformly chosen rows. Paired fold
// values feed a two-sided Wilcoxon signed-rank test per solution pair.
inline CvResult cross_validate(const ScoreMatrix& matrix, std::size_t folds, std::uint64_t seed,
                               double tie_epsilon_reference = 0.0,
                               double tie_epsilon_solutions = 0.0) {
    matrix.validate();
    const std::size_t n = matrix.rows();
    if (n < 4) throw std::invalid_argument("cross_validate needs n >= 4");

    CvResult cv;
    cv.leave_one_out = n <= 7;
    if (cv.leave_one_out) {
        cv.folds = n;
    } else {
        if (folds < 2) throw std::invalid_argument("cross_validate needs folds >= 2");
        if (folds > n) throw std::invalid_argument("folds may not exceed the row count");
        cv.folds = folds;
    }

    for (std::size_t j = 0; j < matrix.cols(); ++j)
        if (j != matrix.reference_column) cv.solution_ids.push_back(matrix.column_ids[j]);
    const std::size_t m = cv.solution_ids.size();

    const std::size_t leave_out =
        cv.leave_one_out ? 1 : (n + cv.folds - 1) / cv.folds; // ceil(n/folds)

    cv.fold_nsrd.assign(cv.folds, std::vector<double>(m, 0.0));
    for (std::size_t f = 0; f < cv.folds; ++f) {
        std::vector<std::size_t> keep;
        if (cv.leave_one_out) {
            for (std::size_t i = 0; i < n; ++i)
                if (i != f) keep.push_back(i);
        } else {
            std::vector<std::size_t> rows(n);
            std::iota(rows.begin(), rows.end(), 0);
            Rng rng(derive_seed(seed, 0x63766f6c64ULL /* "cvfold" */, f));
            for (std::size_t j = 0; j < leave_out; ++j) {
                const std::size_t pick =
                    j + static_cast<std::size_t>(rng.next_below(rows.size() - j));
                std::swap(rows[j], rows[pick]);
            }
            keep.assign(rows.begin() + static_cast<std::ptrdiff_t>(leave_out), rows.end());
            std::sort(keep.begin(), keep.end());
        }

        ScoreMatrix sub;
        sub.column_ids = matrix.column_ids;
        sub.reference_column = matrix.reference_column;
        for (std::size_t i : keep) {
            sub.row_ids.push_back(matrix.row_ids[i]);
            sub.values.push_back(matrix.values[i]);
        }
        const SrdResult r = srd(sub, tie_epsilon_reference, tie_epsilon_solutions);
        cv.fold_nsrd[f] = r.nsrd;
    }

    cv.stats.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        std::vector<double> col(cv.folds);
        for (std::size_t f = 0; f < cv.folds; ++f) col[f] = cv.fold_nsrd[f][j];
        std::sort(col.begin(), col.end());
        cv.stats[j].min = col.front();
        cv.stats[j].max = col.back();
        cv.stats[j].median = detail::quantile_type7(col, 0.5);
        cv.stats[j].q1 = detail::quantile_type7(col, 0.25);
        cv.stats[j].q3 = detail::quantile_type7(col, 0.75);
    }

    cv.wilcoxon_p.assign(m, std::vector<double>(m, 1.0));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            std::vector<double> a(cv.folds), b(cv.folds);
            for (std::size_t f = 0; f < cv.folds; ++f) {
                a[f] = cv.fold_nsrd[f][i];
                b[f] = cv.fold_nsrd[f][j];
            }
            const double p = wilcoxon_signed_rank(a, b).p_value;
            cv.wilcoxon_p[i][j] = p;
            cv.wilcoxon_p[j][i] = p;
        }
    }

    cv.order.resize(m);
    std::iota(cv.order.begin(), cv.order.end(), 0);
    std::stable_sort(cv.order.begin(), cv.order.end(), [&](std::size_t a, std::size_t b) {
        return cv.stats[a].median < cv.stats[b].median;
    });
    cv.tie_with_next.assign(m, false);
    for (std::size_t i = 0; i + 1 < m; ++i)
        cv.tie_with_next[i] = cv.wilcoxon_p[cv.order[i]][cv.order[i + 1]] >= 0.05;

    return cv;
}

} // namespace spreadrank
