#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace spreadrank {

namespace detail {

// Fractional ranks of |values|, ascending, exact ties averaged.
inline std::vector<double> abs_fractional_ranks(const std::vector<double>& values) {
    const std::size_t k = values.size();
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(values[a]) < std::abs(values[b]);
    });
    std::vector<double> ranks(k);
    std::size_t i = 0;
    while (i < k) {
        std::size_t j = i;
        while (j + 1 < k && std::abs(values[order[j + 1]]) == std::abs(values[order[i]])) ++j;
        const double mean_rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = mean_rank;
        i = j + 1;
    }
    return ranks;
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

} // namespace detail

struct WilcoxonResult {
    double p_value = 1.0;
    double w_plus = 0.0;
    double w_minus = 0.0;
    std::size_t pairs_used = 0; // after zero-difference removal
    bool exact = false;
    std::string note;
};

// Two-sided Wilcoxon matched-pair signed-rank test. Zero differences are
// dropped (classic treatment, not Pratt's). For k <= 25 pairs the p-value is
// exact over all 2^k sign assignments (tabulated by dynamic programming over
// the doubled ranks, which enumerates the same distribution); above that a
// normal approximation with tie correction is used. Fewer than 5 usable pairs
// returns p = 1 with a note.
inline WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("wilcoxon: length mismatch");

    std::vector<double> diffs;
    diffs.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        if (d != 0.0) diffs.push_back(d);
    }

    WilcoxonResult result;
    result.pairs_used = diffs.size();
    if (diffs.size() < 5) {
        result.note = "too few pairs";
        result.p_value = 1.0;
        return result;
    }

    const std::vector<double> ranks = detail::abs_fractional_ranks(diffs);
    double w_plus = 0.0, w_minus = 0.0;
    for (std::size_t i = 0; i < diffs.size(); ++i)
        (diffs[i] > 0.0 ? w_plus : w_minus) += ranks[i];
    result.w_plus = w_plus;
    result.w_minus = w_minus;

    const std::size_t k = diffs.size();
    const double w_min = std::min(w_plus, w_minus);

    if (k <= 25) {
        // doubled ranks are integers even with ties (halves only)
        std::vector<std::size_t> scaled(k);
        std::size_t total = 0;
        for (std::size_t i = 0; i < k; ++i) {
            scaled[i] = static_cast<std::size_t>(std::llround(2.0 * ranks[i]));
            total += scaled[i];
        }
        std::vector<std::uint64_t> count(total + 1, 0);
        count[0] = 1;
        std::size_t reach = 0;
        for (std::size_t i = 0; i < k; ++i) {
            reach += scaled[i];
            for (std::size_t s = reach + 1; s-- > scaled[i];)
                count[s] += count[s - scaled[i]];
        }
        const std::size_t w_scaled = static_cast<std::size_t>(std::llround(2.0 * w_min));
        std::uint64_t tail = 0;
        for (std::size_t s = 0; s <= w_scaled && s <= total; ++s) tail += count[s];
        const double p = 2.0 * static_cast<double>(tail) / std::ldexp(1.0, static_cast<int>(k));
        result.p_value = std::min(1.0, p);
        result.exact = true;
    } else {
        const double kk = static_cast<double>(k);
        double tie_term = 0.0;
        {
            std::vector<double> sorted(diffs.size());
            for (std::size_t i = 0; i < diffs.size(); ++i) sorted[i] = std::abs(diffs[i]);
            std::sort(sorted.begin(), sorted.end());
            std::size_t i = 0;
            while (i < sorted.size()) {
                std::size_t j = i;
                while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
                const double t = static_cast<double>(j - i + 1);
                tie_term += t * t * t - t;
                i = j + 1;
            }
        }
        const double mu = kk * (kk + 1.0) / 4.0;
        const double var = kk * (kk + 1.0) * (2.0 * kk + 1.0) / 24.0 - tie_term / 48.0;
        const double sigma = std::sqrt(var);
        // continuity correction: w_min is always <= mu
        const double z = (w_min - mu + 0.5) / sigma;
        result.p_value = std::min(1.0, 2.0 * detail::normal_cdf(z));
        result.exact = false;
    }
    return result;
}

} // namespace spreadrank
