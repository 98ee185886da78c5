#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "belief.hpp"
#include "rng.hpp"

namespace adapts {

// Interior grid of candidate scoring distributions at granularity gamma.
struct ArmSet {
    std::vector<SimplexPoint> arms;
    double gamma = 0.0;
    std::size_t size() const { return arms.size(); }
};

namespace detail {

inline void compositions_rec(std::size_t remaining, std::size_t parts, std::size_t denom,
                             std::vector<std::size_t>& stack, std::vector<SimplexPoint>& out) {
    if (parts == 1) {
        if (remaining < 1) return;
        stack.push_back(remaining);
        Vec p(stack.size());
        for (std::size_t i = 0; i < stack.size(); ++i)
            p[i] = static_cast<double>(stack[i]) / static_cast<double>(denom);
        out.emplace_back(std::move(p));
        stack.pop_back();
        return;
    }
    for (std::size_t a = 1; a + (parts - 1) <= remaining; ++a) {
        stack.push_back(a);
        compositions_rec(remaining - a, parts - 1, denom, stack, out);
        stack.pop_back();
    }
}

}  // namespace detail

// All points a/N with positive integer coordinates summing to N = floor(1/gamma),
// in lexicographic order. Every coordinate is at least 1/N, so arms are interior.
inline ArmSet discretize_simplex(std::size_t m, double gamma) {
    if (m < 2) throw std::invalid_argument("discretize_simplex: need at least 2 values");
    if (!(gamma > 0.0) || !(gamma < 1.0))
        throw std::invalid_argument("discretize_simplex: gamma must lie in (0,1)");
    const std::size_t N = static_cast<std::size_t>(1.0 / gamma + 1e-9);
    ArmSet out;
    out.gamma = gamma;
    if (N >= m) {
        std::vector<std::size_t> stack;
        detail::compositions_rec(N, m, N, stack, out.arms);
    }
    if (out.arms.size() < 2)
        throw std::invalid_argument("discretize_simplex: gamma yields fewer than 2 arms");
    return out;
}

// Fraction of ordered report pairs that disagree.
inline double disagreement_indicator(const std::vector<std::size_t>& reports) {
    const std::size_t k = reports.size();
    if (k < 2) throw std::invalid_argument("disagreement_indicator: need at least 2 reports");
    std::size_t disagree = 0;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            if (i != j && reports[i] != reports[j]) ++disagree;
    return static_cast<double>(disagree) / static_cast<double>(k * (k - 1));
}

// Rewards report frequencies that sit strictly inside the running per-value
// band [f_low, f_high]; frequencies pinned to either edge contribute nothing.
inline double biased_indicator(const std::vector<std::size_t>& reports, const Vec& f_low,
                               const Vec& f_high) {
    const std::size_t m = f_low.size();
    if (f_high.size() != m) throw std::invalid_argument("biased_indicator: band size mismatch");
    if (reports.empty()) throw std::invalid_argument("biased_indicator: empty reports");
    Vec freq(m, 0.0);
    for (std::size_t r : reports) {
        if (r >= m) throw std::invalid_argument("biased_indicator: report out of range");
        freq[r] += 1.0;
    }
    double total = 0.0;
    for (std::size_t x = 0; x < m; ++x) {
        freq[x] /= static_cast<double>(reports.size());
        if (!(f_low[x] <= f_high[x]))
            throw std::invalid_argument("biased_indicator: band bounds out of order");
        total += (f_high[x] - freq[x]) * (freq[x] - f_low[x]);
    }
    return total;
}

namespace detail {

// Uniform ordered draw of `count` distinct indices from [0, k).
inline std::vector<std::size_t> draw_distinct(std::size_t k, std::size_t count, Rng& rng) {
    std::vector<std::size_t> pool(k);
    for (std::size_t i = 0; i < k; ++i) pool[i] = i;
    for (std::size_t i = 0; i < count; ++i)
        std::swap(pool[i], pool[i + rng.uniform_index(k - i)]);
    pool.resize(count);
    return pool;
}

}  // namespace detail

// Mean within-group disagreement of the two groups, minus lambda times a
// correlation probe built from two disjoint random pairs per group. The probe
// is small when within-group disagreement is driven by independent signal
// noise and large when both groups disagree for synchronized reasons.
inline double regularized_indicator(const std::vector<std::size_t>& group_a,
                                    const std::vector<std::size_t>& group_b, double lambda,
                                    Rng& rng) {
    if (group_a.size() < 4 || group_b.size() < 4)
        throw std::invalid_argument("regularized_indicator: each group needs at least 4 reports");
    if (!(lambda >= 0.0)) throw std::invalid_argument("regularized_indicator: lambda must be >= 0");

    double dis = 0.5 * (disagreement_indicator(group_a) + disagreement_indicator(group_b));
    std::vector<std::size_t> a = detail::draw_distinct(group_a.size(), 4, rng);
    std::vector<std::size_t> b = detail::draw_distinct(group_b.size(), 4, rng);
    double da1 = group_a[a[0]] != group_a[a[1]] ? 1.0 : 0.0;
    double da2 = group_a[a[2]] != group_a[a[3]] ? 1.0 : 0.0;
    double db1 = group_b[b[0]] != group_b[b[1]] ? 1.0 : 0.0;
    double db2 = group_b[b[2]] != group_b[b[3]] ? 1.0 : 0.0;
    return dis - lambda * (da1 - db1) * (da2 - db2);
}

// Running UCB1 state. t is the round about to be played, so after the
// initialization pass over A arms, t = A + 1 and selection may begin.
struct ArmStats {
    Vec cum_indicator;
    std::vector<std::size_t> pulls;
    std::size_t t = 1;

    explicit ArmStats(std::size_t num_arms = 0)
        : cum_indicator(num_arms, 0.0), pulls(num_arms, 0) {}
    std::size_t size() const { return cum_indicator.size(); }
    double mean(std::size_t arm) const {
        return cum_indicator[arm] / static_cast<double>(pulls[arm]);
    }
};

inline std::size_t ucb1_select(const ArmStats& stats) {
    const std::size_t A = stats.size();
    if (A == 0) throw std::invalid_argument("ucb1_select: no arms");
    if (stats.t < A + 1) throw std::invalid_argument("ucb1_select: initialization pass incomplete");
    for (std::size_t a = 0; a < A; ++a)
        if (stats.pulls[a] == 0) throw std::invalid_argument("ucb1_select: unpulled arm");

    double log_term = std::log(static_cast<double>(stats.t - 1));
    std::size_t best = 0;
    double best_index = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < A; ++a) {
        double idx = stats.mean(a) + std::sqrt(2.0 * log_term / static_cast<double>(stats.pulls[a]));
        if (idx > best_index) {
            best_index = idx;
            best = a;
        }
    }
    return best;
}

inline void ucb1_update(ArmStats& stats, std::size_t arm, double indicator_value) {
    if (arm >= stats.size()) throw std::invalid_argument("ucb1_update: arm out of range");
    stats.cum_indicator[arm] += indicator_value;
    stats.pulls[arm] += 1;
    stats.t += 1;
}

// Doubling-epoch state for the biased-noise variant: per-value frequency
// bands plus a fresh bandit per epoch.
struct EpochState {
    std::size_t epoch_index = 0;
    Vec f_low;
    Vec f_high;
    ArmStats stats;

    EpochState(std::size_t first_epoch, std::size_t num_arms, std::size_t m)
        : epoch_index(first_epoch), f_low(m, 0.0), f_high(m, 1.0), stats(num_arms) {}
    std::size_t rounds() const { return std::size_t{1} << epoch_index; }
};

// Tightens the bands to the min/max per-arm mean report frequency observed in
// the ended epoch (arms the epoch never pulled are skipped), then resets the
// bandit and doubles the epoch length.
inline void epoch_advance(EpochState& state, const Mat& arm_value_freq,
                          const std::vector<std::size_t>& arm_pulls) {
    const std::size_t m = state.f_low.size();
    if (arm_value_freq.size() != arm_pulls.size())
        throw std::invalid_argument("epoch_advance: table size mismatch");
    Vec lo(m, std::numeric_limits<double>::infinity());
    Vec hi(m, -std::numeric_limits<double>::infinity());
    bool any = false;
    for (std::size_t a = 0; a < arm_pulls.size(); ++a) {
        if (arm_pulls[a] == 0) continue;
        if (arm_value_freq[a].size() != m)
            throw std::invalid_argument("epoch_advance: frequency row size mismatch");
        any = true;
        for (std::size_t x = 0; x < m; ++x) {
            lo[x] = std::min(lo[x], arm_value_freq[a][x]);
            hi[x] = std::max(hi[x], arm_value_freq[a][x]);
        }
    }
    if (any) {
        state.f_low = std::move(lo);
        state.f_high = std::move(hi);
    }
    state.stats = ArmStats(state.stats.size());
    state.epoch_index += 1;
}

}  // namespace adapts
