#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "belief.hpp"
#include "pts.hpp"
#include "rng.hpp"
#include "strategy.hpp"

namespace adapts {

enum class NoiseKind { Unbiased, Biased };

// Population-level knobs: group size k, per-agent noise rate, and what a noisy
// agent reports (uniform draw, or a fixed distribution for the biased case).
// n is the total agent budget for standalone population runs; 0 means derived
// from the round count by the orchestrator.
struct PopulationConfig {
    std::size_t n = 0;
    std::size_t k = 2;
    double epsilon = 0.0;
    NoiseKind noise_kind = NoiseKind::Unbiased;
    Vec biased_table;

    void validate(std::size_t m) const {
        if (k < 2) throw std::invalid_argument("PopulationConfig: k must be at least 2");
        if (n != 0 && n % k != 0) throw std::invalid_argument("PopulationConfig: n must be divisible by k");
        if (!(epsilon >= 0.0) || !(epsilon < 1.0))
            throw std::invalid_argument("PopulationConfig: epsilon must lie in [0,1)");
        if (noise_kind == NoiseKind::Biased) {
            if (biased_table.size() != m)
                throw std::invalid_argument("PopulationConfig: biased table size mismatch");
            double sum = 0.0;
            for (double v : biased_table) {
                if (!(v >= 0.0)) throw std::invalid_argument("PopulationConfig: biased table entries must be >= 0");
                sum += v;
            }
            if (std::abs(sum - 1.0) > kSimplexTol)
                throw std::invalid_argument("PopulationConfig: biased table must sum to 1");
        }
    }
};

// One group's raw outcome: true signals, submitted reports, whether each
// report coincided with the signal, and whether the agent was non-noisy.
struct GroupReports {
    std::vector<std::size_t> signals;
    std::vector<std::size_t> reports;
    std::vector<bool> honest_flags;
    std::vector<bool> rational_flags;

    std::size_t size() const { return reports.size(); }
    std::size_t dishonest_count() const {
        std::size_t d = 0;
        for (bool h : honest_flags)
            if (!h) ++d;
        return d;
    }
};

struct SampledGroup {
    std::size_t omega;
    std::vector<std::size_t> signals;
};

// Draws one state from the prior weights, then k conditionally independent
// signals from that state's likelihood row.
inline SampledGroup sample_group(const WorldModel& model, std::size_t k, Rng& rng) {
    SampledGroup out;
    out.omega = rng.categorical(model.omega_weights);
    out.signals.reserve(k);
    const Vec& row = model.likelihood[out.omega];
    for (std::size_t i = 0; i < k; ++i) out.signals.push_back(rng.categorical(row));
    return out;
}

struct ReportDraw {
    std::size_t report;
    bool honest;
    bool rational;
};

// One agent's report: noisy with probability epsilon (uniform or the biased
// table), otherwise the profile's action. Honesty is judged on the submitted
// report alone; the rational flag preserves the other accounting.
inline ReportDraw apply_strategy(std::size_t signal, const StrategyProfile& profile,
                                 const PopulationConfig& config, Rng& rng) {
    const std::size_t m = profile.size();
    if (signal >= m) throw std::invalid_argument("apply_strategy: signal out of range");
    ReportDraw out{};
    out.rational = !rng.bernoulli(config.epsilon);
    if (!out.rational) {
        out.report = config.noise_kind == NoiseKind::Unbiased ? rng.uniform_index(m)
                                                              : rng.categorical(config.biased_table);
    } else if (profile.kind == ProfileKind::Mixture) {
        out.report = rng.bernoulli(profile.mix_weight[signal]) ? signal : profile.rho[signal];
    } else {
        out.report = prescribed_report(profile, signal);
    }
    out.honest = out.report == signal;
    return out;
}

inline GroupReports generate_group_reports(const std::vector<std::size_t>& signals,
                                           const StrategyProfile& profile,
                                           const PopulationConfig& config, Rng& rng) {
    GroupReports out;
    out.signals = signals;
    out.reports.reserve(signals.size());
    out.honest_flags.reserve(signals.size());
    out.rational_flags.reserve(signals.size());
    for (std::size_t s : signals) {
        ReportDraw d = apply_strategy(s, profile, config, rng);
        out.reports.push_back(d.report);
        out.honest_flags.push_back(d.honest);
        out.rational_flags.push_back(d.rational);
    }
    return out;
}

struct BestResponseResult {
    StrategyProfile profile;
    bool converged;
    int iterations;
};

// Synchronous best-response iteration from the truthful profile: each step
// replaces every signal's report with its payoff argmax against the current
// profile (ties to the lowest index). Stops at a fixed point or after
// max_iters steps, in which case converged is false.
inline BestResponseResult best_response_profile(const PosteriorTable& pt, const PtsParams& params,
                                                double epsilon, int max_iters = 64) {
    const std::size_t m = pt.size();
    std::vector<std::size_t> rho(m);
    for (std::size_t x = 0; x < m; ++x) rho[x] = x;

    for (int it = 0; it < max_iters; ++it) {
        Mat M = expected_payoff_matrix(pt, params, classify_deterministic(rho), epsilon);
        std::vector<std::size_t> next(m);
        for (std::size_t x = 0; x < m; ++x)
            next[x] = static_cast<std::size_t>(std::max_element(M[x].begin(), M[x].end()) -
                                               M[x].begin());
        if (next == rho) return {classify_deterministic(std::move(rho)), true, it};
        rho = std::move(next);
    }
    return {classify_deterministic(std::move(rho)), false, max_iters};
}

// Mixture whose per-signal truthful weight is a logistic in that signal's
// truthful-payoff margin at p (clean-mechanism margin: c=1, no noise terms).
// Width sets the softness; the non-truthful action is the canonical collapse.
inline StrategyProfile smooth_mixture_profile(const PosteriorTable& pt, const SimplexPoint& p,
                                              double width) {
    if (!(width > 0.0)) throw std::invalid_argument("smooth_mixture_profile: width must be > 0");
    const std::size_t m = pt.size();
    if (p.size() != m) throw std::invalid_argument("smooth_mixture_profile: size mismatch");

    std::vector<std::size_t> rho(m, p.argmin());
    Vec weights(m);
    for (std::size_t x = 0; x < m; ++x) {
        double own = pt.rows[x][x] / p[x];
        double best_other = -std::numeric_limits<double>::infinity();
        for (std::size_t y = 0; y < m; ++y) {
            if (y == x) continue;
            best_other = std::max(best_other, pt.rows[x][y] / p[y]);
        }
        double slack = own - best_other;
        weights[x] = 1.0 / (1.0 + std::exp(-slack / width));
    }
    return mixture_profile(std::move(rho), std::move(weights));
}

}  // namespace adapts
