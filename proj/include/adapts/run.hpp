#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "agents.hpp"
#include "bandit.hpp"
#include "belief.hpp"
#include "pts.hpp"
#include "rng.hpp"
#include "strategy.hpp"

namespace adapts {

enum class IndicatorVariant { Plain, Biased, Regularized };
enum class BehaviorModel { CanonicalSwitching, BestResponse, SmoothMixture };

// Full orchestration settings for one seeded run.
struct RunConfig {
    WorldModel model;
    PopulationConfig population;
    double gamma = 0.1;
    double c = 1.0;
    bool unit_scale = false;
    IndicatorVariant indicator = IndicatorVariant::Plain;
    double lambda = 1.0;
    BehaviorModel behavior = BehaviorModel::CanonicalSwitching;
    double mixture_width = 0.05;
    std::size_t rounds = 0;
    std::uint64_t seed = 0;
    long pinned_arm = -1;
    bool record_rounds = true;
};

struct RoundRecord {
    std::size_t t = 0;
    std::size_t arm = 0;
    GroupReports group;
    Vec rewards;
    double indicator_value = 0.0;
    std::size_t dishonest = 0;
};

struct EpochSummary {
    std::size_t epoch_index = 0;
    std::size_t rounds = 0;
    std::vector<std::size_t> pulls;
    Vec f_low;
    Vec f_high;
    bool complete() const { return rounds == (std::size_t{1} << epoch_index); }
};

struct RunResult {
    std::vector<RoundRecord> records;
    std::size_t dishonest_total = 0;
    std::size_t honest_total = 0;
    Vec h_reports;
    Vec h_values;
    double epsilon_hat = 0.0;
    std::size_t n = 0;
    ArmSet arms;
    ArmStats final_stats;
    std::vector<EpochSummary> epochs;
};

// Rational-agent profile implied by the behavior model at one arm. Switching
// agents play truthful exactly when it is a strict equilibrium there and the
// canonical collapse otherwise; best responders iterate and fall back to the
// collapse when iteration cycles; mixture agents soften the switch.
inline StrategyProfile behavior_profile(const PosteriorTable& pt, const PtsParams& params,
                                        double epsilon, BehaviorModel behavior,
                                        double mixture_width) {
    const std::size_t m = pt.size();
    switch (behavior) {
        case BehaviorModel::CanonicalSwitching: {
            StrategyProfile truthful = truthful_profile(m);
            if (is_strict_equilibrium(pt, params, truthful, epsilon).strict) return truthful;
            return canonical_non_surjective(params.p);
        }
        case BehaviorModel::BestResponse: {
            BestResponseResult br = best_response_profile(pt, params, epsilon);
            if (br.converged) return br.profile;
            return canonical_non_surjective(params.p);
        }
        case BehaviorModel::SmoothMixture:
            return smooth_mixture_profile(pt, params.p, mixture_width);
    }
    throw std::logic_error("behavior_profile: unknown behavior model");
}

struct EpsilonEstimate {
    double epsilon_hat = 0.0;
    double epsilon_hat_raw = 0.0;
    std::size_t arm_index = 0;
    std::size_t extremal_value = 0;
    GroupReports group;
    Vec rewards;
};

// One calibration group played at the arm with the smallest coordinate, paid
// without the correction term. The raw agreement deficit 1 - num(x)/k mixes
// the noise rate with uniform noise that happens to hit x, so it is scaled by
// m/(m-1) before clamping into [0,1).
inline EpsilonEstimate estimate_epsilon(const WorldModel& model, const PopulationConfig& population,
                                        const ArmSet& arms, Rng& rng,
                                        BehaviorModel behavior = BehaviorModel::CanonicalSwitching,
                                        double mixture_width = 0.05, double c = 1.0,
                                        bool unit_scale = false) {
    if (arms.size() == 0) throw std::invalid_argument("estimate_epsilon: no arms");
    PosteriorTable pt = derive_posterior(model);
    const std::size_t m = pt.size();
    population.validate(m);

    EpsilonEstimate out;
    double best_min = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < arms.size(); ++a) {
        double mn = arms.arms[a].min_entry();
        if (mn < best_min) {
            best_min = mn;
            out.arm_index = a;
        }
    }
    const SimplexPoint& p = arms.arms[out.arm_index];
    out.extremal_value = p.argmin();

    PtsParams params(p, unit_scale ? unit_interval_scale(p) : c, 0.0);
    StrategyProfile profile = behavior_profile(pt, params, population.epsilon, behavior, mixture_width);

    SampledGroup sg = sample_group(model, population.k, rng);
    out.group = generate_group_reports(sg.signals, profile, population, rng);

    const std::size_t k = population.k;
    out.rewards.resize(k);
    for (std::size_t i = 0; i < k; ++i)
        out.rewards[i] = pts_payment(out.group.reports[i], out.group.reports[(i + 1) % k], params);

    std::size_t num_x = 0;
    for (std::size_t r : out.group.reports)
        if (r == out.extremal_value) ++num_x;
    out.epsilon_hat_raw = 1.0 - static_cast<double>(num_x) / static_cast<double>(k);
    double corrected = out.epsilon_hat_raw * static_cast<double>(m) / static_cast<double>(m - 1);
    out.epsilon_hat = std::clamp(corrected, 0.0, 1.0 - kStrictTol);
    return out;
}

namespace detail {

// The two half-group scoring distributions of the regularized variant: the
// largest coordinate is moved down (group A) or up (group B) by gamma/2, with
// the difference spread evenly over the remaining coordinates. Grid arms keep
// every coordinate at least gamma, so both shifts stay interior.
inline std::pair<SimplexPoint, SimplexPoint> split_arm(const SimplexPoint& p, double gamma) {
    const std::size_t m = p.size();
    std::size_t j = p.argmax();
    Vec a(m), b(m);
    double comp = gamma / (2.0 * static_cast<double>(m - 1));
    for (std::size_t i = 0; i < m; ++i) {
        a[i] = i == j ? p[i] - gamma / 2.0 : p[i] + comp;
        b[i] = i == j ? p[i] + gamma / 2.0 : p[i] - comp;
    }
    return {SimplexPoint(std::move(a)), SimplexPoint(std::move(b))};
}

struct RunAccumulator {
    Vec report_counts;
    Vec value_counts;
    std::size_t dishonest = 0;
    std::size_t agents = 0;

    explicit RunAccumulator(std::size_t m) : report_counts(m, 0.0), value_counts(m, 0.0) {}

    void absorb(const GroupReports& g) {
        for (std::size_t r : g.reports) report_counts[r] += 1.0;
        for (std::size_t s : g.signals) value_counts[s] += 1.0;
        dishonest += g.dishonest_count();
        agents += g.size();
    }
};

}  // namespace detail

// The full adaptive loop: one calibration group, an initialization pass over
// the arms, then bandit-driven rounds. Every simulated agent, the calibration
// group included, counts toward the totals and histograms.
inline RunResult run_adapts(const RunConfig& config) {
    PosteriorTable pt = derive_posterior(config.model);
    const std::size_t m = pt.size();
    config.population.validate(m);
    if (!(config.lambda >= 0.0)) throw std::invalid_argument("run_adapts: lambda must be >= 0");

    RunResult result;
    result.arms = discretize_simplex(m, config.gamma);
    const std::size_t A = result.arms.size();
    if (config.rounds < A) throw std::invalid_argument("run_adapts: rounds must cover every arm once");
    if (config.pinned_arm >= 0 && static_cast<std::size_t>(config.pinned_arm) >= A)
        throw std::invalid_argument("run_adapts: pinned arm out of range");
    const std::size_t k = config.population.k;
    if (config.indicator == IndicatorVariant::Regularized && (k < 8 || k % 2 != 0))
        throw std::invalid_argument("run_adapts: regularized indicator needs even k >= 8");

    Rng rng(config.seed);
    detail::RunAccumulator acc(m);

    EpsilonEstimate est = estimate_epsilon(config.model, config.population, result.arms, rng,
                                           config.behavior, config.mixture_width, config.c,
                                           config.unit_scale);
    result.epsilon_hat = est.epsilon_hat;
    acc.absorb(est.group);
    if (config.record_rounds) {
        RoundRecord rec;
        rec.t = 0;
        rec.arm = est.arm_index;
        rec.group = est.group;
        rec.rewards = est.rewards;
        rec.indicator_value = disagreement_indicator(est.group.reports);
        rec.dishonest = est.group.dishonest_count();
        result.records.push_back(std::move(rec));
    }

    // Everything downstream of the estimate depends only on (arm, eps_hat),
    // so params and profiles are fixed per arm for the whole run.
    std::vector<PtsParams> arm_params;
    std::vector<StrategyProfile> arm_profiles;
    std::vector<PtsParams> half_a_params, half_b_params;
    std::vector<StrategyProfile> half_a_profiles, half_b_profiles;
    arm_params.reserve(A);
    for (std::size_t a = 0; a < A; ++a) {
        const SimplexPoint& p = result.arms.arms[a];
        arm_params.emplace_back(p, config.unit_scale ? unit_interval_scale(p) : config.c,
                                est.epsilon_hat);
        arm_profiles.push_back(behavior_profile(pt, arm_params[a], config.population.epsilon,
                                                config.behavior, config.mixture_width));
        if (config.indicator == IndicatorVariant::Regularized) {
            auto [pa, pb] = detail::split_arm(p, config.gamma);
            half_a_params.emplace_back(pa, config.unit_scale ? unit_interval_scale(pa) : config.c,
                                       est.epsilon_hat);
            half_b_params.emplace_back(pb, config.unit_scale ? unit_interval_scale(pb) : config.c,
                                       est.epsilon_hat);
            half_a_profiles.push_back(behavior_profile(pt, half_a_params[a],
                                                       config.population.epsilon, config.behavior,
                                                       config.mixture_width));
            half_b_profiles.push_back(behavior_profile(pt, half_b_params[a],
                                                       config.population.epsilon, config.behavior,
                                                       config.mixture_width));
        }
    }

    // Plays one round at the given arm and returns the indicator value.
    auto play_round = [&](std::size_t t, std::size_t a) {
        SampledGroup sg = sample_group(config.model, k, rng);
        RoundRecord rec;
        rec.t = t;
        rec.arm = a;
        if (config.indicator == IndicatorVariant::Regularized) {
            const std::size_t h = k / 2;
            std::vector<std::size_t> sa(sg.signals.begin(), sg.signals.begin() + h);
            std::vector<std::size_t> sb(sg.signals.begin() + h, sg.signals.end());
            GroupReports ga = generate_group_reports(sa, half_a_profiles[a], config.population, rng);
            GroupReports gb = generate_group_reports(sb, half_b_profiles[a], config.population, rng);
            rec.indicator_value = regularized_indicator(ga.reports, gb.reports, config.lambda, rng);
            rec.rewards.resize(k);
            for (std::size_t i = 0; i < h; ++i) {
                rec.rewards[i] = pts_payment(ga.reports[i], ga.reports[(i + 1) % h], half_a_params[a]);
                rec.rewards[h + i] =
                    pts_payment(gb.reports[i], gb.reports[(i + 1) % h], half_b_params[a]);
            }
            rec.group.signals = sg.signals;
            rec.group.reports = ga.reports;
            rec.group.reports.insert(rec.group.reports.end(), gb.reports.begin(), gb.reports.end());
            rec.group.honest_flags = ga.honest_flags;
            rec.group.honest_flags.insert(rec.group.honest_flags.end(), gb.honest_flags.begin(),
                                          gb.honest_flags.end());
            rec.group.rational_flags = ga.rational_flags;
            rec.group.rational_flags.insert(rec.group.rational_flags.end(),
                                            gb.rational_flags.begin(), gb.rational_flags.end());
        } else {
            rec.group = generate_group_reports(sg.signals, arm_profiles[a], config.population, rng);
            rec.rewards.resize(k);
            for (std::size_t i = 0; i < k; ++i)
                rec.rewards[i] =
                    pts_payment(rec.group.reports[i], rec.group.reports[(i + 1) % k], arm_params[a]);
            rec.indicator_value = config.indicator == IndicatorVariant::Plain
                                      ? disagreement_indicator(rec.group.reports)
                                      : 0.0;
        }
        rec.dishonest = rec.group.dishonest_count();
        acc.absorb(rec.group);
        double value = rec.indicator_value;
        std::vector<std::size_t> reports = rec.group.reports;
        if (config.record_rounds)
            result.records.push_back(std::move(rec));
        return std::make_pair(value, std::move(reports));
    };

    if (config.indicator == IndicatorVariant::Biased) {
        std::size_t first_epoch = 0;
        while ((std::size_t{1} << first_epoch) < std::max<std::size_t>(2, A)) ++first_epoch;
        EpochState state(first_epoch, A, m);
        std::size_t played = 0;
        std::size_t t = 0;
        while (played < config.rounds) {
            const std::size_t target = std::min(state.rounds(), config.rounds - played);
            Mat freq_sum(A, Vec(m, 0.0));
            std::vector<std::size_t> epoch_pulls(A, 0);
            for (std::size_t e = 1; e <= target; ++e) {
                std::size_t a;
                if (config.pinned_arm >= 0)
                    a = static_cast<std::size_t>(config.pinned_arm);
                else if (e <= A)
                    a = e - 1;
                else
                    a = ucb1_select(state.stats);
                ++t;
                auto [ignored, reports] = play_round(t, a);
                (void)ignored;
                Vec freq(m, 0.0);
                for (std::size_t r : reports) freq[r] += 1.0;
                for (double& f : freq) f /= static_cast<double>(k);
                double value = biased_indicator(reports, state.f_low, state.f_high);
                if (config.record_rounds) result.records.back().indicator_value = value;
                ucb1_update(state.stats, a, value);
                for (std::size_t x = 0; x < m; ++x) freq_sum[a][x] += freq[x];
                epoch_pulls[a] += 1;
            }
            EpochSummary summary;
            summary.epoch_index = state.epoch_index;
            summary.rounds = target;
            summary.pulls = epoch_pulls;
            summary.f_low = state.f_low;
            summary.f_high = state.f_high;
            result.epochs.push_back(std::move(summary));

            Mat freq_mean(A, Vec(m, 0.0));
            for (std::size_t a = 0; a < A; ++a)
                if (epoch_pulls[a] > 0)
                    for (std::size_t x = 0; x < m; ++x)
                        freq_mean[a][x] = freq_sum[a][x] / static_cast<double>(epoch_pulls[a]);
            result.final_stats = state.stats;
            epoch_advance(state, freq_mean, epoch_pulls);
            played += target;
        }
    } else {
        ArmStats stats(A);
        for (std::size_t t = 1; t <= config.rounds; ++t) {
            std::size_t a;
            if (config.pinned_arm >= 0)
                a = static_cast<std::size_t>(config.pinned_arm);
            else if (t <= A)
                a = t - 1;
            else
                a = ucb1_select(stats);
            auto [value, reports] = play_round(t, a);
            (void)reports;
            ucb1_update(stats, a, value);
        }
        result.final_stats = std::move(stats);
    }

    result.dishonest_total = acc.dishonest;
    result.n = acc.agents;
    result.honest_total = result.n - result.dishonest_total;
    result.h_reports = acc.report_counts;
    result.h_values = acc.value_counts;
    for (double& v : result.h_reports) v /= static_cast<double>(result.n);
    for (double& v : result.h_values) v /= static_cast<double>(result.n);
    return result;
}

inline double histogram_l1(const RunResult& result) {
    double l1 = 0.0;
    for (std::size_t x = 0; x < result.h_reports.size(); ++x)
        l1 += std::abs(result.h_reports[x] - result.h_values[x]);
    return l1;
}

inline std::size_t dishonesty_count(const RunResult& result) { return result.dishonest_total; }

}  // namespace adapts
