#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "belief.hpp"

namespace adapts {

enum class ProfileKind { Truthful, NonSurjective, Mixture };

// How rational agents map signals to reports. Truthful fixes rho to the
// identity; NonSurjective plays rho whose image misses at least one value;
// Mixture plays the truthful action with per-signal probability mix_weight[x]
// and rho[x] otherwise.
struct StrategyProfile {
    ProfileKind kind = ProfileKind::Truthful;
    std::vector<std::size_t> rho;
    Vec mix_weight;

    std::size_t size() const { return rho.size(); }
    bool deterministic() const { return kind != ProfileKind::Mixture; }
};

inline bool is_surjective(const std::vector<std::size_t>& rho, std::size_t m) {
    std::vector<bool> hit(m, false);
    for (std::size_t r : rho) {
        if (r >= m) throw std::invalid_argument("is_surjective: report out of range");
        hit[r] = true;
    }
    return std::all_of(hit.begin(), hit.end(), [](bool b) { return b; });
}

inline StrategyProfile truthful_profile(std::size_t m) {
    if (m < 2) throw std::invalid_argument("truthful_profile: need at least 2 values");
    StrategyProfile out;
    out.kind = ProfileKind::Truthful;
    out.rho.resize(m);
    std::iota(out.rho.begin(), out.rho.end(), std::size_t{0});
    return out;
}

inline StrategyProfile non_surjective_profile(std::vector<std::size_t> rho) {
    const std::size_t m = rho.size();
    if (m < 2) throw std::invalid_argument("non_surjective_profile: need at least 2 values");
    if (is_surjective(rho, m))
        throw std::invalid_argument("non_surjective_profile: rho must miss a value");
    StrategyProfile out;
    out.kind = ProfileKind::NonSurjective;
    out.rho = std::move(rho);
    return out;
}

inline StrategyProfile mixture_profile(std::vector<std::size_t> rho, Vec mix_weight) {
    const std::size_t m = rho.size();
    if (m < 2) throw std::invalid_argument("mixture_profile: need at least 2 values");
    if (mix_weight.size() != m) throw std::invalid_argument("mixture_profile: weight size mismatch");
    for (std::size_t r : rho)
        if (r >= m) throw std::invalid_argument("mixture_profile: report out of range");
    for (double w : mix_weight)
        if (!(w >= 0.0) || !(w <= 1.0))
            throw std::invalid_argument("mixture_profile: weights must lie in [0,1]");
    StrategyProfile out;
    out.kind = ProfileKind::Mixture;
    out.rho = std::move(rho);
    out.mix_weight = std::move(mix_weight);
    return out;
}

// Wraps an arbitrary deterministic signal->report map in the narrowest kind:
// identity maps are Truthful, maps missing a value are NonSurjective, and the
// rare surjective non-identity map becomes a zero-weight Mixture.
inline StrategyProfile classify_deterministic(std::vector<std::size_t> rho) {
    const std::size_t m = rho.size();
    bool identity = true;
    for (std::size_t x = 0; x < m; ++x)
        if (rho[x] != x) identity = false;
    if (identity) return truthful_profile(m);
    if (!is_surjective(rho, m)) return non_surjective_profile(std::move(rho));
    return mixture_profile(std::move(rho), Vec(m, 0.0));
}

// Everyone reports the least likely value under p, ties to the lowest index.
inline StrategyProfile canonical_non_surjective(const SimplexPoint& p) {
    return non_surjective_profile(std::vector<std::size_t>(p.size(), p.argmin()));
}

inline std::size_t prescribed_report(const StrategyProfile& profile, std::size_t signal) {
    if (!profile.deterministic())
        throw std::invalid_argument("prescribed_report: profile is not deterministic");
    if (signal >= profile.size()) throw std::invalid_argument("prescribed_report: signal out of range");
    return profile.kind == ProfileKind::Truthful ? signal : profile.rho[signal];
}

// Probability that a rational agent holding signal z reports y.
inline double report_prob(const StrategyProfile& profile, std::size_t z, std::size_t y) {
    if (z >= profile.size() || y >= profile.size())
        throw std::invalid_argument("report_prob: value out of range");
    switch (profile.kind) {
        case ProfileKind::Truthful:
            return z == y ? 1.0 : 0.0;
        case ProfileKind::NonSurjective:
            return profile.rho[z] == y ? 1.0 : 0.0;
        case ProfileKind::Mixture: {
            double w = profile.mix_weight[z];
            return w * (z == y ? 1.0 : 0.0) + (1.0 - w) * (profile.rho[z] == y ? 1.0 : 0.0);
        }
    }
    return 0.0;
}

}  // namespace adapts
