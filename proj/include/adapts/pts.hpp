#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "belief.hpp"
#include "strategy.hpp"

namespace adapts {

// Payment-rule parameters: the scoring distribution p, the scale c, and the
// mechanism's noise estimate epsilon_hat.
struct PtsParams {
    SimplexPoint p;
    double c = 1.0;
    double epsilon_hat = 0.0;

    PtsParams(SimplexPoint p_, double c_ = 1.0, double epsilon_hat_ = 0.0)
        : p(std::move(p_)), c(c_), epsilon_hat(epsilon_hat_) {
        if (!(c > 0.0)) throw std::invalid_argument("PtsParams: c must be positive");
        if (!(epsilon_hat >= 0.0) || !(epsilon_hat < 1.0))
            throw std::invalid_argument("PtsParams: epsilon_hat must lie in [0,1)");
    }

    std::size_t m() const { return p.size(); }
};

// Payment to an agent reporting x whose peer reported y. The constant part
// divides by the probability of the agent's own report.
inline double pts_payment(std::size_t report_x, std::size_t peer_y, const PtsParams& params) {
    const std::size_t m = params.m();
    if (report_x >= m || peer_y >= m) throw std::invalid_argument("pts_payment: value out of range");
    double match = report_x == peer_y ? 1.0 : 0.0;
    return params.c * match / params.p[report_x] -
           params.c * params.epsilon_hat / (static_cast<double>(m) * params.p[report_x]);
}

// Scale keeping every payment inside [-1, 1]: the product of all entries of p.
inline double unit_interval_scale(const SimplexPoint& p) {
    double c = 1.0;
    for (std::size_t x = 0; x < p.size(); ++x) c *= p[x];
    return c;
}

// Expected payoff of reporting y given signal x, with every peer rational with
// probability 1-epsilon (noisy peers report uniformly) and rational peers
// following peer_profile. The epsilon and epsilon_hat parts are combined into
// one term so that matched estimates cancel without rounding residue.
inline Mat expected_payoff_matrix(const PosteriorTable& pt, const PtsParams& params,
                                  const StrategyProfile& peer_profile, double epsilon) {
    const std::size_t m = pt.size();
    if (params.m() != m || peer_profile.size() != m)
        throw std::invalid_argument("expected_payoff_matrix: size mismatch");
    if (!(epsilon >= 0.0) || !(epsilon < 1.0))
        throw std::invalid_argument("expected_payoff_matrix: epsilon must lie in [0,1)");

    Mat M(m, Vec(m, 0.0));
    for (std::size_t x = 0; x < m; ++x)
        for (std::size_t y = 0; y < m; ++y) {
            double pr = 0.0;
            for (std::size_t z = 0; z < m; ++z) pr += pt.rows[x][z] * report_prob(peer_profile, z, y);
            M[x][y] = (params.c / params.p[y]) *
                      ((1.0 - epsilon) * pr +
                       (epsilon - params.epsilon_hat) / static_cast<double>(m));
        }
    return M;
}

// Strictness check for a deterministic profile played against itself: every
// signal's prescribed report must beat the best deviation by more than tol.
struct EquilibriumCheck {
    bool strict;
    double slack;
};

inline EquilibriumCheck is_strict_equilibrium(const PosteriorTable& pt, const PtsParams& params,
                                              const StrategyProfile& profile, double epsilon,
                                              double tol = kStrictTol) {
    if (!profile.deterministic())
        throw std::invalid_argument("is_strict_equilibrium: profile must be deterministic");
    const std::size_t m = pt.size();
    Mat M = expected_payoff_matrix(pt, params, profile, epsilon);
    double slack = std::numeric_limits<double>::infinity();
    for (std::size_t x = 0; x < m; ++x) {
        std::size_t r = prescribed_report(profile, x);
        double best_other = -std::numeric_limits<double>::infinity();
        for (std::size_t y = 0; y < m; ++y) {
            if (y == r) continue;
            best_other = std::max(best_other, M[x][y]);
        }
        slack = std::min(slack, M[x][r] - best_other);
    }
    return {slack > tol, slack};
}

}  // namespace adapts
