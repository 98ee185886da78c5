#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rng.hpp"

namespace adapts {

using Vec = std::vector<double>;
using Mat = std::vector<std::vector<double>>;

inline constexpr double kSimplexTol = 1e-12;
inline constexpr double kStrictTol = 1e-9;
inline constexpr double kRelevanceTol = 1e-9;

struct ConstructionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Fully mixed distribution over signal values: strictly positive entries
// summing to 1 within kSimplexTol.
struct SimplexPoint {
    Vec p;

    SimplexPoint() = default;
    explicit SimplexPoint(Vec entries) : p(std::move(entries)) {
        if (p.size() < 2) throw std::invalid_argument("SimplexPoint: need at least 2 entries");
        double sum = 0.0;
        for (double v : p) {
            if (!(v > 0.0)) throw std::invalid_argument("SimplexPoint: entries must be positive");
            sum += v;
        }
        if (std::abs(sum - 1.0) > kSimplexTol)
            throw std::invalid_argument("SimplexPoint: entries must sum to 1");
    }

    double operator[](std::size_t i) const { return p[i]; }
    std::size_t size() const { return p.size(); }

    std::size_t argmin() const {
        return static_cast<std::size_t>(std::min_element(p.begin(), p.end()) - p.begin());
    }
    std::size_t argmax() const {
        return static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
    }
    double min_entry() const { return *std::min_element(p.begin(), p.end()); }
};

inline SimplexPoint normalized(Vec weights) {
    double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(sum > 0.0)) throw std::invalid_argument("normalized: weights need a positive sum");
    for (double& v : weights) v /= sum;
    return SimplexPoint(std::move(weights));
}

// Pr(x) and Pr(peer signal y | own signal x), both derived from a world model.
struct PosteriorTable {
    Vec prior;
    Mat rows;  // rows[x][y]
    std::size_t size() const { return prior.size(); }
};

// Ground truth generator: a state grid with prior weights and one
// signal-likelihood row per state.
struct WorldModel {
    Vec omega_weights;
    Mat likelihood;  // likelihood[g][x] = Pr(signal x | state g)
    std::size_t num_states() const { return omega_weights.size(); }
    std::size_t num_signals() const { return likelihood.empty() ? 0 : likelihood[0].size(); }
};

// Marginalizes the state out of the model. Rejects models that are not fully
// mixed or whose posterior rows coincide (no stochastic relevance).
inline PosteriorTable derive_posterior(const WorldModel& model) {
    const Vec& w = model.omega_weights;
    const Mat& L = model.likelihood;
    if (w.empty() || L.size() != w.size())
        throw std::invalid_argument("derive_posterior: weights/likelihood shape mismatch");
    const std::size_t m = L[0].size();
    if (m < 2) throw std::invalid_argument("derive_posterior: need at least 2 signal values");

    double wsum = 0.0;
    for (double v : w) {
        if (!(v > 0.0)) throw std::invalid_argument("derive_posterior: state weights must be positive");
        wsum += v;
    }
    if (std::abs(wsum - 1.0) > kSimplexTol)
        throw std::invalid_argument("derive_posterior: state weights must sum to 1");
    for (const Vec& row : L) {
        if (row.size() != m) throw std::invalid_argument("derive_posterior: ragged likelihood");
        double rsum = 0.0;
        for (double v : row) {
            if (!(v > 0.0) || !(v < 1.0))
                throw std::invalid_argument("derive_posterior: likelihood entries must lie in (0,1)");
            rsum += v;
        }
        if (std::abs(rsum - 1.0) > kSimplexTol)
            throw std::invalid_argument("derive_posterior: likelihood rows must sum to 1");
    }

    PosteriorTable pt;
    pt.prior.assign(m, 0.0);
    for (std::size_t g = 0; g < w.size(); ++g)
        for (std::size_t x = 0; x < m; ++x) pt.prior[x] += w[g] * L[g][x];

    pt.rows.assign(m, Vec(m, 0.0));
    for (std::size_t g = 0; g < w.size(); ++g)
        for (std::size_t x = 0; x < m; ++x)
            for (std::size_t y = 0; y < m; ++y) pt.rows[x][y] += w[g] * L[g][x] * L[g][y];
    for (std::size_t x = 0; x < m; ++x)
        for (std::size_t y = 0; y < m; ++y) {
            pt.rows[x][y] /= pt.prior[x];
            if (!(pt.rows[x][y] > 0.0) || !(pt.rows[x][y] < 1.0))
                throw std::invalid_argument("derive_posterior: posterior not fully mixed");
        }

    for (std::size_t x = 0; x < m; ++x)
        for (std::size_t y = x + 1; y < m; ++y) {
            double diff = 0.0;
            for (std::size_t v = 0; v < m; ++v)
                diff = std::max(diff, std::abs(pt.rows[x][v] - pt.rows[y][v]));
            if (diff <= kRelevanceTol)
                throw std::invalid_argument("derive_posterior: posterior rows coincide for two signals");
        }
    return pt;
}

inline WorldModel make_world_model(Vec omega_weights, Mat likelihood) {
    WorldModel model{std::move(omega_weights), std::move(likelihood)};
    derive_posterior(model);
    return model;
}

// Worst-case margins of the three correlation inequalities a derived table
// satisfies: diagonal dominance over the prior, pairwise diagonal products
// over cross products, and the same along one supplied cycle.
struct CorrelationReport {
    double diagonal_slack;
    double pairwise_slack;
    double cycle_slack;
    bool all_strict(double tol = kStrictTol) const {
        return diagonal_slack > tol && pairwise_slack > tol && cycle_slack > tol;
    }
};

inline CorrelationReport verify_correlation_bounds(const PosteriorTable& pt,
                                                   const std::vector<std::size_t>& cycle) {
    const std::size_t m = pt.size();
    if (cycle.size() < 2 || cycle.size() > m)
        throw std::invalid_argument("verify_correlation_bounds: cycle length must be in [2, m]");
    for (std::size_t i = 0; i < cycle.size(); ++i) {
        if (cycle[i] >= m) throw std::invalid_argument("verify_correlation_bounds: cycle index out of range");
        for (std::size_t j = i + 1; j < cycle.size(); ++j)
            if (cycle[i] == cycle[j])
                throw std::invalid_argument("verify_correlation_bounds: cycle entries must be distinct");
    }

    CorrelationReport rep{};
    rep.diagonal_slack = std::numeric_limits<double>::infinity();
    for (std::size_t x = 0; x < m; ++x)
        rep.diagonal_slack = std::min(rep.diagonal_slack, pt.rows[x][x] - pt.prior[x]);

    rep.pairwise_slack = std::numeric_limits<double>::infinity();
    for (std::size_t x = 0; x < m; ++x)
        for (std::size_t y = x + 1; y < m; ++y)
            rep.pairwise_slack = std::min(
                rep.pairwise_slack, pt.rows[x][x] * pt.rows[y][y] - pt.rows[x][y] * pt.rows[y][x]);

    double diag = 1.0, shifted = 1.0;
    for (std::size_t i = 0; i < cycle.size(); ++i) {
        std::size_t a = cycle[i];
        std::size_t b = cycle[(i + 1) % cycle.size()];
        diag *= pt.rows[a][a];
        shifted *= pt.rows[a][b];
    }
    rep.cycle_slack = diag - shifted;
    return rep;
}

// Whether truthful reporting maximizes the scored ratio for every signal:
// rows[x][x]/p[x] > rows[x][y]/p[y] for all y != x. slack is the worst margin.
struct SelfPredictingCheck {
    bool holds;
    double slack;
};

inline SelfPredictingCheck self_predicting_holds(const PosteriorTable& pt, const SimplexPoint& p) {
    const std::size_t m = pt.size();
    if (p.size() != m) throw std::invalid_argument("self_predicting_holds: size mismatch");
    double slack = std::numeric_limits<double>::infinity();
    for (std::size_t x = 0; x < m; ++x) {
        double own = pt.rows[x][x] / p[x];
        for (std::size_t y = 0; y < m; ++y) {
            if (y == x) continue;
            slack = std::min(slack, own - pt.rows[x][y] / p[y]);
        }
    }
    return {slack > 0.0, slack};
}

namespace detail {

// Multiplicative shortest-path weights to the anchor over the posterior
// ratio graph, every edge damped by theta in (0,1]. The resulting weights
// satisfy w[x]/w[y] <= theta * rows[x][x]/rows[x][y] for every pair, so any
// theta below 1 leaves a uniform multiplicative margin. Returns false when
// the damping pushes some ratio cycle below 1 (no consistent weights).
inline bool anchored_path_weights(const PosteriorTable& pt, std::size_t anchor, double theta,
                                  Vec& w) {
    const std::size_t m = pt.size();
    Mat edge(m, Vec(m, 0.0));
    for (std::size_t x = 0; x < m; ++x)
        for (std::size_t y = 0; y < m; ++y)
            if (x != y) edge[x][y] = theta * (pt.rows[x][x] / pt.rows[x][y]);

    const double inf = std::numeric_limits<double>::infinity();
    Vec u(m, inf);
    u[anchor] = 1.0;
    for (std::size_t pass = 0; pass + 1 < m; ++pass)
        for (std::size_t x = 0; x < m; ++x)
            for (std::size_t y = 0; y < m; ++y) {
                if (x == y || u[y] == inf) continue;
                u[x] = std::min(u[x], edge[x][y] * u[y]);
            }
    if (u[anchor] < 1.0) return false;
    for (std::size_t x = 0; x < m; ++x)
        for (std::size_t y = 0; y < m; ++y)
            if (x != y && u[y] < inf && edge[x][y] * u[y] < u[x]) return false;
    w = std::move(u);
    return true;
}

}  // namespace detail

// Builds a scoring distribution that makes truthful reporting strictly
// optimal, by normalizing anchor-relative weights and then lowering every
// non-anchor entry by `shrink` to break ties. Throws ConstructionError when
// the shrink is too large (positivity) or too aggressive (strictness lost).
inline SimplexPoint construct_informative_p(const PosteriorTable& pt, std::size_t anchor,
                                            double shrink) {
    const std::size_t m = pt.size();
    if (anchor >= m) throw std::invalid_argument("construct_informative_p: anchor out of range");
    if (shrink < 0.0) throw std::invalid_argument("construct_informative_p: shrink must be >= 0");

    Vec w;
    if (!detail::anchored_path_weights(pt, anchor, 1.0, w))
        throw ConstructionError("construct_informative_p: ratio cycles are inconsistent");
    double sum = std::accumulate(w.begin(), w.end(), 0.0);
    Vec p(m);
    for (std::size_t x = 0; x < m; ++x) p[x] = w[x] / sum;

    for (std::size_t x = 0; x < m; ++x) {
        if (x == anchor) continue;
        p[x] -= shrink;
        if (!(p[x] > 0.0))
            throw ConstructionError("construct_informative_p: shrink exceeds an entry");
    }
    SimplexPoint out = normalized(std::move(p));
    if (!(self_predicting_holds(pt, out).slack > kStrictTol))
        throw ConstructionError("construct_informative_p: strictness not established");
    return out;
}

// Retry wrapper: damps every ratio edge by exp(-margin) so each inequality
// holds with a uniform multiplicative margin, starting from a quarter of the
// smallest pairwise cycle log-gap and halving the margin until the strict
// check passes (at most max_retries halvings).
inline SimplexPoint construct_informative_p(const PosteriorTable& pt, std::size_t anchor,
                                            int max_retries = 20, double* margin_used = nullptr) {
    const std::size_t m = pt.size();
    if (anchor >= m) throw std::invalid_argument("construct_informative_p: anchor out of range");

    double min_pair = std::numeric_limits<double>::infinity();
    for (std::size_t x = 0; x < m; ++x)
        for (std::size_t y = x + 1; y < m; ++y) {
            double cycle = (pt.rows[x][x] / pt.rows[x][y]) * (pt.rows[y][y] / pt.rows[y][x]);
            min_pair = std::min(min_pair, cycle);
        }
    if (!(min_pair > 1.0))
        throw ConstructionError("construct_informative_p: a pairwise ratio cycle is not above 1");

    double margin = 0.25 * std::log(min_pair);
    for (int attempt = 0; attempt <= max_retries; ++attempt, margin *= 0.5) {
        Vec w;
        if (!detail::anchored_path_weights(pt, anchor, std::exp(-margin), w)) continue;
        SimplexPoint out = normalized(std::move(w));
        if (self_predicting_holds(pt, out).slack > kStrictTol) {
            if (margin_used) *margin_used = margin;
            return out;
        }
    }
    throw ConstructionError("construct_informative_p: no workable margin found");
}

// Largest grid deviation around p that keeps the self-predicting condition:
// probes every resolution-grid offset with max-coordinate deviation <= delta
// (renormalized, positive entries only) and returns the last passing delta.
// Probing is exponential in the number of values; intended for small m.
inline double informative_region_radius(const PosteriorTable& pt, const SimplexPoint& p,
                                        double resolution) {
    const std::size_t m = pt.size();
    if (p.size() != m) throw std::invalid_argument("informative_region_radius: size mismatch");
    if (!(resolution > 0.0)) throw std::invalid_argument("informative_region_radius: resolution must be > 0");
    if (self_predicting_holds(pt, p).slack < 0.0)
        throw std::invalid_argument("informative_region_radius: p is not informative");

    // shell at level j: offsets in {-j..j}*resolution with at least one |offset| = j
    auto shell_passes = [&](long j) {
        const double delta = static_cast<double>(j) * resolution;
        std::vector<long> off(m, -j);
        while (true) {
            long maxabs = 0;
            for (long o : off) maxabs = std::max(maxabs, std::abs(o));
            if (maxabs == j) {
                Vec q(m);
                bool positive = true;
                double qsum = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    q[i] = p[i] + static_cast<double>(off[i]) * resolution;
                    if (!(q[i] > 0.0)) {
                        positive = false;
                        break;
                    }
                    qsum += q[i];
                }
                if (positive) {
                    double dev = 0.0;
                    for (std::size_t i = 0; i < m; ++i) {
                        q[i] /= qsum;
                        dev = std::max(dev, std::abs(q[i] - p[i]));
                    }
                    if (dev <= delta + 1e-12) {
                        SimplexPoint probe(std::move(q));
                        if (!(self_predicting_holds(pt, probe).slack > 0.0)) return false;
                    }
                }
            }
            std::size_t i = 0;
            while (i < m && off[i] == j) off[i++] = -j;
            if (i == m) break;
            ++off[i];
        }
        return true;
    };

    long j = 0;
    while (static_cast<double>(j + 1) * resolution <= 1.0) {
        if (!shell_passes(j + 1)) break;
        ++j;
    }
    return static_cast<double>(j) * resolution;
}

// Closed-form peer-belief table: staying on the diagonal gets weight beta of
// the remaining mass, off-diagonal cells keep the prior share of the rest.
struct BetaModelParams {
    SimplexPoint p1;
    double beta;
};

inline PosteriorTable make_beta_model(const BetaModelParams& params) {
    if (!(params.beta > 0.0) || !(params.beta < 1.0))
        throw std::invalid_argument("make_beta_model: beta must lie in (0,1)");
    const std::size_t m = params.p1.size();
    PosteriorTable pt;
    pt.prior = params.p1.p;
    pt.rows.assign(m, Vec(m, 0.0));
    for (std::size_t z = 0; z < m; ++z)
        for (std::size_t v = 0; v < m; ++v)
            pt.rows[z][v] = (z == v) ? params.p1[z] + (1.0 - params.p1[z]) * params.beta
                                     : params.p1[v] * (1.0 - params.beta);
    return pt;
}

// Random fully mixed model: uniform positive draws normalized per row,
// redrawn until the derived posterior has stochastically relevant rows.
inline WorldModel random_world_model(std::size_t num_signals, std::size_t num_states, Rng& rng) {
    if (num_signals < 2) throw std::invalid_argument("random_world_model: need at least 2 signals");
    if (num_states < 2) throw std::invalid_argument("random_world_model: need at least 2 states");
    for (int attempt = 0; attempt < 1000; ++attempt) {
        Vec w(num_states);
        for (double& v : w) v = 0.01 + 0.99 * rng.uniform01();
        double wsum = std::accumulate(w.begin(), w.end(), 0.0);
        for (double& v : w) v /= wsum;

        Mat L(num_states, Vec(num_signals));
        for (Vec& row : L) {
            for (double& v : row) v = 0.01 + 0.99 * rng.uniform01();
            double rsum = std::accumulate(row.begin(), row.end(), 0.0);
            for (double& v : row) v /= rsum;
        }
        WorldModel model{std::move(w), std::move(L)};
        try {
            derive_posterior(model);
            return model;
        } catch (const std::invalid_argument&) {
        }
    }
    throw std::runtime_error("random_world_model: could not draw a relevant model");
}

}  // namespace adapts
