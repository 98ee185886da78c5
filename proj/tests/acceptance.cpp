#include <adapts/adapts.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace adapts;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

WorldModel corpus_model(std::size_t index, Rng& rng) {
    const std::size_t m = 2 + index % 4;
    const std::size_t G = 2 + rng.uniform_index(19);
    return random_world_model(m, G, rng);
}

// --- criterion 1: posterior correlation inequalities on a random corpus ----

Outcome criterion_correlations() {
    Rng rng(20240001);
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < 1000; ++i) {
        WorldModel model = corpus_model(i, rng);
        PosteriorTable pt = derive_posterior(model);
        std::vector<std::size_t> cycle(pt.size());
        for (std::size_t x = 0; x < pt.size(); ++x) cycle[x] = x;
        CorrelationReport rep = verify_correlation_bounds(pt, cycle);
        worst = std::min({worst, rep.diagonal_slack, rep.pairwise_slack, rep.cycle_slack});
    }
    return {worst > 1e-9, "1000 models, worst slack " + num(worst)};
}

// --- criterion 2: informative scoring construction on the same corpus ------

Outcome criterion_construction() {
    Rng rng(20240001);
    Rng anchor_rng(20240002);
    double worst = std::numeric_limits<double>::infinity();
    bool all_ok = true;
    for (std::size_t i = 0; i < 1000; ++i) {
        WorldModel model = corpus_model(i, rng);
        PosteriorTable pt = derive_posterior(model);
        const std::size_t m = pt.size();
        SimplexPoint p = construct_informative_p(pt, anchor_rng.uniform_index(m));
        double slack = self_predicting_holds(pt, p).slack;
        worst = std::min(worst, slack);
        EquilibriumCheck eq =
            is_strict_equilibrium(pt, PtsParams(p, 1.0, 0.0), truthful_profile(m), 0.0);
        all_ok = all_ok && slack > 0.0 && eq.strict;
    }
    return {all_ok, "1000 constructions, worst slack " + num(worst)};
}

// --- criterion 3: collapse equilibrium at every grid arm -------------------

Outcome criterion_collapse() {
    Rng rng(20240003);
    bool all_ok = true;
    double worst = std::numeric_limits<double>::infinity();
    std::size_t arms_checked = 0;
    for (std::size_t i = 0; i < 100; ++i) {
        WorldModel model = corpus_model(i, rng);
        PosteriorTable pt = derive_posterior(model);
        const std::size_t m = pt.size();
        ArmSet arms = discretize_simplex(m, 0.1);
        for (const SimplexPoint& arm : arms.arms) {
            StrategyProfile collapse = canonical_non_surjective(arm);
            std::size_t target = arm.argmin();
            for (double eps : {0.0, 0.1, 0.3}) {
                PtsParams params(arm, 1.0, eps);
                Mat M = expected_payoff_matrix(pt, params, collapse, eps);
                for (std::size_t x = 0; x < m; ++x) {
                    if (!(M[x][target] > 0.0)) all_ok = false;
                    for (std::size_t y = 0; y < m; ++y)
                        if (y != target && M[x][y] != 0.0) all_ok = false;
                }
                EquilibriumCheck eq = is_strict_equilibrium(pt, params, collapse, eps);
                all_ok = all_ok && eq.strict;
                worst = std::min(worst, eq.slack);
            }
            ++arms_checked;
        }
    }
    return {all_ok, std::to_string(arms_checked) + " arms x 3 noise rates, worst slack " +
                        num(worst) + ", off-target deviations exactly zero"};
}

// --- criterion 4: truthful play maximizes exact expected disagreement ------

Outcome criterion_dominance() {
    bool all_ok = true;
    double worst_margin = std::numeric_limits<double>::infinity();
    for (const WorldModel& model : {binary_symmetric_fixture(), ternary_fixture()}) {
        const std::size_t m = model.num_signals();
        std::vector<std::size_t> truthful(m);
        for (std::size_t x = 0; x < m; ++x) truthful[x] = x;
        for (std::size_t k : {std::size_t{2}, std::size_t{3}}) {
            for (double eps : {0.0, 0.2}) {
                double base = exact_disagreement_expectation(model, truthful, eps, k);
                for (const auto& rho : all_non_surjective_maps(m)) {
                    double other = exact_disagreement_expectation(model, rho, eps, k);
                    double margin = base - other;
                    worst_margin = std::min(worst_margin, margin);
                    if (!(margin > 1e-12)) all_ok = false;
                }
            }
        }
    }
    return {all_ok, "both fixtures, k in {2,3}, worst margin " + num(worst_margin)};
}

// --- criterion 5: three-phase sweep over the scoring distribution ----------

Outcome criterion_phases() {
    ExperimentConfig cfg;
    cfg.run.model = binary_symmetric_fixture();
    cfg.run.population.k = 10;
    cfg.run.population.epsilon = 0.1;
    cfg.run.gamma = 0.1;
    std::vector<PhaseRow> rows = phase_diagram(cfg, 1000, 20240517);

    std::set<int> phases;
    double min_mid = std::numeric_limits<double>::infinity();
    double max_edge = -std::numeric_limits<double>::infinity();
    double worst_dev = 0.0;
    bool freq_ok = true;
    for (const PhaseRow& r : rows) {
        phases.insert(r.phase);
        if (r.phase == 2) {
            min_mid = std::min(min_mid, r.mean_disagreement);
            double dev = std::abs(r.mean_freq_x - 0.5);
            worst_dev = std::max(worst_dev, dev);
            if (!(dev <= 3.0 * r.se_freq_x)) freq_ok = false;
        } else {
            max_edge = std::max(max_edge, r.mean_disagreement);
        }
    }
    bool pass = phases == std::set<int>{1, 2, 3} && min_mid > max_edge && freq_ok;
    return {pass, "phases {1,2,3} present, mid disagreement " + num(min_mid) + " > edge " +
                      num(max_edge) + ", worst mid freq dev " + num(worst_dev)};
}

// --- criteria 6 and 7: dishonesty growth and histogram convergence ---------

const CurveResult& shared_curve() {
    static CurveResult result = [] {
        ExperimentConfig cfg;
        cfg.run.model = binary_symmetric_fixture();
        cfg.run.population.k = 10;
        cfg.run.population.epsilon = 0.0;
        cfg.run.gamma = 0.2;
        cfg.t_min_log2 = 10;
        cfg.t_max_log2 = 16;
        return dishonesty_curve(cfg, 30, 9001);
    }();
    return result;
}

Outcome criterion_log_growth() {
    const CurveResult& curve = shared_curve();
    const CurvePoint& last = curve.points.back();
    double final_ratio = last.mean_dishonest / static_cast<double>(last.n);

    RunConfig control;
    control.model = binary_symmetric_fixture();
    control.population.k = 10;
    control.population.epsilon = 0.0;
    control.gamma = 0.2;
    control.pinned_arm = 0;
    control.rounds = 4096;
    control.record_rounds = false;
    double control_ratio = 0.0;
    for (std::uint64_t s = 0; s < 5; ++s) {
        control.seed = 7700 + s;
        RunResult res = run_adapts(control);
        control_ratio += static_cast<double>(res.dishonest_total) / static_cast<double>(res.n);
    }
    control_ratio /= 5.0;

    bool pass = curve.fit.r2 >= 0.9 && final_ratio < 0.01 && control_ratio >= 0.1;
    return {pass, "r2 " + num(curve.fit.r2) + ", final dishonest share " + num(final_ratio) +
                      ", pinned control share " + num(control_ratio)};
}

Outcome criterion_histogram_band() {
    const CurveResult& curve = shared_curve();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const CurvePoint& p : curve.points) {
        double scaled = p.mean_l1 * static_cast<double>(p.n) / std::log(static_cast<double>(p.n));
        lo = std::min(lo, scaled);
        hi = std::max(hi, scaled);
    }
    bool pass = hi / lo < 4.0;
    return {pass, "scaled l1 band [" + num(lo) + ", " + num(hi) + "], ratio " + num(hi / lo)};
}

// --- criterion 8: noise rate estimation bias --------------------------------

Outcome criterion_estimation() {
    WorldModel model = binary_symmetric_fixture();
    PopulationConfig pop;
    pop.k = 20;
    pop.epsilon = 0.1;
    ArmSet arms = discretize_simplex(2, 0.1);
    Rng rng(20240008);
    double sum = 0.0;
    const int reps = 1000;
    for (int rep = 0; rep < reps; ++rep) sum += estimate_epsilon(model, pop, arms, rng).epsilon_hat;
    double mean = sum / static_cast<double>(reps);
    return {std::abs(mean - 0.1) <= 0.006, "mean estimate " + num(mean) + " over 1000 groups"};
}

// --- criterion 9: logarithmic growth of suboptimal bandit pulls ------------

Outcome criterion_bandit_pulls() {
    const std::size_t t_small = std::size_t{1} << 8;
    const std::size_t t_large = std::size_t{1} << 16;
    double sum_small = 0.0, sum_large = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng(seed);
        ArmStats stats(2);
        std::size_t at_small = 0;
        for (std::size_t t = 1; t <= t_large; ++t) {
            std::size_t arm = t <= 2 ? t - 1 : ucb1_select(stats);
            double value = rng.bernoulli(arm == 0 ? 0.6 : 0.5) ? 1.0 : 0.0;
            ucb1_update(stats, arm, value);
            if (t == t_small) at_small = stats.pulls[1];
        }
        sum_small += static_cast<double>(at_small);
        sum_large += static_cast<double>(stats.pulls[1]);
    }
    double mean_small = sum_small / 100.0;
    double mean_large = sum_large / 100.0;
    double bound = 4.0 * std::log(static_cast<double>(t_large) / static_cast<double>(t_small)) *
                   mean_small;
    bool pass = mean_large <= bound;
    return {pass, "suboptimal pulls " + num(mean_small) + " at 2^8 vs " + num(mean_large) +
                      " at 2^16, bound " + num(bound)};
}

// --- criterion 10: band variant concentrates on truthful arms --------------

Outcome criterion_band_share() {
    RunConfig cfg;
    cfg.model = binary_symmetric_fixture();
    cfg.population.k = 10;
    cfg.population.epsilon = 0.3;
    cfg.population.noise_kind = NoiseKind::Biased;
    cfg.population.biased_table = {1.0, 0.0};
    cfg.gamma = 0.2;
    cfg.indicator = IndicatorVariant::Biased;
    cfg.rounds = 262140;
    cfg.record_rounds = false;

    PosteriorTable pt = derive_posterior(cfg.model);
    double share_sum = 0.0;
    bool epochs_ok = true;
    for (std::uint64_t s = 0; s < 30; ++s) {
        cfg.seed = 42000 + s;
        RunResult res = run_adapts(cfg);
        if (res.epochs.empty() || !res.epochs.back().complete()) {
            epochs_ok = false;
            break;
        }
        const EpochSummary& last = res.epochs.back();
        std::size_t truthful_pulls = 0;
        for (std::size_t a = 0; a < res.arms.size(); ++a) {
            PtsParams params(res.arms.arms[a], 1.0, res.epsilon_hat);
            if (is_strict_equilibrium(pt, params, truthful_profile(2),
                                      cfg.population.epsilon).strict)
                truthful_pulls += last.pulls[a];
        }
        share_sum += static_cast<double>(truthful_pulls) / static_cast<double>(last.rounds);
    }
    double mean_share = share_sum / 30.0;
    bool pass = epochs_ok && mean_share >= 0.8;
    return {pass, "mean truthful pull share " + num(mean_share) + " in the final epoch"};
}

// --- criterion 11: byte-identical experiment outputs ------------------------

std::string file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Outcome criterion_determinism() {
    std::filesystem::path dir = std::filesystem::current_path() / "acceptance_tmp";
    std::filesystem::create_directories(dir);

    ExperimentConfig cfg;
    cfg.run.model = binary_symmetric_fixture();
    cfg.run.population.k = 10;
    cfg.run.population.epsilon = 0.1;
    cfg.run.gamma = 0.1;
    cfg.run.rounds = 512;
    cfg.t_min_log2 = 4;
    cfg.t_max_log2 = 7;

    bool pass = true;
    for (int round = 0; round < 2; ++round) {
        std::string tag = round == 0 ? "_a.csv" : "_b.csv";
        write_sim_csv((dir / ("sim" + tag)).string(), simulate_replicates(cfg, 2, 5));
        write_phase_csv((dir / ("phase" + tag)).string(), phase_diagram(cfg, 50, 7));
        write_curve_csv((dir / ("curve" + tag)).string(), dishonesty_curve(cfg, 2, 9));
        write_verify_csv((dir / ("verify" + tag)).string(), verify_suite(20, 11));
    }
    for (const char* name : {"sim", "phase", "curve", "verify"}) {
        std::string a = file_bytes(dir / (std::string(name) + "_a.csv"));
        std::string b = file_bytes(dir / (std::string(name) + "_b.csv"));
        if (a.empty() || a != b) pass = false;
    }
    return {pass, "simulate, phase sweep, curve and verify outputs rewritten byte-identically"};
}

struct Criterion {
    int number;
    const char* name;
    Outcome (*run)();
    double time_limit_s;
};

const Criterion kCriteria[] = {
    {1, "posterior correlation inequalities", criterion_correlations, 10.0},
    {2, "informative scoring construction", criterion_construction, 10.0},
    {3, "collapse equilibrium at grid arms", criterion_collapse, 30.0},
    {4, "truthful disagreement dominance", criterion_dominance, 60.0},
    {5, "three-phase scoring sweep", criterion_phases, 60.0},
    {6, "logarithmic dishonesty growth", criterion_log_growth, 0.0},
    {7, "histogram convergence band", criterion_histogram_band, 0.0},
    {8, "noise rate estimation", criterion_estimation, 5.0},
    {9, "bandit suboptimal pull growth", criterion_bandit_pulls, 30.0},
    {10, "band variant truthful share", criterion_band_share, 0.0},
    {11, "deterministic csv output", criterion_determinism, 0.0},
};

}  // namespace

int main(int argc, char** argv) {
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) {
        char* end = nullptr;
        long v = std::strtol(argv[i], &end, 10);
        if (end == argv[i] || *end != '\0' || v < 1 || v > 11) {
            std::fprintf(stderr, "usage: %s [criterion numbers 1..11]\n", argv[0]);
            return 2;
        }
        selected.insert(static_cast<int>(v));
    }

    bool all_pass = true;
    for (const Criterion& c : kCriteria) {
        if (!selected.empty() && selected.count(c.number) == 0) continue;
        auto start = std::chrono::steady_clock::now();
        Outcome out = c.run();
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        bool timed_out = c.time_limit_s > 0.0 && secs >= c.time_limit_s;
        bool pass = out.pass && !timed_out;
        all_pass = all_pass && pass;
        std::printf("%s criterion %d: %s (%s, %.1fs%s)\n", pass ? "PASS" : "FAIL", c.number,
                    c.name, out.detail.c_str(), secs, timed_out ? ", over time budget" : "");
    }
    return all_pass ? 0 : 1;
}
