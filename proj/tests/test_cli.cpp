#include <catch_amalgamated.hpp>

#include <adapts/adapts.hpp>

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"

using namespace adapts;

namespace {

const char* kFullConfig = R"(# sample settings
[model]
omega_weights = 0.5 0.5
likelihood = 0.8 0.2 | 0.2 0.8

[population]
k = 10
epsilon = 0.1
noise = biased
biased_table = 1 0

[mechanism]
gamma = 0.2
c = 2.0
unit_scale = true
indicator = biased
lambda = 0.5

[behavior]
model = smooth-mixture
mixture_width = 0.1

[run]
rounds = 512
pinned_arm = 1
record_rounds = false

[experiment]
t_min_log2 = 8
t_max_log2 = 12
)";

std::string read_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::filesystem::path scratch_dir() {
    std::filesystem::path dir = std::filesystem::current_path() / "unit_cli_tmp";
    std::filesystem::create_directories(dir);
    return dir;
}

ExperimentConfig phase_fixture_config() {
    ExperimentConfig cfg;
    cfg.run.model = binary_symmetric_fixture();
    cfg.run.population.k = 10;
    cfg.run.population.epsilon = 0.1;
    cfg.run.gamma = 0.1;
    return cfg;
}

}  // namespace

TEST_CASE("config text splits into sections and keys", "[cli]") {
    ConfigSections sections = parse_config_text(kFullConfig);
    REQUIRE(sections.size() == 6);
    REQUIRE(sections.at("model").at("omega_weights") == "0.5 0.5");
    REQUIRE(sections.at("run").at("rounds") == "512");
}

TEST_CASE("config text rejects malformed lines", "[cli]") {
    REQUIRE_THROWS_AS(parse_config_text("[model\nk = 1\n"), ConfigError);
    REQUIRE_THROWS_AS(parse_config_text("k = 1\n"), ConfigError);
    REQUIRE_THROWS_AS(parse_config_text("[run]\nrounds\n"), ConfigError);
    REQUIRE_THROWS_AS(parse_config_text("[run]\nrounds =\n"), ConfigError);
    REQUIRE_THROWS_AS(parse_config_text("[run]\nrounds = 1\nrounds = 2\n"), ConfigError);
    REQUIRE_NOTHROW(parse_config_text("; comment only\n# another\n"));
}

TEST_CASE("interpreted settings land in the typed configuration", "[cli]") {
    ExperimentConfig cfg = interpret_config(parse_config_text(kFullConfig));
    REQUIRE(cfg.run.model.num_signals() == 2);
    REQUIRE(cfg.run.population.k == 10);
    REQUIRE(testutil::close(cfg.run.population.epsilon, 0.1, 1e-15));
    REQUIRE(cfg.run.population.noise_kind == NoiseKind::Biased);
    REQUIRE(cfg.run.population.biased_table == Vec{1.0, 0.0});
    REQUIRE(testutil::close(cfg.run.gamma, 0.2, 1e-15));
    REQUIRE(testutil::close(cfg.run.c, 2.0, 1e-15));
    REQUIRE(cfg.run.unit_scale);
    REQUIRE(cfg.run.indicator == IndicatorVariant::Biased);
    REQUIRE(testutil::close(cfg.run.lambda, 0.5, 1e-15));
    REQUIRE(cfg.run.behavior == BehaviorModel::SmoothMixture);
    REQUIRE(testutil::close(cfg.run.mixture_width, 0.1, 1e-15));
    REQUIRE(cfg.run.rounds == 512);
    REQUIRE(cfg.run.pinned_arm == 1);
    REQUIRE_FALSE(cfg.run.record_rounds);
    REQUIRE(cfg.t_min_log2 == 8);
    REQUIRE(cfg.t_max_log2 == 12);
}

TEST_CASE("model rows are normalized before validation", "[cli]") {
    ExperimentConfig cfg = interpret_config(parse_config_text(
        "[model]\nomega_weights = 5 5\nlikelihood = 8 2 | 2 8\n"));
    REQUIRE(testutil::close(cfg.run.model.omega_weights[0], 0.5, 1e-15));
    REQUIRE(testutil::close(cfg.run.model.likelihood[0][0], 0.8, 1e-15));
    PosteriorTable pt = derive_posterior(cfg.run.model);
    REQUIRE(testutil::close(pt.rows[0][0], 0.68, 1e-12));
}

TEST_CASE("unknown settings are hard errors", "[cli]") {
    const std::string base = "[model]\nomega_weights = 0.5 0.5\nlikelihood = 0.8 0.2 | 0.2 0.8\n";
    REQUIRE_NOTHROW(interpret_config(parse_config_text(base)));
    REQUIRE_THROWS_AS(interpret_config(parse_config_text(base + "[model2]\nx = 1\n")),
                      ConfigError);
    REQUIRE_THROWS_AS(interpret_config(parse_config_text(base + "[run]\nround = 10\n")),
                      ConfigError);
    REQUIRE_THROWS_AS(interpret_config(parse_config_text(base + "[mechanism]\nindicator = fancy\n")),
                      ConfigError);
    REQUIRE_THROWS_AS(interpret_config(parse_config_text(base + "[behavior]\nmodel = stubborn\n")),
                      ConfigError);
    REQUIRE_THROWS_AS(interpret_config(parse_config_text(base + "[population]\nnoise = loud\n")),
                      ConfigError);
}

TEST_CASE("out-of-range settings are hard errors", "[cli]") {
    const std::string base = "[model]\nomega_weights = 0.5 0.5\nlikelihood = 0.8 0.2 | 0.2 0.8\n";
    REQUIRE_THROWS_AS(interpret_config(parse_config_text(base + "[population]\nk = 1\n")),
                      ConfigError);
    REQUIRE_THROWS_AS(interpret_config(parse_config_text(base + "[population]\nepsilon = 1.0\n")),
                      ConfigError);
    REQUIRE_THROWS_AS(interpret_config(parse_config_text(base + "[population]\nnoise = biased\n")),
                      ConfigError);
    REQUIRE_THROWS_AS(interpret_config(parse_config_text(base + "[mechanism]\ngamma = 1.5\n")),
                      ConfigError);
    REQUIRE_THROWS_AS(interpret_config(parse_config_text(base + "[mechanism]\nc = 0\n")),
                      ConfigError);
    REQUIRE_THROWS_AS(
        interpret_config(parse_config_text(base + "[experiment]\nt_min_log2 = 12\nt_max_log2 = 8\n")),
        ConfigError);
    REQUIRE_THROWS_AS(interpret_config(parse_config_text(
                          "[model]\nomega_weights = 0.5 0.5\nlikelihood = 1 0 | 0.2 0.8\n")),
                      ConfigError);
}

TEST_CASE("missing config files raise a configuration error", "[cli]") {
    REQUIRE_THROWS_AS(load_config("does_not_exist.ini"), ConfigError);
}

TEST_CASE("csv cells use stable formatting", "[cli]") {
    REQUIRE(csv_cell(0.1) == "0.1");
    REQUIRE(csv_cell(0.0) == "0");
    REQUIRE(csv_cell(1.0 / 3.0) == "0.333333333333");
    REQUIRE(csv_cell(1e-9) == "1e-09");
    REQUIRE(csv_cell(std::size_t{42}) == "42");
    REQUIRE(csv_cell(-3L) == "-3");
    REQUIRE(csv_cell(7) == "7");
    REQUIRE(csv_cell("header") == "header");
}

TEST_CASE("log curve fitting recovers exact coefficients", "[cli]") {
    std::vector<double> ns, ys;
    for (int lg = 10; lg <= 16; ++lg) {
        double n = std::pow(2.0, lg);
        ns.push_back(n);
        ys.push_back(3.7 * std::log(n) - 2.2);
    }
    CurveFit fit = fit_log_curve(ns, ys);
    REQUIRE(testutil::close(fit.a, 3.7, 1e-9));
    REQUIRE(testutil::close(fit.b, -2.2, 1e-9));
    REQUIRE(testutil::close(fit.r2, 1.0, 1e-12));

    REQUIRE_THROWS_AS(fit_log_curve({1024.0}, {1.0}), std::invalid_argument);
    REQUIRE_THROWS_AS(fit_log_curve({64.0, 64.0}, {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("phase sweep labels the three reporting regimes", "[cli]") {
    std::vector<PhaseRow> rows = phase_diagram(phase_fixture_config(), 200, 2);
    REQUIRE(rows.size() == 9);
    for (std::size_t a = 0; a < rows.size(); ++a) {
        REQUIRE(rows[a].arm_index == a);
        REQUIRE(testutil::close(rows[a].p_x, 0.1 * static_cast<double>(a + 1), 1e-12));
        int expected = a <= 2 ? 1 : (a <= 5 ? 2 : 3);
        REQUIRE(rows[a].phase == expected);
    }

    double min_mid = 1.0, max_edge = 0.0;
    for (const PhaseRow& r : rows) {
        if (r.phase == 2) {
            min_mid = std::min(min_mid, r.mean_disagreement);
            REQUIRE(std::abs(r.mean_freq_x - 0.5) < 0.06);
            REQUIRE(r.se_freq_x > 0.001);
            REQUIRE(r.se_freq_x < 0.05);
        } else {
            max_edge = std::max(max_edge, r.mean_disagreement);
        }
    }
    REQUIRE(min_mid > max_edge);
}

TEST_CASE("simulation summaries are deterministic in the seed", "[cli]") {
    ExperimentConfig cfg;
    cfg.run = testutil::small_run_config();
    std::vector<SimSummary> a = simulate_replicates(cfg, 3, 11);
    std::vector<SimSummary> b = simulate_replicates(cfg, 3, 11);
    REQUIRE(a.size() == 3);
    for (std::size_t i = 0; i < a.size(); ++i) {
        REQUIRE(a[i].seed == 11 + i);
        REQUIRE(a[i].n == (cfg.run.rounds + 1) * cfg.run.population.k);
        REQUIRE(a[i].seed == b[i].seed);
        REQUIRE(a[i].epsilon_hat == b[i].epsilon_hat);
        REQUIRE(a[i].dishonest_total == b[i].dishonest_total);
        REQUIRE(a[i].honest_total == b[i].honest_total);
        REQUIRE(a[i].l1 == b[i].l1);
        REQUIRE(a[i].top_arm == b[i].top_arm);
        REQUIRE(a[i].top_arm_share == b[i].top_arm_share);
    }
}

TEST_CASE("experiment writers emit identical bytes on identical inputs", "[cli]") {
    std::filesystem::path dir = scratch_dir();

    ExperimentConfig sim_cfg;
    sim_cfg.run = testutil::small_run_config();
    std::vector<SimSummary> sims = simulate_replicates(sim_cfg, 2, 3);
    write_sim_csv((dir / "sim_a.csv").string(), sims);
    write_sim_csv((dir / "sim_b.csv").string(), sims);
    REQUIRE(read_bytes(dir / "sim_a.csv") == read_bytes(dir / "sim_b.csv"));

    std::vector<PhaseRow> phase = phase_diagram(phase_fixture_config(), 20, 5);
    write_phase_csv((dir / "phase_a.csv").string(), phase);
    write_phase_csv((dir / "phase_b.csv").string(), phase);
    REQUIRE(read_bytes(dir / "phase_a.csv") == read_bytes(dir / "phase_b.csv"));

    ExperimentConfig curve_cfg;
    curve_cfg.run = testutil::small_run_config();
    curve_cfg.t_min_log2 = 4;
    curve_cfg.t_max_log2 = 6;
    CurveResult curve = dishonesty_curve(curve_cfg, 2, 7);
    write_curve_csv((dir / "curve_a.csv").string(), curve);
    write_curve_csv((dir / "curve_b.csv").string(), curve);
    std::string curve_bytes = read_bytes(dir / "curve_a.csv");
    REQUIRE(curve_bytes == read_bytes(dir / "curve_b.csv"));
    REQUIRE(curve_bytes.find("# fit a=") != std::string::npos);

    std::vector<CheckResult> checks = verify_suite(5, 123);
    write_verify_csv((dir / "verify_a.csv").string(), checks);
    write_verify_csv((dir / "verify_b.csv").string(), checks);
    REQUIRE(read_bytes(dir / "verify_a.csv") == read_bytes(dir / "verify_b.csv"));
}

TEST_CASE("the verification suite passes on a small random corpus", "[cli]") {
    std::vector<CheckResult> checks = verify_suite(20, 4242);
    REQUIRE(checks.size() == 8);
    for (const CheckResult& c : checks) {
        INFO(c.name << ": " << c.detail);
        REQUIRE(c.pass);
    }
}

TEST_CASE("rerunning an experiment yields byte-identical output files", "[cli]") {
    std::filesystem::path dir = scratch_dir();
    ExperimentConfig cfg;
    cfg.run = testutil::small_run_config();

    write_sim_csv((dir / "rerun_a.csv").string(), simulate_replicates(cfg, 2, 21));
    write_sim_csv((dir / "rerun_b.csv").string(), simulate_replicates(cfg, 2, 21));
    REQUIRE(read_bytes(dir / "rerun_a.csv") == read_bytes(dir / "rerun_b.csv"));
}
