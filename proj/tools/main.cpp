#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <adapts/adapts.hpp>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitConfigError = 2;

// Companion quick-look script: plots every numeric column of the CSV against
// its first column.
void write_plot_script(const std::string& csv_path) {
    const std::string path = csv_path + ".plot.py";
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << "#!/usr/bin/env python3\n"
           "\"\"\"Quick-look plot: first CSV column against every other numeric column.\"\"\"\n"
           "import csv\n"
           "import sys\n"
           "\n"
           "import matplotlib.pyplot as plt\n"
           "\n"
           "path = sys.argv[1] if len(sys.argv) > 1 else "
        << '"' << csv_path << '"'
        << "\n"
           "with open(path, newline=\"\") as fh:\n"
           "    rows = [r for r in csv.reader(fh) if r and not r[0].startswith(\"#\")]\n"
           "header, data = rows[0], rows[1:]\n"
           "\n"
           "def column(i):\n"
           "    try:\n"
           "        return [float(r[i]) for r in data]\n"
           "    except ValueError:\n"
           "        return None\n"
           "\n"
           "x = column(0)\n"
           "for i in range(1, len(header)):\n"
           "    y = column(i)\n"
           "    if y is not None:\n"
           "        plt.plot(x, y, marker=\"o\", label=header[i])\n"
           "plt.xlabel(header[0])\n"
           "plt.legend()\n"
           "plt.tight_layout()\n"
           "plt.savefig(path.rsplit(\".\", 1)[0] + \".png\", dpi=150)\n";
}

struct CommandArgs {
    std::string config_path;
    std::string out_path;
    long replicates = 0;
    std::uint64_t seed = 1;
    bool plot_script = false;
};

int run_simulate(const CommandArgs& args) {
    adapts::ExperimentConfig cfg = adapts::load_config(args.config_path);
    auto rows = adapts::simulate_replicates(cfg, static_cast<std::size_t>(args.replicates),
                                            args.seed);
    adapts::write_sim_csv(args.out_path, rows);
    if (args.plot_script) write_plot_script(args.out_path);
    double mean_dishonest = 0.0, mean_l1 = 0.0;
    for (const auto& r : rows) {
        mean_dishonest += static_cast<double>(r.dishonest_total);
        mean_l1 += r.l1;
    }
    mean_dishonest /= static_cast<double>(rows.size());
    mean_l1 /= static_cast<double>(rows.size());
    std::cout << "simulate: " << rows.size() << " replicate(s), n=" << rows.front().n
              << ", mean dishonest " << adapts::csv_cell(mean_dishonest) << ", mean l1 "
              << adapts::csv_cell(mean_l1) << "\n"
              << "wrote " << args.out_path << "\n";
    return kExitOk;
}

int run_phase_diagram(const CommandArgs& args) {
    adapts::ExperimentConfig cfg = adapts::load_config(args.config_path);
    auto rows = adapts::phase_diagram(cfg, static_cast<std::size_t>(args.replicates), args.seed);
    adapts::write_phase_csv(args.out_path, rows);
    if (args.plot_script) write_plot_script(args.out_path);
    std::cout << "phase-diagram: " << rows.size() << " arms, " << args.replicates
              << " groups per arm\n"
              << "wrote " << args.out_path << "\n";
    return kExitOk;
}

int run_dishonesty_curve(const CommandArgs& args) {
    adapts::ExperimentConfig cfg = adapts::load_config(args.config_path);
    adapts::CurveResult result =
        adapts::dishonesty_curve(cfg, static_cast<std::size_t>(args.replicates), args.seed);
    adapts::write_curve_csv(args.out_path, result);
    if (args.plot_script) write_plot_script(args.out_path);
    std::cout << "dishonesty-curve: " << result.points.size() << " round counts, fit a="
              << adapts::csv_cell(result.fit.a) << " b=" << adapts::csv_cell(result.fit.b)
              << " r2=" << adapts::csv_cell(result.fit.r2) << "\n"
              << "wrote " << args.out_path << "\n";
    return kExitOk;
}

int run_verify(const CommandArgs& args) {
    if (!args.config_path.empty()) adapts::load_config(args.config_path);
    if (args.replicates == 0)
        std::cerr << "warning: empty corpus, randomized checks pass vacuously\n";
    auto results =
        adapts::verify_suite(static_cast<std::size_t>(args.replicates), args.seed);
    bool all_pass = true;
    for (const auto& c : results) {
        std::cout << (c.pass ? "pass" : "FAIL") << "  " << c.name << "  (" << c.detail << ")\n";
        all_pass = all_pass && c.pass;
    }
    if (!args.out_path.empty()) adapts::write_verify_csv(args.out_path, results);
    std::cout << (all_pass ? "verify: all checks passed\n" : "verify: some checks FAILED\n");
    return all_pass ? kExitOk : kExitVerifyFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulation laboratory for adaptively tuned peer-prediction payments"};
    app.require_subcommand(1);

    CommandArgs sim_args, phase_args, curve_args, verify_args;

    CLI::App* sim = app.add_subcommand("simulate", "Run the adaptive loop and summarize replicates");
    sim->add_option("--config", sim_args.config_path, "Path to the experiment config")->required();
    sim->add_option("--out", sim_args.out_path, "Output CSV path")->required();
    sim->add_option("--replicates", sim_args.replicates, "Number of seeded replicates")
        ->default_val(1)
        ->check(CLI::PositiveNumber);
    sim->add_option("--seed", sim_args.seed, "Base seed")->default_val(1);
    sim->add_flag("--plot-script", sim_args.plot_script, "Also write a quick-look plot script");

    CLI::App* phase = app.add_subcommand("phase-diagram", "Sweep the arm grid and record report behavior");
    phase->add_option("--config", phase_args.config_path, "Path to the experiment config")->required();
    phase->add_option("--out", phase_args.out_path, "Output CSV path")->required();
    phase->add_option("--replicates", phase_args.replicates, "Groups simulated per arm")
        ->default_val(1000)
        ->check(CLI::PositiveNumber);
    phase->add_option("--seed", phase_args.seed, "Base seed")->default_val(1);
    phase->add_flag("--plot-script", phase_args.plot_script, "Also write a quick-look plot script");

    CLI::App* curve = app.add_subcommand("dishonesty-curve",
                                         "Measure dishonest-report growth across round counts");
    curve->add_option("--config", curve_args.config_path, "Path to the experiment config")->required();
    curve->add_option("--out", curve_args.out_path, "Output CSV path")->required();
    curve->add_option("--replicates", curve_args.replicates, "Seeds averaged per round count")
        ->default_val(30)
        ->check(CLI::PositiveNumber);
    curve->add_option("--seed", curve_args.seed, "Base seed")->default_val(1);
    curve->add_flag("--plot-script", curve_args.plot_script, "Also write a quick-look plot script");

    CLI::App* verify = app.add_subcommand("verify", "Run the randomized property suite");
    verify->add_option("--config", verify_args.config_path,
                       "Optional config to validate before running");
    verify->add_option("--out", verify_args.out_path, "Optional CSV summary path");
    verify->add_option("--replicates", verify_args.replicates, "Corpus size for randomized checks")
        ->default_val(1000)
        ->check(CLI::NonNegativeNumber);
    verify->add_option("--seed", verify_args.seed, "Base seed")->default_val(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfigError;
    }

    try {
        if (sim->parsed()) return run_simulate(sim_args);
        if (phase->parsed()) return run_phase_diagram(phase_args);
        if (curve->parsed()) return run_dishonesty_curve(curve_args);
        if (verify->parsed()) return run_verify(verify_args);
    } catch (const adapts::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
    return kExitConfigError;
}
