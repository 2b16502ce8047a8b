// Command-line front end: run / replay / sweep / controls / verify.
// All physics lives in the library; this file only parses flags, loads
// configs and prints tables.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>

#include <CLI11.hpp>

#include "collapse/harness.hpp"
#include "collapse/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitVerify = 4;

struct CommonOpts {
    std::string config_path;
    std::string out_dir = "out";
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    bool quiet = false;
    bool verbose = false;
};

collapse::RunConfig load_config(const CommonOpts& opts) {
    collapse::RunConfig config = collapse::parse_run_config(opts.config_path);
    for (const std::string& kv : opts.overrides)
        collapse::apply_override(config, kv);
    if (opts.seed)
        config.seed = *opts.seed;
    return config;
}

void print_summary(const collapse::RunSummary& s, bool quiet) {
    if (quiet)
        return;
    std::cout << "seed=" << s.config.seed << " eps=" << s.config.epsilon()
              << " theta=" << s.config.theta;
    if (s.infeasible)
        std::cout << " INFEASIBLE (impossible outcome)";
    else if (s.converged)
        std::cout << " T_c=" << (s.t_c ? *s.t_c : -1)
                  << (s.c_settle ? " c_settle=" + std::to_string(*s.c_settle)
                                 : std::string{});
    else
        std::cout << " NOT CONVERGED at horizon";
    std::cout << "  (" << s.wall_seconds << " s)\n";
}

int cmd_run(const CommonOpts& opts) {
    const collapse::RunConfig config = load_config(opts);
    const collapse::RunResult result = collapse::run_pair(config);
    collapse::persist_run(result, config, opts.out_dir);
    if (!opts.quiet) {
        std::cout << "run complete: "
                  << (result.diag.converged ? "converged" : "not converged");
        if (result.diag.t_c)
            std::cout << ", T_c=" << *result.diag.t_c;
        std::cout << "; output in " << opts.out_dir << "\n";
    }
    return kExitOk;
}

int cmd_replay(const CommonOpts& opts, const std::string& history_path,
               const std::string& state_bits,
               const std::string& reference_bits) {
    collapse::RunConfig config = load_config(opts);
    config.field_mode = collapse::FieldMode::from_file;
    config.history_file = history_path;
    config.initial_state_2 = state_bits;
    config.initial_state_1 =
        reference_bits.empty() ? state_bits : reference_bits;

    const collapse::FieldHistory history =
        collapse::FieldHistory::load(history_path);
    if (history.n_vertices != config.n_vertices)
        throw std::runtime_error(
            "replay: history has N=" + std::to_string(history.n_vertices) +
            " but config has N=" + std::to_string(config.n_vertices));
    config.t_max = static_cast<int>(history.records.size()) /
                   config.n_vertices;
    if (config.t_max < config.block_m)
        config.block_m = std::max(1, config.t_max);

    const collapse::RunResult result = collapse::run_pair(config);
    collapse::persist_run(result, config, opts.out_dir);
    if (!opts.quiet)
        std::cout << "replay complete; output in " << opts.out_dir << "\n";
    return kExitOk;
}

int cmd_sweep(const CommonOpts& opts) {
    collapse::SweepSpec spec = collapse::parse_sweep_spec(opts.config_path);
    for (const std::string& kv : opts.overrides)
        collapse::apply_override(spec.base, kv);
    if (opts.seed)
        spec.base.seed = *opts.seed;
    spec.out_dir = opts.out_dir;

    std::vector<collapse::RunSummary> summaries;
    if (spec.axis == collapse::SweepAxis::epsilon) {
        const collapse::SweepResult r = collapse::run_epsilon_sweep(spec);
        summaries = r.summaries;
        if (!opts.quiet) {
            if (r.fit)
                std::cout << "power-law fit: slope=" << r.fit->slope
                          << " intercept=" << r.fit->intercept
                          << " residual=" << r.fit->residual << "\n";
            for (double e : r.excluded_epsilons)
                std::cout << "excluded from fit (non-converged runs): eps="
                          << e << "\n";
        }
    } else if (spec.axis == collapse::SweepAxis::theta) {
        for (double v : spec.values)
            if (v <= 0.0 || v >= std::numbers::pi / 2)
                std::cerr << "warning: theta=" << v
                          << " is at/beyond a non-mixing endpoint; expecting "
                             "non-convergence\n";
        summaries = collapse::run_theta_sweep(spec);
    } else {
        summaries = collapse::run_particle_sweep(spec);
    }
    for (const auto& s : summaries)
        print_summary(s, opts.quiet);
    return kExitOk;
}

int cmd_controls(const CommonOpts& opts, int n_seeds) {
    collapse::RunConfig base = load_config(opts);
    for (collapse::FieldMode mode :
         {collapse::FieldMode::all_ones, collapse::FieldMode::all_zeros,
          collapse::FieldMode::iid_uniform}) {
        collapse::RunConfig config = base;
        config.field_mode = mode;
        const auto summaries = collapse::run_field_controls(
            config, n_seeds,
            std::filesystem::path(opts.out_dir));
        if (!opts.quiet)
            std::cout << "== field mode " << collapse::to_string(mode)
                      << " ==\n";
        for (const auto& s : summaries)
            print_summary(s, opts.quiet);
    }
    return kExitOk;
}

int cmd_verify(bool verbose) {
    const auto checks = collapse::run_invariant_checks();
    bool all_pass = true;
    for (const auto& c : checks) {
        std::printf("%-32s %s", c.name.c_str(), c.pass ? "PASS" : "FAIL");
        if (verbose)
            std::printf("  (max error %.3e, tolerance %.0e)", c.max_error,
                        c.tolerance);
        std::printf("\n");
        all_pass = all_pass && c.pass;
    }
    return all_pass ? kExitOk : kExitVerify;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stochastic collapse dynamics on a periodic 1+1 lightcone "
                 "lattice"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string history_path, state_bits, reference_bits;
    int n_seeds = 5;

    auto add_common = [&](CLI::App* cmd, bool needs_config) {
        auto* c = cmd->add_option("--config", opts.config_path,
                                  "flat key=value config file");
        if (needs_config)
            c->required()->check(CLI::ExistingFile);
        cmd->add_option("--out", opts.out_dir, "output directory");
        cmd->add_option("--seed", opts.seed, "override the base seed");
        cmd->add_option("--set", opts.overrides,
                        "config override key=value (repeatable)");
        cmd->add_flag("--quiet", opts.quiet);
        cmd->add_flag("--verbose", opts.verbose);
    };

    auto* run = app.add_subcommand("run", "one paired collapse run");
    add_common(run, true);

    auto* replay =
        app.add_subcommand("replay", "replay a stored field history");
    add_common(replay, true);
    replay->add_option("--history", history_path, "field history file")
        ->required()
        ->check(CLI::ExistingFile);
    replay->add_option("--state", state_bits, "initial state bit string")
        ->required();
    replay->add_option("--reference", reference_bits,
                       "reference initial state bit string");

    auto* sweep = app.add_subcommand("sweep", "epsilon/theta/particle sweep");
    add_common(sweep, true);

    auto* controls =
        app.add_subcommand("controls", "all-1s / all-0s / iid field drives");
    add_common(controls, true);
    controls->add_option("--seeds", n_seeds, "replicas per mode");

    auto* verify = app.add_subcommand("verify", "run the invariant suite");
    verify->add_flag("--verbose", opts.verbose);
    verify->add_flag("--quiet", opts.quiet);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (run->parsed())
            return cmd_run(opts);
        if (replay->parsed())
            return cmd_replay(opts, history_path, state_bits, reference_bits);
        if (sweep->parsed())
            return cmd_sweep(opts);
        if (controls->parsed())
            return cmd_controls(opts, n_seeds);
        if (verify->parsed())
            return cmd_verify(opts.verbose);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        const std::string what = e.what();
        if (what.find("unknown key") != std::string::npos ||
            what.find("expected key=value") != std::string::npos ||
            what.find("cannot open config file") != std::string::npos) {
            std::cerr << "config error: " << what << "\n";
            return kExitConfig;
        }
        std::cerr << "error: " << what << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}
