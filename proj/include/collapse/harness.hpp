#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "collapse/diagnostics.hpp"
#include "collapse/dynamics.hpp"

namespace collapse {

enum class SweepAxis { epsilon, theta, particle_number };

std::string to_string(SweepAxis axis);
SweepAxis sweep_axis_from_string(const std::string& s);

struct SweepSpec {
    RunConfig base;
    SweepAxis axis = SweepAxis::epsilon;
    std::vector<double> values; // particle_number values are integral
    int seeds_per_value = 5;
    std::filesystem::path out_dir; // empty = no persistence
};

struct RunSummary {
    RunConfig config;
    double axis_value = 0.0;
    int replica = 0;
    std::optional<int> t_c;
    bool converged = false;
    bool infeasible = false;            // impossible outcome hit mid-run
    std::optional<int> c_settle;        // lattice time C_n stays < 1e-3
    double wall_seconds = 0.0;
    std::string run_dir;
};

struct SweepResult {
    std::vector<RunSummary> summaries;
    std::optional<FitResult> fit; // epsilon sweep only
    std::vector<double> excluded_epsilons;
};

// Documented per-run seed derivation:
//   seed_i = mix64(base_seed ^ mix64(bits(axis_value) ^ mix64(replica)))
// where bits() is the IEEE-754 bit pattern of the axis value.
std::uint64_t derive_seed(std::uint64_t base_seed, double axis_value,
                          int replica);

RunSummary execute_run(const RunConfig& config,
                       const std::filesystem::path& run_dir);

// Epsilon sweep at fixed theta/states; OLS fit of log(median T_c) over
// converged runs against log(epsilon). Values with any non-converged run are
// excluded from the fit and reported.
SweepResult run_epsilon_sweep(const SweepSpec& spec);

// Theta sweep; endpoint values 0 and pi/2 are executed but flagged (the
// deterministic dynamics there cannot mix the Hilbert space).
std::vector<RunSummary> run_theta_sweep(const SweepSpec& spec);

// Particle-number sweep; per seed, two distinct random m-particle basis
// eigenstates. m = 0 and m = 2N are rejected (single-state sectors).
std::vector<RunSummary> run_particle_sweep(const SweepSpec& spec);

// Runs the configured external-drive mode (all_ones / all_zeros /
// iid_uniform) over n_seeds replicas; an impossible outcome marks the
// summary infeasible instead of aborting the batch.
std::vector<RunSummary> run_field_controls(const RunConfig& config,
                                           int n_seeds,
                                           const std::filesystem::path& out);

// Writes blocks.csv, overlap.csv, history.txt, summary.json and a plot.py
// artifact into dir.
void persist_run(const RunResult& result, const RunConfig& config,
                 const std::filesystem::path& dir);

// Flat key=value config file ('#' comments). Unknown keys are rejected by
// name; theta may be given as theta_over_pi; x and epsilon are exclusive.
RunConfig parse_run_config(const std::filesystem::path& path);
SweepSpec parse_sweep_spec(const std::filesystem::path& path);
void apply_override(RunConfig& config, const std::string& key_value);

} // namespace collapse
