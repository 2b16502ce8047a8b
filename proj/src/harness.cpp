#include "collapse/harness.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace collapse {

std::string to_string(SweepAxis axis) {
    switch (axis) {
    case SweepAxis::epsilon: return "epsilon";
    case SweepAxis::theta: return "theta";
    case SweepAxis::particle_number: return "particle_number";
    }
    throw std::logic_error("to_string: bad SweepAxis");
}

SweepAxis sweep_axis_from_string(const std::string& s) {
    if (s == "epsilon") return SweepAxis::epsilon;
    if (s == "theta") return SweepAxis::theta;
    if (s == "particle_number") return SweepAxis::particle_number;
    throw std::invalid_argument("unknown sweep axis: " + s);
}

std::uint64_t derive_seed(std::uint64_t base_seed, double axis_value,
                          int replica) {
    const auto value_bits = std::bit_cast<std::uint64_t>(axis_value);
    return mix64(base_seed ^
                 mix64(value_bits ^
                       mix64(static_cast<std::uint64_t>(replica))));
}

namespace {

std::string one_particle_bits(int n_slots, int slot) {
    std::string s(n_slots, '0');
    s[slot] = '1';
    return s;
}

// Fixed default pair for sweeps: one particle at slot 0 vs slot N.
void default_one_particle_states(RunConfig& config) {
    const int ns = 2 * config.n_vertices;
    config.initial_state_1 = one_particle_bits(ns, 0);
    config.initial_state_2 = one_particle_bits(ns, config.n_vertices);
}

std::string random_sector_bits(int n_slots, int m, RandomSource& rng) {
    std::vector<int> slots(n_slots);
    for (int i = 0; i < n_slots; ++i)
        slots[i] = i;
    std::string s(n_slots, '0');
    for (int i = 0; i < m; ++i) {
        const auto j =
            i + static_cast<int>(rng.uniform() * double(n_slots - i));
        std::swap(slots[i], slots[std::min(j, n_slots - 1)]);
        s[slots[i]] = '1';
    }
    return s;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::filesystem::path run_subdir(const std::filesystem::path& out,
                                 const std::string& tag) {
    return out.empty() ? out : out / tag;
}

} // namespace

RunSummary execute_run(const RunConfig& config,
                       const std::filesystem::path& run_dir) {
    RunSummary s;
    s.config = config;
    const auto start = std::chrono::steady_clock::now();
    try {
        const RunResult result = run_pair(config);
        s.t_c = result.diag.t_c;
        s.converged = result.diag.converged;
        s.c_settle = c_settle_time(result.diag.c_series, 1e-3,
                                   config.n_vertices);
        if (!run_dir.empty()) {
            persist_run(result, config, run_dir);
            s.run_dir = run_dir.string();
        }
    } catch (const ImpossibleOutcomeError&) {
        s.infeasible = true;
    }
    s.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    return s;
}

SweepResult run_epsilon_sweep(const SweepSpec& spec) {
    if (spec.axis != SweepAxis::epsilon)
        throw std::invalid_argument("run_epsilon_sweep: axis must be epsilon");
    if (spec.values.empty() || spec.seeds_per_value < 1)
        throw std::invalid_argument("run_epsilon_sweep: empty sweep");

    SweepResult out;
    std::vector<std::pair<double, double>> fit_points;
    for (double eps : spec.values) {
        std::vector<double> tcs;
        bool all_converged = true;
        for (int rep = 0; rep < spec.seeds_per_value; ++rep) {
            RunConfig config = spec.base;
            config.x = 1.0 - eps;
            if (config.initial_state_1.empty())
                default_one_particle_states(config);
            config.seed = derive_seed(spec.base.seed, eps, rep);
            std::ostringstream tag;
            tag << "eps" << eps << "_rep" << rep;
            RunSummary s =
                execute_run(config, run_subdir(spec.out_dir, tag.str()));
            s.axis_value = eps;
            s.replica = rep;
            if (s.converged && s.t_c)
                tcs.push_back(*s.t_c);
            else
                all_converged = false;
            out.summaries.push_back(std::move(s));
        }
        if (all_converged && !tcs.empty())
            fit_points.emplace_back(eps, median(tcs));
        else
            out.excluded_epsilons.push_back(eps);
    }
    if (fit_points.size() >= 2)
        out.fit = fit_power_law(fit_points);
    return out;
}

std::vector<RunSummary> run_theta_sweep(const SweepSpec& spec) {
    if (spec.axis != SweepAxis::theta)
        throw std::invalid_argument("run_theta_sweep: axis must be theta");
    std::vector<RunSummary> out;
    for (double theta : spec.values) {
        for (int rep = 0; rep < spec.seeds_per_value; ++rep) {
            RunConfig config = spec.base;
            config.theta = theta;
            if (config.initial_state_1.empty())
                default_one_particle_states(config);
            config.seed = derive_seed(spec.base.seed, theta, rep);
            std::ostringstream tag;
            tag << "theta" << theta << "_rep" << rep;
            RunSummary s =
                execute_run(config, run_subdir(spec.out_dir, tag.str()));
            s.axis_value = theta;
            s.replica = rep;
            out.push_back(std::move(s));
        }
    }
    return out;
}

std::vector<RunSummary> run_particle_sweep(const SweepSpec& spec) {
    if (spec.axis != SweepAxis::particle_number)
        throw std::invalid_argument(
            "run_particle_sweep: axis must be particle_number");
    const int ns = 2 * spec.base.n_vertices;
    std::vector<RunSummary> out;
    for (double value : spec.values) {
        const int m = static_cast<int>(value);
        if (m < 1 || m > ns - 1)
            throw std::invalid_argument(
                "run_particle_sweep: particle number must be in [1, 2N-1] "
                "(single-state sectors have nothing to compare)");
        for (int rep = 0; rep < spec.seeds_per_value; ++rep) {
            RunConfig config = spec.base;
            config.seed = derive_seed(spec.base.seed, value, rep);
            // two distinct random m-particle eigenstates per seed
            RandomSource state_rng(mix64(config.seed ^ 0x5eedu));
            config.initial_state_1 = random_sector_bits(ns, m, state_rng);
            do {
                config.initial_state_2 = random_sector_bits(ns, m, state_rng);
            } while (config.initial_state_2 == config.initial_state_1);
            std::ostringstream tag;
            tag << "m" << m << "_rep" << rep;
            RunSummary s =
                execute_run(config, run_subdir(spec.out_dir, tag.str()));
            s.axis_value = value;
            s.replica = rep;
            out.push_back(std::move(s));
        }
    }
    return out;
}

std::vector<RunSummary> run_field_controls(const RunConfig& config,
                                           int n_seeds,
                                           const std::filesystem::path& out) {
    if (config.field_mode != FieldMode::all_ones &&
        config.field_mode != FieldMode::all_zeros &&
        config.field_mode != FieldMode::iid_uniform)
        throw std::invalid_argument(
            "run_field_controls: field_mode must be a drive mode");
    std::vector<RunSummary> summaries;
    for (int rep = 0; rep < n_seeds; ++rep) {
        RunConfig c = config;
        if (c.initial_state_1.empty())
            default_one_particle_states(c);
        c.seed = derive_seed(config.seed, 0.0, rep);
        std::ostringstream tag;
        tag << to_string(c.field_mode) << "_rep" << rep;
        RunSummary s = execute_run(c, run_subdir(out, tag.str()));
        s.replica = rep;
        summaries.push_back(std::move(s));
    }
    return summaries;
}

namespace {

nlohmann::json config_json(const RunConfig& c) {
    return nlohmann::json{
        {"n_vertices", c.n_vertices},
        {"x", c.x},
        {"epsilon", c.epsilon()},
        {"theta", c.theta},
        {"seed", c.seed},
        {"t_max", c.t_max},
        {"block_m", c.block_m},
        {"delta", c.delta},
        {"initial_state_1", c.initial_state_1},
        {"initial_state_2", c.initial_state_2},
        {"field_mode", to_string(c.field_mode)},
        {"history_file", c.history_file},
        {"post_jump_marginals", c.post_jump_marginals},
    };
}

constexpr const char* kPlotScript = R"(#!/usr/bin/env python3
"""Plot blocks.csv (B_m vs lattice time) and overlap.csv (C_n vs motion count)."""
import csv, sys
import matplotlib.pyplot as plt

def load(path):
    with open(path) as f:
        rows = list(csv.reader(f))
    return [(float(a), float(b)) for a, b in rows[1:]]

blocks = load("blocks.csv")
overlap = load("overlap.csv")
fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 8))
ax1.plot([t for t, _ in blocks], [abs(b) for _, b in blocks], "o-")
ax1.set_yscale("log"); ax1.set_xlabel("lattice time t"); ax1.set_ylabel("|B_m(t)|")
ax2.plot([n for n, _ in overlap], [max(c, 1e-16) for _, c in overlap])
ax2.set_yscale("log"); ax2.set_xlabel("elementary motion n"); ax2.set_ylabel("C_n")
fig.tight_layout()
fig.savefig(sys.argv[1] if len(sys.argv) > 1 else "run.png", dpi=150)
)";

} // namespace

void persist_run(const RunResult& result, const RunConfig& config,
                 const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw std::runtime_error("cannot create " + dir.string() + ": " +
                                 ec.message());

    auto open = [&](const char* name) {
        std::ofstream f(dir / name);
        if (!f)
            throw std::runtime_error("cannot write " + (dir / name).string());
        return f;
    };

    {
        auto f = open("blocks.csv");
        f << "t,B_m\n";
        f.precision(17);
        for (const auto& [t, b] : result.diag.b_blocks)
            f << t << ',' << b << '\n';
    }
    {
        auto f = open("overlap.csv");
        f << "n,C_n\n";
        f.precision(17);
        for (std::size_t i = 0; i < result.diag.c_series.size(); ++i)
            f << i + 1 << ',' << result.diag.c_series[i] << '\n';
    }
    result.history.save(dir / "history.txt");
    {
        nlohmann::json j;
        j["config"] = config_json(config);
        j["t_c"] = result.diag.t_c ? nlohmann::json(*result.diag.t_c)
                                   : nlohmann::json();
        j["converged"] = result.diag.converged;
        j["dropped_partial_block"] = result.diag.dropped_partial_block;
        const auto settle =
            c_settle_time(result.diag.c_series, 1e-3, config.n_vertices);
        j["c_settle_time"] = settle ? nlohmann::json(*settle)
                                    : nlohmann::json();
        j["files"] = {"blocks.csv", "overlap.csv", "history.txt"};
        auto f = open("summary.json");
        f << j.dump(2) << '\n';
    }
    open("plot.py") << kPlotScript;
}

namespace {

struct ParseState {
    bool saw_x = false;
    bool saw_epsilon = false;
    bool saw_theta = false;
    bool saw_theta_over_pi = false;
};

bool set_run_key(RunConfig& c, ParseState& ps, const std::string& key,
                 const std::string& value) {
    if (key == "n_vertices") c.n_vertices = std::stoi(value);
    else if (key == "x") {
        if (ps.saw_epsilon)
            throw std::invalid_argument("give either x or epsilon, not both");
        ps.saw_x = true;
        c.x = std::stod(value);
    } else if (key == "epsilon") {
        if (ps.saw_x)
            throw std::invalid_argument("give either x or epsilon, not both");
        ps.saw_epsilon = true;
        c.x = 1.0 - std::stod(value);
    } else if (key == "theta") {
        if (ps.saw_theta_over_pi)
            throw std::invalid_argument(
                "give either theta or theta_over_pi, not both");
        ps.saw_theta = true;
        c.theta = std::stod(value);
    } else if (key == "theta_over_pi") {
        if (ps.saw_theta)
            throw std::invalid_argument(
                "give either theta or theta_over_pi, not both");
        ps.saw_theta_over_pi = true;
        c.theta = std::stod(value) * std::numbers::pi;
    } else if (key == "seed") c.seed = std::stoull(value);
    else if (key == "t_max") c.t_max = std::stoi(value);
    else if (key == "block_m") c.block_m = std::stoi(value);
    else if (key == "delta") c.delta = std::stod(value);
    else if (key == "initial_state_1") c.initial_state_1 = value;
    else if (key == "initial_state_2") c.initial_state_2 = value;
    else if (key == "field_mode") c.field_mode = field_mode_from_string(value);
    else if (key == "history_file") c.history_file = value;
    else if (key == "post_jump_marginals")
        c.post_jump_marginals = (value == "true" || value == "1");
    else
        return false;
    return true;
}

std::vector<std::pair<std::string, std::string>>
read_key_values(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config file: " + path.string());
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        // trim
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos)
            continue;
        const auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path.string() + ":" +
                                     std::to_string(lineno) +
                                     ": expected key=value, got '" + line +
                                     "'");
        auto strip = [](std::string s) {
            const auto f = s.find_first_not_of(" \t");
            const auto l = s.find_last_not_of(" \t");
            return f == std::string::npos ? std::string{}
                                          : s.substr(f, l - f + 1);
        };
        out.emplace_back(strip(line.substr(0, eq)),
                         strip(line.substr(eq + 1)));
    }
    return out;
}

} // namespace

RunConfig parse_run_config(const std::filesystem::path& path) {
    RunConfig config;
    ParseState ps;
    for (const auto& [key, value] : read_key_values(path)) {
        if (!set_run_key(config, ps, key, value))
            throw std::runtime_error(path.string() + ": unknown key '" + key +
                                     "'");
    }
    if (config.initial_state_1.empty() && config.initial_state_2.empty())
        default_one_particle_states(config);
    return config;
}

SweepSpec parse_sweep_spec(const std::filesystem::path& path) {
    SweepSpec spec;
    ParseState ps;
    for (const auto& [key, value] : read_key_values(path)) {
        if (key == "axis") {
            spec.axis = sweep_axis_from_string(value);
        } else if (key == "values") {
            std::istringstream ss(value);
            std::string item;
            while (std::getline(ss, item, ','))
                spec.values.push_back(std::stod(item));
        } else if (key == "seeds_per_value") {
            spec.seeds_per_value = std::stoi(value);
        } else if (!set_run_key(spec.base, ps, key, value)) {
            throw std::runtime_error(path.string() + ": unknown key '" + key +
                                     "'");
        }
    }
    if (spec.values.empty())
        throw std::runtime_error(path.string() +
                                 ": sweep needs a nonempty 'values' list");
    return spec;
}

void apply_override(RunConfig& config, const std::string& key_value) {
    const auto eq = key_value.find('=');
    if (eq == std::string::npos)
        throw std::invalid_argument("override must be key=value: " +
                                    key_value);
    ParseState ps; // overrides may replace either parameterization
    if (!set_run_key(config, ps, key_value.substr(0, eq),
                     key_value.substr(eq + 1)))
        throw std::invalid_argument("unknown key '" +
                                    key_value.substr(0, eq) + "'");
}

} // namespace collapse
