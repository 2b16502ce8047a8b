#include "collapse/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "collapse/diagnostics.hpp"

namespace collapse {

std::string to_string(FieldMode mode) {
    switch (mode) {
    case FieldMode::sampled_from_1: return "sampled_from_1";
    case FieldMode::sampled_from_2: return "sampled_from_2";
    case FieldMode::all_ones: return "all_ones";
    case FieldMode::all_zeros: return "all_zeros";
    case FieldMode::iid_uniform: return "iid_uniform";
    case FieldMode::from_file: return "from_file";
    }
    throw std::logic_error("to_string: bad FieldMode");
}

FieldMode field_mode_from_string(const std::string& s) {
    if (s == "sampled_from_1") return FieldMode::sampled_from_1;
    if (s == "sampled_from_2") return FieldMode::sampled_from_2;
    if (s == "all_ones") return FieldMode::all_ones;
    if (s == "all_zeros") return FieldMode::all_zeros;
    if (s == "iid_uniform") return FieldMode::iid_uniform;
    if (s == "from_file") return FieldMode::from_file;
    throw std::invalid_argument("unknown field_mode: " + s);
}

void FieldHistory::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + path.string());
    out << "# lightcone-collapse field history\n";
    out << "n_vertices=" << n_vertices << "\n";
    out << "seed=" << seed << "\n";
    out << "field_mode=" << to_string(mode) << "\n";
    out << "step row col alpha_a alpha_b\n";
    int step = 1;
    for (const FieldRecord& r : records) {
        out << step++ << ' ' << r.vertex.row << ' ' << r.vertex.col << ' '
            << int(r.outcome.bit_a) << ' ' << int(r.outcome.bit_b) << "\n";
    }
    if (!out)
        throw std::runtime_error("write failed: " + path.string());
}

FieldHistory FieldHistory::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open history file: " + path.string());
    FieldHistory h;
    std::string line;
    bool in_records = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        if (!in_records) {
            if (line.rfind("n_vertices=", 0) == 0)
                h.n_vertices = std::stoi(line.substr(11));
            else if (line.rfind("seed=", 0) == 0)
                h.seed = std::stoull(line.substr(5));
            else if (line.rfind("field_mode=", 0) == 0)
                h.mode = field_mode_from_string(line.substr(11));
            else if (line.rfind("step ", 0) == 0)
                in_records = true;
            else
                throw std::runtime_error("bad history header line: " + line);
            continue;
        }
        std::istringstream ss(line);
        int step, row, col, aa, ab;
        if (!(ss >> step >> row >> col >> aa >> ab))
            throw std::runtime_error("bad history record: " + line);
        h.records.push_back(FieldRecord{
            VertexId{row, col},
            Outcome{static_cast<std::uint8_t>(aa),
                    static_cast<std::uint8_t>(ab)}});
    }
    if (h.n_vertices < 2)
        throw std::runtime_error("history file missing n_vertices header");
    return h;
}

void RunConfig::validate() const {
    LatticeGeometry geom(n_vertices); // throws on bad N
    if (!(x >= 0.0 && x <= 1.0))
        throw std::invalid_argument("RunConfig: x must be in [0,1]");
    if (block_m < 1 || t_max < block_m)
        throw std::invalid_argument("RunConfig: need t_max >= block_m >= 1");
    if (delta <= 0.0)
        throw std::invalid_argument("RunConfig: delta must be positive");
    auto check_state = [&](const std::string& bits, const char* name) {
        if (static_cast<int>(bits.size()) != geom.n_slots)
            throw std::invalid_argument(std::string("RunConfig: ") + name +
                                        " must be a " +
                                        std::to_string(geom.n_slots) +
                                        "-bit string");
        for (char c : bits)
            if (c != '0' && c != '1')
                throw std::invalid_argument(std::string("RunConfig: ") + name +
                                            " must be a 0/1 string");
    };
    check_state(initial_state_1, "initial_state_1");
    check_state(initial_state_2, "initial_state_2");
    const auto ones = [](const std::string& s) {
        return std::count(s.begin(), s.end(), '1');
    };
    if (ones(initial_state_1) != ones(initial_state_2))
        throw std::invalid_argument(
            "RunConfig: initial states must lie in the same particle-number "
            "sector");
    if (field_mode == FieldMode::from_file && history_file.empty())
        throw std::invalid_argument(
            "RunConfig: field_mode=from_file needs history_file");
}

namespace {

Outcome sample_outcome(const std::array<double, 4>& p, double u) {
    double cum = 0.0;
    for (int i = 0; i < 3; ++i) {
        cum += p[i];
        if (u < cum)
            return Outcome::from_index(i);
    }
    return Outcome::from_index(3);
}

} // namespace

SampledStep step_sample(StateVector& state, SurfaceFront& front,
                        RandomSource& rng, const LatticeGeometry& geom,
                        const RMatrix& rmatrix, const JumpFamily& jumps) {
    const VertexId v = pick_next(geom, front, rng);
    const auto [a, b] = slots_of(geom, v);
    apply_two_qubit(state, a, b, rmatrix.entries);
    SampledStep step;
    step.vertex = v;
    step.marginals[0] = bit_marginal(state, a);
    step.marginals[1] = bit_marginal(state, b);
    step.outcome = sample_outcome(outcome_probabilities(state, a, b, jumps),
                                  rng.uniform());
    apply_jump(state, a, b, step.outcome, jumps);
    advance(geom, front, v);
    return step;
}

std::array<double, 2> step_replay(StateVector& state,
                                  const LatticeGeometry& geom, VertexId vertex,
                                  Outcome outcome, const RMatrix& rmatrix,
                                  const JumpFamily& jumps) {
    const auto [a, b] = slots_of(geom, vertex);
    apply_two_qubit(state, a, b, rmatrix.entries);
    const std::array<double, 2> marg{bit_marginal(state, a),
                                     bit_marginal(state, b)};
    apply_jump(state, a, b, outcome, jumps);
    return marg;
}

Outcome drive_outcome(FieldMode mode, RandomSource& rng) {
    switch (mode) {
    case FieldMode::all_ones:
        return Outcome{1, 1};
    case FieldMode::all_zeros:
        return Outcome{0, 0};
    case FieldMode::iid_uniform: {
        const auto bit_a = static_cast<std::uint8_t>(rng.uniform() < 0.5);
        const auto bit_b = static_cast<std::uint8_t>(rng.uniform() < 0.5);
        return Outcome{bit_a, bit_b};
    }
    default:
        throw std::invalid_argument("drive_outcome: mode is not a drive mode");
    }
}

RunResult run_pair(const RunConfig& config) {
    config.validate();
    const LatticeGeometry geom(config.n_vertices);
    const RMatrix rmatrix = build_r_matrix(config.theta);
    const JumpFamily jumps = build_jump_family(config.x);
    RandomSource rng(config.seed);

    StateVector s1 = StateVector::from_bits(config.initial_state_1);
    StateVector s2 = StateVector::from_bits(config.initial_state_2);
    SurfaceFront front(geom);

    RunResult result;
    FieldHistory replayed;
    const bool from_file = config.field_mode == FieldMode::from_file;
    if (from_file) {
        replayed = FieldHistory::load(config.history_file);
        if (replayed.n_vertices != config.n_vertices)
            throw std::runtime_error(
                "run_pair: history N=" + std::to_string(replayed.n_vertices) +
                " does not match config N=" +
                std::to_string(config.n_vertices));
    }
    result.history.n_vertices = config.n_vertices;
    result.history.seed = config.seed;
    result.history.mode = config.field_mode;

    const int n_steps = config.n_vertices * config.t_max;
    if (from_file &&
        static_cast<int>(replayed.records.size()) < n_steps)
        throw std::runtime_error("run_pair: history shorter than horizon");

    result.steps.reserve(n_steps);
    for (int n = 1; n <= n_steps; ++n) {
        VertexId v;
        if (from_file)
            v = replayed.records[n - 1].vertex; // file order is authoritative
        else
            v = pick_next(geom, front, rng);
        const auto [a, b] = slots_of(geom, v);

        // fused vertex update: U with joint-weight accumulation, then one
        // shared jump pass over both states
        const std::array<double, 4> w1 = apply_r_weighted(s1, a, b, rmatrix);
        const std::array<double, 4> w2 = apply_r_weighted(s2, a, b, rmatrix);

        StepRecord rec;
        rec.step = n;
        rec.vertex = v;
        rec.marginal_1[0] = w1[2] + w1[3]; // weight of field value 1 at a
        rec.marginal_1[1] = w1[1] + w1[3];
        rec.marginal_2[0] = w2[2] + w2[3];
        rec.marginal_2[1] = w2[1] + w2[3];

        Outcome outcome;
        switch (config.field_mode) {
        case FieldMode::sampled_from_1:
            outcome = sample_outcome(
                outcome_probabilities_from_weights(w1, jumps), rng.uniform());
            break;
        case FieldMode::sampled_from_2:
            outcome = sample_outcome(
                outcome_probabilities_from_weights(w2, jumps), rng.uniform());
            break;
        case FieldMode::from_file:
            outcome = replayed.records[n - 1].outcome;
            break;
        default:
            outcome = drive_outcome(config.field_mode, rng);
            break;
        }
        rec.outcome = outcome;

        JumpPairResult jr;
        try {
            jr = apply_jump_pair(s1, s2, a, b, outcome, jumps, w1, w2);
        } catch (const ImpossibleOutcomeError& e) {
            throw ImpossibleOutcomeError(std::string(e.what()) + " (step " +
                                         std::to_string(n) + ")");
        }

        if (config.post_jump_marginals) {
            rec.marginal_1[0] = bit_marginal(s1, a);
            rec.marginal_1[1] = bit_marginal(s1, b);
            rec.marginal_2[0] = bit_marginal(s2, a);
            rec.marginal_2[1] = bit_marginal(s2, b);
        }

        advance(geom, front, v);
        rec.c_n = jr.c_n;
        result.steps.push_back(rec);
        result.history.records.push_back(FieldRecord{v, outcome});
    }

    BlockSeries blocks =
        block_sum(result.steps, config.block_m, config.n_vertices);
    result.diag.b_blocks = blocks.blocks;
    result.diag.dropped_partial_block = blocks.dropped_partial;
    result.diag.c_series.reserve(result.steps.size());
    for (const StepRecord& r : result.steps)
        result.diag.c_series.push_back(r.c_n);
    const ConvergenceResult conv =
        convergence_time(result.diag.b_blocks, config.delta, config.t_max);
    result.diag.t_c = conv.t_c;
    result.diag.converged = conv.converged;
    return result;
}

double stem_log_probability(const StateVector& initial,
                            const FieldHistory& history,
                            const RMatrix& rmatrix, const JumpFamily& jumps) {
    const LatticeGeometry geom(history.n_vertices);
    Stem stem;
    stem.reserve(history.records.size());
    for (const FieldRecord& r : history.records)
        stem.push_back(r.vertex);
    if (!validate_stem(geom, stem))
        throw std::invalid_argument(
            "stem_log_probability: history is not a valid stem");

    StateVector state = initial;
    double logp = 0.0;
    for (const FieldRecord& r : history.records) {
        const auto [a, b] = slots_of(geom, r.vertex);
        apply_two_qubit(state, a, b, rmatrix.entries);
        double n;
        try {
            n = apply_jump(state, a, b, r.outcome, jumps);
        } catch (const ImpossibleOutcomeError&) {
            return -std::numeric_limits<double>::infinity();
        }
        logp += 2.0 * std::log(n);
    }
    return logp;
}

double stem_probability(const StateVector& initial, const FieldHistory& history,
                        const RMatrix& rmatrix, const JumpFamily& jumps) {
    return std::exp(stem_log_probability(initial, history, rmatrix, jumps));
}

} // namespace collapse
