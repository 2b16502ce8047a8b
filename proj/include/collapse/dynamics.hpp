#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "collapse/lattice.hpp"
#include "collapse/register.hpp"
#include "collapse/rng.hpp"

namespace collapse {

enum class FieldMode {
    sampled_from_1,
    sampled_from_2,
    all_ones,
    all_zeros,
    iid_uniform,
    from_file,
};

std::string to_string(FieldMode mode);
FieldMode field_mode_from_string(const std::string& s);

struct FieldRecord {
    VertexId vertex;
    Outcome outcome;
    bool operator==(const FieldRecord&) const = default;
};

// The realized c-number field: ordered (vertex, outcome-pair) records along
// one natural labelling. The vertex sequence must be a valid stem.
struct FieldHistory {
    int n_vertices = 0;
    std::uint64_t seed = 0;
    FieldMode mode = FieldMode::sampled_from_1;
    std::vector<FieldRecord> records;

    // Text format, bit-exact round trip: header lines `n_vertices=`, `seed=`,
    // `field_mode=`, then one record per line `step row col alpha_a alpha_b`.
    void save(const std::filesystem::path& path) const;
    static FieldHistory load(const std::filesystem::path& path);

    bool operator==(const FieldHistory&) const = default;
};

struct RunConfig {
    int n_vertices = 8;
    double x = 0.95; // hit strength; epsilon = 1 - x
    double theta = 0.0;
    std::uint64_t seed = 1;
    int t_max = 200;   // horizon in lattice-time units
    int block_m = 10;  // block length for B_m(t)
    double delta = 1e-4;
    std::string initial_state_1; // 2N-bit string, slot s = character s
    std::string initial_state_2;
    FieldMode field_mode = FieldMode::sampled_from_1;
    std::string history_file;         // for FieldMode::from_file
    bool post_jump_marginals = false; // sensitivity switch for B(l)

    double epsilon() const { return 1.0 - x; }
    void validate() const;
};

// Per elementary motion: the evolved vertex, the realized field values, the
// post-U pre-jump |b|^2 marginals of both states at the vertex's two slots
// (post-jump instead when configured), and the overlap deficit after the step.
struct StepRecord {
    int step;        // 1-based elementary-motion count n
    VertexId vertex;
    Outcome outcome;
    double marginal_1[2]; // state 1, slots (a, b)
    double marginal_2[2];
    double c_n; // 1 - |<psi1|psi2>|^2 after the step
};

struct DiagSeries {
    std::map<int, double> b_blocks; // block start time -> B_m(t)
    std::vector<double> c_series;   // C_n, n = 1..steps
    std::optional<int> t_c;         // lattice time
    bool converged = false;
    bool dropped_partial_block = false;
};

struct SampledStep {
    VertexId vertex;
    Outcome outcome;
    double marginals[2]; // post-U pre-jump
};

// One elementary motion with the outcome sampled from the state itself:
// vertex from the uniform surface rule (one draw), then U, then the outcome
// from one draw against cumulative probabilities in order (00,01,10,11).
SampledStep step_sample(StateVector& state, SurfaceFront& front,
                        RandomSource& rng, const LatticeGeometry& geom,
                        const RMatrix& rmatrix, const JumpFamily& jumps);

// Same update with the outcome imposed; returns the post-U pre-jump
// marginals at the vertex's two slots.
std::array<double, 2> step_replay(StateVector& state,
                                  const LatticeGeometry& geom, VertexId vertex,
                                  Outcome outcome, const RMatrix& rmatrix,
                                  const JumpFamily& jumps);

// Externally driven field values for the non-sampled control modes.
Outcome drive_outcome(FieldMode mode, RandomSource& rng);

struct RunResult {
    FieldHistory history;
    std::vector<StepRecord> steps;
    DiagSeries diag;
};

// Evolves both configured initial states along one shared random linear
// extension and one shared field history (per field_mode), for
// n_vertices * t_max elementary motions, and collects all diagnostics.
RunResult run_pair(const RunConfig& config);

// ||J(a_n)U(v_n) ... J(a_1)U(v_1)|psi_0>||^2, accumulated in log magnitude
// so long histories do not underflow.
double stem_log_probability(const StateVector& initial,
                            const FieldHistory& history,
                            const RMatrix& rmatrix, const JumpFamily& jumps);
double stem_probability(const StateVector& initial, const FieldHistory& history,
                        const RMatrix& rmatrix, const JumpFamily& jumps);

} // namespace collapse
