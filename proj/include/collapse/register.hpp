#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace collapse {

using cdouble = std::complex<double>;

// 4x4 operator on a slot pair, row-major, basis order (00, 01, 10, 11) over
// (bit at slot a, bit at slot b): local index = 2*bit_a + bit_b.
using Mat4 = std::array<cdouble, 16>;

struct Outcome {
    std::uint8_t bit_a; // field value on the lower-slot outgoing link
    std::uint8_t bit_b;

    int index() const { return 2 * bit_a + bit_b; }
    static Outcome from_index(int i) {
        return Outcome{static_cast<std::uint8_t>((i >> 1) & 1),
                       static_cast<std::uint8_t>(i & 1)};
    }
    bool operator==(const Outcome&) const = default;
};

// Raised when a replayed field value has probability zero in the state it is
// imposed on (wrong superselection sector, or a projective X=0 mismatch).
struct ImpossibleOutcomeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Amplitudes over the 2^(2N) field basis of a surface cut. Basis index is
// little-endian by slot: bit s of the index is the field value on slot s.
class StateVector {
  public:
    explicit StateVector(int n_slots, std::size_t basis_index = 0);
    static StateVector from_bits(const std::string& bits); // bits[s] = slot s
    static StateVector from_amplitudes(int n_slots, std::vector<cdouble> amps);

    int n_slots() const { return n_slots_; }
    std::size_t dim() const { return amps_.size(); }
    const std::vector<cdouble>& amplitudes() const { return amps_; }
    std::vector<cdouble>& amplitudes() { return amps_; }
    cdouble operator[](std::size_t i) const { return amps_[i]; }

    double norm() const;
    void normalize();

  private:
    int n_slots_;
    std::vector<cdouble> amps_;
};

// Per-vertex unitary: identity on the 00 and 11 field configurations,
// [[i sin t, cos t], [cos t, i sin t]] on the one-particle block.
struct RMatrix {
    double theta;
    Mat4 entries;
};

RMatrix build_r_matrix(double theta);

// POVM pair per link, J_0 = diag(1, X)/sqrt(1+X^2), J_1 = diag(X, 1)/..,
// with J_0^2 + J_1^2 = 1. The vertex hit J(outcome) is the tensor product of
// the two link operators.
struct JumpFamily {
    double x;
    double epsilon;          // 1 - x
    double diag[2][2];       // diag[outcome_bit][field_bit]
};

JumpFamily build_jump_family(double x);

// Applies a 4x4 operator to the (slot_a, slot_b) tensor factors. Does not
// renormalize.
void apply_two_qubit(StateVector& state, int slot_a, int slot_b,
                     const Mat4& op);

// Fused fast path for the simulation loop: applies the vertex unitary using
// its sparsity (identity on 00/11, dense 2x2 on the one-particle block) and
// returns the post-U weights by joint field value, w[2*fa + fb]. Slot
// marginals and outcome probabilities both derive from w without another
// array pass.
std::array<double, 4> apply_r_weighted(StateVector& state, int slot_a,
                                       int slot_b, const RMatrix& rmatrix);

// p(alpha) from the joint weights of a normalized state.
std::array<double, 4>
outcome_probabilities_from_weights(const std::array<double, 4>& w,
                                   const JumpFamily& jumps);

// Fused jump on a state pair sharing one realized outcome: scales both by the
// normalized diagonal (norms taken analytically from the precomputed
// weights) and accumulates the post-jump overlap deficit in the same pass.
struct JumpPairResult {
    double norm_1;
    double norm_2;
    double c_n; // 1 - |<psi1|psi2>|^2 after the jump
};
JumpPairResult apply_jump_pair(StateVector& state_1, StateVector& state_2,
                               int slot_a, int slot_b, Outcome outcome,
                               const JumpFamily& jumps,
                               const std::array<double, 4>& w1,
                               const std::array<double, 4>& w2);

// p(alpha) = ||J(alpha)|psi>||^2 in outcome order (00, 01, 10, 11).
std::array<double, 4> outcome_probabilities(const StateVector& state,
                                            int slot_a, int slot_b,
                                            const JumpFamily& jumps);

// J(outcome)|psi> renormalized; returns the pre-normalization norm (the
// square root of the outcome probability when the input is normalized).
double apply_jump(StateVector& state, int slot_a, int slot_b, Outcome outcome,
                  const JumpFamily& jumps);

// Probability weight of field value 1 at one slot (|b|^2 of the schematic
// a|0> + b|1> decomposition).
double bit_marginal(const StateVector& state, int slot);

// Predictive probability that the field comes out 1 on the link at `slot`:
// (|a|^2 X^2 + |b|^2) / (1 + X^2).
double prob_one_on_link(const StateVector& state, int slot,
                        const JumpFamily& jumps);

// Weight per particle-number (popcount) sector, m in [0, 2N].
std::vector<double> particle_number_decomposition(const StateVector& state);

} // namespace collapse
