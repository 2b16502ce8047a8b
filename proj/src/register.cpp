#include "collapse/register.hpp"

#include <bit>
#include <cmath>

namespace collapse {

StateVector::StateVector(int n_slots, std::size_t basis_index)
    : n_slots_(n_slots), amps_(std::size_t{1} << n_slots) {
    if (n_slots < 1 || n_slots > 26)
        throw std::invalid_argument("StateVector: unsupported slot count");
    if (basis_index >= amps_.size())
        throw std::invalid_argument("StateVector: basis index out of range");
    amps_[basis_index] = 1.0;
}

StateVector StateVector::from_bits(const std::string& bits) {
    std::size_t idx = 0;
    for (std::size_t s = 0; s < bits.size(); ++s) {
        if (bits[s] == '1')
            idx |= std::size_t{1} << s;
        else if (bits[s] != '0')
            throw std::invalid_argument("StateVector: bit string must be 0/1");
    }
    return StateVector(static_cast<int>(bits.size()), idx);
}

StateVector StateVector::from_amplitudes(int n_slots,
                                         std::vector<cdouble> amps) {
    if (amps.size() != (std::size_t{1} << n_slots))
        throw std::invalid_argument("StateVector: amplitude count mismatch");
    StateVector sv(n_slots);
    sv.amps_ = std::move(amps);
    return sv;
}

double StateVector::norm() const {
    double s = 0.0;
    for (const cdouble& a : amps_)
        s += std::norm(a);
    return std::sqrt(s);
}

void StateVector::normalize() {
    const double n = norm();
    if (n <= 0.0)
        throw std::runtime_error("StateVector: cannot normalize zero vector");
    const double inv = 1.0 / n;
    for (cdouble& a : amps_)
        a *= inv;
}

RMatrix build_r_matrix(double theta) {
    if (!std::isfinite(theta))
        throw std::invalid_argument("build_r_matrix: theta must be finite");
    RMatrix r;
    r.theta = theta;
    r.entries.fill(cdouble{0.0, 0.0});
    const cdouble isin{0.0, std::sin(theta)};
    const cdouble cos{std::cos(theta), 0.0};
    r.entries[0 * 4 + 0] = 1.0;
    r.entries[1 * 4 + 1] = isin;
    r.entries[1 * 4 + 2] = cos;
    r.entries[2 * 4 + 1] = cos;
    r.entries[2 * 4 + 2] = isin;
    r.entries[3 * 4 + 3] = 1.0;
    return r;
}

JumpFamily build_jump_family(double x) {
    if (!(x >= 0.0 && x <= 1.0))
        throw std::domain_error("build_jump_family: X must be in [0,1]");
    JumpFamily j;
    j.x = x;
    j.epsilon = 1.0 - x;
    const double inv = 1.0 / std::sqrt(1.0 + x * x);
    j.diag[0][0] = inv;     // <0|J_0|0>
    j.diag[0][1] = x * inv; // <1|J_0|1>
    j.diag[1][0] = x * inv;
    j.diag[1][1] = inv;
    return j;
}

namespace {

void check_slots(const StateVector& state, int slot_a, int slot_b) {
    if (slot_a == slot_b || slot_a < 0 || slot_b < 0 ||
        slot_a >= state.n_slots() || slot_b >= state.n_slots())
        throw std::domain_error("invalid slot pair");
}

} // namespace

void apply_two_qubit(StateVector& state, int slot_a, int slot_b,
                     const Mat4& op) {
    check_slots(state, slot_a, slot_b);
    auto& amps = state.amplitudes();
    const std::size_t ma = std::size_t{1} << slot_a;
    const std::size_t mb = std::size_t{1} << slot_b;
    const std::size_t lo = std::min(ma, mb);
    const std::size_t hi = std::max(ma, mb);

    const std::size_t groups = amps.size() >> 2;
    for (std::size_t k = 0; k < groups; ++k) {
        // insert zero bits at the two slot positions
        std::size_t i = k;
        i = ((i & ~(lo - 1)) << 1) | (i & (lo - 1));
        i = ((i & ~(hi - 1)) << 1) | (i & (hi - 1));

        const std::size_t i00 = i;
        const std::size_t i01 = i | mb;
        const std::size_t i10 = i | ma;
        const std::size_t i11 = i | ma | mb;

        const cdouble v0 = amps[i00];
        const cdouble v1 = amps[i01];
        const cdouble v2 = amps[i10];
        const cdouble v3 = amps[i11];

        amps[i00] = op[0] * v0 + op[1] * v1 + op[2] * v2 + op[3] * v3;
        amps[i01] = op[4] * v0 + op[5] * v1 + op[6] * v2 + op[7] * v3;
        amps[i10] = op[8] * v0 + op[9] * v1 + op[10] * v2 + op[11] * v3;
        amps[i11] = op[12] * v0 + op[13] * v1 + op[14] * v2 + op[15] * v3;
    }
}

std::array<double, 4> apply_r_weighted(StateVector& state, int slot_a,
                                       int slot_b, const RMatrix& rmatrix) {
    check_slots(state, slot_a, slot_b);
    auto& amps = state.amplitudes();
    const std::size_t ma = std::size_t{1} << slot_a;
    const std::size_t mb = std::size_t{1} << slot_b;
    const std::size_t lo = std::min(ma, mb);
    const std::size_t hi = std::max(ma, mb);
    const double c = std::cos(rmatrix.theta);
    const double s = std::sin(rmatrix.theta);

    std::array<double, 4> w{};
    const std::size_t groups = amps.size() >> 2;
    for (std::size_t k = 0; k < groups; ++k) {
        std::size_t i = k;
        i = ((i & ~(lo - 1)) << 1) | (i & (lo - 1));
        i = ((i & ~(hi - 1)) << 1) | (i & (hi - 1));

        const cdouble v1 = amps[i | mb];
        const cdouble v2 = amps[i | ma];
        // one-particle block [[i s, c], [c, i s]]; 00 and 11 pass through
        const cdouble n1(c * v2.real() - s * v1.imag(),
                         c * v2.imag() + s * v1.real());
        const cdouble n2(c * v1.real() - s * v2.imag(),
                         c * v1.imag() + s * v2.real());
        amps[i | mb] = n1;
        amps[i | ma] = n2;
        w[0] += std::norm(amps[i]);
        w[1] += std::norm(n1);
        w[2] += std::norm(n2);
        w[3] += std::norm(amps[i | ma | mb]);
    }
    return w;
}

std::array<double, 4>
outcome_probabilities_from_weights(const std::array<double, 4>& w,
                                   const JumpFamily& jumps) {
    std::array<double, 4> p{};
    for (int oi = 0; oi < 4; ++oi) {
        const Outcome o = Outcome::from_index(oi);
        for (int fa = 0; fa < 2; ++fa)
            for (int fb = 0; fb < 2; ++fb) {
                const double j =
                    jumps.diag[o.bit_a][fa] * jumps.diag[o.bit_b][fb];
                p[oi] += j * j * w[2 * fa + fb];
            }
    }
    return p;
}

JumpPairResult apply_jump_pair(StateVector& state_1, StateVector& state_2,
                               int slot_a, int slot_b, Outcome outcome,
                               const JumpFamily& jumps,
                               const std::array<double, 4>& w1,
                               const std::array<double, 4>& w2) {
    check_slots(state_1, slot_a, slot_b);
    if (state_2.n_slots() != state_1.n_slots())
        throw std::domain_error("apply_jump_pair: slot count mismatch");

    double p1 = 0.0, p2 = 0.0;
    double factor[4];
    for (int fa = 0; fa < 2; ++fa)
        for (int fb = 0; fb < 2; ++fb) {
            const double j =
                jumps.diag[outcome.bit_a][fa] * jumps.diag[outcome.bit_b][fb];
            factor[2 * fa + fb] = j;
            p1 += j * j * w1[2 * fa + fb];
            p2 += j * j * w2[2 * fa + fb];
        }
    if (p1 < 1e-250 || p2 < 1e-250)
        throw ImpossibleOutcomeError(
            "apply_jump: outcome has probability zero in this state");
    const double n1 = std::sqrt(p1);
    const double n2 = std::sqrt(p2);

    double scale_1[4], scale_2[4];
    double cross[4]; // factor^2 / (n1 n2), for the overlap accumulation
    for (int f = 0; f < 4; ++f) {
        scale_1[f] = factor[f] / n1;
        scale_2[f] = factor[f] / n2;
        cross[f] = factor[f] * factor[f] / (n1 * n2);
    }

    auto& a1 = state_1.amplitudes();
    auto& a2 = state_2.amplitudes();
    const std::size_t ma = std::size_t{1} << slot_a;
    const std::size_t mb = std::size_t{1} << slot_b;
    cdouble overlap = 0.0;
    for (std::size_t i = 0; i < a1.size(); ++i) {
        const int f = 2 * ((i & ma) != 0) + ((i & mb) != 0);
        overlap += cross[f] * (std::conj(a1[i]) * a2[i]);
        a1[i] *= scale_1[f];
        a2[i] *= scale_2[f];
    }
    return JumpPairResult{n1, n2, 1.0 - std::norm(overlap)};
}

std::array<double, 4> outcome_probabilities(const StateVector& state,
                                            int slot_a, int slot_b,
                                            const JumpFamily& jumps) {
    check_slots(state, slot_a, slot_b);
    const std::size_t ma = std::size_t{1} << slot_a;
    const std::size_t mb = std::size_t{1} << slot_b;

    // weight of |psi| by joint field value on the two slots
    std::array<double, 4> w{};
    const auto& amps = state.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        const int fa = (i & ma) ? 1 : 0;
        const int fb = (i & mb) ? 1 : 0;
        w[2 * fa + fb] += std::norm(amps[i]);
    }
    return outcome_probabilities_from_weights(w, jumps);
}

double apply_jump(StateVector& state, int slot_a, int slot_b, Outcome outcome,
                  const JumpFamily& jumps) {
    check_slots(state, slot_a, slot_b);
    const std::size_t ma = std::size_t{1} << slot_a;
    const std::size_t mb = std::size_t{1} << slot_b;
    auto& amps = state.amplitudes();

    double sq = 0.0;
    for (std::size_t i = 0; i < amps.size(); ++i) {
        const int fa = (i & ma) ? 1 : 0;
        const int fb = (i & mb) ? 1 : 0;
        const double j =
            jumps.diag[outcome.bit_a][fa] * jumps.diag[outcome.bit_b][fb];
        amps[i] *= j;
        sq += std::norm(amps[i]);
    }
    if (sq < 1e-250)
        throw ImpossibleOutcomeError(
            "apply_jump: outcome has probability zero in this state");
    const double n = std::sqrt(sq);
    const double inv = 1.0 / n;
    for (cdouble& a : amps)
        a *= inv;
    return n;
}

double bit_marginal(const StateVector& state, int slot) {
    if (slot < 0 || slot >= state.n_slots())
        throw std::domain_error("bit_marginal: slot out of range");
    const std::size_t m = std::size_t{1} << slot;
    double s = 0.0;
    const auto& amps = state.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i)
        if (i & m)
            s += std::norm(amps[i]);
    return s;
}

double prob_one_on_link(const StateVector& state, int slot,
                        const JumpFamily& jumps) {
    const double b2 = bit_marginal(state, slot);
    const double a2 = 1.0 - b2;
    const double x2 = jumps.x * jumps.x;
    return (a2 * x2 + b2) / (1.0 + x2);
}

std::vector<double> particle_number_decomposition(const StateVector& state) {
    std::vector<double> weights(state.n_slots() + 1, 0.0);
    const auto& amps = state.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i)
        weights[std::popcount(i)] += std::norm(amps[i]);
    return weights;
}

} // namespace collapse
