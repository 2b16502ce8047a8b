#include <doctest.h>

#include <cmath>
#include <numbers>

#include "collapse/register.hpp"
#include "collapse/rng.hpp"
#include "collapse/verify.hpp"

using namespace collapse;
using std::numbers::pi;

namespace {

// Independent oracle: dense 4x4 matrix-vector product on a 2-qubit register.
std::array<cdouble, 4> dense_apply(const Mat4& op,
                                   const std::array<cdouble, 4>& v) {
    std::array<cdouble, 4> out{};
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            out[r] += op[r * 4 + c] * v[c];
    return out;
}

// Dense J(alpha) as a 4x4 diagonal in the same (bit_a, bit_b) basis.
Mat4 dense_jump(const JumpFamily& j, Outcome o) {
    Mat4 m{};
    for (int fa = 0; fa < 2; ++fa)
        for (int fb = 0; fb < 2; ++fb) {
            const int i = 2 * fa + fb;
            m[i * 4 + i] = j.diag[o.bit_a][fa] * j.diag[o.bit_b][fb];
        }
    return m;
}

} // namespace

TEST_CASE("R-matrix structure") {
    SUBCASE("theta=0 is a swap on the one-particle block") {
        const Mat4 r = build_r_matrix(0.0).entries;
        CHECK(r[1 * 4 + 1] == cdouble{0.0, 0.0});
        CHECK(r[1 * 4 + 2] == cdouble{1.0, 0.0});
        CHECK(r[2 * 4 + 1] == cdouble{1.0, 0.0});
    }
    SUBCASE("theta=pi/2 is a phase of i on the one-particle block") {
        const Mat4 r = build_r_matrix(pi / 2).entries;
        CHECK(std::abs(r[1 * 4 + 1] - cdouble{0.0, 1.0}) < 1e-15);
        CHECK(std::abs(r[1 * 4 + 2]) < 1e-15);
    }
    SUBCASE("unitarity") {
        for (double theta : {0.1, 0.7, 2.9}) {
            const Mat4 r = build_r_matrix(theta).entries;
            for (int i = 0; i < 4; ++i)
                for (int k = 0; k < 4; ++k) {
                    cdouble s{};
                    for (int j = 0; j < 4; ++j)
                        s += std::conj(r[j * 4 + i]) * r[j * 4 + k];
                    CHECK(std::abs(s - (i == k ? 1.0 : 0.0)) < 1e-12);
                }
        }
    }
    CHECK_THROWS_AS(build_r_matrix(std::nan("")), std::invalid_argument);
}

TEST_CASE("jump family") {
    SUBCASE("X=0 gives exact projectors") {
        const JumpFamily j = build_jump_family(0.0);
        CHECK(j.diag[0][0] == 1.0);
        CHECK(j.diag[0][1] == 0.0);
        CHECK(j.diag[1][0] == 0.0);
        CHECK(j.diag[1][1] == 1.0);
    }
    SUBCASE("X=1 gives identity over sqrt(2)") {
        const JumpFamily j = build_jump_family(1.0);
        for (int o = 0; o < 2; ++o)
            for (int f = 0; f < 2; ++f)
                CHECK(std::abs(j.diag[o][f] - 1.0 / std::sqrt(2.0)) < 1e-15);
    }
    SUBCASE("POVM completeness J_0^2 + J_1^2 = 1") {
        for (double x : {0.0, 0.3, 0.77, 1.0}) {
            const JumpFamily j = build_jump_family(x);
            for (int f = 0; f < 2; ++f)
                CHECK(std::abs(j.diag[0][f] * j.diag[0][f] +
                               j.diag[1][f] * j.diag[1][f] - 1.0) < 1e-12);
        }
    }
    CHECK_THROWS_AS(build_jump_family(1.5), std::domain_error);
    CHECK_THROWS_AS(build_jump_family(-0.1), std::domain_error);
}

TEST_CASE("apply_two_qubit") {
    SUBCASE("theta=0 swaps |01> to |10>") {
        StateVector psi(2, 0b01); // slot0 = 1
        apply_two_qubit(psi, 0, 1, build_r_matrix(0.0).entries);
        CHECK(std::abs(psi[0b10] - 1.0) < 1e-15);
        CHECK(std::abs(psi[0b01]) < 1e-15);
    }
    SUBCASE("identity leaves the state bit-exact") {
        RandomSource rng(3);
        StateVector psi = random_state(4, rng);
        const StateVector before = psi;
        Mat4 id{};
        for (int i = 0; i < 4; ++i)
            id[i * 4 + i] = 1.0;
        apply_two_qubit(psi, 1, 3, id);
        CHECK(psi.amplitudes() == before.amplitudes());
    }
    SUBCASE("matches the dense 4x4 oracle on a 2-slot register") {
        const double theta = 0.83;
        const Mat4 r = build_r_matrix(theta).entries;
        // |01>: bit at slot_a=0 set -> local index 2 in (bit_a,bit_b) order
        StateVector psi(2, 0b01);
        apply_two_qubit(psi, 0, 1, r);
        const std::array<cdouble, 4> in{0.0, 0.0, 1.0, 0.0};
        const auto out = dense_apply(r, in);
        // local (bit_a,bit_b)=(1,0) is global 0b01, (0,1) is 0b10
        CHECK(std::abs(psi[0b01] - out[2]) < 1e-15);
        CHECK(std::abs(psi[0b10] - out[1]) < 1e-15);
        CHECK(std::abs(psi[0b01] - cdouble{0.0, std::sin(theta)}) < 1e-15);
        CHECK(std::abs(psi[0b10] - cdouble{std::cos(theta), 0.0}) < 1e-15);
    }
    SUBCASE("norm preservation for random unitaries and slots") {
        RandomSource rng(17);
        for (int trial = 0; trial < 10; ++trial) {
            StateVector psi = random_state(6, rng);
            apply_two_qubit(psi, 5, 2, build_r_matrix(1.1).entries);
            CHECK(std::abs(psi.norm() - 1.0) < 1e-12);
        }
    }
    StateVector psi(4);
    CHECK_THROWS_AS(apply_two_qubit(psi, 2, 2, Mat4{}), std::domain_error);
    CHECK_THROWS_AS(apply_two_qubit(psi, 0, 4, Mat4{}), std::domain_error);
}

TEST_CASE("outcome_probabilities") {
    SUBCASE("basis state |00>") {
        for (double x : {0.5, 1.0}) {
            const JumpFamily j = build_jump_family(x);
            StateVector psi(2, 0);
            const auto p = outcome_probabilities(psi, 0, 1, j);
            const double d = (1 + x * x) * (1 + x * x);
            CHECK(std::abs(p[0] - 1.0 / d) < 1e-14);
            CHECK(std::abs(p[1] - x * x / d) < 1e-14);
            CHECK(std::abs(p[2] - x * x / d) < 1e-14);
            CHECK(std::abs(p[3] - x * x * x * x / d) < 1e-14);
        }
    }
    SUBCASE("projective limit X=0") {
        StateVector psi(2, 0);
        const auto p = outcome_probabilities(psi, 0, 1, build_jump_family(0));
        CHECK(p[0] == 1.0);
        CHECK(p[1] + p[2] + p[3] == 0.0);
    }
    SUBCASE("one-particle superposition, cross-checked against dense oracle") {
        // i sin(t)|slot0=1> + cos(t)|slot1=1>, t=pi/4, X=0.5
        const double t = pi / 4;
        std::vector<cdouble> amps(4);
        amps[0b01] = cdouble{0.0, std::sin(t)};
        amps[0b10] = cdouble{std::cos(t), 0.0};
        const StateVector psi = StateVector::from_amplitudes(2, amps);
        const JumpFamily j = build_jump_family(0.5);
        const auto p = outcome_probabilities(psi, 0, 1, j);
        CHECK(p[0] == doctest::Approx(0.16).epsilon(1e-12));
        CHECK(p[1] == doctest::Approx(0.34).epsilon(1e-12));
        CHECK(p[2] == doctest::Approx(0.34).epsilon(1e-12));
        CHECK(p[3] == doctest::Approx(0.16).epsilon(1e-12));
        CHECK(p[0] + p[1] + p[2] + p[3] == doctest::Approx(1.0).epsilon(1e-13));

        // oracle: explicit dense J(alpha) products in the local basis
        // local vector in (bit_a, bit_b) order: (0,0),(0,1),(1,0),(1,1)
        const std::array<cdouble, 4> local{0.0, amps[0b10], amps[0b01], 0.0};
        for (int oi = 0; oi < 4; ++oi) {
            const auto jv = dense_apply(dense_jump(j, Outcome::from_index(oi)),
                                        local);
            double n2 = 0;
            for (const cdouble& a : jv)
                n2 += std::norm(a);
            CHECK(p[oi] == doctest::Approx(n2).epsilon(1e-13));
        }
    }
}

TEST_CASE("apply_jump") {
    SUBCASE("X=0 projects the Bell pair") {
        std::vector<cdouble> amps(4);
        amps[0b00] = 1 / std::sqrt(2.0);
        amps[0b11] = 1 / std::sqrt(2.0);
        StateVector psi = StateVector::from_amplitudes(2, amps);
        apply_jump(psi, 0, 1, Outcome{0, 0}, build_jump_family(0.0));
        CHECK(std::abs(psi[0b00] - 1.0) < 1e-14);
        CHECK(std::abs(psi[0b11]) < 1e-14);
    }
    SUBCASE("X=1 leaves the state unchanged after renormalization") {
        RandomSource rng(23);
        StateVector psi = random_state(4, rng);
        const StateVector before = psi;
        apply_jump(psi, 1, 2, Outcome{1, 0}, build_jump_family(1.0));
        for (std::size_t i = 0; i < psi.dim(); ++i)
            CHECK(std::abs(psi[i] - before[i]) < 1e-14);
    }
    SUBCASE("impossible outcome") {
        StateVector psi(2, 0);
        CHECK_THROWS_AS(
            apply_jump(psi, 0, 1, Outcome{1, 1}, build_jump_family(0.0)),
            ImpossibleOutcomeError);
    }
}

TEST_CASE("bit_marginal") {
    std::vector<cdouble> amps(4);
    amps[0b01] = 1 / std::sqrt(2.0);
    amps[0b10] = 1 / std::sqrt(2.0);
    const StateVector bell = StateVector::from_amplitudes(2, amps);
    CHECK(bit_marginal(bell, 0) == doctest::Approx(0.5).epsilon(1e-14));

    const StateVector basis(3, 0b101);
    CHECK(bit_marginal(basis, 0) == 1.0);
    CHECK(bit_marginal(basis, 1) == 0.0);
    CHECK(bit_marginal(basis, 2) == 1.0);

    // endianness: index bit s = slot s; i sin(t)|index 1> has slot0 = 1
    const double t = 0.6;
    std::vector<cdouble> a2(4);
    a2[0b01] = cdouble{0.0, std::sin(t)};
    a2[0b10] = cdouble{std::cos(t), 0.0};
    const StateVector psi = StateVector::from_amplitudes(2, a2);
    CHECK(bit_marginal(psi, 0) ==
          doctest::Approx(std::sin(t) * std::sin(t)).epsilon(1e-14));
}

TEST_CASE("prob_one_on_link") {
    RandomSource rng(31);
    SUBCASE("X=1 gives exactly 1/2 for any state") {
        const JumpFamily j = build_jump_family(1.0);
        for (int trial = 0; trial < 5; ++trial) {
            const StateVector psi = random_state(4, rng);
            CHECK(prob_one_on_link(psi, trial % 4, j) ==
                  doctest::Approx(0.5).epsilon(1e-14));
        }
    }
    SUBCASE("formula values") {
        const StateVector zero(2, 0); // |b|^2 = 0
        CHECK(prob_one_on_link(zero, 0, build_jump_family(0.0)) == 0.0);
        // |b|^2 = 0.25, X = 0.5 -> 0.35
        std::vector<cdouble> amps(4);
        amps[0b01] = 0.5;
        amps[0b00] = std::sqrt(0.75);
        const StateVector psi = StateVector::from_amplitudes(2, amps);
        CHECK(prob_one_on_link(psi, 0, build_jump_family(0.5)) ==
              doctest::Approx(0.35).epsilon(1e-14));
    }
    SUBCASE("equals the two-slot marginal of outcome_probabilities") {
        const JumpFamily j = build_jump_family(0.62);
        for (int trial = 0; trial < 10; ++trial) {
            const StateVector psi = random_state(5, rng);
            const auto p = outcome_probabilities(psi, 3, 1, j);
            CHECK(prob_one_on_link(psi, 3, j) ==
                  doctest::Approx(p[2] + p[3]).epsilon(1e-12));
        }
    }
}

TEST_CASE("particle_number_decomposition") {
    const StateVector basis(4, 0b0111);
    const auto w = particle_number_decomposition(basis);
    CHECK(w[3] == 1.0);
    CHECK(w[0] + w[1] + w[2] + w[4] == 0.0);

    std::vector<cdouble> amps(4);
    amps[0b00] = 1 / std::sqrt(2.0);
    amps[0b11] = 1 / std::sqrt(2.0);
    const auto w2 =
        particle_number_decomposition(StateVector::from_amplitudes(2, amps));
    CHECK(w2[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(w2[2] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("number conservation under full vertex steps") {
    RandomSource rng(41);
    const RMatrix r = build_r_matrix(0.9);
    const JumpFamily j = build_jump_family(0.85);
    StateVector psi = random_sector_state(6, 2, rng);
    for (int step = 0; step < 50; ++step) {
        const int a = step % 6;
        const int b = (a + 1) % 6;
        apply_two_qubit(psi, a, b, r.entries);
        const auto p = outcome_probabilities(psi, a, b, j);
        int oi = 0;
        double u = rng.uniform(), cum = 0;
        for (; oi < 3; ++oi) {
            cum += p[oi];
            if (u < cum)
                break;
        }
        apply_jump(psi, a, b, Outcome::from_index(oi), j);
        CHECK(std::abs(particle_number_decomposition(psi)[2] - 1.0) < 1e-10);
    }
}

TEST_CASE("duality of outcome probabilities") {
    RandomSource rng(43);
    const JumpFamily j = build_jump_family(0.66);
    for (int trial = 0; trial < 5; ++trial) {
        const StateVector psi = random_state(4, rng);
        std::vector<cdouble> flipped(psi.dim());
        for (std::size_t i = 0; i < psi.dim(); ++i)
            flipped[i ^ 0b1111] = psi[i];
        const StateVector psi_f =
            StateVector::from_amplitudes(4, std::move(flipped));
        const auto p = outcome_probabilities(psi, 1, 2, j);
        const auto pf = outcome_probabilities(psi_f, 1, 2, j);
        for (int oi = 0; oi < 4; ++oi) {
            const Outcome o = Outcome::from_index(oi);
            const int flipped_oi =
                2 * (1 - o.bit_a) + (1 - o.bit_b);
            CHECK(std::abs(p[oi] - pf[flipped_oi]) < 1e-12);
        }
    }
}
