#include "collapse/verify.hpp"

#include <bit>
#include <cmath>
#include <numbers>

#include "collapse/dynamics.hpp"
#include "collapse/lattice.hpp"

namespace collapse {

StateVector random_state(int n_slots, RandomSource& rng) {
    std::vector<cdouble> amps(std::size_t{1} << n_slots);
    for (cdouble& a : amps)
        a = cdouble{rng.uniform() - 0.5, rng.uniform() - 0.5};
    StateVector sv = StateVector::from_amplitudes(n_slots, std::move(amps));
    sv.normalize();
    return sv;
}

StateVector random_sector_state(int n_slots, int m, RandomSource& rng) {
    std::vector<cdouble> amps(std::size_t{1} << n_slots);
    for (std::size_t i = 0; i < amps.size(); ++i)
        if (std::popcount(i) == m)
            amps[i] = cdouble{rng.uniform() - 0.5, rng.uniform() - 0.5};
    StateVector sv = StateVector::from_amplitudes(n_slots, std::move(amps));
    sv.normalize();
    return sv;
}

namespace {

// Random field history along a random linear extension.
FieldHistory random_history(const LatticeGeometry& geom, int n_records,
                            RandomSource& rng) {
    FieldHistory h;
    h.n_vertices = geom.n_vertices;
    SurfaceFront front(geom);
    for (int i = 0; i < n_records; ++i) {
        const VertexId v = pick_next(geom, front, rng);
        advance(geom, front, v);
        const auto bit = [&] {
            return static_cast<std::uint8_t>(rng.uniform() < 0.5);
        };
        h.records.push_back(FieldRecord{v, Outcome{bit(), bit()}});
    }
    return h;
}

double check_povm_completeness(RandomSource& rng) {
    double worst = 0.0;
    const RMatrix r = build_r_matrix(0.37);
    for (double x : {0.0, 0.3, 0.7, 0.95, 1.0}) {
        const JumpFamily j = build_jump_family(x);
        for (int trial = 0; trial < 20; ++trial) {
            StateVector psi = random_state(6, rng);
            apply_two_qubit(psi, 1, 4, r.entries);
            const auto p = outcome_probabilities(psi, 1, 4, j);
            const double sum = p[0] + p[1] + p[2] + p[3];
            worst = std::max(worst, std::abs(sum - 1.0));
        }
    }
    return worst;
}

double check_r_unitarity() {
    double worst = 0.0;
    for (double theta : {0.0, 0.1, 0.25 * std::numbers::pi,
                         0.5 * std::numbers::pi, 1.7}) {
        const Mat4 r = build_r_matrix(theta).entries;
        for (int i = 0; i < 4; ++i)
            for (int k = 0; k < 4; ++k) {
                cdouble s{0.0, 0.0};
                for (int j = 0; j < 4; ++j)
                    s += std::conj(r[j * 4 + i]) * r[j * 4 + k];
                worst = std::max(worst, std::abs(s - (i == k ? 1.0 : 0.0)));
            }
    }
    return worst;
}

double check_number_conservation(RandomSource& rng) {
    const LatticeGeometry geom(4);
    const RMatrix r = build_r_matrix(0.2 * std::numbers::pi);
    const JumpFamily j = build_jump_family(0.8);
    StateVector psi = random_sector_state(geom.n_slots, 3, rng);
    SurfaceFront front(geom);
    double worst = 0.0;
    for (int step = 0; step < 400; ++step) {
        step_sample(psi, front, rng, geom, r, j);
        worst = std::max(worst, std::abs(psi.norm() - 1.0));
        worst = std::max(worst,
                         std::abs(particle_number_decomposition(psi)[3] - 1.0));
    }
    return worst;
}

double check_labelling_invariance(RandomSource& rng) {
    const LatticeGeometry geom(3);
    const RMatrix r = build_r_matrix(0.3);
    const JumpFamily j = build_jump_family(0.6);
    double worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        const FieldHistory h1 = random_history(geom, 6, rng);
        // a second labelling of the same stem, found by independent resampling
        FieldHistory h2 = random_history(geom, 0, rng);
        {
            SurfaceFront front(geom);
            std::vector<FieldRecord> pending = h1.records;
            while (!pending.empty()) {
                const auto ready = ready_vertices(geom, front);
                bool moved = false;
                // take the *last* pending ready vertex, reversing ties
                for (auto it = pending.rbegin(); it != pending.rend(); ++it) {
                    bool is_r = false;
                    for (VertexId v : ready)
                        if (v == it->vertex)
                            is_r = true;
                    if (is_r) {
                        advance(geom, front, it->vertex);
                        h2.records.push_back(*it);
                        pending.erase(std::next(it).base());
                        moved = true;
                        break;
                    }
                }
                if (!moved)
                    break;
            }
        }
        const StateVector psi = random_state(geom.n_slots, rng);
        const double p1 = stem_probability(psi, h1, r, j);
        const double p2 = stem_probability(psi, h2, r, j);
        worst = std::max(worst, std::abs(p1 - p2));
    }
    return worst;
}

double check_duality(RandomSource& rng) {
    const LatticeGeometry geom(3);
    const RMatrix r = build_r_matrix(0.4);
    const JumpFamily j = build_jump_family(0.7);
    const std::size_t mask = (std::size_t{1} << geom.n_slots) - 1;
    double worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        const FieldHistory h = random_history(geom, 9, rng);
        const StateVector psi = random_state(geom.n_slots, rng);

        // global bit flip of the state, and 0<->1 on every outcome
        std::vector<cdouble> flipped(psi.dim());
        for (std::size_t i = 0; i < psi.dim(); ++i)
            flipped[i ^ mask] = psi[i];
        const StateVector psi_f =
            StateVector::from_amplitudes(geom.n_slots, std::move(flipped));
        FieldHistory h_f = h;
        for (FieldRecord& rec : h_f.records) {
            rec.outcome.bit_a ^= 1;
            rec.outcome.bit_b ^= 1;
        }
        worst = std::max(worst, std::abs(stem_probability(psi, h, r, j) -
                                         stem_probability(psi_f, h_f, r, j)));
    }
    return worst;
}

double check_marginalization(RandomSource& rng) {
    const JumpFamily j = build_jump_family(0.5);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        StateVector psi = random_state(5, rng);
        const auto p = outcome_probabilities(psi, 2, 4, j);
        const double marg = p[2] + p[3]; // alpha_a = 1, summed over alpha_b
        worst = std::max(worst,
                         std::abs(marg - prob_one_on_link(psi, 2, j)));
    }
    return worst;
}

} // namespace

std::vector<CheckResult> run_invariant_checks() {
    RandomSource rng(0x1eb5);
    std::vector<CheckResult> out;
    auto add = [&](const char* name, double tol, double err) {
        out.push_back(CheckResult{name, tol, err, err <= tol});
    };
    add("povm_completeness", 1e-12, check_povm_completeness(rng));
    add("r_unitarity", 1e-12, check_r_unitarity());
    add("norm_and_number_conservation", 1e-10,
        check_number_conservation(rng));
    add("stem_labelling_invariance", 1e-12, check_labelling_invariance(rng));
    add("field_value_duality", 1e-12, check_duality(rng));
    add("link_marginalization", 1e-12, check_marginalization(rng));
    return out;
}

} // namespace collapse
