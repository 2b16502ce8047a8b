#pragma once

#include <string>
#include <vector>

#include "collapse/register.hpp"
#include "collapse/rng.hpp"

namespace collapse {

struct CheckResult {
    std::string name;
    double tolerance;
    double max_error;
    bool pass;
};

// Deterministic invariant suite: POVM completeness, R unitarity,
// normalization and particle-number conservation, stem-labelling
// invariance, 0<->1 duality, and the link-marginalization identity.
std::vector<CheckResult> run_invariant_checks();

// Helper shared with tests: random normalized state on n_slots qubits.
StateVector random_state(int n_slots, RandomSource& rng);

// Random normalized state supported on one particle-number sector.
StateVector random_sector_state(int n_slots, int m, RandomSource& rng);

} // namespace collapse
