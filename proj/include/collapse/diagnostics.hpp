#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "collapse/dynamics.hpp"

namespace collapse {

// B(l) = |b_1|^2 - |b_2|^2, signed.
inline double link_difference(double marginal_1, double marginal_2) {
    return marginal_1 - marginal_2;
}

struct BlockSeries {
    std::map<int, double> blocks; // block start time -> B_m(t)
    bool dropped_partial = false;
};

// Sums B(l) over disjoint blocks of m lattice-time rows starting at
// t = 1, 1+m, ...; each complete block covers the 2*N*m links emitted by its
// rows. An incomplete final block is dropped and flagged.
BlockSeries block_sum(const std::vector<StepRecord>& records, int m, int n);

struct ConvergenceResult {
    std::optional<int> t_c;
    bool converged = false;
};

// T_c = smallest block start t0 such that |B_m(t)| <= delta for every block
// with t > t0; not converged when the final block itself exceeds delta.
ConvergenceResult convergence_time(const std::map<int, double>& blocks,
                                   double delta, int t_max);

// C_n = 1 - |<psi1|psi2>|^2; phase invariant.
double overlap_deficit(const StateVector& state_1, const StateVector& state_2);

// Smallest lattice time from which C_n stays below `threshold` for the rest
// of the run; empty when the series never settles below it.
std::optional<int> c_settle_time(const std::vector<double>& c_series,
                                 double threshold, int n_vertices);

// Monte-Carlo estimate of the density-matrix-form convergence: samples
// n_samples histories from state 1's distribution, conditions both states on
// each, and returns the operator norm of the difference of the two ensemble
// density matrices at each checkpoint (power iteration on the squared
// difference, all-ones start, tolerance 1e-8).
std::vector<double>
ensemble_density_distances(const RunConfig& config,
                           const std::vector<int>& checkpoints, int n_samples,
                           RandomSource& rng);

double ensemble_density_distance(const RunConfig& config, int n_checkpoint,
                                 int n_samples, RandomSource& rng);

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0; // Euclidean norm of the OLS residuals
};

// Ordinary least squares through (log epsilon, log T_c).
FitResult fit_power_law(const std::vector<std::pair<double, double>>& points);

} // namespace collapse
