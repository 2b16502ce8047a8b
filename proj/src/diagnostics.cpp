#include "collapse/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace collapse {

BlockSeries block_sum(const std::vector<StepRecord>& records, int m, int n) {
    if (m < 1 || n < 2)
        throw std::invalid_argument("block_sum: need m >= 1 and n >= 2");
    std::map<int, double> sums;
    std::map<int, int> counts;
    for (const StepRecord& r : records) {
        const int t0 = 1 + m * ((r.vertex.row - 1) / m);
        double& s = sums[t0];
        s += link_difference(r.marginal_1[0], r.marginal_2[0]);
        s += link_difference(r.marginal_1[1], r.marginal_2[1]);
        counts[t0] += 2;
    }
    BlockSeries out;
    const int full = 2 * n * m; // links emitted by m complete rows
    for (const auto& [t0, s] : sums) {
        if (counts[t0] == full)
            out.blocks[t0] = s;
        else
            out.dropped_partial = true;
    }
    return out;
}

ConvergenceResult convergence_time(const std::map<int, double>& blocks,
                                   double delta, int /*t_max*/) {
    ConvergenceResult r;
    if (blocks.empty())
        return r;
    int last_violation = 0;
    for (const auto& [t0, b] : blocks)
        if (std::abs(b) > delta)
            last_violation = t0;
    const int final_t = blocks.rbegin()->first;
    if (last_violation == final_t && std::abs(blocks.rbegin()->second) > delta)
        return r; // still above threshold at the horizon
    r.converged = true;
    r.t_c = last_violation > 0 ? last_violation : blocks.begin()->first;
    return r;
}

double overlap_deficit(const StateVector& state_1, const StateVector& state_2) {
    if (state_1.n_slots() != state_2.n_slots())
        throw std::domain_error("overlap_deficit: dimension mismatch");
    cdouble inner{0.0, 0.0};
    const auto& a1 = state_1.amplitudes();
    const auto& a2 = state_2.amplitudes();
    for (std::size_t i = 0; i < a1.size(); ++i)
        inner += std::conj(a1[i]) * a2[i];
    return 1.0 - std::norm(inner);
}

std::optional<int> c_settle_time(const std::vector<double>& c_series,
                                 double threshold, int n_vertices) {
    // last index at or above threshold; settle step is the one after it
    std::size_t n0 = 0;
    for (std::size_t i = 0; i < c_series.size(); ++i)
        if (c_series[i] >= threshold)
            n0 = i + 1;
    if (n0 >= c_series.size())
        return std::nullopt; // never settles (or only at the very last step)
    const int step = static_cast<int>(n0) + 1; // 1-based motion count
    return (step + n_vertices - 1) / n_vertices;
}

namespace {

using Matrix = std::vector<cdouble>; // dense row-major, dim x dim

void accumulate_outer(Matrix& rho, const StateVector& psi, double weight) {
    const auto& a = psi.amplitudes();
    const std::size_t d = a.size();
    for (std::size_t r = 0; r < d; ++r) {
        const cdouble ar = a[r] * weight;
        for (std::size_t c = 0; c < d; ++c)
            rho[r * d + c] += ar * std::conj(a[c]);
    }
}

std::vector<cdouble> mat_vec(const Matrix& m, const std::vector<cdouble>& v) {
    const std::size_t d = v.size();
    std::vector<cdouble> out(d);
    for (std::size_t r = 0; r < d; ++r) {
        cdouble s{0.0, 0.0};
        for (std::size_t c = 0; c < d; ++c)
            s += m[r * d + c] * v[c];
        out[r] = s;
    }
    return out;
}

double vec_norm(const std::vector<cdouble>& v) {
    double s = 0.0;
    for (const cdouble& x : v)
        s += std::norm(x);
    return std::sqrt(s);
}

// Largest |eigenvalue| of a Hermitian matrix: power iteration on D^2 (which
// is blind to the sign-degenerate +/- lambda case), deterministic all-ones
// start, tolerance 1e-8.
double operator_norm(const Matrix& d_mat, std::size_t dim) {
    std::vector<cdouble> v(dim, cdouble{1.0, 0.0});
    const double inv0 = 1.0 / std::sqrt(static_cast<double>(dim));
    for (cdouble& x : v)
        x *= inv0;
    double prev = 0.0;
    for (int it = 0; it < 10000; ++it) {
        std::vector<cdouble> w = mat_vec(d_mat, mat_vec(d_mat, v));
        const double lambda2 = vec_norm(w);
        if (lambda2 < 1e-30)
            return 0.0;
        const double inv = 1.0 / lambda2;
        for (cdouble& x : w)
            x *= inv;
        v = std::move(w);
        if (std::abs(lambda2 - prev) < 1e-8 * std::max(1.0, lambda2))
            return std::sqrt(lambda2);
        prev = lambda2;
    }
    return std::sqrt(prev);
}

} // namespace

std::vector<double>
ensemble_density_distances(const RunConfig& config,
                           const std::vector<int>& checkpoints, int n_samples,
                           RandomSource& rng) {
    config.validate();
    if (config.n_vertices > 3)
        throw std::invalid_argument(
            "ensemble_density_distances: dense matrices only at N <= 3");
    if (n_samples < 1)
        throw std::invalid_argument(
            "ensemble_density_distances: need n_samples >= 1");

    const LatticeGeometry geom(config.n_vertices);
    const RMatrix rmatrix = build_r_matrix(config.theta);
    const JumpFamily jumps = build_jump_family(config.x);
    const std::size_t dim = std::size_t{1} << geom.n_slots;

    std::vector<int> sorted = checkpoints;
    std::sort(sorted.begin(), sorted.end());
    const int n_max = sorted.empty() ? 0 : sorted.back();

    std::vector<Matrix> rho1(sorted.size(), Matrix(dim * dim));
    std::vector<Matrix> rho2(sorted.size(), Matrix(dim * dim));
    const double w = 1.0 / n_samples;

    for (int k = 0; k < n_samples; ++k) {
        StateVector s1 = StateVector::from_bits(config.initial_state_1);
        StateVector s2 = StateVector::from_bits(config.initial_state_2);
        SurfaceFront front(geom);
        std::size_t ci = 0;
        for (; ci < sorted.size() && sorted[ci] == 0; ++ci) {
            accumulate_outer(rho1[ci], s1, w);
            accumulate_outer(rho2[ci], s2, w);
        }
        for (int n = 1; n <= n_max; ++n) {
            const SampledStep step =
                step_sample(s1, front, rng, geom, rmatrix, jumps);
            step_replay(s2, geom, step.vertex, step.outcome, rmatrix, jumps);
            for (; ci < sorted.size() && sorted[ci] == n; ++ci) {
                accumulate_outer(rho1[ci], s1, w);
                accumulate_outer(rho2[ci], s2, w);
            }
        }
    }

    std::vector<double> out;
    for (std::size_t ci = 0; ci < sorted.size(); ++ci) {
        Matrix diff(dim * dim);
        for (std::size_t i = 0; i < diff.size(); ++i)
            diff[i] = rho1[ci][i] - rho2[ci][i];
        out.push_back(operator_norm(diff, dim));
    }
    // restore caller order
    std::vector<double> reordered(checkpoints.size());
    std::vector<bool> used(sorted.size(), false);
    for (std::size_t i = 0; i < checkpoints.size(); ++i)
        for (std::size_t j = 0; j < sorted.size(); ++j)
            if (!used[j] && sorted[j] == checkpoints[i]) {
                reordered[i] = out[j];
                used[j] = true;
                break;
            }
    return reordered;
}

double ensemble_density_distance(const RunConfig& config, int n_checkpoint,
                                 int n_samples, RandomSource& rng) {
    return ensemble_density_distances(config, {n_checkpoint}, n_samples,
                                      rng)[0];
}

FitResult fit_power_law(const std::vector<std::pair<double, double>>& points) {
    std::set<double> distinct;
    for (const auto& [eps, tc] : points) {
        if (eps <= 0.0 || tc <= 0.0)
            throw std::domain_error(
                "fit_power_law: epsilon and T_c must be positive");
        distinct.insert(eps);
    }
    if (distinct.size() < 2)
        throw std::domain_error(
            "fit_power_law: need at least 2 distinct epsilon values");

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(points.size());
    for (const auto& [eps, tc] : points) {
        const double x = std::log(eps);
        const double y = std::log(tc);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    FitResult fit;
    fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / n;
    double res2 = 0.0;
    for (const auto& [eps, tc] : points) {
        const double r =
            std::log(tc) - (fit.slope * std::log(eps) + fit.intercept);
        res2 += r * r;
    }
    fit.residual = std::sqrt(res2);
    return fit;
}

} // namespace collapse
