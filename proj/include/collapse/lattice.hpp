#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "collapse/rng.hpp"

namespace collapse {

// Periodic 1+1 null lattice, N vertices wide, realized as a brick-wall
// circuit over 2N qubit slots. Row t of vertices emits links at slot pairs
// shifted by (t-1) mod 2, wrapping periodically.
struct LatticeGeometry {
    int n_vertices; // N, vertices per row
    int n_slots;    // 2N

    explicit LatticeGeometry(int n) : n_vertices(n), n_slots(2 * n) {
        if (n < 2)
            throw std::invalid_argument(
                "LatticeGeometry: n_vertices must be >= 2 (periodic wrap "
                "degenerates at N=1)");
    }
};

struct VertexId {
    int row; // lattice time t, starting at 1
    int col; // column c in [0, N)

    auto operator<=>(const VertexId&) const = default;
};

// Slot pair of the two outgoing links of a vertex, ascending-slot order
// except at the periodic wrap.
inline std::pair<int, int> slots_of(const LatticeGeometry& geom, VertexId v) {
    if (v.col < 0 || v.col >= geom.n_vertices || v.row < 1)
        throw std::invalid_argument("slots_of: vertex outside lattice");
    const int a = (2 * v.col + ((v.row - 1) % 2)) % geom.n_slots;
    const int b = (a + 1) % geom.n_slots;
    return {a, b};
}

// Spacelike surface: height[s] = row of the vertex that most recently
// emitted the link at slot s (0 on the initial constant-time surface).
struct SurfaceFront {
    std::vector<int> heights;

    explicit SurfaceFront(const LatticeGeometry& geom)
        : heights(geom.n_slots, 0) {}
    explicit SurfaceFront(std::vector<int> h) : heights(std::move(h)) {}
};

using Stem = std::vector<VertexId>;

bool is_ready(const LatticeGeometry& geom, const SurfaceFront& front,
              VertexId v);

// All vertices whose elementary motion is currently possible, sorted by
// (row, col). Throws if the front is corrupted (a valid front always has at
// least one ready vertex).
std::vector<VertexId> ready_vertices(const LatticeGeometry& geom,
                                     const SurfaceFront& front);

// One elementary motion across v. Precondition: v is ready.
void advance(const LatticeGeometry& geom, SurfaceFront& front, VertexId v);

// Uniform choice from the ready set given one uniform draw in [0,1).
VertexId ready_pick(const std::vector<VertexId>& ready, double u);

// Uniform-random surface growth rule; consumes exactly one uniform draw.
VertexId pick_next(const LatticeGeometry& geom, const SurfaceFront& front,
                   RandomSource& rng);

// True iff the heights are reachable from the zero front by valid
// elementary motions (greedy reconstruction).
bool is_reachable_front(const LatticeGeometry& geom,
                        const SurfaceFront& front);

// True iff replaying the vertex list from the zero front never violates the
// readiness rule, i.e. the list is a natural labelling of a stem.
bool validate_stem(const LatticeGeometry& geom, const Stem& stem);

} // namespace collapse
