#include "collapse/lattice.hpp"

#include <algorithm>
#include <cmath>

namespace collapse {

bool is_ready(const LatticeGeometry& geom, const SurfaceFront& front,
              VertexId v) {
    if (v.row < 1 || v.col < 0 || v.col >= geom.n_vertices)
        return false;
    const auto [a, b] = slots_of(geom, v);
    return front.heights[a] == v.row - 1 && front.heights[b] == v.row - 1;
}

std::vector<VertexId> ready_vertices(const LatticeGeometry& geom,
                                     const SurfaceFront& front) {
    const int ns = geom.n_slots;
    if (static_cast<int>(front.heights.size()) != ns)
        throw std::runtime_error("ready_vertices: front has wrong slot count");

    std::vector<VertexId> out;
    // The adjacent pair (s, s+1) is the slot pair of a vertex in row h+1
    // exactly when both heights equal h and h's parity matches s's parity.
    for (int s = 0; s < ns; ++s) {
        const int h = front.heights[s];
        if (h < 0)
            throw std::runtime_error("ready_vertices: negative height");
        if (front.heights[(s + 1) % ns] != h)
            continue;
        if (h % 2 != s % 2)
            continue;
        const int p = h % 2;
        const int col = ((s - p + ns) % ns) / 2;
        out.push_back(VertexId{h + 1, col});
    }
    if (out.empty())
        throw std::runtime_error(
            "ready_vertices: no ready vertex, surface state corrupted");
    std::sort(out.begin(), out.end());
    return out;
}

void advance(const LatticeGeometry& geom, SurfaceFront& front, VertexId v) {
    if (!is_ready(geom, front, v))
        throw std::invalid_argument("advance: vertex is not ready");
    const auto [a, b] = slots_of(geom, v);
    front.heights[a] = v.row;
    front.heights[b] = v.row;
}

VertexId ready_pick(const std::vector<VertexId>& ready, double u) {
    const auto count = ready.size();
    auto idx = static_cast<std::size_t>(u * static_cast<double>(count));
    if (idx >= count)
        idx = count - 1;
    return ready[idx];
}

VertexId pick_next(const LatticeGeometry& geom, const SurfaceFront& front,
                   RandomSource& rng) {
    return ready_pick(ready_vertices(geom, front), rng.uniform());
}

bool is_reachable_front(const LatticeGeometry& geom,
                        const SurfaceFront& target) {
    if (static_cast<int>(target.heights.size()) != geom.n_slots)
        return false;
    for (int h : target.heights)
        if (h < 0)
            return false;

    // Greedily advance every ready vertex not exceeding the target; the
    // reachable fronts below a fixed front form a lattice, so greedy replay
    // reaches the target iff it is reachable at all.
    SurfaceFront cur(geom);
    bool progress = true;
    while (progress) {
        progress = false;
        std::vector<VertexId> ready;
        try {
            ready = ready_vertices(geom, cur);
        } catch (const std::runtime_error&) {
            return false;
        }
        for (VertexId v : ready) {
            const auto [a, b] = slots_of(geom, v);
            if (target.heights[a] >= v.row && target.heights[b] >= v.row) {
                advance(geom, cur, v);
                progress = true;
            }
        }
    }
    return cur.heights == target.heights;
}

bool validate_stem(const LatticeGeometry& geom, const Stem& stem) {
    SurfaceFront front(geom);
    for (VertexId v : stem) {
        if (!is_ready(geom, front, v))
            return false;
        advance(geom, front, v);
    }
    return true;
}

} // namespace collapse
