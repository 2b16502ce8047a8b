#include <doctest.h>

#include <algorithm>
#include <set>

#include "collapse/lattice.hpp"

using namespace collapse;

TEST_CASE("geometry rejects N=1") {
    CHECK_THROWS_AS(LatticeGeometry(1), std::invalid_argument);
    CHECK(LatticeGeometry(2).n_slots == 4);
}

TEST_CASE("slots_of brick-wall pairing") {
    const LatticeGeometry g2(2);
    CHECK(slots_of(g2, {1, 0}) == std::pair{0, 1});
    CHECK(slots_of(g2, {2, 1}) == std::pair{3, 0}); // periodic wrap
    const LatticeGeometry g4(4);
    CHECK(slots_of(g4, {3, 2}) == std::pair{4, 5});
}

TEST_CASE("ready_vertices") {
    const LatticeGeometry g(2);
    SUBCASE("fresh lattice: whole first row") {
        const auto r = ready_vertices(g, SurfaceFront(g));
        CHECK(r == std::vector<VertexId>{{1, 0}, {1, 1}});
    }
    SUBCASE("partial first row") {
        const auto r = ready_vertices(g, SurfaceFront({1, 1, 0, 0}));
        CHECK(r == std::vector<VertexId>{{1, 1}});
    }
    SUBCASE("full row complete: next row ready") {
        const auto r = ready_vertices(g, SurfaceFront({1, 1, 1, 1}));
        CHECK(r == std::vector<VertexId>{{2, 0}, {2, 1}});
    }
    SUBCASE("corrupted front") {
        CHECK_THROWS_AS(ready_vertices(g, SurfaceFront({0, 1, 0, 1})),
                        std::runtime_error);
        CHECK_THROWS_AS(ready_vertices(g, SurfaceFront({-1, 0, 0, 0})),
                        std::runtime_error);
    }
}

TEST_CASE("advance") {
    const LatticeGeometry g(2);
    SurfaceFront f(g);
    advance(g, f, {1, 0});
    CHECK(f.heights == std::vector<int>{1, 1, 0, 0});

    SurfaceFront full(std::vector<int>{1, 1, 1, 1});
    advance(g, full, {2, 1}); // slots (3, 0)
    CHECK(full.heights == std::vector<int>{2, 1, 1, 2});

    SurfaceFront bad(std::vector<int>{1, 0, 0, 0});
    CHECK_THROWS_AS(advance(g, bad, {2, 0}), std::invalid_argument);
}

TEST_CASE("ready_pick draw rule") {
    const LatticeGeometry g(2);
    const auto ready = ready_vertices(g, SurfaceFront(g));
    CHECK(ready_pick(ready, 0.3) == VertexId{1, 0});
    CHECK(ready_pick(ready, 0.7) == VertexId{1, 1});
    CHECK(ready_pick({VertexId{3, 1}}, 0.999) == VertexId{3, 1});
}

TEST_CASE("pick_next is uniform" * doctest::timeout(30)) {
    const LatticeGeometry g(2);
    const SurfaceFront f(g);
    RandomSource rng(7);
    int count0 = 0;
    for (int i = 0; i < 10000; ++i)
        if (pick_next(g, f, rng) == VertexId{1, 0})
            ++count0;
    CHECK(count0 > 4800); // binomial 3 sigma is +-150, allow 200
    CHECK(count0 < 5200);
}

TEST_CASE("validate_stem") {
    const LatticeGeometry g(2);
    CHECK(validate_stem(g, {{1, 0}, {1, 1}, {2, 0}}));
    CHECK_FALSE(validate_stem(g, {{2, 0}}));
    CHECK(validate_stem(g, {{1, 1}, {1, 0}, {2, 0}}));
    CHECK(validate_stem(g, {})); // empty stem
}

TEST_CASE("reachable fronts") {
    const LatticeGeometry g(2);
    CHECK(is_reachable_front(g, SurfaceFront({0, 0, 0, 0})));
    CHECK(is_reachable_front(g, SurfaceFront({1, 1, 0, 0})));
    CHECK(is_reachable_front(g, SurfaceFront({2, 1, 1, 2})));
    CHECK_FALSE(is_reachable_front(g, SurfaceFront({1, 0, 0, 0})));
    CHECK_FALSE(is_reachable_front(g, SurfaceFront({2, 2, 0, 0})));
}

TEST_CASE("readiness monotonicity and permutation closure") {
    const LatticeGeometry g(3);
    RandomSource rng(11);
    SurfaceFront front(g);
    for (int step = 0; step < 200; ++step) {
        const auto ready = ready_vertices(g, front);
        const VertexId v = ready_pick(ready, rng.uniform());
        SurfaceFront next = front;
        advance(g, next, v);
        // every other ready vertex stays ready
        for (VertexId w : ready)
            if (!(w == v))
                CHECK(is_ready(g, next, w));
        front = next;
    }

    // two orderings of the same vertex set give the same front
    Stem stem;
    SurfaceFront f1(g);
    RandomSource rng2(5);
    for (int i = 0; i < 30; ++i) {
        const VertexId v = pick_next(g, f1, rng2);
        advance(g, f1, v);
        stem.push_back(v);
    }
    Stem reordered = stem;
    // greedily replay picking the last applicable vertex each time
    SurfaceFront f2(g);
    std::vector<VertexId> pending = stem;
    while (!pending.empty()) {
        for (auto it = pending.rbegin(); it != pending.rend(); ++it) {
            if (is_ready(g, f2, *it)) {
                advance(g, f2, *it);
                pending.erase(std::next(it).base());
                break;
            }
        }
    }
    CHECK(f1.heights == f2.heights);
}

TEST_CASE("row completion: evolving rows 1..t gives constant height t") {
    const LatticeGeometry g(4);
    SurfaceFront f(g);
    for (int t = 1; t <= 3; ++t)
        for (int c = 0; c < g.n_vertices; ++c)
            advance(g, f, {t, c});
    CHECK(std::all_of(f.heights.begin(), f.heights.end(),
                      [](int h) { return h == 3; }));
}
