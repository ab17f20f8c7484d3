#include <doctest.h>

#include <algorithm>
#include <set>

#include "ohmstat/lattice.hpp"
#include "ohmstat/rng.hpp"

using namespace ohmstat;

TEST_SUITE("lattice") {

TEST_CASE("vertex and boundary counts") {
    for (int d = 1; d <= 3; ++d) {
        for (int L = 2; L <= 5; ++L) {
            const BoxDomain box(d, L);
            long interior = 1, faces = 2 * d;
            for (int i = 0; i < d; ++i) interior *= L;
            long per_face = interior / L;
            CHECK(box.n_interior() == interior);
            CHECK(box.n_boundary() == faces * per_face);
        }
    }
}

TEST_CASE("edge count formula against brute force") {
    for (int d = 1; d <= 3; ++d) {
        for (int L = 2; L <= (d == 3 ? 6 : 16); ++L) {
            const BoxDomain box(d, L);
            long expect = d * (L + 1);
            for (int i = 0; i < d - 1; ++i) expect *= L;
            REQUIRE(box.n_edges() == expect);

            // Brute force: every nearest-neighbor edge with an endpoint
            // inside, counted once via its canonical base point.
            std::set<std::vector<int>> seen;
            for (long v = 0; v < box.n_vertices(); ++v) {
                const Point p = box.vertex(v);
                for (int i = 0; i < d; ++i) {
                    for (int sgn : {+1, -1}) {
                        Point q = p;
                        q[i] += sgn;
                        const Point& base = sgn > 0 ? p : q;
                        if (!box.contains(p) && !box.contains(q)) continue;
                        std::vector<int> key = base;
                        key.push_back(i);
                        seen.insert(key);
                    }
                }
            }
            CHECK(static_cast<long>(seen.size()) == box.n_edges());
        }
    }
}

TEST_CASE("edges are sorted strictly increasing and indexable") {
    const BoxDomain box(2, 5);
    const auto& edges = box.edges();
    for (std::size_t k = 1; k < edges.size(); ++k) CHECK(edge_less(edges[k - 1], edges[k]));
    for (long id = 0; id < box.n_edges(); ++id) CHECK(box.edge_id(edges[id]) == id);
}

TEST_CASE("d=1 L=2 explicit edge sequence") {
    const BoxDomain box(1, 2);
    REQUIRE(box.n_edges() == 3);
    CHECK(box.edge(0) == EdgeKey{{-1}, 0});
    CHECK(box.edge(1) == EdgeKey{{0}, 0});
    CHECK(box.edge(2) == EdgeKey{{1}, 0});
}

TEST_CASE("d=2 L=2 first edge and length") {
    const BoxDomain box(2, 2);
    REQUIRE(box.n_edges() == 12);
    CHECK(box.edge(0) == EdgeKey{{-1, 0}, 0});
}

TEST_CASE("the 61st edge of the 7-box is ((3,3), second direction)") {
    const BoxDomain box(2, 7);
    const EdgeKey probe{{3, 3}, 1};
    long count = 0;
    for (const EdgeKey& e : box.edges())
        if (edge_leq(e, probe)) ++count;
    CHECK(count == 61);
    CHECK(box.edge(60) == probe);
}

TEST_CASE("boundary vertices") {
    const BoxDomain b1(1, 2);
    const auto bd1 = b1.boundary_vertices();
    REQUIRE(bd1.size() == 2);
    CHECK(bd1[0] == Point{-1});
    CHECK(bd1[1] == Point{2});

    const BoxDomain b2(2, 2);
    CHECK(b2.n_boundary() == 8);  // no diagonal corners

    const BoxDomain b7(2, 7);
    CHECK(b7.n_boundary() == 28);

    // Every boundary vertex has an edge into the box.
    for (const Point& p : b7.boundary_vertices()) {
        bool touches = false;
        for (int i = 0; i < 2; ++i) {
            for (int sgn : {+1, -1}) {
                Point q = p;
                q[i] += sgn;
                if (b7.contains(q)) touches = true;
            }
        }
        CHECK(touches);
        CHECK(!b7.contains(p));
    }
}

TEST_CASE("order is total on small boxes") {
    const BoxDomain box(2, 3);
    const auto& edges = box.edges();
    for (std::size_t a = 0; a < edges.size(); ++a) {
        for (std::size_t b = 0; b < edges.size(); ++b) {
            const bool ab = edge_leq(edges[a], edges[b]);
            const bool ba = edge_leq(edges[b], edges[a]);
            CHECK((ab || ba));
            if (ab && ba) CHECK(edges[a] == edges[b]);
        }
    }
}

TEST_CASE("shift preserves the order") {
    SeedStream rng(2024);
    const BoxDomain box(3, 4);
    const auto& edges = box.edges();
    for (int trial = 0; trial < 10000; ++trial) {
        const EdgeKey& a = edges[rng.next_u64() % edges.size()];
        const EdgeKey& b = edges[rng.next_u64() % edges.size()];
        Point z{static_cast<int>(rng.next_u64() % 21) - 10,
                static_cast<int>(rng.next_u64() % 21) - 10,
                static_cast<int>(rng.next_u64() % 21) - 10};
        CHECK(edge_leq(a, b) == edge_leq(shift_edge(a, z), shift_edge(b, z)));
    }
    // Identity shift and a plain translation.
    CHECK(shift_edge(EdgeKey{{0, 0}, 0}, {2, 3}) == EdgeKey{{2, 3}, 0});
    CHECK(shift_edge(EdgeKey{{4, 5}, 1}, {0, 0}) == EdgeKey{{4, 5}, 1});
}

TEST_CASE("interior ids form a contiguous prefix") {
    const BoxDomain box(2, 4);
    for (long v = 0; v < box.n_interior(); ++v) CHECK(box.contains(box.vertex(v)));
    for (long v = box.n_interior(); v < box.n_vertices(); ++v)
        CHECK(box.is_boundary(box.vertex(v)));
}

} // TEST_SUITE
