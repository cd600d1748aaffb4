#include <algorithm>
#include <catch_amalgamated.hpp>
#include <cmath>
#include <set>

#include "gfd/stars.hpp"
#include "test_support.hpp"

using namespace gfd;

TEST_CASE("Moore neighborhood on the regular grid", "[stars]") {
    const PointCloud c = generate_regular_cloud(5, 5);
    int center = -1;
    for (int j : c.inner_indices())
        if (c.node(j).x == 0.5 && c.node(j).y == 0.5) center = j;
    REQUIRE(center >= 0);
    const Star star = build_star(c, center, 8);
    std::set<std::pair<double, double>> got;
    for (int n : star.neighbors) got.insert({c.node(n).x, c.node(n).y});
    std::set<std::pair<double, double>> expect;
    for (double dx : {-0.25, 0.0, 0.25})
        for (double dy : {-0.25, 0.0, 0.25})
            if (dx != 0.0 || dy != 0.0) expect.insert({0.5 + dx, 0.5 + dy});
    CHECK(got == expect);
}

TEST_CASE("exhaustive star takes every other node", "[stars]") {
    const PointCloud c = generate_regular_cloud(3, 3);
    const Star star = build_star(c, c.inner_indices()[0], c.size() - 1);
    CHECK(star.size() == 8);
    std::set<int> got(star.neighbors.begin(), star.neighbors.end());
    CHECK(got.size() == 8);
    CHECK(got.count(star.center) == 0);
}

TEST_CASE("star offsets are exact coordinate differences", "[stars]") {
    const PointCloud c = generate_irregular_cloud(9, 9, 0.3, 5);
    for (int j : c.inner_indices()) {
        const Star star = build_star(c, j, 8);
        for (int i = 0; i < star.size(); ++i) {
            const Node& n = c.node(star.neighbors[static_cast<std::size_t>(i)]);
            CHECK(star.offsets[static_cast<std::size_t>(i)][0] == n.x - c.node(j).x);
            CHECK(star.offsets[static_cast<std::size_t>(i)][1] == n.y - c.node(j).y);
        }
    }
}

TEST_CASE("neighbors match the brute-force k-nearest oracle", "[stars]") {
    for (const PointCloud& c : {generate_regular_cloud(21, 21),
                                generate_irregular_cloud(13, 11, 0.25, 9)}) {
        const double h = 1.0 / 20.0;
        for (int j : c.inner_indices()) {
            const Star star = build_star(c, j, 8);
            CHECK(star.neighbors == testsupport::brute_force_knn(c, j, 8));
            if (c.size() == 441) {  // regular 21x21: offsets bounded by the diagonal spacing
                for (const auto& off : star.offsets)
                    CHECK(std::hypot(off[0], off[1]) <= std::sqrt(2.0) * h + 1e-12);
            }
        }
    }
}

TEST_CASE("neighbors are ordered by distance with index tie-break", "[stars]") {
    const PointCloud c = generate_regular_cloud(7, 7);
    const Star star = build_star(c, c.inner_indices()[3], 12);
    double prev = -1.0;
    int prev_index = -1;
    for (int i = 0; i < star.size(); ++i) {
        const auto& off = star.offsets[static_cast<std::size_t>(i)];
        const double d = off[0] * off[0] + off[1] * off[1];
        REQUIRE(d >= prev);
        if (d == prev) CHECK(star.neighbors[static_cast<std::size_t>(i)] > prev_index);
        prev = d;
        prev_index = star.neighbors[static_cast<std::size_t>(i)];
    }
}

TEST_CASE("one star per inner node", "[stars]") {
    const PointCloud c = generate_regular_cloud(5, 5);
    const auto stars = build_all_stars(c, 8);
    REQUIRE(stars.size() == 9);
    for (std::size_t k = 0; k < stars.size(); ++k) {
        CHECK(stars[k].center == c.inner_indices()[k]);
        CHECK(stars[k].size() == 8);
    }
}

TEST_CASE("star geometry is independent of node labeling", "[stars]") {
    // Relabel the nodes of the same geometry and compare per-center offset
    // sets; star selection must depend only on coordinates.
    const PointCloud orig = generate_irregular_cloud(7, 7, 0.2, 4);
    const int m = orig.size();
    std::vector<int> perm(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) perm[static_cast<std::size_t>(i)] = (i * 17 + 5) % m;  // bijection: gcd(17, 49) = 1
    std::vector<Node> relabeled(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        Node n = orig.node(i);
        n.index = perm[static_cast<std::size_t>(i)];
        if (n.kind == NodeKind::Boundary) n.paired_inner = perm[static_cast<std::size_t>(n.paired_inner)];
        relabeled[static_cast<std::size_t>(n.index)] = n;
    }
    const PointCloud shuffled(relabeled, orig.domain());

    auto offsets_sorted = [](const Star& s) {
        auto v = s.offsets;
        std::sort(v.begin(), v.end());
        return v;
    };
    for (int j : orig.inner_indices()) {
        const Star a = build_star(orig, j, 8);
        const Star b = build_star(shuffled, perm[static_cast<std::size_t>(j)], 8);
        CHECK(offsets_sorted(a) == offsets_sorted(b));
    }
}

TEST_CASE("star construction rejects bad inputs", "[stars]") {
    const PointCloud c = generate_regular_cloud(3, 3);
    CHECK_THROWS_AS(build_star(c, 4, 4), Error);        // s < 5
    CHECK_THROWS_AS(build_star(c, 4, 9), Error);        // cloud too small for s = m
    CHECK_THROWS_AS(build_all_stars(c, 20), Error);
}
