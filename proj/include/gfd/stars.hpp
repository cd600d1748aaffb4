#pragma once

// E_s-star selection: the s nearest nodes around a center, with exact
// coordinate offsets. Selection is deterministic (distance ties broken by
// node index) so identical geometry always yields identical stars.

#include <algorithm>
#include <array>
#include <vector>

#include "gfd/errors.hpp"
#include "gfd/point_cloud.hpp"

namespace gfd {

struct Star {
    int center = -1;
    std::vector<int> neighbors;                    // sorted by (distance, index)
    std::vector<std::array<double, 2>> offsets;    // (h_i, k_i) = z_i - z_center

    int size() const { return static_cast<int>(neighbors.size()); }
};

/// The s nodes closest to `center` (any kind), ordered by (distance, index).
inline Star build_star(const PointCloud& cloud, int center, int s) {
    if (s < 5) throw Error("star size must be at least 5 (five unknown derivatives)");
    if (cloud.size() < s + 1)
        throw Error("cloud too small: " + std::to_string(cloud.size()) +
                    " nodes cannot host an E_" + std::to_string(s) + " star");
    const Node& c = cloud.node(center);
    std::vector<std::pair<double, int>> by_dist;
    by_dist.reserve(static_cast<std::size_t>(cloud.size()) - 1);
    for (const Node& n : cloud.nodes()) {
        if (n.index == center) continue;
        const double dx = n.x - c.x, dy = n.y - c.y;
        by_dist.emplace_back(dx * dx + dy * dy, n.index);
    }
    std::partial_sort(by_dist.begin(), by_dist.begin() + s, by_dist.end());
    Star star;
    star.center = center;
    star.neighbors.reserve(static_cast<std::size_t>(s));
    star.offsets.reserve(static_cast<std::size_t>(s));
    for (int i = 0; i < s; ++i) {
        const Node& n = cloud.node(by_dist[static_cast<std::size_t>(i)].second);
        star.neighbors.push_back(n.index);
        star.offsets.push_back({n.x - c.x, n.y - c.y});
    }
    return star;
}

/// One star per inner node, in inner-node order.
inline std::vector<Star> build_all_stars(const PointCloud& cloud, int s) {
    std::vector<Star> stars;
    stars.reserve(cloud.inner_indices().size());
    for (int j : cloud.inner_indices()) stars.push_back(build_star(cloud, j, s));
    return stars;
}

}  // namespace gfd
