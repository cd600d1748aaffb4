#pragma once

// Scattered-node discretizations of a rectangular domain: regular tensor
// grids, deterministically perturbed ("irregular") variants, inner/boundary
// classification with outward normals, boundary-to-inner pairing for the
// Neumann condition, and CSV persistence.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "gfd/errors.hpp"

namespace gfd {

enum class NodeKind { Inner, Boundary };

struct Node {
    int index = -1;
    double x = 0.0;
    double y = 0.0;
    NodeKind kind = NodeKind::Inner;
    double normal_x = 0.0;   // unit outward normal, Boundary only
    double normal_y = 0.0;
    int paired_inner = -1;   // partner along the inward normal, Boundary only
};

struct Rect {
    double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;

    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
    bool contains(double x, double y) const {
        return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
    }
};

inline Rect unit_square() { return Rect{0.0, 1.0, 0.0, 1.0}; }

namespace detail {

// Deterministic, platform-independent generator (SplitMix64). <random>
// distributions are implementation-defined, which would break the
// same-seed-same-cloud contract across standard libraries.
struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }  // [0,1)
    double symmetric() { return 2.0 * uniform() - 1.0; }                        // [-1,1)
};

inline std::uint64_t coord_key(double x, double y) {
    std::uint64_t bx, by;
    std::memcpy(&bx, &x, sizeof bx);
    std::memcpy(&by, &y, sizeof by);
    return bx * 0x9e3779b97f4a7c15ull ^ (by + 0x7f4a7c15u);
}

}  // namespace detail

/// Immutable node set over a rectangular domain. Construction validates the
/// structural invariants; instances are safe to share across threads.
class PointCloud {
public:
    PointCloud(std::vector<Node> nodes, Rect domain)
        : nodes_(std::move(nodes)), domain_(domain) {
        validate();
    }

    int size() const { return static_cast<int>(nodes_.size()); }
    const Node& node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
    const std::vector<Node>& nodes() const { return nodes_; }
    const Rect& domain() const { return domain_; }

    bool is_inner(int i) const { return node(i).kind == NodeKind::Inner; }

    const std::vector<int>& inner_indices() const { return inner_; }
    const std::vector<int>& boundary_indices() const { return boundary_; }
    int inner_count() const { return static_cast<int>(inner_.size()); }

private:
    void validate() {
        if (nodes_.empty()) throw Error("point cloud has no nodes");
        if (domain_.width() <= 0.0 || domain_.height() <= 0.0)
            throw Error("invalid domain: zero area");

        std::unordered_set<std::uint64_t> seen;
        seen.reserve(nodes_.size() * 2);
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            const Node& n = nodes_[i];
            if (n.index != static_cast<int>(i))
                throw Error("node indices must be 0..m-1 without gaps (node " +
                            std::to_string(i) + " has index " + std::to_string(n.index) + ")");
            if (!domain_.contains(n.x, n.y))
                throw Error("node " + std::to_string(i) + " lies outside the domain");
            if (!seen.insert(detail::coord_key(n.x, n.y)).second) {
                // hash hit: confirm a true coordinate duplicate before failing
                for (std::size_t k = 0; k < i; ++k)
                    if (nodes_[k].x == n.x && nodes_[k].y == n.y)
                        throw Error("nodes " + std::to_string(k) + " and " + std::to_string(i) +
                                    " coincide");
            }
        }
        for (const Node& n : nodes_) {
            if (n.kind == NodeKind::Inner) {
                inner_.push_back(n.index);
                continue;
            }
            boundary_.push_back(n.index);
            const double len = std::hypot(n.normal_x, n.normal_y);
            if (std::abs(len - 1.0) > 1e-12)
                throw Error("boundary node " + std::to_string(n.index) +
                            " has non-unit normal");
            if (n.paired_inner < 0 || n.paired_inner >= size())
                throw Error("boundary node " + std::to_string(n.index) +
                            " has no paired inner node");
            const Node& p = nodes_[static_cast<std::size_t>(n.paired_inner)];
            if (p.kind != NodeKind::Inner)
                throw Error("boundary node " + std::to_string(n.index) +
                            " is paired with a non-inner node");
            // The pair must lie on the inward side of the boundary node.
            const double dot = (p.x - n.x) * n.normal_x + (p.y - n.y) * n.normal_y;
            if (!(dot < 0.0))
                throw Error("boundary node " + std::to_string(n.index) +
                            " pairing does not point inward");
        }
    }

    std::vector<Node> nodes_;
    Rect domain_;
    std::vector<int> inner_;
    std::vector<int> boundary_;
};

namespace detail {

// Pick the inner node whose direction from the boundary node deviates least
// from the inward normal; ties (within 1e-9 rad) broken by distance, then
// index. The angular slack matters: exact comparison lets representation
// noise (1 - 0.95 != 0.05) rank a distant exactly-aligned node above the
// true nearest partner along the normal.
inline int pair_for_boundary(const std::vector<Node>& nodes, const Node& b,
                             const std::vector<int>& inner) {
    constexpr double angle_tol = 1e-9;
    const double dx = -b.normal_x, dy = -b.normal_y;
    double best_angle = std::numeric_limits<double>::infinity();
    std::vector<std::array<double, 2>> angle_dist(inner.size());
    for (std::size_t k = 0; k < inner.size(); ++k) {
        const Node& p = nodes[static_cast<std::size_t>(inner[k])];
        const double vx = p.x - b.x, vy = p.y - b.y;
        const double cross = vx * dy - vy * dx;
        const double along = vx * dx + vy * dy;
        const double angle = std::atan2(std::abs(cross), along);
        angle_dist[k] = {angle, std::hypot(vx, vy)};
        best_angle = std::min(best_angle, angle);
    }
    int best = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < inner.size(); ++k) {
        if (angle_dist[k][0] > best_angle + angle_tol) continue;
        if (angle_dist[k][1] < best_dist) {
            best_dist = angle_dist[k][1];
            best = inner[k];
        }
    }
    return best;
}

inline std::vector<Node> grid_nodes(int nx, int ny, const Rect& domain) {
    if (nx < 3 || ny < 3) throw Error("grid must be at least 3x3");
    if (domain.width() <= 0.0 || domain.height() <= 0.0)
        throw Error("invalid domain: zero area");
    std::vector<Node> nodes;
    nodes.reserve(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
    const double hx = domain.width() / (nx - 1);
    const double hy = domain.height() / (ny - 1);
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            Node n;
            n.index = iy * nx + ix;
            n.x = (ix == nx - 1) ? domain.x_max : domain.x_min + ix * hx;
            n.y = (iy == ny - 1) ? domain.y_max : domain.y_min + iy * hy;
            const bool left = ix == 0, right = ix == nx - 1;
            const bool bottom = iy == 0, top = iy == ny - 1;
            if (left || right || bottom || top) {
                n.kind = NodeKind::Boundary;
                double ox = (right ? 1.0 : 0.0) - (left ? 1.0 : 0.0);
                double oy = (top ? 1.0 : 0.0) - (bottom ? 1.0 : 0.0);
                const double len = std::hypot(ox, oy);  // corners: diagonal normal
                n.normal_x = ox / len;
                n.normal_y = oy / len;
            }
            nodes.push_back(n);
        }
    }
    return nodes;
}

inline PointCloud finish_cloud(std::vector<Node> nodes, const Rect& domain) {
    std::vector<int> inner;
    for (const Node& n : nodes)
        if (n.kind == NodeKind::Inner) inner.push_back(n.index);
    for (Node& n : nodes)
        if (n.kind == NodeKind::Boundary)
            n.paired_inner = pair_for_boundary(nodes, n, inner);
    return PointCloud(std::move(nodes), domain);
}

}  // namespace detail

/// nx-by-ny tensor grid; perimeter nodes are Boundary with outward normals
/// (corners get the diagonal), each paired with the nearest inner node along
/// the inward normal.
inline PointCloud generate_regular_cloud(int nx, int ny, const Rect& domain = unit_square()) {
    return detail::finish_cloud(detail::grid_nodes(nx, ny, domain), domain);
}

/// Regular grid whose inner nodes are displaced per axis by a uniform offset
/// in [-p*h, p*h] (h = grid spacing of that axis). Boundary nodes stay put.
/// Same seed, same cloud, bit for bit.
inline PointCloud generate_irregular_cloud(int nx, int ny, double perturbation,
                                           std::uint64_t seed,
                                           const Rect& domain = unit_square()) {
    if (!(perturbation >= 0.0 && perturbation < 0.5))
        throw Error("perturbation must lie in [0, 0.5)");
    std::vector<Node> nodes = detail::grid_nodes(nx, ny, domain);
    const double hx = domain.width() / (nx - 1);
    const double hy = domain.height() / (ny - 1);
    detail::SplitMix64 rng(seed);
    for (Node& n : nodes) {
        if (n.kind != NodeKind::Inner) continue;
        n.x += rng.symmetric() * perturbation * hx;
        n.y += rng.symmetric() * perturbation * hy;
    }
    return detail::finish_cloud(std::move(nodes), domain);
}

namespace detail {

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

inline double parse_double(const std::string& s, long line) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw ParseError("malformed number '" + s + "'", line);
    return v;
}

inline long parse_int(const std::string& s, long line) {
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0')
        throw ParseError("malformed integer '" + s + "'", line);
    return v;
}

}  // namespace detail

/// Writes the cloud as CSV (`index,x,y,kind,nx,ny,pair`), one node per row,
/// 17 significant digits, LF line endings.
inline void save_cloud(const PointCloud& cloud, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << "index,x,y,kind,nx,ny,pair\n";
    for (const Node& n : cloud.nodes()) {
        out << n.index << ',' << detail::format_double(n.x) << ','
            << detail::format_double(n.y) << ',';
        if (n.kind == NodeKind::Inner) {
            out << "I,,,\n";
        } else {
            out << "B," << detail::format_double(n.normal_x) << ','
                << detail::format_double(n.normal_y) << ',' << n.paired_inner << '\n';
        }
    }
    if (!out) throw IoError("write failed for '" + path + "'");
}

/// Reads a cloud CSV written by save_cloud (rows may appear in any order).
/// The domain is recovered as the bounding box of the nodes.
inline PointCloud load_cloud(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty file", 1);
    {
        auto header = detail::split_csv(line);
        const std::vector<std::string> expect = {"index", "x", "y", "kind", "nx", "ny", "pair"};
        if (std::vector<std::string>(header.begin(), header.end()) != expect)
            throw ParseError("bad header, expected 'index,x,y,kind,nx,ny,pair'", 1);
    }
    struct Row {
        Node node;
        long line;
    };
    std::vector<Row> rows;
    long lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto f = detail::split_csv(line);
        if (f.size() != 7) throw ParseError("expected 7 fields", lineno);
        Node n;
        n.index = static_cast<int>(detail::parse_int(f[0], lineno));
        n.x = detail::parse_double(f[1], lineno);
        n.y = detail::parse_double(f[2], lineno);
        if (f[3] == "I") {
            n.kind = NodeKind::Inner;
            if (!f[4].empty() || !f[5].empty() || !f[6].empty())
                throw ParseError("inner node must leave nx,ny,pair empty", lineno);
        } else if (f[3] == "B") {
            n.kind = NodeKind::Boundary;
            if (f[4].empty() || f[5].empty() || f[6].empty())
                throw ParseError("boundary node requires nx,ny,pair", lineno);
            n.normal_x = detail::parse_double(f[4], lineno);
            n.normal_y = detail::parse_double(f[5], lineno);
            n.paired_inner = static_cast<int>(detail::parse_int(f[6], lineno));
        } else {
            throw ParseError("kind must be 'I' or 'B', got '" + f[3] + "'", lineno);
        }
        rows.push_back({n, lineno});
    }
    if (rows.empty()) throw ParseError("file has no node rows", lineno);

    std::vector<Node> nodes(rows.size());
    std::vector<long> src_line(rows.size(), 0);
    for (const Row& r : rows) {
        if (r.node.index < 0 || r.node.index >= static_cast<int>(rows.size()))
            throw ParseError("node index " + std::to_string(r.node.index) + " out of range",
                             r.line);
        auto idx = static_cast<std::size_t>(r.node.index);
        if (src_line[idx] != 0)
            throw ParseError("duplicate node index " + std::to_string(r.node.index), r.line);
        nodes[idx] = r.node;
        src_line[idx] = r.line;
    }
    for (const Row& r : rows) {
        if (r.node.kind != NodeKind::Boundary) continue;
        const int p = r.node.paired_inner;
        if (p < 0 || p >= static_cast<int>(nodes.size()) || nodes[static_cast<std::size_t>(p)].kind != NodeKind::Inner)
            throw ParseError("dangling paired_inner reference " + std::to_string(p), r.line);
    }
    Rect box;
    box.x_min = box.y_min = std::numeric_limits<double>::infinity();
    box.x_max = box.y_max = -std::numeric_limits<double>::infinity();
    for (const Node& n : nodes) {
        box.x_min = std::min(box.x_min, n.x);
        box.x_max = std::max(box.x_max, n.x);
        box.y_min = std::min(box.y_min, n.y);
        box.y_max = std::max(box.y_max, n.y);
    }
    return PointCloud(std::move(nodes), box);
}

}  // namespace gfd
