#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace branchfront::geom {

struct Vec2 {
    double x = 0.0, y = 0.0;
};
inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::sqrt(dot(a, a)); }
inline Vec2 perp(Vec2 a) { return {-a.y, a.x}; }

/** One half-infinite cylindrical branch, realized in 2D as a strip of the
 *  given width starting at the anchor and truncated at `length` for the
 *  grid. */
struct BranchSpec {
    Vec2 direction;   // unit vector
    double width = 1.0;
    Vec2 anchor;      // offset point x_i
    double length = 10.0;  // finite truncation for the grid
};

struct PathSpec {
    std::vector<Vec2> waypoints;
};

struct Grid {
    int nx = 0, ny = 0;
    double h = 0.0, x0 = 0.0, y0 = 0.0;  // cell centers at x0+(i+.5)h
    size_t idx(int i, int j) const { return (size_t)j * nx + i; }
    Vec2 center(int i, int j) const {
        return {x0 + (i + 0.5) * h, y0 + (j + 0.5) * h};
    }
    int cell_i(double x) const { return (int)std::floor((x - x0) / h); }
    int cell_j(double y) const { return (int)std::floor((y - y0) / h); }
    bool in_bounds(int i, int j) const {
        return i >= 0 && i < nx && j >= 0 && j < ny;
    }
};

enum CellKind : uint8_t { kOutside = 0, kInterior = 1, kBoundary = 2 };

struct BranchedDomain {
    std::vector<BranchSpec> branches;
    double L = 1.0;       // junction ball radius
    double blend = 0.0;   // fillet radius inside the junction ball
    Vec2 center;          // ball center (origin unless scaled/translated)
    Grid grid;
    std::vector<uint8_t> mask;       // 1 inside
    std::vector<uint8_t> cell_kind;  // CellKind
    std::vector<uint8_t> nnbr;       // inside 4-neighbor count
    std::vector<int8_t> branch_of;   // branch index, -1 junction / none
    size_t inside_count = 0;

    bool inside(int i, int j) const {
        return grid.in_bounds(i, j) && mask[grid.idx(i, j)];
    }
    bool contains_point(Vec2 p) const {
        const int i = grid.cell_i(p.x), j = grid.cell_j(p.y);
        return inside(i, j);
    }
    // (x - x_i) . e_i
    double branch_coordinate(Vec2 p, int i) const {
        return dot(p - branches[i].anchor, branches[i].direction);
    }
    double branch_transverse(Vec2 p, int i) const {
        return dot(p - branches[i].anchor, perp(branches[i].direction));
    }
    bool in_strip(Vec2 p, int b, bool truncated = true) const {
        const double s = branch_coordinate(p, b);
        if (s <= 0.0) return false;
        if (truncated && s > branches[b].length) return false;
        return std::abs(branch_transverse(p, b)) <= 0.5 * branches[b].width;
    }
    bool in_ball(Vec2 p) const { return norm(p - center) <= L; }

    std::vector<int> cells_of_branch(int b) const;
    void export_pgm(const std::string& path) const;
};

BranchedDomain build_domain(const std::vector<BranchSpec>& specs, double L,
                            double h, double blend = 0.0);

BranchedDomain scale_domain(const BranchedDomain& d, double R, Vec2 x0 = {});

bool is_star_shaped(const BranchedDomain& d, Vec2 center);

bool path_clearance(const BranchedDomain& d, const PathSpec& path, double R);

// Axis-tree polyline from deep in branch i through the junction center to
// deep in branch j.
PathSpec axis_path(const BranchedDomain& d, int i, int j, double depth);

// First-order fast marching for |grad T| = 1 inside the mask; returns the
// full arrival-time field (inf where unreached).
std::vector<double> fast_march(const BranchedDomain& d,
                               const std::vector<int>& sources);

double geodesic_distance(const BranchedDomain& d, const std::vector<int>& src,
                         const std::vector<int>& tgt);
double geodesic_distance(const BranchedDomain& d, Vec2 a, Vec2 b);

namespace detail {
// exact Euclidean distance transform, squared distances in cell units;
// seeds are cells with set[c] != 0
std::vector<double> edt_sq(const std::vector<uint8_t>& set, int nx, int ny);
}  // namespace detail

}  // namespace branchfront::geom
