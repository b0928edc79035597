#include "branchfront/geometry.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <queue>
#include <stdexcept>

namespace branchfront::geom {

namespace detail {

namespace {
// 1D squared-distance lower envelope (Felzenszwalb-Huttenlocher)
void edt_1d(const std::vector<double>& fin, std::vector<double>& out,
            std::vector<int>& v, std::vector<double>& z) {
    const int n = (int)fin.size();
    int k = 0;
    v[0] = 0;
    z[0] = -std::numeric_limits<double>::infinity();
    z[1] = std::numeric_limits<double>::infinity();
    for (int q = 1; q < n; ++q) {
        if (fin[q] == std::numeric_limits<double>::infinity()) continue;
        if (fin[v[0]] == std::numeric_limits<double>::infinity()) {
            v[0] = q;
            continue;
        }
        double s;
        while (true) {
            const int p = v[k];
            s = ((fin[q] + q * q) - (fin[p] + p * p)) / (2.0 * q - 2.0 * p);
            if (s <= z[k]) { --k; } else break;
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = std::numeric_limits<double>::infinity();
    }
    if (fin[v[0]] == std::numeric_limits<double>::infinity()) {
        std::fill(out.begin(), out.end(), std::numeric_limits<double>::infinity());
        return;
    }
    int j = 0;
    for (int q = 0; q < n; ++q) {
        while (z[j + 1] < q) ++j;
        const double d = q - v[j];
        out[q] = d * d + fin[v[j]];
    }
}
}  // namespace

std::vector<double> edt_sq(const std::vector<uint8_t>& set, int nx, int ny) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> d((size_t)nx * ny);
    for (size_t c = 0; c < d.size(); ++c) d[c] = set[c] ? 0.0 : inf;
    {
        std::vector<double> fin(nx), out(nx), z(nx + 1);
        std::vector<int> v(nx);
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) fin[i] = d[(size_t)j * nx + i];
            edt_1d(fin, out, v, z);
            for (int i = 0; i < nx; ++i) d[(size_t)j * nx + i] = out[i];
        }
    }
    {
        std::vector<double> fin(ny), out(ny), z(ny + 1);
        std::vector<int> v(ny);
        for (int i = 0; i < nx; ++i) {
            for (int j = 0; j < ny; ++j) fin[j] = d[(size_t)j * nx + i];
            edt_1d(fin, out, v, z);
            for (int j = 0; j < ny; ++j) d[(size_t)j * nx + i] = out[j];
        }
    }
    return d;
}

}  // namespace detail

std::vector<int> BranchedDomain::cells_of_branch(int b) const {
    std::vector<int> out;
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            const size_t c = grid.idx(i, j);
            if (mask[c] && branch_of[c] == b) out.push_back((int)c);
        }
    return out;
}

void BranchedDomain::export_pgm(const std::string& path) const {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw std::runtime_error("cannot open " + path);
    std::fprintf(fp, "P5\n%d %d\n255\n", grid.nx, grid.ny);
    std::vector<uint8_t> row(grid.nx);
    for (int j = grid.ny - 1; j >= 0; --j) {
        for (int i = 0; i < grid.nx; ++i) {
            const size_t c = grid.idx(i, j);
            row[i] = mask[c] ? (cell_kind[c] == kBoundary ? 170 : 255) : 0;
        }
        std::fwrite(row.data(), 1, row.size(), fp);
    }
    std::fclose(fp);
}

namespace {
BranchedDomain build_domain_at(const std::vector<BranchSpec>& specs, double L,
                               double h, double blend, Vec2 center);
}

BranchedDomain build_domain(const std::vector<BranchSpec>& specs, double L,
                            double h, double blend) {
    return build_domain_at(specs, L, h, blend, {0.0, 0.0});
}

namespace {
BranchedDomain build_domain_at(const std::vector<BranchSpec>& specs, double L,
                               double h, double blend, Vec2 center) {
    if (specs.size() < 2) throw std::invalid_argument("build_domain: need m >= 2 branches");
    if (!(L > 0.0 && h > 0.0)) throw std::invalid_argument("build_domain: bad L or h");
    BranchedDomain d;
    d.branches = specs;
    d.L = L;
    d.blend = blend;
    d.center = center;

    for (auto& b : d.branches) {
        const double n2 = norm(b.direction);
        if (std::abs(n2 - 1.0) > 1e-12)
            throw std::invalid_argument("build_domain: branch direction must be unit");
        if (!(b.width > 0.0)) throw std::invalid_argument("build_domain: width must be > 0");
        if (!(b.length > L)) throw std::invalid_argument("build_domain: length must exceed L");
        const Vec2 m1 = b.anchor + 0.5 * b.width * perp(b.direction);
        const Vec2 m2 = b.anchor - 0.5 * b.width * perp(b.direction);
        if (norm(m1 - d.center) > L + 1e-9 || norm(m2 - d.center) > L + 1e-9)
            throw std::invalid_argument("build_domain: branch mouth outside junction ball");
    }

    // bounding box with a one-cell outside ring
    double xmin = center.x - L, xmax = center.x + L;
    double ymin = center.y - L, ymax = center.y + L;
    for (auto& b : d.branches) {
        for (double s : {0.0, b.length})
            for (double t : {-0.5 * b.width, 0.5 * b.width}) {
                const Vec2 p = b.anchor + s * b.direction + t * perp(b.direction);
                xmin = std::min(xmin, p.x); xmax = std::max(xmax, p.x);
                ymin = std::min(ymin, p.y); ymax = std::max(ymax, p.y);
            }
    }
    const double pad = 2.0 * h + blend;
    xmin -= pad; ymin -= pad; xmax += pad; ymax += pad;
    d.grid.h = h;
    d.grid.x0 = xmin;
    d.grid.y0 = ymin;
    d.grid.nx = (int)std::ceil((xmax - xmin) / h) + 1;
    d.grid.ny = (int)std::ceil((ymax - ymin) / h) + 1;

    const size_t N = (size_t)d.grid.nx * d.grid.ny;
    d.mask.assign(N, 0);
    d.branch_of.assign(N, -1);

    for (int j = 0; j < d.grid.ny; ++j)
        for (int i = 0; i < d.grid.nx; ++i) {
            const Vec2 p = d.grid.center(i, j);
            const size_t c = d.grid.idx(i, j);
            int hits = 0;
            int8_t bi = -1;
            for (int b = 0; b < (int)d.branches.size(); ++b)
                if (d.in_strip(p, b, /*truncated=*/false)) {
                    ++hits;
                    if (d.in_strip(p, b, true)) bi = (int8_t)b;
                }
            if (hits >= 2) throw std::runtime_error("branches not disjoint");
            const bool in0 = (bi >= 0) || d.in_ball(p);
            d.mask[c] = in0 ? 1 : 0;
            d.branch_of[c] = bi;
        }

    if (blend > 0.0) {
        // morphological closing, applied only inside the junction ball so the
        // decomposition of Omega \ B(0,L) into branch pieces stays exact
        auto dsq = detail::edt_sq(d.mask, d.grid.nx, d.grid.ny);
        const double r = blend / h;
        std::vector<uint8_t> dil(N);
        for (size_t c = 0; c < N; ++c) dil[c] = dsq[c] <= r * r ? 1 : 0;
        std::vector<uint8_t> codil(N);
        for (size_t c = 0; c < N; ++c) codil[c] = dil[c] ? 0 : 1;
        auto dsq2 = detail::edt_sq(codil, d.grid.nx, d.grid.ny);
        for (int j = 0; j < d.grid.ny; ++j)
            for (int i = 0; i < d.grid.nx; ++i) {
                const size_t c = d.grid.idx(i, j);
                if (!d.mask[c] && dsq2[c] >= r * r && d.in_ball(d.grid.center(i, j)))
                    d.mask[c] = 1;
            }
    }

    // no mask cell on the box border (stencils assume an outside ring)
    for (int i = 0; i < d.grid.nx; ++i) {
        d.mask[d.grid.idx(i, 0)] = 0;
        d.mask[d.grid.idx(i, d.grid.ny - 1)] = 0;
    }
    for (int j = 0; j < d.grid.ny; ++j) {
        d.mask[d.grid.idx(0, j)] = 0;
        d.mask[d.grid.idx(d.grid.nx - 1, j)] = 0;
    }

    d.cell_kind.assign(N, kOutside);
    d.nnbr.assign(N, 0);
    d.inside_count = 0;
    for (int j = 0; j < d.grid.ny; ++j)
        for (int i = 0; i < d.grid.nx; ++i) {
            const size_t c = d.grid.idx(i, j);
            if (!d.mask[c]) continue;
            ++d.inside_count;
            uint8_t k = 0;
            k += d.inside(i - 1, j); k += d.inside(i + 1, j);
            k += d.inside(i, j - 1); k += d.inside(i, j + 1);
            d.nnbr[c] = k;
            d.cell_kind[c] = (k == 4) ? kInterior : kBoundary;
        }
    if (d.inside_count == 0) throw std::runtime_error("domain not connected");

    // connectivity of the whole mask
    {
        std::vector<uint8_t> seen(N, 0);
        std::vector<int> stack;
        for (size_t c = 0; c < N; ++c)
            if (d.mask[c]) { stack.push_back((int)c); seen[c] = 1; break; }
        size_t cnt = 0;
        while (!stack.empty()) {
            const int c = stack.back();
            stack.pop_back();
            ++cnt;
            const int i = c % d.grid.nx, j = c / d.grid.nx;
            const int nb[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
            for (auto& q : nb) {
                if (!d.grid.in_bounds(q[0], q[1])) continue;
                const size_t cc = d.grid.idx(q[0], q[1]);
                if (d.mask[cc] && !seen[cc]) { seen[cc] = 1; stack.push_back((int)cc); }
            }
        }
        if (cnt != d.inside_count) throw std::runtime_error("domain not connected");
    }

    // Omega \ B(0,L) must decompose into the branch strips, each piece connected
    for (int b = 0; b < (int)d.branches.size(); ++b) {
        std::vector<int> piece;
        for (int j = 0; j < d.grid.ny; ++j)
            for (int i = 0; i < d.grid.nx; ++i) {
                const size_t c = d.grid.idx(i, j);
                if (!d.mask[c]) continue;
                const Vec2 p = d.grid.center(i, j);
                if (d.in_ball(p)) continue;
                if (d.branch_of[c] == b) piece.push_back((int)c);
                else if (d.branch_of[c] == -1)
                    throw std::runtime_error("domain violates branch decomposition");
            }
        if (piece.empty()) continue;
        std::vector<uint8_t> inpiece(N, 0), seen(N, 0);
        for (int c : piece) inpiece[c] = 1;
        std::vector<int> stack{piece.front()};
        seen[piece.front()] = 1;
        size_t cnt = 0;
        while (!stack.empty()) {
            const int c = stack.back();
            stack.pop_back();
            ++cnt;
            const int i = c % d.grid.nx, j = c / d.grid.nx;
            const int nb[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
            for (auto& q : nb) {
                if (!d.grid.in_bounds(q[0], q[1])) continue;
                const size_t cc = d.grid.idx(q[0], q[1]);
                if (inpiece[cc] && !seen[cc]) { seen[cc] = 1; stack.push_back((int)cc); }
            }
        }
        if (cnt != piece.size())
            throw std::runtime_error("branch piece not connected");
    }
    return d;
}
}  // namespace

BranchedDomain scale_domain(const BranchedDomain& d, double R, Vec2 x0) {
    if (!(R > 0.0)) throw std::invalid_argument("scale_domain: R must be > 0");
    std::vector<BranchSpec> specs = d.branches;
    for (auto& b : specs) {
        b.anchor = R * b.anchor + x0;
        b.width *= R;
        b.length *= R;
    }
    return build_domain_at(specs, R * d.L, d.grid.h, R * d.blend,
                           R * d.center + x0);
}

bool is_star_shaped(const BranchedDomain& d, Vec2 center) {
    if (!d.contains_point(center))
        throw std::invalid_argument("is_star_shaped: center not inside domain");
    const double step = 0.5 * d.grid.h;
    // a sample point counts as inside if it is within one cell of some
    // mask-cell center; a strict floor-cell test would flag the half-cell
    // staircase notches of curved or slanted boundaries
    const double tol = 1.0 * d.grid.h;
    auto point_ok = [&](Vec2 p) {
        const int i = d.grid.cell_i(p.x), j = d.grid.cell_j(p.y);
        if (d.inside(i, j)) return true;
        for (int dj = -1; dj <= 1; ++dj)
            for (int di = -1; di <= 1; ++di) {
                if (!d.inside(i + di, j + dj)) continue;
                if (norm(d.grid.center(i + di, j + dj) - p) <= tol) return true;
            }
        return false;
    };
    for (int j = 0; j < d.grid.ny; ++j)
        for (int i = 0; i < d.grid.nx; ++i) {
            const size_t c = d.grid.idx(i, j);
            if (d.cell_kind[c] != kBoundary) continue;
            const Vec2 q = d.grid.center(i, j);
            const double len = norm(q - center);
            const int n = std::max(1, (int)std::ceil(len / step));
            for (int k = 0; k <= n; ++k) {
                const Vec2 p = center + ((double)k / n) * (q - center);
                if (!point_ok(p)) return false;
            }
        }
    return true;
}

bool path_clearance(const BranchedDomain& d, const PathSpec& path, double R) {
    if (path.waypoints.size() < 2)
        throw std::invalid_argument("path_clearance: need at least 2 waypoints");
    const double step = 0.5 * d.grid.h;
    const int ri = (int)std::ceil(R / d.grid.h) + 1;
    auto disc_ok = [&](Vec2 q) {
        const int ci = d.grid.cell_i(q.x), cj = d.grid.cell_j(q.y);
        for (int j = cj - ri; j <= cj + ri; ++j)
            for (int i = ci - ri; i <= ci + ri; ++i) {
                if (!d.grid.in_bounds(i, j)) return false;
                const Vec2 p = d.grid.center(i, j);
                if (norm(p - q) <= R && !d.mask[d.grid.idx(i, j)]) return false;
            }
        return true;
    };
    for (size_t k = 0; k + 1 < path.waypoints.size(); ++k) {
        const Vec2 a = path.waypoints[k], b = path.waypoints[k + 1];
        const double len = norm(b - a);
        const int n = std::max(1, (int)std::ceil(len / step));
        for (int s = 0; s <= n; ++s)
            if (!disc_ok(a + ((double)s / n) * (b - a))) return false;
    }
    return true;
}

PathSpec axis_path(const BranchedDomain& d, int i, int j, double depth) {
    PathSpec p;
    const auto& bi = d.branches[i];
    const auto& bj = d.branches[j];
    p.waypoints.push_back(bi.anchor + std::min(depth, bi.length - d.grid.h) * bi.direction);
    p.waypoints.push_back(d.center);
    p.waypoints.push_back(bj.anchor + std::min(depth, bj.length - d.grid.h) * bj.direction);
    return p;
}

std::vector<double> fast_march(const BranchedDomain& d,
                               const std::vector<int>& sources) {
    const double inf = std::numeric_limits<double>::infinity();
    const size_t N = d.mask.size();
    std::vector<double> T(N, inf);
    std::vector<uint8_t> done(N, 0);
    using QE = std::pair<double, int>;
    std::priority_queue<QE, std::vector<QE>, std::greater<QE>> heap;
    for (int c : sources) {
        if (!d.mask[c]) throw std::invalid_argument("fast_march: source outside mask");
        T[c] = 0.0;
        heap.push({0.0, c});
    }
    const double h = d.grid.h;
    auto update = [&](int i, int j) {
        const size_t c = d.grid.idx(i, j);
        auto val = [&](int ii, int jj) {
            if (!d.grid.in_bounds(ii, jj)) return inf;
            const size_t cc = d.grid.idx(ii, jj);
            return done[cc] ? T[cc] : inf;
        };
        const double a = std::min(val(i - 1, j), val(i + 1, j));
        const double b = std::min(val(i, j - 1), val(i, j + 1));
        double t;
        if (a == inf && b == inf) return;
        if (a == inf) t = b + h;
        else if (b == inf) t = a + h;
        else if (std::abs(a - b) >= h) t = std::min(a, b) + h;
        else t = 0.5 * (a + b + std::sqrt(2.0 * h * h - (a - b) * (a - b)));
        if (t < T[c]) {
            T[c] = t;
            heap.push({t, (int)c});
        }
    };
    while (!heap.empty()) {
        auto [t, c] = heap.top();
        heap.pop();
        if (done[c] || t > T[c]) continue;
        done[c] = 1;
        const int i = c % d.grid.nx, j = c / d.grid.nx;
        const int nb[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
        for (auto& q : nb)
            if (d.inside(q[0], q[1]) && !done[d.grid.idx(q[0], q[1])])
                update(q[0], q[1]);
    }
    return T;
}

double geodesic_distance(const BranchedDomain& d, const std::vector<int>& src,
                         const std::vector<int>& tgt) {
    if (src.empty() || tgt.empty())
        throw std::invalid_argument("geodesic_distance: empty set");
    auto T = fast_march(d, src);
    double best = std::numeric_limits<double>::infinity();
    for (int c : tgt) best = std::min(best, T[c]);
    if (!std::isfinite(best)) throw std::runtime_error("sets not connected in Omega");
    return best;
}

double geodesic_distance(const BranchedDomain& d, Vec2 a, Vec2 b) {
    auto snap = [&](Vec2 p) {
        const int i = d.grid.cell_i(p.x), j = d.grid.cell_j(p.y);
        if (!d.inside(i, j))
            throw std::invalid_argument("geodesic_distance: point outside mask");
        return (int)d.grid.idx(i, j);
    };
    return geodesic_distance(d, std::vector<int>{snap(a)}, std::vector<int>{snap(b)});
}

}  // namespace branchfront::geom
