// Test-side oracles, deliberately independent of the library's primary
// computation paths.
#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "branchfront/geometry.hpp"
#include "branchfront/nonlinearity.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace oracles {

using branchfront::geom::BranchedDomain;
using branchfront::geom::Vec2;
using branchfront::nl::CombustionNonlinearity;
using branchfront::nl::eval_f;

/** Long-time explicit 1D simulation of u_t = u_xx + f(u) on [0, x_max] with
 *  step initial data; returns the level-1/2 front speed measured by least
 *  squares over t in [t_lo, t_hi]. Far-field cells that have converged to an
 *  equilibrium beyond double precision are frozen to keep the run fast. */
inline double simulate_speed_1d(const CombustionNonlinearity& f, double x0,
                                double x_max = 400.0, double h = 0.01,
                                double t_lo = 200.0, double t_hi = 400.0) {
    const int n = (int)std::round(x_max / h) + 1;
    const double dt = 0.45 * h * h;
    const double r = dt / (h * h);
    std::vector<double> u(n, 0.0), w(n, 0.0);
    for (int i = 0; i < n; ++i) u[i] = (i * h <= x0) ? 1.0 : 0.0;

    const double theta = f.theta, amp = f.amplitude;
    const bool quad = f.exponent == 2.0;
    const double p = f.exponent;
    // step data stays inside [0,1], so the branchless form is exact here
    auto fu = [&](double v) {
        if (quad) {
            const double s = std::max(v - theta, 0.0);
            return amp * s * s * (1.0 - v);
        }
        if (v <= theta) return 0.0;
        return amp * std::pow(v - theta, p) * (1.0 - v);
    };

    std::vector<double> ts, xs;
    long k = 0;
    const long total = (long)std::ceil(t_hi / dt);
    const long rec = (long)std::round(1.0 / dt);
    const long rec_win = std::max(1L, rec / 2);
    // Freeze cells beyond these contours plus a wide margin. Behind the front
    // f'(1) < 0 damps the 1e-12 freeze error; ahead of it the sub-ignition
    // region is linear, so the max principle bounds the error by the
    // threshold, far below the 0.5% speed tolerance.
    const int margin = 1000;
    int lo = 0, hi = n - 1;
    auto refresh_window = [&] {
        lo = 0;
        while (lo + 1 < n && 1.0 - u[lo + 1] < 1e-12) ++lo;
        lo = std::max(0, lo - margin);
        hi = n - 1;
        while (hi - 1 > 0 && u[hi - 1] < 1e-8) --hi;
        hi = std::min(n - 1, hi + margin);
        for (int i = 0; i < lo; ++i) w[i] = u[i];
        for (int i = hi + 1; i < n; ++i) w[i] = u[i];
    };
    refresh_window();
    const double* pu = u.data();
    double* pw = w.data();
    while (k < total) {
        const int a = std::max(1, lo), b = std::min(n - 2, hi);
        if (quad) {
            for (int i = a; i <= b; ++i) {
                const double uc = pu[i];
                const double s = std::max(uc - theta, 0.0);
                pw[i] = uc + r * (pu[i - 1] - 2.0 * uc + pu[i + 1]) +
                        dt * (amp * s * s * (1.0 - uc));
            }
        } else {
            for (int i = a; i <= b; ++i)
                pw[i] = pu[i] + r * (pu[i - 1] - 2.0 * pu[i] + pu[i + 1]) +
                        dt * fu(pu[i]);
        }
        if (lo == 0) pw[0] = pu[0] + r * (pu[1] - pu[0]) + dt * fu(pu[0]);
        if (hi == n - 1)
            pw[n - 1] = pu[n - 1] + r * (pu[n - 2] - pu[n - 1]) + dt * fu(pu[n - 1]);
        u.swap(w);
        pu = u.data();
        pw = w.data();
        ++k;
        if (k % rec_win == 0) refresh_window();
        if (k % rec == 0) {
            const double t = k * dt;
            if (t >= t_lo) {
                int i = 0;
                while (i + 1 < n && u[i + 1] >= 0.5) ++i;
                const double x =
                    i * h + h * (u[i] - 0.5) / std::max(1e-300, u[i] - u[i + 1]);
                ts.push_back(t);
                xs.push_back(x);
            }
        }
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int m = (int)ts.size();
    for (int i = 0; i < m; ++i) {
        sx += ts[i]; sy += xs[i]; sxx += ts[i] * ts[i]; sxy += ts[i] * xs[i];
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

/** Geodesic distance by Dijkstra on a 16-neighbor grid graph, run at half the
 *  domain's grid spacing (independent of the fast-marching path). */
inline double dijkstra16_distance(const BranchedDomain& fine, Vec2 a, Vec2 b) {
    const auto& g = fine.grid;
    auto snap = [&](Vec2 p) {
        return (int)g.idx(g.cell_i(p.x), g.cell_j(p.y));
    };
    const int src = snap(a), dst = snap(b);
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(fine.mask.size(), inf);
    using QE = std::pair<double, int>;
    std::priority_queue<QE, std::vector<QE>, std::greater<QE>> heap;
    dist[src] = 0.0;
    heap.push({0.0, src});
    const int moves[16][2] = {{1, 0},  {-1, 0}, {0, 1},  {0, -1}, {1, 1},  {1, -1},
                              {-1, 1}, {-1, -1}, {1, 2},  {1, -2}, {-1, 2}, {-1, -2},
                              {2, 1},  {2, -1}, {-2, 1}, {-2, -1}};
    while (!heap.empty()) {
        auto [d, c] = heap.top();
        heap.pop();
        if (d > dist[c]) continue;
        if (c == dst) return d;
        const int i = c % g.nx, j = c / g.nx;
        for (auto& m : moves) {
            const int ii = i + m[0], jj = j + m[1];
            if (!fine.inside(ii, jj)) continue;
            // knight moves must not cut corners through outside cells
            if (std::abs(m[0]) + std::abs(m[1]) == 3) {
                if (!fine.inside(i + m[0] / (std::abs(m[0])), j) &&
                    !fine.inside(i, j + m[1] / (std::abs(m[1]))))
                    continue;
            }
            const size_t cc = g.idx(ii, jj);
            const double nd = d + g.h * std::sqrt((double)(m[0] * m[0] + m[1] * m[1]));
            if (nd < dist[cc]) {
                dist[cc] = nd;
                heap.push({nd, (int)cc});
            }
        }
    }
    return dist[dst];
}

/** Sub-cell contour points of the level set {u = level} by bilinear sampling
 *  at spacing h/2; returns sample points on the contour. */
inline std::vector<Vec2> contour_points(const BranchedDomain& d,
                                        const std::vector<double>& u, double level,
                                        double step) {
    std::vector<Vec2> pts;
    auto value = [&](double x, double y) -> double {
        // bilinear between cell centers; outside cells mirror the query cell
        const double gx = (x - d.grid.x0) / d.grid.h - 0.5;
        const double gy = (y - d.grid.y0) / d.grid.h - 0.5;
        const int i = (int)std::floor(gx), j = (int)std::floor(gy);
        const double fx = gx - i, fy = gy - j;
        auto at = [&](int ii, int jj) -> double {
            if (!d.inside(ii, jj)) return -1.0;
            return u[d.grid.idx(ii, jj)];
        };
        const double v00 = at(i, j), v10 = at(i + 1, j), v01 = at(i, j + 1),
                     v11 = at(i + 1, j + 1);
        if (v00 < 0 || v10 < 0 || v01 < 0 || v11 < 0) return -1.0;
        return v00 * (1 - fx) * (1 - fy) + v10 * fx * (1 - fy) +
               v01 * (1 - fx) * fy + v11 * fx * fy;
    };
    const double x1 = d.grid.x0 + d.grid.nx * d.grid.h;
    const double y1 = d.grid.y0 + d.grid.ny * d.grid.h;
    for (double y = d.grid.y0; y < y1; y += step)
        for (double x = d.grid.x0; x < x1; x += step) {
            const double v = value(x, y);
            if (v < 0) continue;
            const double vr = value(x + step, y), vu = value(x, y + step);
            if (vr >= 0 && (v - level) * (vr - level) < 0) {
                const double t = (v - level) / (v - vr);
                pts.push_back({x + t * step, y});
            }
            if (vu >= 0 && (v - level) * (vu - level) < 0) {
                const double t = (v - level) / (v - vu);
                pts.push_back({x, y + t * step});
            }
        }
    return pts;
}

inline double hausdorff(const std::vector<Vec2>& A, const std::vector<Vec2>& B) {
    using branchfront::geom::norm;
    double worst = 0.0;
    for (auto& a : A) {
        double best = 1e300;
        for (auto& b : B) best = std::min(best, norm(a - b));
        worst = std::max(worst, best);
    }
    for (auto& b : B) {
        double best = 1e300;
        for (auto& a : A) best = std::min(best, norm(b - a));
        worst = std::max(worst, best);
    }
    return worst;
}

}  // namespace oracles
