#include "branchfront/wave1d.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace branchfront::wave {

double lambda_of(double lam, double c) { return lam * lam + c * lam; }

double lambda_root(double c, double df1) {
    return 0.5 * (-c + std::sqrt(c * c - 4.0 * df1));
}

namespace {

// Integrates dp/dphi = c - f(phi)/p from phi = 1 - exp(s0) down to phi = theta,
// parameterized by s = log(1 - phi) so the departure along the unstable
// direction p ~ Lambda (1 - phi) is resolved uniformly. Returns p(theta),
// or -1 if the trajectory dies (p <= 0) before reaching theta.
double shoot_p_at_theta(const nl::CombustionNonlinearity& f, double c) {
    const double df1 = nl::eval_df(f, 1.0);
    if (df1 >= 0.0) return -1.0;
    const double s0 = std::log(1e-10);
    const double s1 = std::log(1.0 - f.theta);
    const int n = 6000;
    const double hs = (s1 - s0) / n;
    double p = lambda_root(c, df1) * 1e-10;
    // s = log(1 - phi), so dphi/ds = -e^s and dp/ds = (f/p - c) e^s
    auto rhs = [&](double s, double pv) {
        const double em = std::exp(s);
        return (nl::eval_f(f, 1.0 - em) / pv - c) * em;
    };
    for (int k = 0; k < n; ++k) {
        const double s = s0 + k * hs;
        if (p <= 1e-300) return -1.0;
        const double k1 = rhs(s, p);
        const double p2 = p + 0.5 * hs * k1;
        if (p2 <= 0.0) return -1.0;
        const double k2 = rhs(s + 0.5 * hs, p2);
        const double p3 = p + 0.5 * hs * k2;
        if (p3 <= 0.0) return -1.0;
        const double k3 = rhs(s + 0.5 * hs, p3);
        const double p4 = p + hs * k3;
        if (p4 <= 0.0) return -1.0;
        const double k4 = rhs(s + hs, p4);
        p += hs / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (p <= 0.0) return -1.0;
    }
    return p;
}

double mismatch(const nl::CombustionNonlinearity& f, double c) {
    const double p = shoot_p_at_theta(f, c);
    if (p < 0.0) return -c * f.theta - 1.0;
    return p - c * f.theta;
}

}  // namespace

double shoot_speed(const nl::CombustionNonlinearity& f, double tol) {
    f.validate();
    if (!(tol > 0.0)) throw std::invalid_argument("shoot_speed: tol must be > 0");
    double lo = 1e-4, hi = 10.0;
    double glo = mismatch(f, lo), ghi = mismatch(f, hi);
    if (!(glo > 0.0) || !(ghi < 0.0))
        throw std::runtime_error("no admissible speed");
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        const double g = mismatch(f, mid);
        if (std::abs(g) < tol || hi - lo < 1e-14) return mid;
        (g > 0.0 ? lo : hi) = mid;
    }
    return mid;
}

namespace {

struct PhaseTable {
    std::vector<double> xi, phi, p;  // increasing xi; p = -phi'
};

// (xi, p) as functions of s = log(1 - phi). Marching away from phi = 1 is the
// stable direction (departures from the connecting orbit decay), so start on
// the linearized orbit at 1 - phi = 1e-13 and integrate down to the matching
// point phi = theta, then re-anchor xi there.
PhaseTable integrate_left(const nl::CombustionNonlinearity& f, double c) {
    const double s_end = std::log(1.0 - f.theta);
    const double s_cut = std::log(1e-13);
    const int n = 60000;
    const double hs = (s_end - s_cut) / n;
    PhaseTable t;
    t.xi.resize(n + 1);
    t.phi.resize(n + 1);
    t.p.resize(n + 1);
    double p = lambda_root(c, nl::eval_df(f, 1.0)) * std::exp(s_cut);
    double xi = 0.0;
    t.xi[0] = xi; t.phi[0] = 1.0 - std::exp(s_cut); t.p[0] = p;
    auto rhs = [&](double s, double pv, double& dxi, double& dp) {
        const double em = std::exp(s);
        dp = (nl::eval_f(f, 1.0 - em) / pv - c) * em;
        dxi = em / pv;
    };
    for (int k = 0; k < n; ++k) {
        const double s = s_cut + k * hs;
        double d1x, d1p, d2x, d2p, d3x, d3p, d4x, d4p;
        rhs(s, p, d1x, d1p);
        rhs(s + 0.5 * hs, p + 0.5 * hs * d1p, d2x, d2p);
        rhs(s + 0.5 * hs, p + 0.5 * hs * d2p, d3x, d3p);
        rhs(s + hs, p + hs * d3p, d4x, d4p);
        xi += hs / 6.0 * (d1x + 2.0 * d2x + 2.0 * d3x + d4x);
        p += hs / 6.0 * (d1p + 2.0 * d2p + 2.0 * d3p + d4p);
        t.xi[k + 1] = xi;
        t.phi[k + 1] = 1.0 - std::exp(s + hs);
        t.p[k + 1] = p;
    }
    const double shift = t.xi.back();
    for (double& x : t.xi) x -= shift;  // matching point at xi = 0
    return t;
}

double hermite(double x, double x0, double x1, double f0, double f1, double d0,
               double d1) {
    const double w = x1 - x0, u = (x - x0) / w;
    const double u2 = u * u, u3 = u2 * u;
    return f0 * (2 * u3 - 3 * u2 + 1) + d0 * w * (u3 - 2 * u2 + u) +
           f1 * (-2 * u3 + 3 * u2) + d1 * w * (u3 - u2);
}

}  // namespace

double WaveProfile::eval(double xi) const {
    if (xi >= xi_match) return A_right * std::exp(-c_f * xi);
    if (xi <= xi_left) return 1.0 - B_left * std::exp(Lambda * xi);
    const double t = (xi - xi_min) / dx;
    int i = (int)t;
    i = std::clamp(i, 0, (int)phi.size() - 2);
    const double x0 = xi_min + i * dx;
    return hermite(xi, x0, x0 + dx, phi[i], phi[i + 1], dphi[i], dphi[i + 1]);
}

double WaveProfile::eval_dphi(double xi) const {
    if (xi >= xi_match) return -c_f * A_right * std::exp(-c_f * xi);
    if (xi <= xi_left) return -Lambda * B_left * std::exp(Lambda * xi);
    const double t = (xi - xi_min) / dx;
    int i = (int)t;
    i = std::clamp(i, 0, (int)dphi.size() - 2);
    const double x0 = xi_min + i * dx;
    return hermite(xi, x0, x0 + dx, dphi[i], dphi[i + 1],
                   // slopes of phi' from the ODE: phi'' = -c phi' - f(phi)
                   -c_f * dphi[i] - nl::eval_f(f, phi[i]),
                   -c_f * dphi[i + 1] - nl::eval_f(f, phi[i + 1]));
}

double WaveProfile::eval_ddphi(double xi) const {
    // deep left tail: phi saturates at 1 in doubles and the reaction term of
    // the ODE identity is lost; use the linearized form instead
    if (xi <= xi_left) return -Lambda * Lambda * B_left * std::exp(Lambda * xi);
    return -c_f * eval_dphi(xi) - nl::eval_f(f, eval(xi));
}

double WaveProfile::eval_pow(double xi, double beta) const {
    const double v = eval(xi);
    if (v <= 0.0) return 0.0;
    return std::pow(v, beta);
}

double WaveProfile::xi_where_phi_below(double v) const {
    if (v >= f.theta) {
        double lo = xi_min, hi = xi_match;
        if (eval(lo) <= v) return lo;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (eval(mid) <= v ? hi : lo) = mid;
        }
        return hi;
    }
    return std::log(A_right / v) / c_f;
}

double WaveProfile::xi_where_one_minus_phi_below(double v) const {
    // left tail: 1 - phi = B e^{Lambda xi}
    const double xi = std::log(v / B_left) / Lambda;
    if (xi <= xi_left) return xi;
    double lo = xi_left, hi = xi_match;
    if (1.0 - eval(hi) <= v) return hi;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (1.0 - eval(mid) <= v ? lo : hi) = mid;
    }
    return lo;
}

WaveProfile profile_from_speed(const nl::CombustionNonlinearity& f, double c_f,
                               double xi_span, double h, double tol_resid) {
    if (!(h > 0.0 && xi_span > 10.0))
        throw std::invalid_argument("profile_from_speed: bad grid parameters");
    WaveProfile w;
    w.f = f;
    w.c_f = c_f;
    w.Lambda = lambda_root(c_f, nl::eval_df(f, 1.0));

    PhaseTable tab = integrate_left(f, c_f);

    // anchor: phi = 1/2 at xi = 0 (bisected on the Hermite interpolant that
    // the resampling below uses; for theta > 1/2 the level sits on the
    // reaction-free tail where phi = theta e^{-c xi} exactly)
    double xi_half = 0.0;
    if (f.theta >= 0.5) {
        xi_half = std::log(f.theta / 0.5) / c_f;
    } else {
        size_t k = 0;
        while (k + 1 < tab.phi.size() && tab.phi[k + 1] > 0.5) ++k;
        double lo = tab.xi[k], hi = tab.xi[k + 1];
        for (int it = 0; it < 100; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double val = hermite(mid, tab.xi[k], tab.xi[k + 1], tab.phi[k],
                                       tab.phi[k + 1], -tab.p[k], -tab.p[k + 1]);
            (val > 0.5 ? lo : hi) = mid;
        }
        xi_half = 0.5 * (lo + hi);
    }
    for (double& x : tab.xi) x -= xi_half;

    w.xi_match = -xi_half;  // matching point phi = theta
    w.A_right = f.theta * std::exp(c_f * w.xi_match);
    w.xi_left = tab.xi.front();
    w.B_left = (1.0 - tab.phi.front()) * std::exp(-w.Lambda * w.xi_left);

    // resample onto the uniform grid
    const int n = (int)std::round(2.0 * xi_span / h);
    w.xi_min = -xi_span;
    w.xi_max = -xi_span + n * h;
    w.dx = h;
    w.phi.resize(n + 1);
    w.dphi.resize(n + 1);
    size_t k = 0;
    for (int i = 0; i <= n; ++i) {
        const double xi = w.xi_min + i * h;
        if (xi >= w.xi_match) {
            w.phi[i] = w.A_right * std::exp(-c_f * xi);
            w.dphi[i] = -c_f * w.phi[i];
        } else if (xi <= w.xi_left) {
            const double e = w.B_left * std::exp(w.Lambda * xi);
            w.phi[i] = 1.0 - e;
            w.dphi[i] = -w.Lambda * e;
        } else {
            while (k + 1 < tab.xi.size() && tab.xi[k + 1] < xi) ++k;
            w.phi[i] = hermite(xi, tab.xi[k], tab.xi[k + 1], tab.phi[k],
                               tab.phi[k + 1], -tab.p[k], -tab.p[k + 1]);
            w.dphi[i] = -hermite(xi, tab.xi[k], tab.xi[k + 1], tab.p[k],
                                 tab.p[k + 1],
                                 (c_f * tab.p[k] - nl::eval_f(f, tab.phi[k])),
                                 (c_f * tab.p[k + 1] - nl::eval_f(f, tab.phi[k + 1])));
        }
    }

    // residual check against the sampled ODE; tolerance scales with the
    // stencil truncation error h^2 * max|phi''''|
    double phi4max = 0.0;
    for (int i = 2; i + 2 <= n; i += 5) {
        const double d4 = (w.phi[i - 2] - 4 * w.phi[i - 1] + 6 * w.phi[i] -
                           4 * w.phi[i + 1] + w.phi[i + 2]) /
                          (h * h * h * h);
        phi4max = std::max(phi4max, std::abs(d4));
    }
    const double tol_eff = std::max(tol_resid, h * h * phi4max);
    double rmax = 0.0;
    for (int i = 1; i < n; ++i) {
        const double lap = (w.phi[i + 1] - 2 * w.phi[i] + w.phi[i - 1]) / (h * h);
        const double adv = c_f * (w.phi[i + 1] - w.phi[i - 1]) / (2 * h);
        rmax = std::max(rmax, std::abs(lap + adv + nl::eval_f(f, w.phi[i])));
    }
    if (rmax > tol_eff) throw std::runtime_error("profile not converged (residual)");

    // monotone and in (0,1); strictly so wherever the tail is resolvable in
    // double precision, up to rounding noise where it saturates
    for (int i = 0; i < n; ++i) {
        const bool resolvable = 1.0 - w.phi[i] > 1e-12 && w.phi[i] > 1e-290;
        if (resolvable && !(w.phi[i + 1] < w.phi[i]))
            throw std::runtime_error("profile not converged (monotonicity)");
        if (!resolvable && w.phi[i + 1] > w.phi[i] + 1e-12)
            throw std::runtime_error("profile not converged (monotonicity)");
    }
    if (std::abs(w.eval(0.0) - 0.5) > 1e-8)
        throw std::runtime_error("profile not converged (anchor)");

    // sup norms of phi'/phi and phi''/phi (right tail: c and c^2 exactly)
    w.sup_ratio1 = c_f;
    w.sup_ratio2 = c_f * c_f;
    for (int i = 0; i <= n; ++i) {
        const double r1 = std::abs(w.dphi[i] / w.phi[i]);
        const double r2 =
            std::abs((-c_f * w.dphi[i] - nl::eval_f(f, w.phi[i])) / w.phi[i]);
        w.sup_ratio1 = std::max(w.sup_ratio1, r1);
        w.sup_ratio2 = std::max(w.sup_ratio2, r2);
    }
    decay_rates(w);
    return w;
}

DecayRates decay_rates(WaveProfile& w) {
    if (w.xi_max < 40.0 || w.xi_min > -40.0)
        throw std::invalid_argument("decay_rates: profile span must be >= 40 per side");
    DecayRates r;
    const double h = w.dx;
    auto fit_slope = [&](double lo, double hi, bool left) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int n = 0;
        for (double xi = lo; xi <= hi + 1e-12; xi += h) {
            const double v = left ? 1.0 - w.eval(xi) : w.eval(xi);
            if (v < 1e-12) continue;
            const double y = std::log(v);
            sx += xi; sy += y; sxx += xi * xi; sxy += xi * y;
            ++n;
        }
        if (n < 10) throw std::runtime_error("tail not exponential");
        return (n * sxy - sx * sy) / (n * sxx - sx * sx);
    };
    // fit windows clipped to where the tails sit above float noise
    const double xi_lo = std::max(w.xi_min, w.xi_where_one_minus_phi_below(1e-10));
    const double xi_l_hi = std::min(-10.0 * w.dx, w.xi_where_one_minus_phi_below(1e-4));
    r.Lambda_minus = fit_slope(xi_lo, xi_l_hi, true);
    const double xi_hi = std::min(w.xi_max, w.xi_where_phi_below(1e-12));
    const double xi_r_lo = std::max(10.0 * w.dx, w.xi_where_phi_below(1e-2));
    r.right_rate = -fit_slope(xi_r_lo, xi_hi, false);

    if (std::abs(r.Lambda_minus - w.Lambda) > 0.02 * w.Lambda)
        throw std::runtime_error("tail not exponential");

    auto triple = [&](double xi, double& lo3, double& hi3) {
        const double a = 1.0 - w.eval(xi);
        const double b = std::abs(w.eval_dphi(xi));
        const double c = std::abs(w.eval_ddphi(xi));
        lo3 = std::min({a, b, c});
        hi3 = std::max({a, b, c});
    };
    r.K1 = 1e300; r.K2 = 0.0;
    for (double xi = xi_lo; xi < -h / 2; xi += h) {
        double lo3, hi3;
        triple(xi, lo3, hi3);
        const double e = std::exp(r.Lambda_minus * xi);
        r.K1 = std::min(r.K1, lo3 / e);
        r.K2 = std::max(r.K2, hi3 / e);
    }
    r.K3 = 1e300; r.K4 = 0.0;
    for (double xi = h; xi <= xi_hi; xi += h) {
        const double a = w.eval(xi);
        const double b = std::abs(w.eval_dphi(xi));
        const double c = std::abs(w.eval_ddphi(xi));
        const double e = std::exp(-w.c_f * xi);
        r.K3 = std::min(r.K3, std::min({a, b, c}) / e);
        r.K4 = std::max(r.K4, std::max({a, b, c}) / e);
    }
    w.Lambda_minus = r.Lambda_minus;
    w.K1 = r.K1; w.K2 = r.K2; w.K3 = r.K3; w.K4 = r.K4;
    return r;
}

void WaveProfile::export_csv(const std::string& path) const {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw std::runtime_error("cannot open " + path);
    std::fprintf(fp, "# c_f = %.12g\r\n# Lambda_minus = %.12g\r\n", c_f, Lambda_minus);
    std::fprintf(fp, "# K1 = %.6g, K2 = %.6g, K3 = %.6g, K4 = %.6g\r\n", K1, K2, K3, K4);
    std::fprintf(fp, "xi,phi,dphi\r\n");
    for (size_t i = 0; i < phi.size(); ++i)
        std::fprintf(fp, "%.10g,%.10g,%.10g\r\n", xi_min + i * dx, phi[i], dphi[i]);
    std::fclose(fp);
}

}  // namespace branchfront::wave
