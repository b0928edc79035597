#include "branchfront/barriers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace branchfront::barriers {

using geom::Vec2;

namespace {
// The moving-frame formulas use the raw coordinate x . e_i of the paper's
// half-cylinders; branch anchors in these domains sit on the branch axis.
double raw_coord(const geom::BranchedDomain& d, Vec2 p, int b) {
    return geom::dot(p, d.branches[b].direction);
}
}  // namespace

// ---------------------------------------------------------------- cutoffs

double Zeta::ramp(double d) const {
    if (d >= d0) return 0.0;
    const double u = d0 - std::max(d, 0.0);
    return u * u * u * u / (4.0 * d0 * d0 * d0);
}
double Zeta::ramp_d(double d) const {
    if (d >= d0) return 0.0;
    const double u = d0 - std::max(d, 0.0);
    return -u * u * u / (d0 * d0 * d0);
}
double Zeta::ramp_dd(double d) const {
    if (d >= d0) return 0.0;
    const double u = d0 - std::max(d, 0.0);
    return 3.0 * u * u / (d0 * d0 * d0);
}

double Zeta::eval(const geom::BranchedDomain& d, Vec2 p) const {
    const double wall = 0.5 * d.branches[branch].width -
                        std::abs(d.branch_transverse(p, branch));
    return ramp(wall) + Chat;
}

double zeta_inequality_residual(const geom::BranchedDomain& d, const Zeta& z,
                                const nl::CombustionNonlinearity& f,
                                const wave::WaveProfile& prof, double beta) {
    const double coef =
        std::min(-nl::eval_df(f, 1.0) / 8.0,
                 -wave::lambda_of(-beta * prof.c_f, prof.c_f) / 8.0);
    const double h = d.grid.h, inv_h2 = 1.0 / (h * h);
    const int nx = d.grid.nx;
    auto zval = [&](int i, int j) { return z.eval(d, d.grid.center(i, j)); };
    double worst = -1e300;
    for (int j = 0; j < d.grid.ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const size_t c = d.grid.idx(i, j);
            if (!d.mask[c] || d.branch_of[c] != z.branch) continue;
            const double zc = zval(i, j);
            double lap = 0.0, gx = 0.0, gy = 0.0;
            const double zw = d.inside(i - 1, j) ? zval(i - 1, j) : zc;
            const double ze = d.inside(i + 1, j) ? zval(i + 1, j) : zc;
            const double zs = d.inside(i, j - 1) ? zval(i, j - 1) : zc;
            const double zn = d.inside(i, j + 1) ? zval(i, j + 1) : zc;
            lap = (zw + ze + zs + zn - 4.0 * zc) * inv_h2;
            gx = (ze - zw) / (2.0 * h);
            gy = (zn - zs) / (2.0 * h);
            const double lhs =
                lap + 2.0 * (1.0 + prof.sup_ratio1) * std::sqrt(gx * gx + gy * gy);
            worst = std::max(worst, lhs - coef * zc);
        }
    return worst;
}

Zeta build_zeta(const geom::BranchedDomain& d, int branch,
                const nl::CombustionNonlinearity& f,
                const wave::WaveProfile& prof, double beta) {
    Zeta z;
    z.branch = branch;
    z.d0 = 0.45 * d.branches[branch].width;
    z.Chat = 1.0;
    while (zeta_inequality_residual(d, z, f, prof, beta) > 0.0) {
        z.Chat *= 2.0;
        if (z.Chat > 1e6) throw std::runtime_error("cutoff construction failed");
    }
    // a generous extra factor flattens zeta/||zeta|| toward 1, which loosens
    // the eps bound that involves the ratio of the two norms
    z.Chat *= 4.0;
    return z;
}

// ------------------------------------------------- quintic transition pieces

namespace {
// smoothstep: 0 -> 1 on [0,1] with vanishing first/second derivatives at ends
double sstep(double t) { return t * t * t * (10.0 + t * (-15.0 + 6.0 * t)); }
double sstep_d(double t) { return t * t * (30.0 + t * (-60.0 + 30.0 * t)); }
double sstep_dd(double t) { return t * (60.0 + t * (-180.0 + 120.0 * t)); }
constexpr double kSstepMaxD = 1.875;        // max of sstep_d
const double kSstepMaxDD = 10.0 / std::sqrt(3.0);

// bridge psi: (0,0,0) at t=0 to (3,1,0) at t=1, nondecreasing
double bridge(double t) { return t * t * t * (26.0 + t * (-38.0 + 15.0 * t)); }
double bridge_d(double t) { return t * t * (78.0 + t * (-152.0 + 75.0 * t)); }
double bridge_dd(double t) { return t * (156.0 + t * (-456.0 + 300.0 * t)); }

double eta_curvature_ratio(double mu) {
    double worst = mu * mu;  // tail value
    for (int k = 0; k <= 400; ++k) {
        const double t = k / 400.0;
        const double ps = bridge_d(t), pss = bridge_dd(t);
        worst = std::max(worst, std::abs(mu * mu * ps * ps - mu * pss));
    }
    return worst;
}
}  // namespace

double SupersolutionSpec::eta(double s) const {
    const double v = s - dom->L;
    if (v <= 2.0) return 1.0;
    if (v >= 3.0) return std::exp(-mu * v);
    return std::exp(-mu * bridge(v - 2.0));
}

double SupersolutionSpec::eta_dd_over(double s) const {
    const double v = s - dom->L;
    if (v <= 2.0) return 0.0;
    if (v >= 3.0) return mu * mu;
    const double t = v - 2.0;
    const double ps = bridge_d(t), pss = bridge_dd(t);
    return mu * mu * ps * ps - mu * pss;
}

double SupersolutionSpec::pi(double s) const {
    const double v = s - dom->L - 1.0;
    if (v <= 0.0) return 0.0;
    if (v >= 1.0) return 1.0;
    return sstep(v);
}

// --------------------------------------------------------- barrier formulas

double SubsolutionSpec::eval(double t, Vec2 p) const {
    if (t > T) throw std::invalid_argument("subsolution: outside validity horizon");
    const auto& d = *dom;
    for (size_t k = 0; k < I.size(); ++k) {
        const int b = I[k];
        if (!d.in_strip(p, b)) continue;
        const double s = raw_coord(d, p, b);
        const double xi = xi_under(t, s);
        const double ph = prof->eval(xi);
        if (ph <= 0.0) return 0.0;
        const double val = ph - eps_tilde * std::exp(-mu * (s - d.L)) *
                                    zetas[k].eval(d, p) * std::pow(ph, beta);
        return std::max(val, 0.0);
    }
    return 0.0;
}

void SubsolutionSpec::eval_field(double t, std::vector<double>& out) const {
    const auto& d = *dom;
    out.assign(d.mask.size(), 0.0);
    const int ny = d.grid.ny, nx = d.grid.nx;
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const size_t c = d.grid.idx(i, j);
            if (!d.mask[c]) continue;
            const int b = d.branch_of[c];
            if (b < 0) continue;
            size_t k = 0;
            bool inI = false;
            for (; k < I.size(); ++k)
                if (I[k] == b) { inI = true; break; }
            if (!inI) continue;
            const Vec2 p = d.grid.center(i, j);
            const double s = raw_coord(d, p, b);
            const double xi = xi_under(t, s);
            const double ph = prof->eval(xi);
            if (ph <= 0.0) continue;
            const double val = ph - eps_tilde * std::exp(-mu * (s - d.L)) *
                                        zetas[k].eval(d, p) * std::pow(ph, beta);
            out[c] = std::max(val, 0.0);
        }
}

double SupersolutionSpec::eval(double t, Vec2 p) const {
    if (t > T_eps) throw std::invalid_argument("supersolution: outside validity horizon");
    const auto& d = *dom;
    const double u_junction = eps * prof->eval_pow(xi_of_t(t), beta);
    // u1 on the whole domain
    auto u1 = [&]() {
        for (int b : I) {
            if (!d.in_strip(p, b)) continue;
            const double s = raw_coord(d, p, b);
            if (s < d.L + 1.0) break;
            return pi(s) * prof->eval(xi_bar(t, s)) +
                   eps * eta(s) * prof->eval_pow(xi_of_t(t), beta);
        }
        return u_junction;
    };
    for (int b : J) {
        if (!d.in_strip(p, b)) continue;
        const double s = raw_coord(d, p, b);
        if (s < d.L) break;
        const double u2 =
            eps * std::exp(-mu * (s - d.L)) * prof->eval_pow(xi_hat(t, s), beta);
        if (s <= d.L + 1.0) return std::min(u1(), u2);
        return u2;
    }
    return u1();
}

void SupersolutionSpec::eval_field(double t, std::vector<double>& out) const {
    const auto& d = *dom;
    out.assign(d.mask.size(), 0.0);
    const int ny = d.grid.ny, nx = d.grid.nx;
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const size_t c = d.grid.idx(i, j);
            if (!d.mask[c]) continue;
            out[c] = eval(t, d.grid.center(i, j));
        }
}

double SupersolutionSpec::seam_jump(double t) const {
    const auto& d = *dom;
    double worst = 0.0;
    const double dlt = 1e-7;
    auto probe = [&](int b, double s) {
        for (double f : {-0.35, 0.0, 0.35}) {
            const double tr = f * d.branches[b].width;
            const Vec2 e = d.branches[b].direction;
            const Vec2 n = geom::perp(e);
            const Vec2 lo = (s - dlt) * e + tr * n;
            const Vec2 hi = (s + dlt) * e + tr * n;
            if (!d.contains_point(lo) || !d.contains_point(hi)) continue;
            worst = std::max(worst, std::abs(eval(t, lo) - eval(t, hi)));
        }
    };
    for (int b : J) { probe(b, d.L); probe(b, d.L + 1.0); }
    for (int b : I) { probe(b, d.L + 1.0); }
    return worst;
}

// ------------------------------------------------------ constant computation

namespace {
// smallest C >= 0 such that pred holds at every grid node >= C (the analytic
// tail beyond the grid is the caller's business)
double scan_right(const wave::WaveProfile& w,
                  const std::function<bool(double)>& pred) {
    const int n = (int)w.phi.size();
    double C = 0.0;
    for (int i = n - 1; i >= 0; --i) {
        const double xi = w.xi_min + i * w.dx;
        if (xi < 0.0) break;
        if (!pred(xi)) { C = xi + w.dx; break; }
    }
    return C;
}
double scan_left(const wave::WaveProfile& w,
                 const std::function<bool(double)>& pred) {
    const int n = (int)w.phi.size();
    double C = 0.0;
    for (int i = 0; i < n; ++i) {
        const double xi = w.xi_min + i * w.dx;
        if (xi > 0.0) break;
        if (!pred(xi)) { C = -(xi - w.dx); break; }
    }
    return C;
}
}  // namespace

SectionTwoBarriers build_section2(std::shared_ptr<const geom::BranchedDomain> dom,
                                  const std::vector<int>& I,
                                  const std::vector<int>& J,
                                  const nl::CombustionNonlinearity& f,
                                  const wave::WaveProfile& prof, double beta) {
    if (!(beta > 0.0 && beta < 1.0))
        throw std::invalid_argument("build_section2: beta must be in (0,1)");
    if (I.empty() || J.empty())
        throw std::invalid_argument("build_section2: I and J must be non-empty");
    SectionTwoBarriers out;
    auto& k = out.consts;
    const double c = prof.c_f, L = dom->L;
    k.beta = beta;
    k.df1 = nl::eval_df(f, 1.0);
    k.eps0 = nl::epsilon0(f);
    k.Lf = nl::lipschitz_bound(f, k.eps0);
    k.Lambda_beta = wave::lambda_of(-beta * c, c);

    std::vector<Zeta> zetas;
    for (int b : I) zetas.push_back(build_zeta(*dom, b, f, prof, beta));
    k.zbar0 = 0.0;
    k.Ctilde = 1e300;
    for (auto& z : zetas) {
        k.zbar0 = std::max(k.zbar0, z.sup());
        k.Ctilde = std::min(k.Ctilde, z.inf());
    }

    const double Lb = -k.Lambda_beta;  // |Lambda(-beta c_f)|
    k.eps = 0.5 * std::min({c, f.theta / 2.0, k.eps0 / 2.0, c * (-k.df1) / 8.0,
                            c * Lb / 8.0, Lb / 24.0, k.eps0 * k.zbar0 / k.Ctilde,
                            1.0});
    while (eta_curvature_ratio(k.eps / c) > Lb / 4.0) k.eps *= 0.8;
    k.mu = k.eps / c;
    k.eps_tilde = k.eps / k.zbar0;
    k.eps_prime = k.Ctilde * k.eps_tilde;
    k.sup_eta_ratio = eta_curvature_ratio(k.mu);
    k.K_pi = kSstepMaxDD + 2.0 * kSstepMaxD * prof.sup_ratio1;

    // case-split constants
    const double C2a =
        prof.xi_where_phi_below(std::pow(k.eps_prime, 1.0 / (1.0 - beta))) + 1e-6;
    const double C2e = prof.xi_where_phi_below(
        std::pow(k.eps * Lb / 4.0 / k.K_pi, 1.0 / (1.0 - beta))) + 1e-6;
    auto ratio_conditions = [&](double xi) {
        const double ph = prof.eval(xi);
        if (ph <= 0.0) return true;
        const double r = prof.eval_dphi(xi) / ph;
        const double r2 = prof.eval_ddphi(xi) / ph;
        if (!(r > -1.5 * c && r < -0.5 * c)) return false;
        if (!(r2 - r * r <= Lb / 4.0)) return false;
        if (!(c * beta * r + beta * beta * r * r <= 0.75 * k.Lambda_beta))
            return false;
        return true;
    };
    const double C2bcd = scan_right(prof, ratio_conditions);
    k.C2 = std::max({C2a, C2e, C2bcd});

    const double C1a = -prof.xi_where_one_minus_phi_below(k.eps_prime) + 1e-6;
    const double C1b = scan_left(prof, [&](double xi) {
        return prof.eval_ddphi(xi) / prof.eval(xi) <= -k.df1 / 8.0;
    });
    k.C1 = std::max({C1a, C1b, 0.0});

    k.kappa = 1e300;
    for (int s = 0; s <= 4000; ++s) {
        const double xi = -k.C1 + (k.C1 + k.C2) * s / 4000.0;
        k.kappa = std::min(k.kappa, -prof.eval_dphi(xi));
    }
    if (!(k.kappa > 0.0)) throw std::runtime_error("cutoff construction failed");

    const double Nsub = k.mu * k.mu - k.df1 / 8.0 + beta * prof.sup_ratio2 + k.Lf;
    k.rho_sub = std::exp(k.mu * (k.C2 + L)) * Nsub / k.kappa;
    k.T_sub = std::min(-(L + k.C2) / c,
                       std::log(std::min(1.0, Lb / (12.0 * c)) / k.rho_sub) / k.eps) *
              (1.0 + 1e-9);

    k.rho_sup = std::exp(k.mu * (k.C2 + L + 1.0)) * (-k.df1 / 8.0 + k.Lf) / k.kappa;
    k.T_sup = std::min(-(k.C2 + 2.0 * L + 4.0) / c,
                       std::log(1.0 / k.rho_sup) / k.eps) *
              (1.0 + 1e-9);

    out.sub.dom = dom;
    out.sub.prof = &prof;
    out.sub.f = f;
    out.sub.I = I;
    out.sub.zetas = zetas;
    out.sub.beta = beta;
    out.sub.eps = k.eps;
    out.sub.mu = k.mu;
    out.sub.rho = k.rho_sub;
    out.sub.T = k.T_sub;
    out.sub.eps_tilde = k.eps_tilde;

    out.sup.dom = dom;
    out.sup.prof = &prof;
    out.sup.f = f;
    out.sup.I = I;
    out.sup.J = J;
    out.sup.beta = beta;
    out.sup.eps = k.eps;
    out.sup.mu = k.mu;
    out.sup.rho = k.rho_sup;
    out.sup.T_eps = k.T_sup;
    return out;
}

SubsolutionSpec make_subsolution_seed(const SectionTwoBarriers& b, double rho,
                                      double T, double eps_rate) {
    SubsolutionSpec s = b.sub;
    s.rho = rho;
    s.T = T;
    if (eps_rate > 0.0) {
        s.eps = eps_rate;
        s.mu = eps_rate / s.prof->c_f;
    }
    return s;
}

std::vector<IneqCheck> SectionTwoConstants::recheck(
    const nl::CombustionNonlinearity& f, const wave::WaveProfile& prof) const {
    std::vector<IneqCheck> out;
    auto add = [&](const std::string& n, double lhs, double rhs) {
        out.push_back({n, lhs, rhs, lhs <= rhs});
    };
    const double c = prof.c_f;
    // (2.4): df band on the eps0 window, re-sampled
    double worst_lo = 0.0, worst_hi = 0.0;
    for (int k = 0; k <= 2000; ++k) {
        const double u = (1.0 - 2.0 * eps0) + 4.0 * eps0 * k / 2000.0;
        const double d = nl::eval_df(f, u);
        worst_lo = std::min(worst_lo, d - 1.5 * df1);
        worst_hi = std::max(worst_hi, d - 0.75 * df1);
    }
    const double band_slack = 1e-12 * std::max(1.0, -df1);
    add("df_band_lower", -worst_lo, band_slack);
    add("df_band_upper", worst_hi, band_slack);
    // eps bounds
    add("eps<c_f", eps, c);
    add("eps<theta/2", eps, f.theta / 2.0);
    add("eps<eps0/2", eps, eps0 / 2.0);
    add("eps<c|f'(1)|/8", eps, c * (-df1) / 8.0);
    add("eps<c|Lambda|/8", eps, c * (-Lambda_beta) / 8.0);
    add("eps<|Lambda|/24", eps, -Lambda_beta / 24.0);
    add("eps<eps0*zbar0/Ctilde", eps, eps0 * zbar0 / Ctilde);
    add("eps<1", eps, 1.0);
    // mu relation
    out.push_back({"mu==eps/c_f", mu, eps / c, std::abs(mu - eps / c) < 1e-15});
    // eta curvature bound
    add("sup|eta''/eta|<=|Lambda|/4", sup_eta_ratio, -Lambda_beta / 4.0);
    // pi cutoff condition at C2
    add("phi^(1-b)*K_pi<=eps|Lambda|/4 at C2",
        std::pow(prof.eval(C2), 1.0 - beta) * K_pi, eps * (-Lambda_beta) / 4.0);
    // rho/T chains (the e^{mu L} factor is checked by the builder; the grid
    // L is not known here, so compare against the L-free lower bound)
    const double Nsub = mu * mu - df1 / 8.0 + beta * prof.sup_ratio2 + Lf;
    add("e^{mu C2}*N_sub<=rho_sub*kappa", std::exp(mu * C2) * Nsub,
        rho_sub * kappa * (1.0 + 1e-12));
    add("rho_sub*e^{eps*T_sub}<=min(1,|Lambda|/12c)", rho_sub * std::exp(eps * T_sub),
        std::min(1.0, -Lambda_beta / (12.0 * c)));
    add("rho_sup*e^{eps*T_sup}<=1", rho_sup * std::exp(eps * T_sup), 1.0);
    // subsolution shift stays positive and bounded on the horizon
    add("rho_sub>0", 0.0, rho_sub);
    return out;
}

// --------------------------------------------------------------- the audit

ViolationReport verify_differential_inequality(
    const std::function<double(double, Vec2)>& w, int sign,
    const geom::BranchedDomain& d, const nl::CombustionNonlinearity& f,
    const std::vector<double>& times, double tol, const std::string& name,
    bool only_positive) {
    ViolationReport rep;
    rep.name = name;
    rep.tol = tol;
    const double dtp = 1e-5;
    const int nx = d.grid.nx, ny = d.grid.ny;
    const double inv_h2 = 1.0 / (d.grid.h * d.grid.h);
    std::vector<double> W0(d.mask.size()), Wp(d.mask.size()), Wm(d.mask.size());
    for (double t : times) {
        auto fill = [&](double tt, std::vector<double>& out) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
            for (int j = 0; j < ny; ++j)
                for (int i = 0; i < nx; ++i) {
                    const size_t c = d.grid.idx(i, j);
                    if (d.mask[c]) out[c] = w(tt, d.grid.center(i, j));
                }
        };
        fill(t, W0);
        fill(t + dtp, Wp);
        fill(t - dtp, Wm);
        ViolationRow worst;
        worst.t = t;
        worst.residual = -1e300;
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const size_t c = d.grid.idx(i, j);
                if (!d.mask[c]) continue;
                const double wc = W0[c];
                if (only_positive && wc <= 0.0) continue;
                double lap = -(double)d.nnbr[c] * wc;
                if (d.inside(i - 1, j)) lap += W0[c - 1];
                if (d.inside(i + 1, j)) lap += W0[c + 1];
                if (d.inside(i, j - 1)) lap += W0[c - nx];
                if (d.inside(i, j + 1)) lap += W0[c + nx];
                lap *= inv_h2;
                const double wt = (Wp[c] - Wm[c]) / (2.0 * dtp);
                const double L = wt - lap - nl::eval_f(f, wc);
                const double viol = sign * L;
                ++rep.cells_checked;
                if (viol > tol) ++rep.violations;
                if (viol > worst.residual) {
                    worst.residual = viol;
                    const Vec2 p = d.grid.center(i, j);
                    worst.x = p.x;
                    worst.y = p.y;
                }
            }
        worst.tol = tol;
        worst.pass = worst.residual <= tol;
        rep.rows.push_back(worst);
        rep.max_violation = std::max(rep.max_violation, worst.residual);
    }
    rep.pass = rep.violations == 0;
    return rep;
}

double calibrate_tol_disc(const geom::BranchedDomain& d,
                          const nl::CombustionNonlinearity& f,
                          const wave::WaveProfile& prof, int branch) {
    // exact traveling front slid along the branch axis; its residual under the
    // discrete operator is pure discretization error
    const double c = prof.c_f;
    const double len = d.branches[branch].length;
    double worst = 0.0;
    const double dtp = 1e-5;
    const double inv_h2 = 1.0 / (d.grid.h * d.grid.h);
    const int nx = d.grid.nx;
    for (double fr : {0.25, 0.45, 0.65, 0.85}) {
        const double x0 = fr * len;
        auto wv = [&](double t, Vec2 p) {
            return prof.eval(d.branch_coordinate(p, branch) - x0 - c * t);
        };
        for (int j = 0; j < d.grid.ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const size_t cidx = d.grid.idx(i, j);
                if (!d.mask[cidx] || d.branch_of[cidx] != branch) continue;
                const Vec2 p = d.grid.center(i, j);
                if (d.branch_coordinate(p, branch) < d.L + 1.0) continue;
                const double wc = wv(0.0, p);
                double lap = -(double)d.nnbr[cidx] * wc;
                if (d.inside(i - 1, j)) lap += wv(0.0, d.grid.center(i - 1, j));
                if (d.inside(i + 1, j)) lap += wv(0.0, d.grid.center(i + 1, j));
                if (d.inside(i, j - 1)) lap += wv(0.0, d.grid.center(i, j - 1));
                if (d.inside(i, j + 1)) lap += wv(0.0, d.grid.center(i, j + 1));
                lap *= inv_h2;
                const double wt = (wv(dtp, p) - wv(-dtp, p)) / (2.0 * dtp);
                worst = std::max(worst,
                                 std::abs(wt - lap - nl::eval_f(f, wc)));
            }
    }
    return 10.0 * worst;
}

// ----------------------------------------------------------- spreading part

double SpreadingConstants::h_eval(double r) const {
    r = std::abs(r);
    if (r >= H_eps) return r;
    if (r <= r0) return h_eps0;
    // h(r) = H - W*(1/2 - Q(t)), Q = integral of the smoothstep
    const double t = (r - r0) / W;
    const double Q = t * t * t * t * (2.5 + t * (-3.0 + t));
    return H_eps - W * (0.5 - Q);
}

SpreadingConstants compute_spreading_constants(const nl::CombustionNonlinearity& f,
                                               const wave::WaveProfile& prof,
                                               double beta, double eps, double L) {
    const double c = prof.c_f;
    if (!(eps > 0.0 && eps < c))
        throw std::invalid_argument("spreading: eps must be in (0, c_f)");
    SpreadingConstants sc;
    sc.beta = beta;
    sc.eps = eps;
    const double df1 = nl::eval_df(f, 1.0);
    const double eps0 = nl::epsilon0(f);
    const double Lf = nl::lipschitz_bound(f, eps0);
    const double Lb = -wave::lambda_of(-beta * c, c);
    sc.delta = 0.5 * std::min({c, 1.0 / 6.0, eps0 / 4.0, f.theta / 4.0, Lb / 12.0,
                               -df1 / 4.0, -df1 * c / 4.0, Lb * c / 4.0});

    const double Cr1 = prof.xi_where_phi_below(sc.delta);
    const double Cr2 = scan_right(prof, [&](double xi) {
        const double ph = prof.eval(xi);
        if (ph <= 0.0) return true;
        const double r = prof.eval_dphi(xi) / ph;
        return prof.eval_ddphi(xi) > 0.0 &&
               c * beta * r + beta * beta * r * r <= -0.75 * Lb;
    });
    const double Cl1 = -prof.xi_where_one_minus_phi_below(sc.delta);
    const double Cl2 = scan_left(prof, [&](double xi) { return prof.eval_ddphi(xi) < 0.0; });
    sc.C = std::max({Cr1, Cr2, Cl1, Cl2});

    sc.kappa = 1e300;
    for (int s = 0; s <= 4000; ++s) {
        const double xi = -sc.C + 2.0 * sc.C * s / 4000.0;
        sc.kappa = std::min(sc.kappa, -prof.eval_dphi(xi));
    }
    const double M2 = prof.sup_ratio2;
    sc.delta_eps = std::min({eps, eps * sc.kappa / (6.0 * Lf),
                             eps * sc.kappa / (3.0 * (Lf + M2)), sc.delta / 2.0});
    sc.C_eps = std::max(prof.xi_where_phi_below(sc.delta_eps),
                        -prof.xi_where_one_minus_phi_below(sc.delta_eps));
    sc.kappa_eps = 1e300;
    for (int s = 0; s <= 2000; ++s) {
        const double xi = sc.C + (sc.C_eps - sc.C) * s / 2000.0;
        sc.kappa_eps = std::min(sc.kappa_eps, -prof.eval_dphi(xi));
    }
    sc.alpha_eps = std::min({0.5, 2.0 * sc.kappa_eps / (3.0 * (-df1)),
                             eps * sc.kappa / (3.0 * (-df1))});
    sc.Ctilde_eps =
        -prof.xi_where_one_minus_phi_below(sc.alpha_eps * sc.delta_eps);

    sc.r0 = 0.5;
    sc.W = 2.0 * kSstepMaxD / (eps / 2.0);
    sc.H_eps = sc.r0 + sc.W;
    sc.h_eps0 = sc.r0 + 0.5 * sc.W;
    sc.R_eps = sc.H_eps + sc.h_eps0 + sc.C + sc.C_eps + sc.Ctilde_eps;
    sc.L_eps = L + sc.C_eps - sc.C;

    // ring variant: the cutoff of the all-branch barrier needs the tail small
    // against delta_eps
    const double Kh = kSstepMaxDD + 2.0 * kSstepMaxD * prof.sup_ratio1;
    sc.C_ring = std::max(sc.C, prof.xi_where_phi_below(sc.delta_eps * Lb / (4.0 * Kh)));
    sc.R_eps_ring = 2.0 * sc.C_ring + 2.0 * sc.C_eps + 1.0;
    return sc;
}

std::vector<IneqCheck> SpreadingConstants::recheck(
    const nl::CombustionNonlinearity& f, const wave::WaveProfile& prof,
    double L) const {
    std::vector<IneqCheck> out;
    auto add = [&](const std::string& n, double lhs, double rhs) {
        out.push_back({n, lhs, rhs, lhs <= rhs});
    };
    const double df1 = nl::eval_df(f, 1.0);
    const double Lf = nl::lipschitz_bound(f, nl::epsilon0(f));
    add("delta_eps<=eps", delta_eps, eps);
    add("delta_eps<=eps*kappa/6Lf", delta_eps, eps * kappa / (6.0 * Lf));
    add("delta_eps<=eps*kappa/3(Lf+M2)", delta_eps,
        eps * kappa / (3.0 * (Lf + prof.sup_ratio2)));
    add("delta_eps<=delta/2", delta_eps, delta / 2.0);
    add("alpha_eps<=1/2", alpha_eps, 0.5);
    add("alpha_eps<=2kappa_eps/3|f'(1)|", alpha_eps,
        2.0 * kappa_eps / (3.0 * (-df1)));
    add("alpha_eps<=eps*kappa/3|f'(1)|", alpha_eps, eps * kappa / (3.0 * (-df1)));
    add("L_eps>=L", L, L_eps);
    add("phi(C)<=delta", prof.eval(C), delta + 1e-14);
    add("1-phi(-C)<=delta", 1.0 - prof.eval(-C), delta + 1e-14);
    add("phi(C_eps)<=delta_eps", prof.eval(C_eps), delta_eps * (1.0 + 1e-9) + 1e-300);
    return out;
}

namespace {
SpreadReport run_spreading(std::shared_ptr<const geom::BranchedDomain> dom,
                           const nl::CombustionNonlinearity& f, pde::Field u0,
                           double t_run, double tol,
                           const std::function<double(double, int, double)>& bound,
                           // bound(t, cell, s_or_nan) -> required lower bound
                           // (sign > 0) or -(upper bound) with flipped field
                           const std::string& name) {
    SpreadReport rep;
    rep.name = name;
    rep.tol = tol;
    pde::StepperConfig cfg = pde::make_stepper_config(*dom, f);
    pde::Stepper stepper(dom, f, cfg);
    auto obs = [&](const pde::Field& u) {
        double worst = 1e300;
        double wx = 0, wy = 0;
        const auto& d = *dom;
        for (int j = 0; j < d.grid.ny; ++j)
            for (int i = 0; i < d.grid.nx; ++i) {
                const size_t c = d.grid.idx(i, j);
                if (!d.mask[c]) continue;
                const double b = bound(u.time, (int)c, 0.0);
                if (b == -1e300) continue;
                const double m = u.v[c] - b;
                if (m < worst) {
                    worst = m;
                    const auto p = d.grid.center(i, j);
                    wx = p.x;
                    wy = p.y;
                }
            }
        if (worst < 1e300) {
            rep.worst.push_back({u.time, wx, wy, worst});
            rep.min_margin = std::min(rep.min_margin, worst);
        }
    };
    stepper.run(u0, t_run, {obs});
    rep.pass = rep.min_margin >= -tol;
    return rep;
}
}  // namespace

SpreadReport check_spreading_lower(std::shared_ptr<const geom::BranchedDomain> dom,
                                   int branch, double l,
                                   const nl::CombustionNonlinearity& f,
                                   const wave::WaveProfile& prof,
                                   const SpreadingConstants& sc, double t_run,
                                   double tol_disc) {
    if (!(l >= sc.R_eps + sc.L_eps))
        throw std::invalid_argument("spreading_lower: need l >= R_eps + L_eps");
    const double c = prof.c_f;
    const double T_eps = (l - sc.R_eps - sc.L_eps) / (c - sc.eps);
    pde::Field u0 = pde::init_plateau(dom, branch, l, sc.R_eps, 1.0 - sc.delta_eps);
    const auto& d = *dom;
    auto bound = [&, T_eps](double t, int cell, double) {
        if (d.branch_of[cell] != branch) return -1e300;
        const double s = d.branch_coordinate(
            d.grid.center(cell % d.grid.nx, cell / d.grid.nx), branch);
        if (t <= T_eps) {
            if (std::abs(s - l) <= (c - sc.eps) * t)
                return 1.0 - 2.0 * sc.delta_eps;
            return -1e300;
        }
        if (s >= sc.R_eps + sc.L_eps && s <= l + (c - sc.eps) * t &&
            s <= d.branches[branch].length - 2.0 * d.grid.h)
            return 1.0 - 3.0 * sc.delta_eps;
        return -1e300;
    };
    auto rep = run_spreading(dom, f, std::move(u0), t_run, 2.0 * tol_disc, bound,
                             "spreading_lower");
    rep.T_eps = T_eps;
    return rep;
}

SpreadReport check_spreading_upper(std::shared_ptr<const geom::BranchedDomain> dom,
                                   int branch, double l, double R,
                                   const nl::CombustionNonlinearity& f,
                                   const wave::WaveProfile& prof,
                                   const SpreadingConstants& sc, double tol_disc) {
    if (!(R > sc.R_eps) || !(l >= R + sc.L_eps))
        throw std::invalid_argument("spreading_upper: need R > R_eps, l >= R + L_eps");
    const double c = prof.c_f;
    const double T_eps = (R - sc.R_eps) / (c + sc.eps);
    pde::Field u0 = pde::init_plateau_inverted(dom, branch, l, R, sc.delta_eps);
    const auto& d = *dom;
    // flip sign: require -u >= -(2 delta_eps) on the shrinking set
    auto bound = [&, T_eps](double t, int cell, double) {
        if (t > T_eps || d.branch_of[cell] != branch) return -1e300;
        const double s = d.branch_coordinate(
            d.grid.center(cell % d.grid.nx, cell / d.grid.nx), branch);
        if (std::abs(s - l) <= R - sc.R_eps - (c + sc.eps) * t)
            return -(2.0 * sc.delta_eps);
        return -1e300;
    };
    // run on the negated field by wrapping the observer: easiest is a direct
    // pass below using a custom report
    SpreadReport rep;
    rep.name = "spreading_upper";
    rep.tol = 2.0 * tol_disc;
    rep.T_eps = T_eps;
    pde::StepperConfig cfg = pde::make_stepper_config(*dom, f);
    pde::Stepper stepper(dom, f, cfg);
    auto obs = [&](const pde::Field& u) {
        double worst = 1e300;
        double wx = 0, wy = 0;
        for (int j = 0; j < d.grid.ny; ++j)
            for (int i = 0; i < d.grid.nx; ++i) {
                const size_t cidx = d.grid.idx(i, j);
                if (!d.mask[cidx]) continue;
                const double b = bound(u.time, (int)cidx, 0.0);
                if (b == -1e300) continue;
                const double m = -u.v[cidx] - b;  // = 2 delta_eps - u
                if (m < worst) {
                    worst = m;
                    const auto p = d.grid.center(i, j);
                    wx = p.x;
                    wy = p.y;
                }
            }
        if (worst < 1e300) {
            rep.worst.push_back({u.time, wx, wy, worst});
            rep.min_margin = std::min(rep.min_margin, worst);
        }
    };
    pde::Field u = std::move(u0);
    stepper.run(u, T_eps, {obs});
    rep.pass = rep.min_margin >= -rep.tol;
    return rep;
}

SpreadReport check_spreading_ring(std::shared_ptr<const geom::BranchedDomain> dom,
                                  double R, const nl::CombustionNonlinearity& f,
                                  const wave::WaveProfile& prof,
                                  const SpreadingConstants& sc, double tol_disc) {
    const auto& d = *dom;
    if (!(R >= sc.R_eps_ring + d.L))
        throw std::invalid_argument("spreading_ring: need R >= R_eps + L");
    const double c = prof.c_f;
    const double T_eps = (R - sc.R_eps_ring - d.L) / (c + sc.eps);
    pde::Field u0 = pde::make_field(dom, 1.0);
    for (int j = 0; j < d.grid.ny; ++j)
        for (int i = 0; i < d.grid.nx; ++i) {
            const size_t cidx = d.grid.idx(i, j);
            if (!d.mask[cidx]) continue;
            const auto p = d.grid.center(i, j);
            const int b = d.branch_of[cidx];
            const bool low =
                (geom::norm(p - d.center) <= d.L) ||
                (b >= 0 && raw_coord(d, p, b) < R);
            if (low) u0.v[cidx] = sc.delta_eps;
        }
    SpreadReport rep;
    rep.name = "spreading_ring";
    rep.tol = 2.0 * tol_disc;
    rep.T_eps = T_eps;
    pde::StepperConfig cfg = pde::make_stepper_config(*dom, f);
    pde::Stepper stepper(dom, f, cfg);
    auto obs = [&](const pde::Field& u) {
        double worst = 1e300;
        double wx = 0, wy = 0;
        for (int j = 0; j < d.grid.ny; ++j)
            for (int i = 0; i < d.grid.nx; ++i) {
                const size_t cidx = d.grid.idx(i, j);
                if (!d.mask[cidx]) continue;
                const auto p = d.grid.center(i, j);
                const int b = d.branch_of[cidx];
                bool in_set = geom::norm(p - d.center) <= d.L;
                if (!in_set && b >= 0)
                    in_set = raw_coord(d, p, b) <=
                             R - sc.R_eps_ring - (c + sc.eps) * u.time;
                if (!in_set) continue;
                const double m = 3.0 * sc.delta_eps - u.v[cidx];
                if (m < worst) {
                    worst = m;
                    wx = p.x;
                    wy = p.y;
                }
            }
        if (worst < 1e300) {
            rep.worst.push_back({u.time, wx, wy, worst});
            rep.min_margin = std::min(rep.min_margin, worst);
        }
    };
    pde::Field u = std::move(u0);
    stepper.run(u, T_eps, {obs});
    rep.pass = rep.min_margin >= -rep.tol;
    return rep;
}

}  // namespace branchfront::barriers
