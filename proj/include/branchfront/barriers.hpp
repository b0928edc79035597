#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "branchfront/pde.hpp"

namespace branchfront::barriers {

/** Transverse cutoff on one branch: a C^2 ramp of the wall distance with
 *  unit inward slope at the wall, raised by an additive constant until the
 *  discrete cutoff inequality holds at every branch cell. */
struct Zeta {
    int branch = 0;
    double d0 = 0.0;    // ramp support depth, < width/2
    double Chat = 0.0;  // additive constant
    double ramp(double d) const;        // q(d), zero for d >= d0
    double ramp_d(double d) const;      // q'
    double ramp_dd(double d) const;     // q''
    double eval(const geom::BranchedDomain& d, geom::Vec2 p) const;
    double sup() const { return Chat + d0 / 4.0; }
    double inf() const { return Chat; }
};

Zeta build_zeta(const geom::BranchedDomain& d, int branch,
                const nl::CombustionNonlinearity& f,
                const wave::WaveProfile& prof, double beta);

// residual of the cutoff inequality at every branch cell (max, should be <= 0)
double zeta_inequality_residual(const geom::BranchedDomain& d, const Zeta& z,
                                const nl::CombustionNonlinearity& f,
                                const wave::WaveProfile& prof, double beta);

struct IneqCheck {
    std::string name;
    double lhs = 0.0, rhs = 0.0;
    bool ok = false;
};

/** Every constant of the section-2 barrier pair, recomputed from the
 *  nonlinearity and the front profile. One epsilon serves both barriers. */
struct SectionTwoConstants {
    double beta = 0.5;
    double eps0 = 0.0, Lf = 0.0, df1 = 0.0;
    double Lambda_beta = 0.0;  // Lambda(-beta c_f) < 0
    double eps = 0.0, mu = 0.0, eps_tilde = 0.0, eps_prime = 0.0;
    double zbar0 = 0.0, Ctilde = 0.0;
    double C1 = 0.0, C2 = 0.0, kappa = 0.0;
    double rho_sub = 0.0, T_sub = 0.0;
    double rho_sup = 0.0, T_sup = 0.0;
    double K_pi = 0.0, sup_eta_ratio = 0.0;

    std::vector<IneqCheck> recheck(const nl::CombustionNonlinearity& f,
                                   const wave::WaveProfile& prof) const;
};

struct SubsolutionSpec {
    std::shared_ptr<const geom::BranchedDomain> dom;
    const wave::WaveProfile* prof = nullptr;
    nl::CombustionNonlinearity f;
    std::vector<int> I;
    std::vector<Zeta> zetas;  // parallel to I
    double beta = 0.5, eps = 0.0, mu = 0.0, rho = 0.0, T = 0.0, eps_tilde = 0.0;

    double xi_under(double t, double s) const {  // moving frame coordinate
        return -s - prof->c_f * t + rho * std::exp(eps * t) + 1.0;
    }
    double eval(double t, geom::Vec2 p) const;
    void eval_field(double t, std::vector<double>& out) const;
};

struct SupersolutionSpec {
    std::shared_ptr<const geom::BranchedDomain> dom;
    const wave::WaveProfile* prof = nullptr;
    nl::CombustionNonlinearity f;
    std::vector<int> I, J;
    double beta = 0.5, eps = 0.0, mu = 0.0, rho = 0.0, T_eps = 0.0;

    double eta(double s) const;       // 1 below L+2, exp(-mu(s-L)) above L+3
    double eta_dd_over(double s) const;  // eta''/eta
    double pi(double s) const;        // 0 below L+1, 1 above L+2
    double xi_bar(double t, double s) const {
        return -s - prof->c_f * t - rho * std::exp(eps * t);
    }
    double xi_hat(double t, double s) const {
        return s - prof->c_f * t - rho * std::exp(eps * t) - 2.0 * dom->L - 3.0;
    }
    double xi_of_t(double t) const {
        return -dom->L - prof->c_f * t - rho * std::exp(eps * t) - 2.0;
    }
    double eval(double t, geom::Vec2 p) const;
    void eval_field(double t, std::vector<double>& out) const;
    // max seam jump across the region interfaces at time t (continuity audit)
    double seam_jump(double t) const;
};

struct SectionTwoBarriers {
    SectionTwoConstants consts;
    SubsolutionSpec sub;
    SupersolutionSpec sup;
};

SectionTwoBarriers build_section2(std::shared_ptr<const geom::BranchedDomain> dom,
                                  const std::vector<int>& I,
                                  const std::vector<int>& J,
                                  const nl::CombustionNonlinearity& f,
                                  const wave::WaveProfile& prof, double beta);

// Same formulas with a caller-chosen shift amplitude and horizon; used as
// front-like seed data where the strict horizon is out of numerical reach.
SubsolutionSpec make_subsolution_seed(const SectionTwoBarriers& b, double rho,
                                      double T, double eps_rate);

struct ViolationRow {
    double t = 0.0, x = 0.0, y = 0.0;
    double residual = 0.0, tol = 0.0;
    bool pass = true;
};

struct ViolationReport {
    std::string name;
    double tol = 0.0;
    double max_violation = -1e300;  // max of sign * L[w] over cells and times
    std::vector<ViolationRow> rows;  // worst cell per time slice
    size_t cells_checked = 0, violations = 0;
    bool pass = true;
};

/** Checks sign * (w_t - lap_h w - f(w)) <= tol on mask cells, with w_t from
 *  an analytic central difference and lap_h the mirrored five-point stencil.
 *  sign=+1 audits a subsolution, sign=-1 a supersolution. Cells where the
 *  clamped barrier sits at its clamp value are skipped when only_positive. */
ViolationReport verify_differential_inequality(
    const std::function<double(double, geom::Vec2)>& w, int sign,
    const geom::BranchedDomain& d, const nl::CombustionNonlinearity& f,
    const std::vector<double>& times, double tol, const std::string& name,
    bool only_positive);

// tol_disc = 10 * max |L_h[slid exact front]| measured on the branch cells of
// `branch`, over a few front positions; returned as the additive tolerance.
double calibrate_tol_disc(const geom::BranchedDomain& d,
                          const nl::CombustionNonlinearity& f,
                          const wave::WaveProfile& prof, int branch);

/** Constants of the spreading lemmas, built for one deficit eps in (0, c_f). */
struct SpreadingConstants {
    double beta = 0.5, eps = 0.0, delta = 0.0;
    double C = 0.0, kappa = 0.0;
    double delta_eps = 0.0, C_eps = 0.0, kappa_eps = 0.0;
    double alpha_eps = 0.0, Ctilde_eps = 0.0;
    double r0 = 0.0, W = 0.0, H_eps = 0.0, h_eps0 = 0.0;  // ramped |.| profile
    double R_eps = 0.0, L_eps = 0.0;
    double C_ring = 0.0, R_eps_ring = 0.0;

    double h_eval(double r) const;
    std::vector<IneqCheck> recheck(const nl::CombustionNonlinearity& f,
                                   const wave::WaveProfile& prof, double L) const;
};

SpreadingConstants compute_spreading_constants(const nl::CombustionNonlinearity& f,
                                               const wave::WaveProfile& prof,
                                               double beta, double eps, double L);

struct SpreadReport {
    std::string name;
    bool pass = true;
    double min_margin = 1e300;  // signed distance to the asserted bound
    double tol = 0.0;
    double T_eps = 0.0;
    std::vector<std::array<double, 4>> worst;  // t, x, y, margin per record
};

SpreadReport check_spreading_lower(std::shared_ptr<const geom::BranchedDomain> dom,
                                   int branch, double l,
                                   const nl::CombustionNonlinearity& f,
                                   const wave::WaveProfile& prof,
                                   const SpreadingConstants& sc, double t_run,
                                   double tol_disc);

SpreadReport check_spreading_upper(std::shared_ptr<const geom::BranchedDomain> dom,
                                   int branch, double l, double R,
                                   const nl::CombustionNonlinearity& f,
                                   const wave::WaveProfile& prof,
                                   const SpreadingConstants& sc, double tol_disc);

SpreadReport check_spreading_ring(std::shared_ptr<const geom::BranchedDomain> dom,
                                  double R, const nl::CombustionNonlinearity& f,
                                  const wave::WaveProfile& prof,
                                  const SpreadingConstants& sc, double tol_disc);

}  // namespace branchfront::barriers
