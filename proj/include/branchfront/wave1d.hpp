#pragma once

#include <string>
#include <vector>

#include "branchfront/nonlinearity.hpp"

namespace branchfront::wave {

double lambda_of(double lam, double c);  // lam^2 + c*lam

// positive root of lam^2 + c lam + f'(1) = 0  (decay rate of 1 - phi at -inf)
double lambda_root(double c, double df1);

/** Sampled planar front phi with speed c_f, normalized so phi(0) = 1/2.
 *  Inside [xi_min, xi_max] evaluation is cubic Hermite on the stored grid;
 *  beyond the matching point the tail is exactly A e^{-c xi}, and left of
 *  the stored range it is 1 - B e^{Lambda xi}. */
struct WaveProfile {
    nl::CombustionNonlinearity f;
    double c_f = 0.0;
    double xi_min = 0.0, xi_max = 0.0, dx = 0.0;
    std::vector<double> phi, dphi;

    double xi_match = 0.0;   // phi(xi) = A e^{-c xi} exactly for xi >= xi_match
    double A_right = 0.0;
    double xi_left = 0.0;    // phi(xi) = 1 - B e^{Lambda xi} for xi <= xi_left
    double B_left = 0.0;
    double Lambda = 0.0;     // root of the linearization at phi = 1

    double Lambda_minus = 0.0;  // fitted left-tail rate
    double K1 = 0.0, K2 = 0.0, K3 = 0.0, K4 = 0.0;
    double norm_shift = 0.0;

    double sup_ratio1 = 0.0;  // sup |phi'/phi|
    double sup_ratio2 = 0.0;  // sup |phi''/phi|

    double eval(double xi) const;
    double eval_dphi(double xi) const;
    double eval_ddphi(double xi) const;  // from the ODE
    double eval_pow(double xi, double beta) const;  // phi(xi)^beta

    // smallest xi with phi(xi) <= v (tail-inverted); v in (0,1)
    double xi_where_phi_below(double v) const;
    // largest xi with 1 - phi(xi) <= v
    double xi_where_one_minus_phi_below(double v) const;

    void export_csv(const std::string& path) const;
};

// Phase-plane shooting: bisection on c over [1e-4, 10] until the mismatch
// p(theta) - c*theta is below tol in magnitude.
double shoot_speed(const nl::CombustionNonlinearity& f, double tol = 1e-10);

WaveProfile profile_from_speed(const nl::CombustionNonlinearity& f, double c_f,
                               double xi_span = 60.0, double h = 1e-3,
                               double tol_resid = 1e-6);

struct DecayRates {
    double Lambda_minus = 0.0;
    double K1 = 0.0, K2 = 0.0, K3 = 0.0, K4 = 0.0;
    double right_rate = 0.0;  // fitted decay rate of phi on the right tail
};

// Least-squares tail fits; also writes the results back into the profile.
DecayRates decay_rates(WaveProfile& p);

}  // namespace branchfront::wave
