#pragma once

#include <stdexcept>

namespace branchfront::nl {

/** Ignition-type reaction term: zero on [0, theta] and at 1, positive in
 *  between, negative slope at 1. Extended to the whole line: zero below 0,
 *  linear continuation f'(1)*(u-1) above 1. The default profile is
 *  amplitude * (u - theta)^p * (1 - u) on (theta, 1) with p >= 2, which
 *  gives a C^1 junction at both ends of the reaction zone. */
struct CombustionNonlinearity {
    double theta = 0.3;      // ignition temperature, in (0,1)
    double amplitude = 1.0;  // positive scale factor
    double exponent = 2.0;   // smoothness power p >= 2 at theta

    void validate() const {
        if (!(theta > 0.0 && theta < 1.0))
            throw std::invalid_argument("nonlinearity: theta must lie in (0,1)");
        if (!(amplitude >= 0.0))
            throw std::invalid_argument("nonlinearity: amplitude must be >= 0");
        if (!(exponent >= 2.0))
            throw std::invalid_argument("nonlinearity: exponent must be >= 2");
    }
};

double eval_f(const CombustionNonlinearity& nl, double u);
double eval_df(const CombustionNonlinearity& nl, double u);

// sup of |f'| over (-2*eps0, 1 + 2*eps0), from the analytic critical point
// of f' plus dense sampling.
double lipschitz_bound(const CombustionNonlinearity& nl, double eps0);

// Largest eps0 in (0, theta/2] such that
//   (3/2) f'(1) <= f'(u) <= (3/4) f'(1)   on (1 - 2*eps0, 1 + 2*eps0),
// located by bisection.
double epsilon0(const CombustionNonlinearity& nl);

}  // namespace branchfront::nl
