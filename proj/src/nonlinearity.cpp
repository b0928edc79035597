#include "branchfront/nonlinearity.hpp"

#include <algorithm>
#include <cmath>

namespace branchfront::nl {

namespace {
double slope_at_one(const CombustionNonlinearity& nl) {
    return -nl.amplitude * std::pow(1.0 - nl.theta, nl.exponent);
}
}  // namespace

double eval_f(const CombustionNonlinearity& nl, double u) {
    if (!std::isfinite(u)) throw std::invalid_argument("eval_f: non-finite input");
    if (u <= nl.theta) return 0.0;  // covers u < 0 as well
    if (u >= 1.0) return slope_at_one(nl) * (u - 1.0);
    return nl.amplitude * std::pow(u - nl.theta, nl.exponent) * (1.0 - u);
}

double eval_df(const CombustionNonlinearity& nl, double u) {
    if (!std::isfinite(u)) throw std::invalid_argument("eval_df: non-finite input");
    if (u <= nl.theta) return 0.0;
    if (u >= 1.0) return slope_at_one(nl);
    const double p = nl.exponent;
    return nl.amplitude * std::pow(u - nl.theta, p - 1.0) *
           (p * (1.0 - u) - (u - nl.theta));
}

double lipschitz_bound(const CombustionNonlinearity& nl, double eps0) {
    if (!(eps0 > 0.0)) throw std::invalid_argument("lipschitz_bound: eps0 must be > 0");
    const double lo = -2.0 * eps0, hi = 1.0 + 2.0 * eps0;
    double best = std::abs(slope_at_one(nl));
    // interior critical point of f' on (theta, 1):
    //   (p-1)(1-u) = 2(u-theta)  =>  u = (p - 1 + 2 theta) / (p + 1)
    const double ucrit = (nl.exponent - 1.0 + 2.0 * nl.theta) / (nl.exponent + 1.0);
    if (ucrit > nl.theta && ucrit < 1.0 && ucrit > lo && ucrit < hi)
        best = std::max(best, std::abs(eval_df(nl, ucrit)));
    const int n = 20001;
    for (int k = 0; k <= n; ++k) {
        const double u = lo + (hi - lo) * k / n;
        best = std::max(best, std::abs(eval_df(nl, u)));
    }
    return best;
}

namespace {
bool df_band_holds(const CombustionNonlinearity& nl, double e) {
    const double d1 = eval_df(nl, 1.0);
    const double lo_bound = 1.5 * d1, hi_bound = 0.75 * d1;
    const double slack = 0.0;
    const int n = 4000;
    for (int k = 0; k <= n; ++k) {
        const double u = (1.0 - 2.0 * e) + 4.0 * e * k / n;
        const double d = eval_df(nl, u);
        if (d < lo_bound - slack || d > hi_bound + slack) return false;
    }
    return true;
}
}  // namespace

double epsilon0(const CombustionNonlinearity& nl) {
    nl.validate();
    if (eval_df(nl, 1.0) >= 0.0)
        throw std::invalid_argument("epsilon0: requires f'(1) < 0");
    double hi = nl.theta / 2.0;
    if (df_band_holds(nl, hi)) return hi;
    double lo = hi * 1e-9;
    // continuity of f' at 1 guarantees the band for small windows
    while (!df_band_holds(nl, lo)) lo *= 0.5;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (df_band_holds(nl, mid) ? lo : hi) = mid;
    }
    return lo;
}

}  // namespace branchfront::nl
