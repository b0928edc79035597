#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "branchfront/wave1d.hpp"
#include "oracles.hpp"

using namespace branchfront;

static const nl::CombustionNonlinearity kDefault{0.3, 1.0, 2.0};

TEST_CASE("lambda_of basics") {
    CHECK(wave::lambda_of(0.0, 2.0) == 0.0);
    CHECK(wave::lambda_of(-2.0, 2.0) == 0.0);
    CHECK(wave::lambda_of(1.0, 2.0) == 3.0);
    CHECK(wave::lambda_of(-0.5 * 2.0, 2.0) < 0.0);  // Lambda(-beta c) < 0
}

TEST_CASE("no front without reaction") {
    CHECK_THROWS_WITH(wave::shoot_speed({0.3, 0.0, 2.0}), "no admissible speed");
}

TEST_CASE("amplitude scaling of the speed") {
    const double c1 = wave::shoot_speed(kDefault);
    const double c4 = wave::shoot_speed({0.3, 4.0, 2.0});
    CHECK(c4 == doctest::Approx(2.0 * c1).epsilon(1e-7));
}

TEST_CASE("speed against the long-time 1d simulation" * doctest::timeout(1200)) {
    // frozen from the oracle below; the shooting result must stay within 0.5%
    const double c = wave::shoot_speed({0.3, 9.0, 2.0});
    CHECK(c == doctest::Approx(0.790308515).epsilon(1e-6));
    const double c_sim = oracles::simulate_speed_1d({0.3, 9.0, 2.0}, 30.0);
    CHECK(std::abs(c_sim - c) <= 0.005 * c);
}

TEST_CASE("profile structure") {
    const double c = wave::shoot_speed(kDefault);
    auto w = wave::profile_from_speed(kDefault, c);
    CHECK(w.eval(0.0) == doctest::Approx(0.5).epsilon(1e-10));
    // strictly decreasing on the resolvable range
    for (double xi = -30.0; xi < 30.0; xi += 0.37)
        CHECK(w.eval(xi + 0.37) < w.eval(xi));
    // right tail: log phi slope = -c_f
    const double slope =
        (std::log(w.eval(20.0)) - std::log(w.eval(12.0))) / 8.0;
    CHECK(slope == doctest::Approx(-c).epsilon(1e-6));
    // phi'/phi at xi = 20 -> -c_f within 1%
    CHECK(w.eval_dphi(20.0) / w.eval(20.0) == doctest::Approx(-c).epsilon(0.01));
    // left tail rate matches the root of the linearization at 1
    const double root = wave::lambda_root(c, nl::eval_df(kDefault, 1.0));
    CHECK(w.Lambda_minus == doctest::Approx(root).epsilon(0.02));
    CHECK(w.K1 <= w.K2);
    CHECK(w.K3 <= w.K4);
    CHECK(w.K1 > 0.0);
    CHECK(w.K3 > 0.0);
}

TEST_CASE("ODE residual bound on interior nodes") {
    const double c = wave::shoot_speed(kDefault);
    auto w = wave::profile_from_speed(kDefault, c);
    const double h = w.dx;
    double rmax = 0.0, phi4 = 0.0;
    for (size_t i = 1; i + 1 < w.phi.size(); ++i) {
        const double lap = (w.phi[i + 1] - 2 * w.phi[i] + w.phi[i - 1]) / (h * h);
        const double adv = c * (w.phi[i + 1] - w.phi[i - 1]) / (2 * h);
        rmax = std::max(rmax, std::abs(lap + adv + nl::eval_f(kDefault, w.phi[i])));
    }
    for (size_t i = 2; i + 2 < w.phi.size(); i += 3) {
        const double d4 = (w.phi[i - 2] - 4 * w.phi[i - 1] + 6 * w.phi[i] -
                           4 * w.phi[i + 1] + w.phi[i + 2]) / (h * h * h * h);
        phi4 = std::max(phi4, std::abs(d4));
    }
    CHECK(rmax <= std::max(1e-6, 10.0 * h * h * phi4));
}

TEST_CASE("profile power stays above profile") {
    const double c = wave::shoot_speed(kDefault);
    auto w = wave::profile_from_speed(kDefault, c);
    for (double beta : {0.25, 0.5, 0.9})
        for (double xi = -20.0; xi <= 30.0; xi += 0.21) {
            const double v = w.eval(xi);
            CHECK(w.eval_pow(xi, beta) > v);
        }
}

TEST_CASE("decay constants are two-sided bounds on the sampled tails") {
    const double c = wave::shoot_speed(kDefault);
    auto w = wave::profile_from_speed(kDefault, c);
    for (double xi = 1.0; xi <= 20.0; xi += 0.5) {
        const double e = std::exp(-c * xi);
        CHECK(w.eval(xi) >= w.K3 * e * (1.0 - 1e-9));
        CHECK(w.eval(xi) <= w.K4 * e * (1.0 + 1e-9));
    }
}

TEST_CASE("speed cross-validation for a second pair" * doctest::timeout(1200)) {
    // shorter horizon than the acceptance oracle; sanity level only
    nl::CombustionNonlinearity f{0.45, 4.0, 2.0};
    const double c = wave::shoot_speed(f);
    const double c_sim = oracles::simulate_speed_1d(f, 20.0, 150.0, 0.01, 60.0, 150.0);
    CHECK(std::abs(c_sim - c) <= 0.01 * c);
}
