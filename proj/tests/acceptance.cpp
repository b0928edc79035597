// Acceptance suite: one line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "branchfront/harness.hpp"
#include "oracles.hpp"

using namespace branchfront;
using Clock = std::chrono::steady_clock;

namespace {
int g_failures = 0;

void report(int id, const std::string& what, bool pass, const std::string& detail,
            double seconds) {
    std::printf("%s  [%2d] %s — %s (%.1f s)\n", pass ? "PASS" : "FAIL", id,
                what.c_str(), detail.c_str(), seconds);
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

struct Timer {
    Clock::time_point t0 = Clock::now();
    double elapsed() const {
        return std::chrono::duration<double>(Clock::now() - t0).count();
    }
};

harness::RunArtifacts run_scenario(const std::string& scenario,
                                   const std::string& outdir) {
    auto j = harness::default_config(scenario);
    j["output_dir"] = outdir;
    return harness::run_experiment(harness::parse_config(j));
}

std::string checks_detail(const harness::RunArtifacts& art) {
    std::string out;
    int shown = 0;
    for (const auto& c : art.checks)
        if (!c.pass && shown < 3) {
            out += c.name + " ";
            ++shown;
        }
    if (out.empty()) out = std::to_string(art.checks.size()) + " checks green";
    else out = "failing: " + out;
    return out;
}

bool checks_named(const harness::RunArtifacts& art,
                  const std::vector<std::string>& needles, std::string& detail) {
    bool ok = true;
    for (const auto& c : art.checks)
        for (const auto& n : needles)
            if (c.name.find(n) != std::string::npos) {
                ok = ok && c.pass;
                if (!c.pass) detail += c.name + " ";
            }
    return ok;
}
}  // namespace

int main() {
    std::printf("branchfront acceptance suite\n");

    // 1. wave speed cross-validation, three nonlinearities, 0.5% relative
    {
        const nl::CombustionNonlinearity cases[] = {
            {0.3, 9.0, 2.0}, {0.45, 16.0, 2.0}, {0.2, 4.0, 2.0}};
        for (int k = 0; k < 3; ++k) {
            Timer t;
            const double c = wave::shoot_speed(cases[k]);
            const double c_sim = oracles::simulate_speed_1d(cases[k], 30.0);
            const double rel = std::abs(c_sim - c) / c;
            char buf[160];
            std::snprintf(buf, sizeof buf,
                          "theta=%.2f a=%.0f: shoot %.6f vs sim %.6f (%.3f%%)",
                          cases[k].theta, cases[k].amplitude, c, c_sim, 100 * rel);
            report(1, "wave speed cross-validation", rel <= 0.005, buf, t.elapsed());
        }
    }

    // 2. decay structure of the profile tails
    {
        Timer t;
        const nl::CombustionNonlinearity f{0.3, 1.0, 2.0};
        const double c = wave::shoot_speed(f);
        auto prof = wave::profile_from_speed(f, c);
        auto rates = wave::decay_rates(prof);
        const double root = wave::lambda_root(c, nl::eval_df(f, 1.0));
        const bool right_ok = std::abs(rates.right_rate - c) <= 0.01 * c;
        const bool left_ok = std::abs(rates.Lambda_minus - root) <= 0.02 * root;
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "right rate %.5f vs c_f %.5f; left %.5f vs root %.5f",
                      rates.right_rate, c, rates.Lambda_minus, root);
        report(2, "decay structure", right_ok && left_ok, buf, t.elapsed());
    }

    // 3. 2D strip speed within 2%
    double margin_strip = -1.0;
    {
        Timer t;
        auto art = run_scenario("straight_cylinder", "acceptance_out/strip");
        margin_strip = art.summary.value("monotonicity_margin", -1.0);
        std::string detail;
        const bool ok = checks_named(art, {"strip_speed"}, detail);
        char buf[160];
        std::snprintf(buf, sizeof buf, "measured %.5f vs %.5f",
                      art.summary.value("c_measured", 0.0),
                      art.summary.value("c_f", 0.0));
        report(3, "2D strip speed", ok, ok ? buf : detail, t.elapsed());
    }

    // 4. barrier audit: inequalities, sandwich, parameters
    {
        Timer t;
        auto art = run_scenario("barrier_audit", "acceptance_out/barrier_audit");
        report(4, "section-2 barrier audit", art.all_pass, checks_detail(art),
               t.elapsed());
    }

    // 5. spreading lemmas
    {
        Timer t;
        auto art = run_scenario("spreading_lemmas", "acceptance_out/spreading");
        report(5, "spreading barriers", art.all_pass, checks_detail(art), t.elapsed());
    }

    // 6. entire solution scenario
    double margin_entire = -1.0;
    {
        Timer t;
        auto art = run_scenario("entire_solution", "acceptance_out/entire");
        margin_entire = art.summary.value("monotonicity_margin", -1.0);
        report(6, "entire-solution scenario", art.all_pass, checks_detail(art),
               t.elapsed());
    }

    // 7. global mean speed on the junction
    double margin_mean = -1.0;
    {
        Timer t;
        auto art = run_scenario("mean_speed", "acceptance_out/mean_speed");
        margin_mean = art.summary.value("monotonicity_margin", -1.0);
        char buf[160];
        std::snprintf(buf, sizeof buf, "gamma %.5f vs c_f %.5f, regression %.5f",
                      art.summary.value("gamma", 0.0), art.summary.value("c_f", 0.0),
                      art.summary.value("c_branch_regression", 0.0));
        report(7, "global mean speed", art.all_pass, art.all_pass ? buf : checks_detail(art),
               t.elapsed());
    }

    // 8. geometry theorems: star-shaped suite and scaling sweep
    {
        Timer t;
        auto art = run_scenario("star_shaped_suite", "acceptance_out/star");
        report(8, "star-shaped suite", art.all_pass, checks_detail(art), t.elapsed());
        Timer t2;
        auto art2 = run_scenario("scaling_sweep", "acceptance_out/sweep");
        report(8, "scaling sweep", art2.all_pass, checks_detail(art2), t2.elapsed());
    }

    // 9. discrete comparison principle: 20 random ordered pairs, 1e4 steps
    {
        Timer t;
        const nl::CombustionNonlinearity f{0.3, 1.0, 2.0};
        std::vector<geom::BranchSpec> s{{{-1.0, 0.0}, 1.0, {}, 6.0},
                                        {{1.0, 0.0}, 1.0, {}, 6.0}};
        auto dom = std::make_shared<geom::BranchedDomain>(
            geom::build_domain(s, 0.5, 1.0 / 16.0));
        auto cfg = pde::make_stepper_config(*dom, f);
        pde::Stepper st(dom, f, cfg);
        std::mt19937_64 rng(101);
        std::uniform_real_distribution<double> U(0.0, 1.0);
        long violations = 0;
        for (int pair = 0; pair < 20; ++pair) {
            pde::Field u = pde::make_field(dom), v = pde::make_field(dom);
            for (size_t c = 0; c < u.v.size(); ++c)
                if (dom->mask[c]) {
                    const double a = U(rng), b = U(rng);
                    u.v[c] = std::min(a, b);
                    v.v[c] = std::max(a, b);
                }
            for (int k = 0; k < 10000; ++k) {
                st.step(u);
                st.step(v);
            }
            for (size_t c = 0; c < u.v.size(); ++c)
                if (u.v[c] > v.v[c]) ++violations;
        }
        char buf[80];
        std::snprintf(buf, sizeof buf, "%ld violations over 20 pairs", violations);
        report(9, "discrete comparison principle", violations == 0, buf, t.elapsed());
    }

    // 10. monotonicity margin positive on every Complete run above
    {
        char buf[160];
        std::snprintf(buf, sizeof buf, "strip %.3g, entire %.3g, mean-speed %.3g",
                      margin_strip, margin_entire, margin_mean);
        report(10, "monotonicity margins",
               margin_strip > 0.0 && margin_entire > 0.0 && margin_mean > 0.0, buf,
               0.0);
    }

    std::printf("%s (%d failure%s)\n", g_failures == 0 ? "ALL CRITERIA PASS" : "FAILURES",
                g_failures, g_failures == 1 ? "" : "s");
    return g_failures == 0 ? 0 : 1;
}
