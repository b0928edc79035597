// Timing comparison of the OpenMP kernels against their serial references.
#include <chrono>
#include <cstdio>

#include "branchfront/harness.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace branchfront;
using Clock = std::chrono::steady_clock;

namespace {
double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}
}  // namespace

int main() {
    nl::CombustionNonlinearity f{0.3, 9.0, 2.0};
    const auto& prof = harness::profile_for(f);

    std::vector<geom::BranchSpec> specs{
        {{-1.0, 0.0}, 2.0, {}, 60.0},
        {{1.0, 0.0}, 2.0, {}, 60.0},
        {{0.0, 1.0}, 2.0, {0.0, 1.1}, 60.0},
    };
    auto dom = std::make_shared<geom::BranchedDomain>(
        geom::build_domain(specs, 1.5, 1.0 / 16.0));
    std::printf("domain: %dx%d grid, %zu inside cells\n", dom->grid.nx, dom->grid.ny,
                dom->inside_count);

    auto cfg = pde::make_stepper_config(*dom, f);
    pde::Stepper stepper(dom, f, cfg);
    pde::Field u = pde::init_planar_front(dom, prof, 0, 30.0);
    pde::Field v = u;

    const int reps = 400;
    auto t0 = Clock::now();
    for (int k = 0; k < reps; ++k) stepper.step_reference(u);
    const double t_serial = seconds_since(t0);

    t0 = Clock::now();
    for (int k = 0; k < reps; ++k) stepper.step(v);
    const double t_par = seconds_since(t0);

    bool identical = true;
    for (size_t c = 0; c < u.v.size(); ++c) identical &= u.v[c] == v.v[c];

    const double cells = (double)dom->inside_count * reps;
#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: (no OpenMP)\n");
#endif
    std::printf("%-22s %10.3f s   %8.1f Mcell/s\n", "step (serial ref)", t_serial,
                cells / t_serial / 1e6);
    std::printf("%-22s %10.3f s   %8.1f Mcell/s   speedup %.2fx\n", "step (OpenMP)",
                t_par, cells / t_par / 1e6, t_serial / t_par);
    std::printf("bitwise identical: %s\n", identical ? "yes" : "NO");

    // fast marching timing
    std::vector<int> src;
    for (int c : dom->cells_of_branch(0))
        if (dom->branch_coordinate(
                dom->grid.center(c % dom->grid.nx, c / dom->grid.nx), 0) > 55.0)
            src.push_back(c);
    t0 = Clock::now();
    auto T = geom::fast_march(*dom, src);
    std::printf("%-22s %10.3f s   %8.1f Mcell/s\n", "fast marching",
                seconds_since(t0), dom->inside_count / seconds_since(t0) / 1e6);
    (void)T;
    return identical ? 0 : 1;
}
