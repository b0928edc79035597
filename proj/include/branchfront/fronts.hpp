#pragma once

#include <optional>
#include <string>
#include <vector>

#include "branchfront/pde.hpp"

namespace branchfront::fronts {

struct Interface {
    double time = 0.0;
    std::vector<int> cells;  // cells straddling the level with a 4-neighbor
};

Interface extract_interface(const pde::Field& u, double level = 0.5);

// max branch coordinate with u >= level, linearly interpolated toward the
// first sub-level neighbor along the branch axis
double branch_front_position(const pde::Field& u, int branch, double level = 0.5);

struct MeanSpeed {
    double gamma = 0.0;
    double ci_lo = 0.0, ci_hi = 0.0;  // spread of pairwise distance/gap ratios
    int pairs = 0;
};

MeanSpeed estimate_global_mean_speed(const geom::BranchedDomain& d,
                                     const std::vector<Interface>& interfaces,
                                     double gap_min);

struct ShiftFit {
    double tau_star = 0.0;
    double sup_err = 0.0;
    double sup_err_normalized = 0.0;  // phi^beta-weighted variant
};

ShiftFit fit_shift(const pde::Field& u, int branch, const wave::WaveProfile& prof,
                   double beta = 0.5);

enum class Classification { Complete, Blocked, Undecided };
const char* to_string(Classification c);

struct ClassifyParams {
    double complete_level = 0.95;
    double blocked_slack = 0.05;   // far side must stay below theta + slack
    double tail_fraction = 0.25;   // final fraction of records examined
    double saturation_level = 0.95;
};

struct ClassifyDiagnostics {
    double probe_min = 0.0, far_max = 0.0, incoming_min = 0.0;
    bool probes_nondecreasing = false;
};

/** Probe-based verdict over a recorded history. `far_cells` designates the
 *  region past the junction used for the Blocked test and `incoming_cells`
 *  the branch carrying the initial front. */
Classification classify_propagation(const pde::FieldHistory& hist,
                                    const std::vector<int>& probes,
                                    const std::vector<int>& far_cells,
                                    const std::vector<int>& incoming_cells,
                                    double theta,
                                    const ClassifyParams& params = {},
                                    ClassifyDiagnostics* diag = nullptr);

// min over recorded consecutive pairs and cells with a <= u <= b of
// (u(t+dt) - u(t)) / dt
double monotonicity_margin(const pde::FieldHistory& hist, double a, double b);

}  // namespace branchfront::fronts
