#include "branchfront/fronts.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace branchfront::fronts {

Interface extract_interface(const pde::Field& u, double level) {
    if (!(level > 0.0 && level < 1.0))
        throw std::invalid_argument("extract_interface: level must be in (0,1)");
    const auto& d = *u.dom;
    Interface out;
    out.time = u.time;
    const int nx = d.grid.nx;
    for (int j = 0; j < d.grid.ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const size_t c = d.grid.idx(i, j);
            if (!d.mask[c]) continue;
            const double a = u.v[c] - level;
            const size_t nb[4] = {c - 1, c + 1, c - nx, c + nx};
            for (size_t n : nb) {
                if (!d.mask[n]) continue;
                if (a * (u.v[n] - level) < 0.0) {
                    out.cells.push_back((int)c);
                    break;
                }
            }
        }
    return out;
}

double branch_front_position(const pde::Field& u, int branch, double level) {
    const auto& d = *u.dom;
    const int nx = d.grid.nx;
    double best = -std::numeric_limits<double>::infinity();
    size_t best_c = 0;
    for (int j = 0; j < d.grid.ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const size_t c = d.grid.idx(i, j);
            if (!d.mask[c] || d.branch_of[c] != branch || u.v[c] < level) continue;
            const double s = d.branch_coordinate(d.grid.center(i, j), branch);
            if (s > best) { best = s; best_c = c; }
        }
    if (!std::isfinite(best)) throw std::runtime_error("front absent");
    // refine along the grid axis closest to the branch direction
    const auto e = d.branches[branch].direction;
    const int c = (int)best_c;
    const int i = c % nx, j = c / nx;
    int di = 0, dj = 0;
    if (std::abs(e.x) >= std::abs(e.y)) di = e.x >= 0 ? 1 : -1;
    else dj = e.y >= 0 ? 1 : -1;
    if (d.inside(i + di, j + dj)) {
        const size_t n = d.grid.idx(i + di, j + dj);
        if (u.v[n] < level && u.v[c] > u.v[n]) {
            const double sn = d.branch_coordinate(d.grid.center(i + di, j + dj), branch);
            const double t = (u.v[c] - level) / (u.v[c] - u.v[n]);
            return best + t * (sn - best);
        }
    }
    return best;
}

MeanSpeed estimate_global_mean_speed(const geom::BranchedDomain& d,
                                     const std::vector<Interface>& interfaces,
                                     double gap_min) {
    if (interfaces.size() < 2)
        throw std::invalid_argument("estimate_global_mean_speed: need >= 2 interfaces");
    const double tspan = interfaces.back().time - interfaces.front().time;
    if (!(tspan >= 3.0 * gap_min))
        throw std::invalid_argument("estimate_global_mean_speed: history too short");
    MeanSpeed out;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    out.ci_lo = std::numeric_limits<double>::infinity();
    out.ci_hi = -out.ci_lo;
    for (size_t k = 0; k < interfaces.size(); ++k) {
        if (interfaces[k].cells.empty()) continue;
        std::vector<double> T;
        bool have_T = false;
        for (size_t l = k + 1; l < interfaces.size(); ++l) {
            const double gap = interfaces[l].time - interfaces[k].time;
            if (gap < gap_min || interfaces[l].cells.empty()) continue;
            if (!have_T) {
                T = geom::fast_march(d, interfaces[k].cells);
                have_T = true;
            }
            double dist = std::numeric_limits<double>::infinity();
            for (int c : interfaces[l].cells) dist = std::min(dist, T[c]);
            if (!std::isfinite(dist)) continue;
            sx += gap; sy += dist; sxx += gap * gap; sxy += gap * dist;
            ++out.pairs;
            const double ratio = dist / gap;
            out.ci_lo = std::min(out.ci_lo, ratio);
            out.ci_hi = std::max(out.ci_hi, ratio);
        }
    }
    if (out.pairs < 2) throw std::runtime_error("estimate_global_mean_speed: all pairs excluded");
    out.gamma = (out.pairs * sxy - sx * sy) / (out.pairs * sxx - sx * sx);
    return out;
}

namespace {
double shift_objective(const pde::Field& u, int branch,
                       const wave::WaveProfile& prof, double tau) {
    const auto& d = *u.dom;
    double worst = 0.0;
    for (int j = 0; j < d.grid.ny; ++j)
        for (int i = 0; i < d.grid.nx; ++i) {
            const size_t c = d.grid.idx(i, j);
            if (!d.mask[c] || d.branch_of[c] != branch) continue;
            const double s = d.branch_coordinate(d.grid.center(i, j), branch);
            const double e = std::abs(u.v[c] - prof.eval(s - prof.c_f * u.time + tau));
            worst = std::max(worst, e);
        }
    return worst;
}
}  // namespace

ShiftFit fit_shift(const pde::Field& u, int branch, const wave::WaveProfile& prof,
                   double beta) {
    double pos;
    try {
        pos = branch_front_position(u, branch, 0.5);
    } catch (const std::runtime_error&) {
        throw std::runtime_error("fit_shift: front absent in branch");
    }
    double lo = prof.c_f * u.time - pos - 15.0;
    double hi = prof.c_f * u.time - pos + 15.0;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = shift_objective(u, branch, prof, x1);
    double f2 = shift_objective(u, branch, prof, x2);
    for (int it = 0; it < 70 && hi - lo > 1e-6; ++it) {
        if (f1 < f2) {
            hi = x2; x2 = x1; f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = shift_objective(u, branch, prof, x1);
        } else {
            lo = x1; x1 = x2; f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = shift_objective(u, branch, prof, x2);
        }
    }
    ShiftFit out;
    out.tau_star = 0.5 * (lo + hi);
    out.sup_err = shift_objective(u, branch, prof, out.tau_star);
    const auto& d = *u.dom;
    for (int j = 0; j < d.grid.ny; ++j)
        for (int i = 0; i < d.grid.nx; ++i) {
            const size_t c = d.grid.idx(i, j);
            if (!d.mask[c] || d.branch_of[c] != branch) continue;
            const double s = d.branch_coordinate(d.grid.center(i, j), branch);
            const double xi = s - prof.c_f * u.time + out.tau_star;
            const double pb = prof.eval_pow(xi, beta);
            if (pb < 1e-8) continue;  // tail cells amplify float noise
            out.sup_err_normalized =
                std::max(out.sup_err_normalized, std::abs(u.v[c] - prof.eval(xi)) / pb);
        }
    return out;
}

const char* to_string(Classification c) {
    switch (c) {
        case Classification::Complete: return "Complete";
        case Classification::Blocked: return "Blocked";
        default: return "Undecided";
    }
}

Classification classify_propagation(const pde::FieldHistory& hist,
                                    const std::vector<int>& probes,
                                    const std::vector<int>& far_cells,
                                    const std::vector<int>& incoming_cells,
                                    double theta, const ClassifyParams& prm,
                                    ClassifyDiagnostics* diag) {
    if (hist.fields.size() < 4)
        throw std::invalid_argument("classify_propagation: history too short");
    for (int c : probes)
        if (!hist.fields.back().dom->mask[c])
            throw std::invalid_argument("classify_propagation: probe outside mask");
    const auto& last = hist.fields.back();
    const auto& prev = hist.fields[hist.fields.size() - 2];
    double pmin = 1.0;
    bool nondecreasing = true;
    for (int c : probes) {
        pmin = std::min(pmin, last.v[c]);
        if (last.v[c] < prev.v[c] - 1e-9) nondecreasing = false;
    }
    if (diag) {
        diag->probe_min = pmin;
        diag->probes_nondecreasing = nondecreasing;
    }
    if (pmin >= prm.complete_level && nondecreasing) return Classification::Complete;

    if (far_cells.empty() || incoming_cells.empty()) return Classification::Undecided;
    const size_t tail0 =
        hist.fields.size() - std::max<size_t>(1, (size_t)(prm.tail_fraction * hist.fields.size()));
    double far_max = 0.0;
    for (size_t k = tail0; k < hist.fields.size(); ++k)
        for (int c : far_cells) far_max = std::max(far_max, hist.fields[k].v[c]);
    double inc_min = 1.0;
    for (int c : incoming_cells) inc_min = std::min(inc_min, last.v[c]);
    if (diag) {
        diag->far_max = far_max;
        diag->incoming_min = inc_min;
    }
    if (far_max <= theta + prm.blocked_slack && inc_min >= prm.saturation_level)
        return Classification::Blocked;
    return Classification::Undecided;
}

double monotonicity_margin(const pde::FieldHistory& hist, double a, double b) {
    if (!(a > 0.0 && a <= b && b < 1.0))
        throw std::invalid_argument("monotonicity_margin: need 0 < a <= b < 1");
    if (hist.fields.size() < 2)
        throw std::invalid_argument("monotonicity_margin: history too short");
    double margin = std::numeric_limits<double>::infinity();
    bool any = false;
    for (size_t k = 0; k + 1 < hist.fields.size(); ++k) {
        const auto& u0 = hist.fields[k];
        const auto& u1 = hist.fields[k + 1];
        const double dt = u1.time - u0.time;
        if (!(dt > 0.0)) continue;
        const auto& d = *u0.dom;
        for (size_t c = 0; c < u0.v.size(); ++c) {
            if (!d.mask[c] || u0.v[c] < a || u0.v[c] > b) continue;
            margin = std::min(margin, (u1.v[c] - u0.v[c]) / dt);
            any = true;
        }
    }
    if (!any) throw std::runtime_error("monotonicity_margin: no qualifying cells");
    return margin;
}

}  // namespace branchfront::fronts
