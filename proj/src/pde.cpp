#include "branchfront/pde.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace branchfront::pde {

StepperConfig make_stepper_config(const geom::BranchedDomain& d,
                                  const nl::CombustionNonlinearity& f,
                                  double cfl_safety, double record_every) {
    if (!(cfl_safety > 0.0 && cfl_safety <= 1.0))
        throw std::invalid_argument("stepper: cfl_safety must be in (0,1]");
    const double h = d.grid.h;
    const double Lf =
        f.amplitude == 0.0 ? 0.0 : nl::lipschitz_bound(f, nl::epsilon0(f));
    StepperConfig cfg;
    cfg.cfl_safety = cfl_safety;
    cfg.record_every = record_every;
    cfg.dt = cfl_safety / (4.0 / (h * h) + Lf);
    return cfg;
}

Field make_field(std::shared_ptr<const geom::BranchedDomain> dom, double value,
                 double time) {
    Field u;
    u.dom = std::move(dom);
    u.v.assign(u.dom->mask.size(), 0.0);
    if (value != 0.0)
        for (size_t c = 0; c < u.v.size(); ++c)
            if (u.dom->mask[c]) u.v[c] = value;
    u.time = time;
    return u;
}

Stepper::Stepper(std::shared_ptr<const geom::BranchedDomain> dom,
                 nl::CombustionNonlinearity f, StepperConfig cfg)
    : dom_(std::move(dom)), f_(f), cfg_(cfg) {
    const double h = dom_->grid.h;
    if (!(cfg_.dt > 0.0) || cfg_.dt > cfg_.cfl_safety * h * h / 4.0 + 1e-15)
        throw std::invalid_argument("stepper: dt violates the stability bound");
    scratch_.assign(dom_->mask.size(), 0.0);
}

void Stepper::step_rows(Field& u, int j0, int j1, std::vector<double>& out) const {
    const auto& d = *dom_;
    const int nx = d.grid.nx;
    const double inv_h2 = 1.0 / (d.grid.h * d.grid.h);
    const double dt = cfg_.dt;
    const double theta = f_.theta, amp = f_.amplitude, p = f_.exponent;
    const double df1 = nl::eval_df(f_, 1.0);
    const bool quad = (p == 2.0);
    const double* v = u.v.data();
    double* w = out.data();
    for (int j = j0; j < j1; ++j) {
        const size_t row = (size_t)j * nx;
        for (int i = 0; i < nx; ++i) {
            const size_t c = row + i;
            if (!d.mask[c]) continue;
            const double uc = v[c];
            const double lap =
                (v[c - 1] + v[c + 1] + v[c - nx] + v[c + nx] - d.nnbr[c] * uc) *
                inv_h2;
            double fu;
            if (uc <= theta) fu = 0.0;
            else if (uc >= 1.0) fu = df1 * (uc - 1.0);
            else if (quad) { const double s = uc - theta; fu = amp * s * s * (1.0 - uc); }
            else fu = amp * std::pow(uc - theta, p) * (1.0 - uc);
            w[c] = uc + dt * (lap + fu);
        }
    }
}

void Stepper::step(Field& u) const {
    const int ny = dom_->grid.ny;
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
    for (int j = 0; j < ny; ++j) step_rows(u, j, j + 1, scratch_);
#else
    step_rows(u, 0, ny, scratch_);
#endif
    u.v.swap(scratch_);
    u.time += cfg_.dt;
}

void Stepper::step_reference(Field& u) const {
    step_rows(u, 0, dom_->grid.ny, scratch_);
    u.v.swap(scratch_);
    u.time += cfg_.dt;
}

void Stepper::run(Field& u, double T, const std::vector<Observer>& observers) const {
    if (T < u.time) throw std::invalid_argument("run: T must be >= field time");
    auto fire = [&] { for (auto& o : observers) o(u); };
    auto check_finite = [&] {
        for (size_t c = 0; c < u.v.size(); ++c)
            if (dom_->mask[c] && !std::isfinite(u.v[c]))
                throw std::runtime_error("numerical blow-up");
    };
    fire();
    if (T == u.time) return;
    const long rec = std::max(1L, std::lround(cfg_.record_every / cfg_.dt));
    long k = 0;
    while (u.time < T - 1e-12) {
        if (u.time + cfg_.dt > T) {
            // final partial step
            StepperConfig last = cfg_;
            last.dt = T - u.time;
            Stepper s(dom_, f_, last);
            s.step(u);
            break;
        }
        step(u);
        if (++k % rec == 0) {
            check_finite();
            fire();
            if (u.time >= T - 1e-12) return;
        }
    }
    check_finite();
    fire();
}

FieldHistory run(Field u, const nl::CombustionNonlinearity& f,
                 const StepperConfig& cfg, double T, bool keep_fields) {
    Stepper s(u.dom, f, cfg);
    FieldHistory hist;
    std::vector<Stepper::Observer> obs{[&](const Field& cur) {
        if (!hist.times.empty() && std::abs(hist.times.back() - cur.time) < 1e-12)
            return;
        hist.times.push_back(cur.time);
        if (keep_fields) hist.fields.push_back(cur);
    }};
    s.run(u, T, obs);
    return hist;
}

Field init_planar_front(std::shared_ptr<const geom::BranchedDomain> dom,
                        const wave::WaveProfile& prof, int branch, double x0) {
    const auto& d = *dom;
    if (branch < 0 || branch >= (int)d.branches.size())
        throw std::invalid_argument("init_planar_front: bad branch");
    if (!(x0 > 0.0 && x0 < d.branches[branch].length))
        throw std::invalid_argument("init_planar_front: position outside branch");
    // geodesic coordinate from the branch mouth for cells outside the branch
    std::vector<int> mouth;
    for (int j = 0; j < d.grid.ny; ++j)
        for (int i = 0; i < d.grid.nx; ++i) {
            const size_t c = d.grid.idx(i, j);
            if (!d.mask[c] || d.branch_of[c] != branch) continue;
            const double s = d.branch_coordinate(d.grid.center(i, j), branch);
            if (s <= 1.5 * d.grid.h) mouth.push_back((int)c);
        }
    std::vector<double> T;
    if (!mouth.empty()) T = geom::fast_march(d, mouth);
    Field u = make_field(dom);
    for (int j = 0; j < d.grid.ny; ++j)
        for (int i = 0; i < d.grid.nx; ++i) {
            const size_t c = d.grid.idx(i, j);
            if (!d.mask[c]) continue;
            double s;
            if (d.branch_of[c] == branch)
                s = d.branch_coordinate(d.grid.center(i, j), branch);
            else
                s = T.empty() || !std::isfinite(T[c]) ? -1e9 : -T[c];
            u.v[c] = prof.eval(x0 - s);
        }
    return u;
}

Field init_plateau(std::shared_ptr<const geom::BranchedDomain> dom, int branch,
                   double l, double R, double level) {
    const auto& d = *dom;
    if (!(l - R > d.L)) throw std::invalid_argument("init_plateau: plateau outside branch");
    if (l + R > d.branches[branch].length)
        throw std::invalid_argument("init_plateau: plateau outside branch");
    Field u = make_field(dom);
    for (int j = 0; j < d.grid.ny; ++j)
        for (int i = 0; i < d.grid.nx; ++i) {
            const size_t c = d.grid.idx(i, j);
            if (!d.mask[c] || d.branch_of[c] != branch) continue;
            const double s = d.branch_coordinate(d.grid.center(i, j), branch);
            if (s > l - R && s < l + R) u.v[c] = level;
        }
    return u;
}

Field init_plateau_inverted(std::shared_ptr<const geom::BranchedDomain> dom,
                            int branch, double l, double R, double level) {
    const auto& d = *dom;
    Field u = make_field(dom, 1.0);
    for (int j = 0; j < d.grid.ny; ++j)
        for (int i = 0; i < d.grid.nx; ++i) {
            const size_t c = d.grid.idx(i, j);
            if (!d.mask[c] || d.branch_of[c] != branch) continue;
            const double s = d.branch_coordinate(d.grid.center(i, j), branch);
            if (s > l - R && s < l + R) u.v[c] = level;
        }
    return u;
}

void write_snapshot(const Field& u, const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw std::runtime_error("cannot open " + path);
    std::fprintf(fp, "{\"time\":%.17g,\"nx\":%d,\"ny\":%d,\"h\":%.17g}\n", u.time,
                 u.dom->grid.nx, u.dom->grid.ny, u.dom->grid.h);
    std::fwrite(u.v.data(), sizeof(double), u.v.size(), fp);
    std::fclose(fp);
}

Field read_snapshot(std::shared_ptr<const geom::BranchedDomain> dom,
                    const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "rb");
    if (!fp) throw std::runtime_error("cannot open " + path);
    char header[256];
    if (!std::fgets(header, sizeof header, fp)) {
        std::fclose(fp);
        throw std::runtime_error("bad snapshot header");
    }
    Field u = make_field(dom);
    double t = 0;
    int nx = 0, ny = 0;
    double h = 0;
    if (std::sscanf(header, "{\"time\":%lg,\"nx\":%d,\"ny\":%d,\"h\":%lg}", &t, &nx,
                    &ny, &h) != 4 ||
        nx != dom->grid.nx || ny != dom->grid.ny) {
        std::fclose(fp);
        throw std::runtime_error("snapshot does not match domain");
    }
    u.time = t;
    const size_t n = std::fread(u.v.data(), sizeof(double), u.v.size(), fp);
    std::fclose(fp);
    if (n != u.v.size()) throw std::runtime_error("truncated snapshot");
    return u;
}

}  // namespace branchfront::pde
