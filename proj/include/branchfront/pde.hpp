#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "branchfront/geometry.hpp"
#include "branchfront/nonlinearity.hpp"
#include "branchfront/wave1d.hpp"

namespace branchfront::pde {

struct Field {
    std::shared_ptr<const geom::BranchedDomain> dom;
    std::vector<double> v;  // full box, 0 outside the mask
    double time = 0.0;
};

struct StepperConfig {
    double dt = 0.0;
    double cfl_safety = 0.9;
    double record_every = 1.0;
};

// dt = cfl_safety / (4/h^2 + L_f): keeps the explicit update monotone in
// every cell value, which is what the discrete comparison principle needs.
StepperConfig make_stepper_config(const geom::BranchedDomain& d,
                                  const nl::CombustionNonlinearity& f,
                                  double cfl_safety = 0.9,
                                  double record_every = 1.0);

Field make_field(std::shared_ptr<const geom::BranchedDomain> dom,
                 double value = 0.0, double time = 0.0);

/** One explicit Euler step of u_t = lap u + f(u) with mirrored ghost values
 *  across the staircase boundary (homogeneous Neumann, flux form). The
 *  OpenMP path splits over grid rows and is bitwise identical to the serial
 *  reference for any thread count. */
class Stepper {
  public:
    Stepper(std::shared_ptr<const geom::BranchedDomain> dom,
            nl::CombustionNonlinearity f, StepperConfig cfg);

    void step(Field& u) const;             // OpenMP rows
    void step_reference(Field& u) const;   // serial reference, same arithmetic
    const StepperConfig& config() const { return cfg_; }

    using Observer = std::function<void(const Field&)>;

    // Repeated stepping until time >= T; observers fire at the start, every
    // record_every (in whole steps), and at T.
    void run(Field& u, double T, const std::vector<Observer>& observers) const;

  private:
    void step_rows(Field& u, int j0, int j1, std::vector<double>& out) const;
    std::shared_ptr<const geom::BranchedDomain> dom_;
    nl::CombustionNonlinearity f_;
    StepperConfig cfg_;
    mutable std::vector<double> scratch_;
};

struct FieldHistory {
    std::vector<double> times;
    std::vector<Field> fields;  // only kept when recorded with keep_fields
};

FieldHistory run(Field u, const nl::CombustionNonlinearity& f,
                 const StepperConfig& cfg, double T, bool keep_fields = true);

// u = phi(x0 - s) with s the branch-i coordinate inside branch i and the
// negated geodesic distance to the branch mouth elsewhere.
Field init_planar_front(std::shared_ptr<const geom::BranchedDomain> dom,
                        const wave::WaveProfile& prof, int branch, double x0);

// indicator data: `level` on the branch-i slab l-R < s < l+R, 0 elsewhere
Field init_plateau(std::shared_ptr<const geom::BranchedDomain> dom, int branch,
                   double l, double R, double level);

// inverted variant: `level` on the slab, 1 elsewhere in Omega
Field init_plateau_inverted(std::shared_ptr<const geom::BranchedDomain> dom,
                            int branch, double l, double R, double level);

// snapshot: one JSON header line {time,nx,ny,h}, then row-major f64 LE
void write_snapshot(const Field& u, const std::string& path);
Field read_snapshot(std::shared_ptr<const geom::BranchedDomain> dom,
                    const std::string& path);

}  // namespace branchfront::pde
