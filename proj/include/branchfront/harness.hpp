#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "branchfront/barriers.hpp"
#include "branchfront/fronts.hpp"

namespace branchfront::harness {

struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BranchConfig {
    double angle_deg = 0.0;
    double width = 1.0;
    double length = 10.0;
    geom::Vec2 anchor;
};

struct ExperimentConfig {
    nl::CombustionNonlinearity f;
    double L = 1.0, h = 0.0625, blend = 0.0;
    std::vector<BranchConfig> branches;
    double cfl_safety = 0.9, record_every = 1.0;
    std::string scenario;
    nlohmann::json params;
    std::string output_dir = "out";
    uint64_t seed = 1;
    int threads = 0;
    nlohmann::json raw;
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
// dotted-path override, e.g. "stepper.record_every=0.5"
void apply_override(nlohmann::json& j, const std::string& kv);

std::shared_ptr<geom::BranchedDomain> build_from_config(const ExperimentConfig& c);

struct CheckResult {
    std::string name;
    bool pass = false;
    double value = 0.0, threshold = 0.0;
    std::string note;
};

struct RunArtifacts {
    std::string outdir;
    std::vector<std::pair<std::string, uint64_t>> files;
    std::vector<CheckResult> checks;
    nlohmann::json summary;
    bool all_pass = false;
    double wall_seconds = 0.0;
};

RunArtifacts run_experiment(const ExperimentConfig& cfg);

// built-in starter configs, one per scenario
nlohmann::json default_config(const std::string& scenario);

// cached (speed, profile) per nonlinearity
const wave::WaveProfile& profile_for(const nl::CombustionNonlinearity& f);

}  // namespace branchfront::harness
