#include <cstdio>
#include <fstream>

#include <CLI11.hpp>

#include "branchfront/harness.hpp"
#include "branchfront/io.hpp"

using namespace branchfront;

int main(int argc, char** argv) {
    CLI::App app{"branchfront: combustion fronts in branched cylindrical domains"};
    app.require_subcommand(1);

    std::string config_path, out_dir, csv_path;
    std::vector<std::string> overrides;
    int threads = 0;

    auto* run = app.add_subcommand("run", "run an experiment from a config file");
    run->add_option("config", config_path, "config file (JSON)")->required();
    run->add_option("--out", out_dir, "output directory override");
    run->add_option("--threads", threads, "worker threads (0 = default)");
    run->add_option("--override", overrides, "dotted-path config overrides key=value");

    auto* check = app.add_subcommand("check", "validate a config file");
    check->add_option("config", config_path, "config file (JSON)")->required();

    double theta = 0.3, amplitude = 1.0, exponent = 2.0;
    auto* wavecmd = app.add_subcommand("wave", "planar front speed and decay table");
    wavecmd->add_option("--theta", theta, "ignition temperature");
    wavecmd->add_option("--amplitude", amplitude, "reaction amplitude");
    wavecmd->add_option("--exponent", exponent, "smoothness power at theta");
    wavecmd->add_option("--csv", csv_path, "also export the sampled profile");

    std::string scen;
    auto* cfgcmd = app.add_subcommand("config", "print a starter config for a scenario");
    cfgcmd->add_option("scenario", scen, "scenario name")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            std::ifstream in(config_path);
            if (!in) {
                std::fprintf(stderr, "error: cannot open %s\n", config_path.c_str());
                return 2;
            }
            nlohmann::json j;
            try {
                in >> j;
            } catch (const std::exception& e) {
                std::fprintf(stderr, "error: %s\n", e.what());
                return 2;
            }
            for (const auto& ov : overrides) harness::apply_override(j, ov);
            if (!out_dir.empty()) j["output_dir"] = out_dir;
            if (threads > 0) j["threads"] = threads;
            auto cfg = harness::parse_config(j);
            auto art = harness::run_experiment(cfg);
            for (const auto& c : art.checks)
                std::printf("%s  %s (value %.6g vs %.6g)\n", c.pass ? "PASS" : "FAIL",
                            c.name.c_str(), c.value, c.threshold);
            std::printf("artifacts: %s (%.1f s)\n", art.outdir.c_str(), art.wall_seconds);
            if (!art.all_pass) {
                for (const auto& c : art.checks)
                    if (!c.pass)
                        std::fprintf(stderr, "failed check: %s\n", c.name.c_str());
                return 1;
            }
            return 0;
        }
        if (check->parsed()) {
            harness::load_config(config_path);
            std::printf("config OK\n");
            return 0;
        }
        if (wavecmd->parsed()) {
            nl::CombustionNonlinearity f{theta, amplitude, exponent};
            const double c = wave::shoot_speed(f);
            auto prof = wave::profile_from_speed(f, c);
            std::printf("c_f          = %.10g\n", c);
            std::printf("Lambda(root) = %.10g\n", prof.Lambda);
            std::printf("Lambda(fit)  = %.10g\n", prof.Lambda_minus);
            std::printf("right rate   = %.10g (expected c_f)\n", c);
            std::printf("K1 = %.6g  K2 = %.6g  K3 = %.6g  K4 = %.6g\n", prof.K1,
                        prof.K2, prof.K3, prof.K4);
            std::printf("xi      phi            -phi'/phi\n");
            for (double xi = -10.0; xi <= 10.0 + 1e-9; xi += 2.0)
                std::printf("%6.1f  %-13.6g  %.6g\n", xi, prof.eval(xi),
                            -prof.eval_dphi(xi) / prof.eval(xi));
            if (!csv_path.empty()) prof.export_csv(csv_path);
            return 0;
        }
        if (cfgcmd->parsed()) {
            std::printf("%s\n", harness::default_config(scen).dump(2).c_str());
            return 0;
        }
    } catch (const harness::SchemaError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
