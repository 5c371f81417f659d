// simqd: kernel tables, exciton dynamics, efficiency sweeps and oracle checks.
//
//   simqd kernel   --config c.json --out dir/
//   simqd dynamics --config c.json --out dir/
//   simqd sweep    --config c.json --axis duration --out dir/
//   simqd oracle   --report r.json [--seed N]
//
// Exit codes: 0 success, 1 oracle check failed or other error, 2 config error,
// 3 numeric-convergence failure. SIMQD_THREADS caps the worker pool.

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "simqd/config.hpp"
#include "simqd/errors.hpp"
#include "simqd/runner.hpp"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

std::filesystem::path output_dir(const simqd::ScenarioConfig& cfg, const std::string& flag) {
    if (!flag.empty()) return flag;
    if (cfg.output_dir) return *cfg.output_dir;
    throw simqd::ConfigError("output.dir", "no output directory: pass --out or set output.dir");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Phonon-dephased quantum-dot exciton driven by a one-photon pulse"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string axis_name;
    std::string report_path;
    std::uint64_t seed = simqd::kDefaultOracleSeed;

    auto* kernel = app.add_subcommand("kernel", "Tabulate the dephasing kernel per temperature");
    kernel->add_option("--config", config_path, "scenario JSON")->required();
    kernel->add_option("--out", out_dir, "output directory");

    auto* dynamics = app.add_subcommand("dynamics", "Transversal and longitudinal exciton components");
    dynamics->add_option("--config", config_path, "scenario JSON")->required();
    dynamics->add_option("--out", out_dir, "output directory");

    auto* sweep = app.add_subcommand("sweep", "Efficiency map along one axis");
    sweep->add_option("--config", config_path, "scenario JSON")->required();
    sweep->add_option("--axis", axis_name, "duration, temperature or rate_ratio");
    sweep->add_option("--out", out_dir, "output directory");

    auto* oracle = app.add_subcommand("oracle", "Phonon-algebra oracle checks");
    oracle->add_option("--report", report_path, "report JSON")->required();
    oracle->add_option("--seed", seed, "random-sample seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (oracle->parsed()) {
            const auto report = simqd::run_oracle(seed, report_path);
            for (const auto& c : report.checks)
                std::printf("%-34s %s  max deviation %.3e (tolerance %.1e)\n", c.name.c_str(), c.pass ? "pass" : "FAIL",
                            c.max_deviation, c.tolerance);
            return report.pass() ? 0 : kExitFailure;
        }

        const auto cfg = simqd::parse_config(config_path);
        const auto out = output_dir(cfg, out_dir);
        if (kernel->parsed()) {
            for (const auto& s : simqd::run_kernel(cfg, out))
                std::printf("T = %g K  plateau %.6f  cutoff %.4e rad/s  -> %s\n", s.temperature, s.plateau_re,
                            s.cutoff_frequency, s.table_file.c_str());
        } else if (dynamics->parsed()) {
            const auto run = simqd::run_dynamics(cfg, out);
            for (const auto& s : run.scenarios)
                std::printf("T = %g K  d = %g s  max P = %.6f\n", s.temperature, s.duration, s.max_p_excited);
            for (const auto& s : run.references)
                std::printf("kernel off  d = %g s  max P = %.6f\n", s.duration, s.max_p_excited);
        } else if (sweep->parsed()) {
            std::optional<simqd::SweepAxis> axis = cfg.sweep.axis;
            if (!axis_name.empty()) {
                axis = simqd::parse_axis(axis_name);
                if (!axis) throw simqd::ConfigError("--axis", "expected duration, temperature or rate_ratio");
            }
            if (!axis) throw simqd::ConfigError("sweep.axis", "no sweep axis: pass --axis or set sweep.axis");
            const auto map = simqd::run_sweep(cfg, *axis, out);
            for (const auto& o : map.optima)
                std::printf("T = %g K  Gamma_F2/Gamma_F1 = %g  d* = %.6e s  P* = %.6f (%s)\n", o.temperature,
                            o.rates.gamma_f2 / o.rates.gamma_f1, o.optimum.duration, o.optimum.efficiency,
                            o.optimum.method.c_str());
            std::printf("%zu points -> %s\n", map.points.size(), out.c_str());
        }
        return 0;
    } catch (const simqd::ConfigError& e) {
        std::fprintf(stderr, "simqd: config error: %s\n", e.what());
        return kExitConfig;
    } catch (const simqd::NumericError& e) {
        std::fprintf(stderr, "simqd: numeric failure: %s\n", e.what());
        return kExitNumeric;
    } catch (const simqd::PrecisionError& e) {
        std::fprintf(stderr, "simqd: numeric failure: %s\n", e.what());
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "simqd: %s\n", e.what());
        return kExitFailure;
    }
}
