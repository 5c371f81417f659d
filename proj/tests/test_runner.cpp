#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <unistd.h>

#include "doctest.h"

#include "simqd/errors.hpp"
#include "simqd/runner.hpp"

using namespace simqd;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("simqd_runner_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

ScenarioConfig load(const char* name) { return parse_config(std::string(SIMQD_CONFIG_DIR "/") + name + ".json"); }

}  // namespace

TEST_CASE("worker pool") {
    ::setenv("SIMQD_THREADS", "1", 1);
    CHECK(worker_count() == 1);
    ::setenv("SIMQD_THREADS", "junk", 1);
    CHECK(worker_count() >= 1);
    ::unsetenv("SIMQD_THREADS");

    std::vector<int> out(100, 0);
    parallel_for(out.size(), [&](std::size_t i) { out[i] = static_cast<int>(i * i); });
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == static_cast<int>(i * i));

    CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) {
                        if (i == 7) throw ConfigError("x", "boom");
                    }),
                    ConfigError);
}

TEST_CASE("csv format") {
    TempDir tmp;
    write_csv(tmp.path / "a.csv", "x,y", {{1.0, 0.1}, {-2.5e-12, 3.0}});
    CHECK(slurp(tmp.path / "a.csv") ==
          "x,y\n1.0000000000000000e+00,-2.4999999999999998e-12\n1.0000000000000001e-01,3.0000000000000000e+00\n");
}

TEST_CASE("kernel run") {
    TempDir tmp;
    auto cfg = load("kernel_three_temperatures");
    cfg.kernel.step = 50e-15;  // keep the test short
    const auto s = run_kernel(cfg, tmp.path / "k");
    REQUIRE(s.size() == 3);
    CHECK(s[0].re_at_1ps < s[1].re_at_1ps);
    CHECK(s[1].re_at_1ps < s[2].re_at_1ps);
    for (const auto& k : s) {
        CHECK(fs::exists(tmp.path / "k" / k.table_file));
        CHECK(fs::exists(tmp.path / "k" / k.integrand_file));
    }
    CHECK(fs::exists(tmp.path / "k" / "kernel_summary.json"));
    const std::string table = slurp(tmp.path / "k" / s[0].table_file);
    CHECK(table.rfind("t_s,re_gamma,im_gamma\n", 0) == 0);
    CHECK(table.find('\r') == std::string::npos);
    CHECK(std::count(table.begin(), table.end(), '\n') == 402);

    ::setenv("SIMQD_THREADS", "1", 1);
    run_kernel(cfg, tmp.path / "k2");
    ::unsetenv("SIMQD_THREADS");
    for (const auto& k : s) {
        CHECK(slurp(tmp.path / "k" / k.table_file) == slurp(tmp.path / "k2" / k.table_file));
        CHECK(slurp(tmp.path / "k" / k.integrand_file) == slurp(tmp.path / "k2" / k.integrand_file));
    }
    CHECK(slurp(tmp.path / "k" / "kernel_summary.json") == slurp(tmp.path / "k2" / "kernel_summary.json"));
}

TEST_CASE("dynamics run with reference curve") {
    TempDir tmp;
    const auto cfg = load("transversal_1ps");
    const auto run = run_dynamics(cfg, tmp.path);
    REQUIRE(run.scenarios.size() == 3);
    REQUIRE(run.references.size() == 1);
    for (const auto& s : run.scenarios) CHECK(fs::exists(tmp.path / s.file));
    CHECK(fs::exists(tmp.path / run.references[0].file));
    CHECK(run.references[0].kernel_off);
    const std::string csv = slurp(tmp.path / run.scenarios[0].file);
    CHECK(csv.rfind("time_s,re_sigma,im_sigma,abs_sigma,p_excited\n", 0) == 0);

    // dephasing lowers the transversal component, hottest lowest
    const auto& cold = run.results[0].sigma_minus;
    const auto& hot = run.results[2].sigma_minus;
    const auto& off = run.reference_results[0].sigma_minus;
    for (Eigen::Index i = 0; i < cold.size(); i += 50) {
        if (run.results[0].time[i] <= 0.0) continue;
        CHECK(std::abs(hot[i]) <= std::abs(cold[i]));
        CHECK(std::abs(cold[i]) <= std::abs(off[i]));
    }
}

TEST_CASE("no-loss efficiency summary") {
    TempDir tmp;
    const auto run = run_dynamics(load("efficiency_no_loss"), tmp.path);
    REQUIRE(run.scenarios.size() == 1);
    CHECK(std::abs(run.scenarios[0].max_p_excited - 0.75) < 0.05);
    CHECK(run.references[0].max_p_excited > run.scenarios[0].max_p_excited);
    CHECK(fs::exists(tmp.path / "dynamics_summary.json"));
}

TEST_CASE("zero-length grid is a config error") {
    auto cfg = load("minimal");
    cfg.grid.n_steps = 0;
    CHECK_THROWS_AS(compute_dynamics(cfg), ConfigError);
    cfg.grid.n_steps.reset();
    cfg.grid.t_end = -10e-12;
    CHECK_THROWS_AS(compute_dynamics(cfg), ConfigError);
}

TEST_CASE("duration sweep without dephasing") {
    TempDir tmp;
    const auto cfg = load("sweep_duration_no_dephasing");
    const auto map = run_sweep(cfg, SweepAxis::kDuration, tmp.path);
    REQUIRE(map.points.size() == 12);
    double best = 0.0;
    for (std::size_t i = 0; i < map.points.size(); ++i) {
        CHECK(map.points[i].value >= 0.0);
        CHECK(map.points[i].value <= 1.0);
        if (i) CHECK(map.points[i].duration > map.points[i - 1].duration);
        best = std::max(best, map.points[i].value);
    }
    CHECK(std::abs(best - 0.80) < 0.02);
    REQUIRE(map.optima.size() == 1);
    CHECK(map.optima[0].optimum.efficiency >= best - 1e-9);
    CHECK(map.provenance == provenance_hash(cfg));
    CHECK(fs::exists(tmp.path / "sweep_duration.csv"));
    CHECK(fs::exists(tmp.path / "sweep_duration.json"));
}

TEST_CASE("temperature sweep is non-increasing") {
    const auto map = compute_sweep(load("sweep_temperature"), SweepAxis::kTemperature);
    REQUIRE(map.points.size() == 5);
    for (std::size_t i = 1; i < map.points.size(); ++i) {
        CHECK(map.points[i].temperature > map.points[i - 1].temperature);
        CHECK(map.points[i].value <= map.points[i - 1].value);
    }
    CHECK(map.optima.empty());
}

TEST_CASE("rate-ratio sweep") {
    auto cfg = load("sweep_duration_no_dephasing");
    cfg.sweep = SweepSettings{};
    cfg.sweep.axis = SweepAxis::kRateRatio;
    cfg.sweep.values = {0.0, 0.5, 1.0};
    cfg.sweep.optimize = false;
    const auto map = compute_sweep(cfg, SweepAxis::kRateRatio);
    REQUIRE(map.points.size() == 3);
    CHECK(map.points[1].rates.gamma_f2 == 0.5e9);
    CHECK(map.points[0].value > map.points[1].value);
    CHECK(map.points[1].value > map.points[2].value);
}

TEST_CASE("single-point sweep equals the dynamics summary") {
    auto cfg = load("efficiency_500ps");
    cfg.temperatures = {4.0};
    cfg.sweep.optimize = false;
    const auto run = compute_dynamics(cfg);
    const auto map = compute_sweep(cfg, SweepAxis::kDuration);
    REQUIRE(map.points.size() == 1);
    CHECK(std::abs(map.points[0].value - run.scenarios[0].max_p_excited) <= 1e-12);
}

TEST_CASE("oracle report") {
    TempDir tmp;
    const auto report = run_oracle(kDefaultOracleSeed, tmp.path / "sub" / "oracle.json");
    CHECK(report.pass());
    CHECK(report.checks.size() == 5);
    CHECK(fs::exists(tmp.path / "sub" / "oracle.json"));
    CHECK(slurp(tmp.path / "sub" / "oracle.json").find("\"pass\": true") != std::string::npos);
}
