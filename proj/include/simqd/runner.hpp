#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "simqd/config.hpp"
#include "simqd/dynamics.hpp"
#include "simqd/kernel.hpp"
#include "simqd/oracle.hpp"

namespace simqd {

/// Worker count: hardware concurrency, capped by SIMQD_THREADS when set to a positive integer.
std::size_t worker_count();

/// Runs body(0..n-1) on a bounded pool. Results must go to per-index slots; the first
/// exception by index is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Writes `header` then one row per sample; every value as %.16e, LF line endings.
void write_csv(const std::filesystem::path& path, const std::string& header,
               const std::vector<std::vector<double>>& columns);

struct KernelSummary {
    double temperature = 0.0;
    double plateau_re = 0.0;
    double polaron_rate = 0.0;
    double cutoff_frequency = 0.0;
    double re_at_1ps = 0.0;
    std::string table_file;
    std::string integrand_file;
};

/// Per temperature: kernel table (t_s, re_gamma, im_gamma) on [0, kernel.t_max] with
/// spacing kernel.step, and the real-part weight J(ω)(2n̄+1)/ω² on [0, ω_hi].
std::vector<KernelSummary> compute_kernel_summaries(const ScenarioConfig& cfg);
std::vector<KernelSummary> run_kernel(const ScenarioConfig& cfg, const std::filesystem::path& out);

struct ScenarioSummary {
    double temperature = 0.0;   // K; NaN for the kernel-off reference
    double duration = 0.0;
    CouplingRates rates;
    bool kernel_off = false;
    double max_p_excited = 0.0;
    double argmax_time = 0.0;
    double dt = 0.0;
    std::size_t n_steps = 0;
    std::string file;
};

/// Kernel tables shared by every dynamics point of one temperature.
struct KernelSet {
    std::vector<double> temperatures;
    std::vector<DephasingKernel> kernels;
    const DephasingKernel& at(double temperature) const;
};

KernelSet tabulate_kernels(const ScenarioConfig& cfg, const std::vector<double>& temperatures, double t_max);

/// Longest simulation span any of `durations` needs under cfg.grid.
double required_span(const ScenarioConfig& cfg, const std::vector<double>& durations, const CouplingRates& rates);

/// One dynamics point on the configured grid.
DynamicsResult evaluate_point(const ScenarioConfig& cfg, double duration, const CouplingRates& rates,
                              const DephasingKernel& kernel);

struct DynamicsRun {
    std::vector<ScenarioSummary> scenarios;
    std::vector<ScenarioSummary> references;
    std::vector<DynamicsResult> results;        // same order as scenarios
    std::vector<DynamicsResult> reference_results;
};

DynamicsRun compute_dynamics(const ScenarioConfig& cfg);
DynamicsRun run_dynamics(const ScenarioConfig& cfg, const std::filesystem::path& out);

struct EfficiencyPoint {
    double temperature = 0.0;
    double duration = 0.0;
    CouplingRates rates;
    double value = 0.0;         // max_t P(t)
    double argmax_time = 0.0;
};

struct EfficiencyOptimum {
    double temperature = 0.0;
    CouplingRates rates;
    TransferOptimum optimum;
};

struct EfficiencyMap {
    SweepAxis axis = SweepAxis::kDuration;
    std::vector<double> axis_values;
    std::vector<EfficiencyPoint> points;    // outer loop over the fixed parameters, inner over the axis
    std::vector<EfficiencyOptimum> optima;  // argmax duration per (T, rates) row
    std::string provenance;
};

EfficiencyMap compute_sweep(const ScenarioConfig& cfg, SweepAxis axis);
EfficiencyMap run_sweep(const ScenarioConfig& cfg, SweepAxis axis, const std::filesystem::path& out);

struct OracleCheck {
    std::string name;
    double max_deviation = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string detail;
};

struct OracleReport {
    std::uint64_t seed = kDefaultOracleSeed;
    std::vector<OracleCheck> checks;
    bool pass() const;
};

/// Fock vs closed form, λ = 0 and unitarity, Monte Carlo thermal average, and the
/// discretized-mode kernel against quadrature.
OracleReport compute_oracle(std::uint64_t seed);
OracleReport run_oracle(std::uint64_t seed, const std::filesystem::path& report);

}  // namespace simqd
