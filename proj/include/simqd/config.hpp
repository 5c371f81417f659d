#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "simqd/dynamics.hpp"
#include "simqd/kernel.hpp"
#include "simqd/material.hpp"
#include "simqd/quadrature.hpp"

namespace simqd {

enum class UnitKind { kTime, kRate, kEnergy, kDensity, kVelocity, kLength, kTemperature };

/// Parses "0.5ns", "1 GHz", "7.0eV" into SI. Throws ConfigError(path) on a bad
/// number or a unit tag not valid for `kind`. Temperatures may also be bare numbers (K).
double parse_quantity(std::string_view text, UnitKind kind, const std::string& path);

/// Grid choice for every dynamics point. Unset fields fall back to the pulse-derived
/// defaults of SimGrid::for_pulse.
struct GridSettings {
    std::optional<double> dt;        // s
    std::optional<double> t_start;   // s, relative to pulse arrival t₀ = 0
    std::optional<double> t_end;     // s
    std::optional<std::size_t> n_steps;
    double divisor = 500.0;
    double horizon = 4.0;
    double min_divisor = 200.0;

    bool operator==(const GridSettings&) const = default;
};

struct KernelDump {
    double t_max = 20e-12;          // s
    double step = 10e-15;           // s
    std::size_t integrand_points = 400;
    double cutoff_fraction = 0.5;
    TabulationPolicy policy;

    bool operator==(const KernelDump&) const = default;
};

enum class SweepAxis { kDuration, kTemperature, kRateRatio };

std::string_view to_string(SweepAxis axis);
std::optional<SweepAxis> parse_axis(std::string_view name);

struct SweepSettings {
    std::optional<SweepAxis> axis;
    std::vector<double> values;     // SI (s, K) or Γ_F2/Γ_F1
    bool optimize = true;           // per-row duration optimizer diagnostics
    std::optional<double> d_min;
    std::optional<double> d_max;
    double rel_tol = 1e-4;

    bool operator==(const SweepSettings&) const = default;
};

struct ScenarioConfig {
    std::string profile = "GaAs-default";
    MaterialParams material = MaterialParams::gaas_default();
    std::vector<double> temperatures;   // K
    std::vector<double> durations;      // s
    CouplingRates rates;                // s⁻¹
    bool dephasing = true;              // false: kernel ≡ 0 everywhere
    bool reference = true;              // also emit the kernel-off curve
    DriveFrame frame = DriveFrame::kPolaronShifted;
    GridSettings grid;
    QuadratureSpec quadrature;
    KernelDump kernel;
    SweepSettings sweep;
    std::uint64_t seed = 20240607;
    std::optional<std::filesystem::path> output_dir;

    bool operator==(const ScenarioConfig&) const = default;
};

ScenarioConfig parse_config(const std::filesystem::path& path);
ScenarioConfig parse_config_json(std::string_view text);

/// Canonical JSON with unit-tagged SI strings. parse_config_json(serialize_config(c)) == c.
std::string serialize_config(const ScenarioConfig& cfg);

/// FNV-1a of the canonical serialization, 16 hex digits.
std::string provenance_hash(const ScenarioConfig& cfg);

/// Grid for one (pulse, rates) point; throws ConfigError for degenerate or too coarse grids.
SimGrid resolve_grid(const GridSettings& settings, const PulseSpec& pulse, const CouplingRates& rates);

}  // namespace simqd
