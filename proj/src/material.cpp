#include "simqd/material.hpp"

#include <cmath>
#include <iostream>
#include <limits>
#include <mutex>
#include <string>

#include "simqd/constants.hpp"
#include "simqd/errors.hpp"

namespace simqd {

using constants::hbar;
using constants::k_boltzmann;
using constants::pi;

double MaterialParams::cutoff_frequency() const { return 2.0 * pi * sound_velocity / localization_length; }

double MaterialParams::coupling_prefactor() const {
    const double dd = deformation_hole - deformation_electron;
    return dd * dd / (4.0 * pi * pi * mass_density * hbar * std::pow(sound_velocity, 5));
}

double MaterialParams::gaussian_width() const {
    const double wl = cutoff_frequency();
    return pi * pi / (wl * wl);
}

void MaterialParams::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw DomainError(std::string("MaterialParams: ") + what);
    };
    require(std::isfinite(mass_density) && mass_density > 0, "mass_density must be > 0");
    require(std::isfinite(sound_velocity) && sound_velocity > 0, "sound_velocity must be > 0");
    require(std::isfinite(localization_length) && localization_length > 0, "localization_length must be > 0");
    require(std::isfinite(deformation_electron) && std::isfinite(deformation_hole),
            "deformation potentials must be finite");
}

MaterialParams MaterialParams::gaas_default() {
    return MaterialParams{
        .mass_density = 5370.0,
        .sound_velocity = 5110.0,
        .deformation_electron = 7.0 * constants::electron_volt,
        .deformation_hole = -3.5 * constants::electron_volt,
        .localization_length = 5e-9,
    };
}

void ThermalEnv::validate() const {
    if (!(temperature >= 0.0) || !std::isfinite(temperature))
        throw DomainError("ThermalEnv: temperature must be >= 0, got " + std::to_string(temperature));
}

double spectral_density_deformation(double omega, const MaterialParams& m) {
    if (!(omega >= 0.0)) throw DomainError("spectral_density_deformation: omega must be >= 0");
    return m.coupling_prefactor() * omega * omega * omega * std::exp(-m.gaussian_width() * omega * omega);
}

double spectral_density_over_omega_sq(double omega, const MaterialParams& m) {
    if (!(omega >= 0.0)) throw DomainError("spectral_density_over_omega_sq: omega must be >= 0");
    return m.coupling_prefactor() * omega * std::exp(-m.gaussian_width() * omega * omega);
}

double form_factor(double q, double l) { return std::exp(-q * q * l * l / 4.0); }

double bose_occupation(double omega, const ThermalEnv& env) {
    env.validate();
    if (!(omega >= 0.0)) throw DomainError("bose_occupation: omega must be >= 0");
    if (env.temperature == 0.0) return 0.0;
    if (omega == 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / std::expm1(hbar * omega / (k_boltzmann * env.temperature));
}

double thermal_weight(double omega, const ThermalEnv& env) {
    if (env.temperature == 0.0) return omega;
    const double kt_over_hbar = k_boltzmann * env.temperature / hbar;
    const double x = omega / kt_over_hbar;
    // x coth(x/2) = 2 + x²/6 - ...
    if (x < 1e-6) return 2.0 * kt_over_hbar * (1.0 + x * x / 12.0);
    return omega * (1.0 + 2.0 / std::expm1(x));
}

double dephasing_integrand(double omega, const MaterialParams& m, const ThermalEnv& env) {
    if (!(omega >= 0.0)) throw DomainError("dephasing_integrand: omega must be >= 0");
    return m.coupling_prefactor() * std::exp(-m.gaussian_width() * omega * omega) * thermal_weight(omega, env);
}

double gamma_from_cavity(double g, double kappa) {
    if (!(kappa > 0.0)) throw DomainError("gamma_from_cavity: kappa must be > 0");
    if (kappa < 10.0 * std::abs(g))
        warn("gamma_from_cavity: kappa < 10 g, adiabatic elimination of the cavity is questionable");
    return g * g / kappa;
}

namespace {

std::mutex warning_mutex;
WarningHandler warning_handler = [](std::string_view msg) { std::cerr << "warning: " << msg << '\n'; };

}  // namespace

WarningHandler set_warning_handler(WarningHandler handler) {
    std::scoped_lock lock(warning_mutex);
    auto previous = std::move(warning_handler);
    warning_handler = std::move(handler);
    return previous;
}

void warn(std::string_view message) {
    std::scoped_lock lock(warning_mutex);
    if (warning_handler) warning_handler(message);
}

}  // namespace simqd
