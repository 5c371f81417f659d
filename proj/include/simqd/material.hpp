#pragma once

#include <functional>
#include <string>
#include <string_view>

namespace simqd {

/// Dot and host-crystal constants entering the deformation-potential spectral density.
/// All fields are SI; deformation potentials are stored in joules.
struct MaterialParams {
    double mass_density{};          // kg/m^3
    double sound_velocity{};        // m/s
    double deformation_electron{};  // J
    double deformation_hole{};      // J
    double localization_length{};   // m, shared by electron and hole

    /// Gaussian cut-off ω_l = 2πu/l of the form factor, in rad/s.
    double cutoff_frequency() const;

    /// Prefactor (D_h - D_e)^2 / (4π² ρ ħ u⁵) so that J(ω) = A ω³ exp(-π²ω²/ω_l²). Units s².
    double coupling_prefactor() const;

    /// π²/ω_l², the width parameter of the Gaussian factor. Units s².
    double gaussian_width() const;

    /// Throws DomainError when ρ, u or l is not strictly positive or any field is non-finite.
    void validate() const;

    /// Literature-typical GaAs values with l = 5 nm (profile "GaAs-default").
    static MaterialParams gaas_default();

    friend bool operator==(const MaterialParams&, const MaterialParams&) = default;
};

struct ThermalEnv {
    double temperature{};  // K

    void validate() const;

    friend bool operator==(const ThermalEnv&, const ThermalEnv&) = default;
};

/// J_D(ω) for deformation coupling to LA phonons. Throws DomainError for ω < 0.
double spectral_density_deformation(double omega, const MaterialParams& m);

/// J_D(ω)/ω², regular at the origin.
double spectral_density_over_omega_sq(double omega, const MaterialParams& m);

/// Fourier transform of the Gaussian ground-state density, exp(-q²l²/4).
double form_factor(double q, double l);

/// n̄(ω) = 1/(exp(ħω/k_BT) - 1). Zero for T = 0; +inf for ω = 0 at T > 0.
double bose_occupation(double omega, const ThermalEnv& env);

/// ω·(2n̄(ω) + 1) = ω coth(ħω/2k_BT), finite at ω = 0 (series branch for ħω/k_BT < 1e-6).
double thermal_weight(double omega, const ThermalEnv& env);

/// Integrand of the real dephasing exponent without the (1 - cos ωt) factor:
/// J_D(ω)/(2ω²)·(4n̄_ω + 2). Its integral over ω is the long-time plateau.
double dephasing_integrand(double omega, const MaterialParams& m, const ThermalEnv& env);

/// Effective radiative rate Γ_F1 = g²/κ of a one-sided cavity in the bad-cavity limit.
/// Throws DomainError for κ ≤ 0; reports a warning when κ < 10 g.
double gamma_from_cavity(double g, double kappa);

using WarningHandler = std::function<void(std::string_view)>;

/// Installs the sink for non-fatal warnings (defaults to stderr). Returns the previous handler.
WarningHandler set_warning_handler(WarningHandler handler);
void warn(std::string_view message);

}  // namespace simqd
