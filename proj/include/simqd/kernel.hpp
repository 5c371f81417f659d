#pragma once

#include <complex>
#include <cstddef>
#include <optional>

#include <Eigen/Core>

#include "simqd/material.hpp"
#include "simqd/quadrature.hpp"

namespace simqd {

using cplx = std::complex<double>;

/// Upper frequency limit of the kernel integrals: the Gaussian factor
/// exp(-π²ω²/ω_l²) drops below 1e-16 there (≈ 1.93 ω_l).
double integration_limit(const MaterialParams& m);

/// Re Γ_ph(t) = ∫ J(ω)/(2ω²)(1 - cos ωt)(4n̄_ω + 2) dω. Throws NumericError if the
/// quadrature misses `quad.rel_tol`.
double kernel_real(double t, const MaterialParams& m, const ThermalEnv& env, const QuadratureSpec& quad = {});

/// Im Γ_ph(t) = ∫ J(ω)/ω² (sin ωt - ωt) dω. Temperature independent.
double kernel_imag(double t, const MaterialParams& m, const ThermalEnv& env, const QuadratureSpec& quad = {});

/// Both parts from one complex-valued quadrature pass.
cplx kernel_value(double t, const MaterialParams& m, const ThermalEnv& env, const QuadratureSpec& quad = {});

/// t → ∞ limit of Re Γ_ph: ∫ J(ω)/(2ω²)(4n̄_ω + 2) dω.
double plateau_real(const MaterialParams& m, const ThermalEnv& env, const QuadratureSpec& quad = {});

/// Polaron shift rate Δ = ∫ J(ω)/ω dω, the slope of the t-linear part of Im Γ_ph.
double polaron_rate(const MaterialParams& m, const QuadratureSpec& quad = {});

/// ∫ J(ω)/ω² dω, the bound on |Im Γ_ph(t) + Δt|.
double sine_part_bound(const MaterialParams& m, const QuadratureSpec& quad = {});

/// Frequency beyond which J(ω)/(2ω²)(4n̄_ω+2) stays below `fraction` of its peak.
/// The default half-maximum edge reads off the visible cut-off of the integrand.
double cutoff_frequency(const MaterialParams& m, const ThermalEnv& env, double fraction = 0.5);

struct KernelProvenance {
    MaterialParams material;
    ThermalEnv env;
    QuadratureSpec quad;
};

/// Tabulated complex dephasing exponent Γ_ph(t), t ∈ [0, t_max].
///
/// Nodes are sorted, start at t = 0 and are linearly interpolated. For
/// settle_time < t <= t_max the kernel is represented exactly by its asymptote
/// plateau_re - iΔt; the residual there is below `settle_residual`.
struct DephasingKernel {
    Eigen::VectorXd times;   // s
    Eigen::VectorXcd values;
    double t_max = 0.0;
    double settle_time = 0.0;     // last node; asymptote beyond
    double settle_residual = 0.0;
    double plateau_re = 0.0;
    double polaron_rate = 0.0;    // rad/s
    bool identically_zero = false;
    std::optional<KernelProvenance> provenance;

    /// Value of the asymptote plateau_re - iΔt.
    cplx asymptote(double t) const { return {plateau_re, -polaron_rate * t}; }
};

/// Uniform table with n_points nodes on [0, t_max], each node by direct quadrature.
DephasingKernel tabulate_kernel(const MaterialParams& m, const ThermalEnv& env, double t_max, std::size_t n_points,
                                const QuadratureSpec& quad = {});

/// Node placement for long horizons: a fine uniform segment covering the rise of
/// Re Γ_ph, geometrically growing steps after it, and the exact asymptote once the
/// oscillatory remainder has settled below `settle_tol`.
struct TabulationPolicy {
    double fine_step = 2e-15;     // s
    double fine_span = 5e-12;     // s
    double growth = 1.02;         // coarse step = (growth - 1) * t
    double settle_tol = 1e-7;

    bool operator==(const TabulationPolicy&) const = default;
};

DephasingKernel tabulate_kernel_adaptive(const MaterialParams& m, const ThermalEnv& env, double t_max,
                                         const QuadratureSpec& quad = {}, const TabulationPolicy& policy = {});

/// Γ_ph ≡ 0 on [0, t_max]: the dephasing-free reference.
DephasingKernel zero_kernel(double t_max);

/// Interpolated Γ_ph(τ); τ < 0 returns conj(Γ_ph(-τ)). Throws RangeError for |τ| > t_max.
cplx kernel_at(const DephasingKernel& kernel, double tau);

}  // namespace simqd
