#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "simqd/material.hpp"

namespace simqd {

using cplx = std::complex<double>;

/// One phonon mode coupled to the exciton projector: ħω P†P + ħλ(P + P†).
struct PhononMode {
    double omega{};   // rad/s, > 0
    double lambda{};  // rad/s
};

/// A phonon mode prepared in the coherent state |α⟩.
struct SingleModeSpec {
    PhononMode mode;
    cplx alpha{};
};

/// Modes sampled from a spectral density: ω_j = jΔω, λ_j = sqrt(J(ω_j)Δω), j = 1..M.
struct ModeDiscretization {
    Eigen::VectorXd omega;
    Eigen::VectorXd lambda;
    double d_omega = 0.0;
};

/// Displaced-oscillator product formula for
/// ⟨α| e^{iωN(t-t_i)} e^{-i(ωN + λ(P+P†))(t-t')} e^{-iωN(t'-t_i)} |α⟩,
/// N = P†P, with x = λ/ω:
///   exp[-x(e^{iω(t-t_i)} - e^{iω(t'-t_i)})α* - x(e^{-iω(t'-t_i)} - e^{-iω(t-t_i)})α
///       - x² + i x² ω(t-t') + x² e^{-iω(t-t')}]
/// The last exponent carries a plus sign; the value is exactly 1 at t = t'.
cplx closed_form_overlap(const SingleModeSpec& s, double t, double t_prime, double t_i);

struct FockOverlap {
    cplx value{};
    int n_max = 0;
    double coherent_deficit = 0.0;   // norm lost by truncating the widest coherent state involved
    double evolved_norm = 0.0;       // ‖e^{-iHτ} e^{-iωN(t'-t_i)}|α⟩_trunc‖
};

/// Same matrix element evaluated in the Fock basis {|0⟩..|n_max⟩}: the generator
/// ωN + λ(P + P†) is diagonalized with a dense symmetric eigensolver and the three
/// exponentials are applied to the truncated coherent vector.
/// Throws PrecisionError when the truncated |α⟩ (or its displacement by 2λ/ω) loses
/// more than `max_deficit` of its norm.
FockOverlap fock_overlap(const SingleModeSpec& s, double t, double t_prime, double t_i, int n_max = 60,
                         double max_deficit = 1e-10);

/// Doubles n_max from `n_start` until the truncation deficit is below `max_deficit`.
FockOverlap fock_overlap_auto(const SingleModeSpec& s, double t, double t_prime, double t_i, int n_start = 60,
                              double max_deficit = 1e-10, int n_limit = 1920);

/// Σ_{n > n_max} |⟨n|α⟩|².
double coherent_truncation_deficit(double alpha_abs, int n_max);

/// Single-mode dephasing exponent x²[(1 - cos ωτ)(2n̄+1) + i(sin ωτ - ωτ)], x = λ/ω.
cplx mode_gamma(const PhononMode& mode, const ThermalEnv& env, double tau);

/// Gaussian average of closed_form_overlap over α ~ CN(0, n̄_ω): exp(-mode_gamma(t - t')).
cplx thermal_average_closed_form(const PhononMode& mode, const ThermalEnv& env, double t, double t_prime);

struct MonteCarloEstimate {
    cplx mean{};
    double std_error = 0.0;
    std::size_t samples = 0;
};

/// Sample mean of closed_form_overlap over the thermal coherent-state distribution
/// P(α) = exp(-|α|²/n̄)/(π n̄).
MonteCarloEstimate thermal_average_monte_carlo(const PhononMode& mode, const ThermalEnv& env, double t,
                                               double t_prime, double t_i, std::size_t samples, std::uint64_t seed);

/// One sampled overlap evaluation point with t ≥ t' ≥ t_i.
struct OverlapSample {
    SingleModeSpec spec;
    double t = 0.0;
    double t_prime = 0.0;
    double t_i = 0.0;
};

inline constexpr std::uint64_t kDefaultOracleSeed = 20240607;

/// ω ∈ [0.5, 5]e12 rad/s, λ/ω ∈ [0, 0.3], α uniform in the disk |α| ≤ 2,
/// t_i = 0, t' ∈ [0, 5 ps], t - t' ∈ [0, 5 ps]. Uniform variates are taken from the top
/// 53 bits of mt19937_64, so a seed gives the same sample on every platform.
std::vector<OverlapSample> random_overlap_samples(std::size_t count, std::uint64_t seed = kDefaultOracleSeed);

/// M modes on (0, omega_max] from the deformation-potential spectral density.
ModeDiscretization discretize_modes(const MaterialParams& m, std::size_t modes, double omega_max);

/// Discrete Γ_ph(τ) = -Σ_j log thermal_average_closed_form(mode j, τ).
cplx discretized_gamma(const ModeDiscretization& md, const ThermalEnv& env, double tau);

}  // namespace simqd
