#pragma once

#include <complex>
#include <cstddef>
#include <string>

#include <Eigen/Core>

#include "simqd/kernel.hpp"

namespace simqd {

/// Weak-coherent input |Vac⟩ + ε|1-photon pulse⟩ with a Gaussian temporal envelope
/// ξ(t) = sqrt(2/(d√π)) exp(-2(t - t₀)²/d²), normalized so ∫ξ² dt = 1.
struct PulseSpec {
    cplx epsilon{1.0, 0.0};   // one-photon amplitude, |ε| << 1
    double duration{};        // d, s
    double arrival_time{};    // t₀, peak arrival at the dot, s
    double start_time{};      // t_i, s

    /// Pulse with t_i = t₀ - 6d.
    static PulseSpec gaussian(double duration, double arrival_time = 0.0, cplx epsilon = {1.0, 0.0});

    /// Throws DomainError unless d > 0 and t_i <= t₀ - 4d.
    void validate() const;
};

/// Radiative rates in s⁻¹ as they appear in exp(-(Γ_F1 + Γ_F2)t).
struct CouplingRates {
    double gamma_f1{};  // through the cavity
    double gamma_f2{};  // into non-cavity modes

    double total() const { return gamma_f1 + gamma_f2; }
    void validate() const;

    bool operator==(const CouplingRates&) const = default;
};

/// Uniform time grid t_n = t_start + n·dt, n = 0..n_steps.
struct SimGrid {
    double t_start{};
    double t_end{};
    std::size_t n_steps{};

    double dt() const { return (t_end - t_start) / static_cast<double>(n_steps); }
    double time(std::size_t n) const { return t_start + dt() * static_cast<double>(n); }
    Eigen::VectorXd times() const;

    /// Grid from t_i to t₀ + horizon·max(d, 1/Γ) with dt = min(d, 1/Γ)/divisor.
    static SimGrid for_pulse(const PulseSpec& pulse, const CouplingRates& rates, double divisor = 500.0,
                             double horizon = 4.0);

    /// Throws ConfigError when the grid is degenerate, starts after t₀ - 4d, or
    /// dt exceeds min(d, 1/Γ)/min_divisor.
    void validate(const PulseSpec& pulse, const CouplingRates& rates, double min_divisor = 200.0) const;
};

/// Reference frequency of the rotating frame the pulse is resonant in.
enum class DriveFrame {
    kPolaronShifted,  // pulse resonant with the polaron-shifted zero-phonon line
    kBareTransition,  // pulse resonant with ω₀; the polaron phase stays in the kernel
};

struct DynamicsOptions {
    DriveFrame frame = DriveFrame::kPolaronShifted;
};

/// ε-normalized exciton expectation values on a time grid.
struct DynamicsResult {
    Eigen::VectorXd time;
    Eigen::VectorXcd sigma_minus;   // ⟨σ₋⟩_th(t)/ε
    Eigen::VectorXd p_excited;      // ⟨|E⟩⟨E|⟩_th(t)/|ε|²
    double max_p_excited = 0.0;
    double argmax_time = 0.0;

    // Diagnostics.
    double dt = 0.0;
    std::size_t near_lags = 0;      // lags evaluated from the table; longer lags use the asymptote
    bool kernel_zero = false;
    DriveFrame frame = DriveFrame::kPolaronShifted;

    /// Un-normalized ⟨σ₋⟩ and ⟨|E⟩⟨E|⟩ for a given one-photon amplitude.
    Eigen::VectorXcd raw_sigma_minus(cplx epsilon) const { return sigma_minus * epsilon; }
    Eigen::VectorXd raw_p_excited(cplx epsilon) const { return p_excited * std::norm(epsilon); }
};

double pulse_envelope(double t, const PulseSpec& pulse);

/// Transversal and longitudinal components in one pass.
///
/// S(t) = -sqrt(2Γ_F1) ∫ e^{-Γ(t-t')} e^{-Γ_ph(t-t')} ξ(t') dt'
/// P(t) = 2Γ_F1 ∬ e^{-Γ(2t-t'-t'')} e^{-Γ_ph(t''-t')} ξ(t') ξ(t'') dt' dt''
///
/// Both use the trapezoid rule on the grid. P is accumulated strip by strip over the
/// triangle t' < t'' using Γ_ph(-τ) = conj Γ_ph(τ), so it is real by construction.
/// Lags beyond the kernel's settle time contribute through a running exponential sum,
/// making the cost O(N·M) with M the number of tabulated lags.
DynamicsResult simulate(const PulseSpec& pulse, const CouplingRates& rates, const DephasingKernel& kernel,
                        const SimGrid& grid, const DynamicsOptions& options = {});

Eigen::VectorXcd transversal(const PulseSpec& pulse, const CouplingRates& rates, const DephasingKernel& kernel,
                             const SimGrid& grid, const DynamicsOptions& options = {});

Eigen::VectorXd longitudinal(const PulseSpec& pulse, const CouplingRates& rates, const DephasingKernel& kernel,
                             const SimGrid& grid, const DynamicsOptions& options = {});

/// Photon-sector bookkeeping without phonons. Output fields are sampled at the dot
/// exit: out_F1 = ξ + sqrt(2Γ_F1)Φ_E, out_F2 = sqrt(2Γ_F2)Φ_E.
struct FieldPropagation {
    Eigen::VectorXd time;
    Eigen::VectorXcd excited;     // Φ_E(t)
    Eigen::VectorXcd out_f1;
    Eigen::VectorXcd out_f2;
    Eigen::VectorXd remaining_input;  // ∫_t^∞ ξ² : not yet arrived
    Eigen::VectorXd emitted_f1;       // ∫_{t_i}^t |out_F1|²
    Eigen::VectorXd emitted_f2;
    Eigen::VectorXd norm;             // |Φ_E|² + remaining + emitted_f1 + emitted_f2
};

/// Φ_E is advanced with an exact exponential step and 8-point Gauss-Legendre for the
/// source term; emitted norms use Simpson's rule per step on half-step samples.
FieldPropagation propagate_fields_nodephasing(const PulseSpec& pulse, const CouplingRates& rates,
                                              const SimGrid& grid);

/// Scalar search for the pulse duration maximizing max_t P(t).
struct DurationSearch {
    double d_min{};            // s
    double d_max{};            // s
    double rel_tol = 1e-4;     // on log d
    int max_iterations = 200;
    int scan_points = 24;      // fallback grid scan
    double grid_divisor = 500.0;
    double grid_horizon = 4.0;
};

struct TransferOptimum {
    double duration = 0.0;     // d*
    double efficiency = 0.0;   // P*
    int evaluations = 0;
    bool fallback_scan = false;
    std::string method;
};

/// Golden-section maximization of max_t P(t) over log d in [d_min, d_max]. If the
/// optimum is not bracketed (an endpoint beats the interior result) a log-spaced scan
/// locates the best cell and golden section refines inside it.
TransferOptimum max_transfer_efficiency(const PulseSpec& pulse_template, const CouplingRates& rates,
                                        const DephasingKernel& kernel, const DurationSearch& search,
                                        const DynamicsOptions& options = {});

/// max_t P(t) for one duration on the grid chosen by `search`'s divisor and horizon.
double peak_excitation(const PulseSpec& pulse_template, double duration, const CouplingRates& rates,
                       const DephasingKernel& kernel, const DurationSearch& search,
                       const DynamicsOptions& options = {});

}  // namespace simqd
