#include "simqd/oracle.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "simqd/constants.hpp"
#include "simqd/errors.hpp"

namespace simqd {

namespace {

constexpr cplx I{0.0, 1.0};

void check_mode(const PhononMode& mode) {
    if (!(mode.omega > 0.0)) throw DomainError("phonon mode: omega must be > 0");
}

}  // namespace

cplx closed_form_overlap(const SingleModeSpec& s, double t, double t_prime, double t_i) {
    check_mode(s.mode);
    const double w = s.mode.omega;
    const double x = s.mode.lambda / w;
    const double tau = t - t_prime;
    const cplx e1 = std::exp(I * (w * (t - t_i)));
    const cplx e2 = std::exp(I * (w * (t_prime - t_i)));
    const cplx exponent = -x * (e1 - e2) * std::conj(s.alpha) - x * (std::conj(e2) - std::conj(e1)) * s.alpha -
                          x * x + I * (x * x * w * tau) + x * x * std::exp(-I * (w * tau));
    return std::exp(exponent);
}

double coherent_truncation_deficit(double alpha_abs, int n_max) {
    if (alpha_abs == 0.0) return 0.0;
    const double log_a2 = 2.0 * std::log(alpha_abs);
    const double a2 = alpha_abs * alpha_abs;
    double sum = 0.0;
    for (int n = n_max + 1; n < n_max + 100000; ++n) {
        const double term = std::exp(-a2 + n * log_a2 - std::lgamma(n + 1.0));
        sum += term;
        if (n > a2 && term < 1e-20 * sum) break;
        if (sum == 0.0 && n > a2) break;
    }
    return sum;
}

FockOverlap fock_overlap(const SingleModeSpec& s, double t, double t_prime, double t_i, int n_max,
                         double max_deficit) {
    check_mode(s.mode);
    if (n_max < 1) throw DomainError("fock_overlap: n_max must be >= 1");
    const double w = s.mode.omega;
    const double x = s.mode.lambda / w;

    FockOverlap out;
    out.n_max = n_max;
    out.coherent_deficit = coherent_truncation_deficit(std::abs(s.alpha) + 2.0 * std::abs(x), n_max);
    if (out.coherent_deficit > max_deficit) {
        std::ostringstream os;
        os << "fock_overlap: n_max = " << n_max << " truncates the coherent state by " << out.coherent_deficit;
        throw PrecisionError(os.str(), out.coherent_deficit);
    }

    const int dim = n_max + 1;
    // Generator in units of ω: N + x(P + P†), real symmetric tridiagonal.
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (int n = 0; n < dim; ++n) h(n, n) = n;
    for (int n = 1; n < dim; ++n) h(n - 1, n) = h(n, n - 1) = x * std::sqrt(static_cast<double>(n));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);

    Eigen::VectorXcd coherent(dim);
    coherent[0] = std::exp(-0.5 * std::norm(s.alpha));
    for (int n = 1; n < dim; ++n) coherent[n] = coherent[n - 1] * s.alpha / std::sqrt(static_cast<double>(n));

    auto free_evolution = [&](double phase) {
        Eigen::VectorXcd d(dim);
        for (int n = 0; n < dim; ++n) d[n] = std::exp(-I * (phase * n));
        return d;
    };
    const Eigen::VectorXcd bra = free_evolution(w * (t - t_i)).cwiseProduct(coherent);
    const Eigen::VectorXcd ket0 = free_evolution(w * (t_prime - t_i)).cwiseProduct(coherent);

    const Eigen::MatrixXcd v = eig.eigenvectors().cast<cplx>();
    Eigen::VectorXcd phases(dim);
    for (int k = 0; k < dim; ++k) phases[k] = std::exp(-I * (w * (t - t_prime) * eig.eigenvalues()[k]));
    const Eigen::VectorXcd ket = v * phases.cwiseProduct(v.adjoint() * ket0);

    out.value = bra.dot(ket);  // conjugates bra
    out.evolved_norm = ket.norm();
    return out;
}

FockOverlap fock_overlap_auto(const SingleModeSpec& s, double t, double t_prime, double t_i, int n_start,
                              double max_deficit, int n_limit) {
    for (int n = n_start;; n *= 2) {
        const double deficit = coherent_truncation_deficit(std::abs(s.alpha) + 2.0 * std::abs(s.mode.lambda / s.mode.omega), n);
        if (deficit <= max_deficit || n * 2 > n_limit) return fock_overlap(s, t, t_prime, t_i, n, max_deficit);
    }
}

cplx mode_gamma(const PhononMode& mode, const ThermalEnv& env, double tau) {
    check_mode(mode);
    const double x2 = (mode.lambda / mode.omega) * (mode.lambda / mode.omega);
    const double wt = mode.omega * tau;
    const double s = std::sin(0.5 * wt);
    const double coth_factor = 2.0 * bose_occupation(mode.omega, env) + 1.0;
    return x2 * cplx(2.0 * s * s * coth_factor, std::sin(wt) - wt);
}

cplx thermal_average_closed_form(const PhononMode& mode, const ThermalEnv& env, double t, double t_prime) {
    return std::exp(-mode_gamma(mode, env, t - t_prime));
}

MonteCarloEstimate thermal_average_monte_carlo(const PhononMode& mode, const ThermalEnv& env, double t,
                                               double t_prime, double t_i, std::size_t samples, std::uint64_t seed) {
    check_mode(mode);
    if (samples < 2) throw DomainError("thermal_average_monte_carlo: need at least 2 samples");
    const double nbar = bose_occupation(mode.omega, env);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5 * nbar));
    cplx sum{0.0, 0.0};
    double sum_sq = 0.0;
    for (std::size_t k = 0; k < samples; ++k) {
        const double re = nbar > 0.0 ? normal(rng) : 0.0;
        const double im = nbar > 0.0 ? normal(rng) : 0.0;
        const cplx value = closed_form_overlap({mode, {re, im}}, t, t_prime, t_i);
        sum += value;
        sum_sq += std::norm(value);
    }
    const auto n = static_cast<double>(samples);
    MonteCarloEstimate out;
    out.mean = sum / n;
    const double variance = std::max(0.0, (sum_sq - n * std::norm(out.mean)) / (n - 1.0));
    out.std_error = std::sqrt(variance / n);
    out.samples = samples;
    return out;
}

std::vector<OverlapSample> random_overlap_samples(std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    std::vector<OverlapSample> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        OverlapSample s;
        s.spec.mode.omega = (0.5 + 4.5 * uniform()) * 1e12;
        s.spec.mode.lambda = 0.3 * uniform() * s.spec.mode.omega;
        s.spec.alpha = std::polar(2.0 * std::sqrt(uniform()), 2.0 * constants::pi * uniform());
        s.t_i = 0.0;
        s.t_prime = 5e-12 * uniform();
        s.t = s.t_prime + 5e-12 * uniform();
        out.push_back(s);
    }
    return out;
}

ModeDiscretization discretize_modes(const MaterialParams& m, std::size_t modes, double omega_max) {
    m.validate();
    if (modes < 1) throw DomainError("discretize_modes: need at least one mode");
    if (!(omega_max > 0.0)) throw DomainError("discretize_modes: omega_max must be > 0");
    ModeDiscretization md;
    md.d_omega = omega_max / static_cast<double>(modes);
    const auto n = static_cast<Eigen::Index>(modes);
    md.omega.resize(n);
    md.lambda.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        md.omega[j] = md.d_omega * static_cast<double>(j + 1);
        md.lambda[j] = std::sqrt(spectral_density_deformation(md.omega[j], m) * md.d_omega);
    }
    return md;
}

cplx discretized_gamma(const ModeDiscretization& md, const ThermalEnv& env, double tau) {
    env.validate();
    cplx sum{0.0, 0.0};
    for (Eigen::Index j = 0; j < md.omega.size(); ++j)
        sum += mode_gamma({md.omega[j], md.lambda[j]}, env, tau);  // -log of the per-mode average, no branch cut
    return sum;
}

}  // namespace simqd
