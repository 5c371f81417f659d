#include "simqd/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "simqd/constants.hpp"
#include "simqd/errors.hpp"

namespace simqd {

namespace {

double radiative_time(const CouplingRates& rates) {
    const double g = rates.total();
    return g > 0.0 ? 1.0 / g : std::numeric_limits<double>::infinity();
}

// 8-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 4> gl8_nodes = {0.183434642495649804939476142360184, 0.525532409916328985817739049189246,
                                             0.796666477413626739591553936475831, 0.960289856497536231683560868569473};
constexpr std::array<double, 4> gl8_weights = {0.362683783378361982965150449277195, 0.313706645877887287337962201986601,
                                               0.222381034453374470544355994426241, 0.101228536290376259152531354309963};

}  // namespace

PulseSpec PulseSpec::gaussian(double duration, double arrival_time, cplx epsilon) {
    return PulseSpec{epsilon, duration, arrival_time, arrival_time - 6.0 * duration};
}

void PulseSpec::validate() const {
    if (!(duration > 0.0) || !std::isfinite(duration)) throw DomainError("PulseSpec: duration must be > 0");
    if (!(start_time <= arrival_time - 4.0 * duration * (1.0 - 1e-12)))
        throw DomainError("PulseSpec: start_time must be <= arrival_time - 4 duration");
}

void CouplingRates::validate() const {
    if (!(gamma_f1 > 0.0) || !std::isfinite(gamma_f1)) throw DomainError("CouplingRates: gamma_f1 must be > 0");
    if (!(gamma_f2 >= 0.0) || !std::isfinite(gamma_f2)) throw DomainError("CouplingRates: gamma_f2 must be >= 0");
}

Eigen::VectorXd SimGrid::times() const {
    Eigen::VectorXd t(static_cast<Eigen::Index>(n_steps + 1));
    const double h = dt();
    for (Eigen::Index n = 0; n < t.size(); ++n) t[n] = t_start + h * static_cast<double>(n);
    return t;
}

SimGrid SimGrid::for_pulse(const PulseSpec& pulse, const CouplingRates& rates, double divisor, double horizon) {
    const double tr = radiative_time(rates);
    const double fine = std::min(pulse.duration, tr);
    const double wide = std::isfinite(tr) ? std::max(pulse.duration, tr) : pulse.duration;
    const double dt = fine / divisor;
    const double t_end = pulse.arrival_time + horizon * wide;
    const auto n = static_cast<std::size_t>(std::ceil((t_end - pulse.start_time) / dt - 1e-9));
    return SimGrid{pulse.start_time, pulse.start_time + dt * static_cast<double>(n), n};
}

void SimGrid::validate(const PulseSpec& pulse, const CouplingRates& rates, double min_divisor) const {
    if (n_steps < 1 || !(t_end > t_start) || !std::isfinite(t_start) || !std::isfinite(t_end))
        throw ConfigError("grid", "time grid must have t_end > t_start and at least one step");
    if (t_start > pulse.arrival_time - 4.0 * pulse.duration * (1.0 - 1e-12))
        throw ConfigError("grid.t_start", "grid must start at or before arrival_time - 4 duration");
    const double limit = std::min(pulse.duration, radiative_time(rates)) / min_divisor;
    if (dt() > limit * (1.0 + 1e-9)) {
        std::ostringstream os;
        os << "dt = " << dt() << " s is coarser than min(d, 1/Gamma)/" << min_divisor << " = " << limit << " s";
        throw ConfigError("grid.dt", os.str());
    }
}

double pulse_envelope(double t, const PulseSpec& pulse) {
    const double d = pulse.duration;
    const double x = (t - pulse.arrival_time) / d;
    return std::sqrt(2.0 / (d * std::sqrt(constants::pi))) * std::exp(-2.0 * x * x);
}

DynamicsResult simulate(const PulseSpec& pulse, const CouplingRates& rates, const DephasingKernel& kernel,
                        const SimGrid& grid, const DynamicsOptions& options) {
    pulse.validate();
    rates.validate();
    grid.validate(pulse, rates);
    const std::size_t n_steps = grid.n_steps;
    const double span = grid.t_end - grid.t_start;
    if (!kernel.identically_zero && span > kernel.t_max * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "simulate: grid span " << span << " s exceeds kernel range " << kernel.t_max << " s";
        throw RangeError(os.str());
    }

    const double dt = grid.dt();
    const double gamma = rates.total();
    const double amp = std::sqrt(2.0 * rates.gamma_f1);
    const bool shifted = options.frame == DriveFrame::kPolaronShifted;

    // Lags 0..near are taken from the table; beyond, e^{-Γ_ph(τ)} = k_inf·e^{iντ}.
    std::size_t near = 0;
    cplx k_inf{1.0, 0.0};
    double nu = 0.0;
    if (!kernel.identically_zero) {
        near = std::min<std::size_t>(n_steps, static_cast<std::size_t>(std::floor(kernel.settle_time / dt)));
        k_inf = std::exp(-kernel.plateau_re);
        nu = shifted ? 0.0 : kernel.polaron_rate;
    }
    std::vector<double> w_re(near + 1), w_im(near + 1);
    for (std::size_t m = 0; m <= near; ++m) {
        const double tau = dt * static_cast<double>(m);
        cplx g = kernel_at(kernel, tau);
        if (shifted) g += cplx(0.0, kernel.polaron_rate * tau);
        const cplx w = std::exp(-gamma * tau - g);
        w_re[m] = w.real();
        w_im[m] = w.imag();
    }
    const cplx z = std::exp(cplx(-gamma * dt, nu * dt));
    const cplx z_enter = k_inf * std::exp(cplx(-gamma, nu) * (dt * static_cast<double>(near + 1)));
    const double decay2 = std::exp(-2.0 * gamma * dt);

    DynamicsResult out;
    out.time = grid.times();
    const auto n_pts = out.time.size();
    out.sigma_minus.setZero(n_pts);
    out.p_excited.setZero(n_pts);
    out.dt = dt;
    out.near_lags = near;
    out.kernel_zero = kernel.identically_zero;
    out.frame = options.frame;

    // v_i = ŵ_i ξ_i with trapezoid weight ŵ_0 = dt/2 at the lower end.
    std::vector<double> xi(static_cast<std::size_t>(n_pts)), v(static_cast<std::size_t>(n_pts));
    std::size_t last_nonzero = 0;
    for (std::size_t i = 0; i < xi.size(); ++i) {
        xi[i] = pulse_envelope(out.time[static_cast<Eigen::Index>(i)], pulse);
        v[i] = (i == 0 ? 0.5 * dt : dt) * xi[i];
        if (xi[i] != 0.0) last_nonzero = i;
    }

    double h_acc = 0.0;   // Σ_{i,j<n} ŵ_i ŵ_j a_i a_j K(t_j - t_i), a_i = ξ_i e^{-Γ(t_n - t_i)}
    cplx far{0.0, 0.0};   // lags > near
    for (std::size_t n = 0; n <= n_steps; ++n) {
        double re = 0.0, im = 0.0;
        const std::size_t k_hi = std::min(n, near);
        const std::size_t k_lo = n > last_nonzero ? std::max<std::size_t>(1, n - last_nonzero) : 1;
        for (std::size_t k = k_lo; k <= k_hi; ++k) {
            const double vi = v[n - k];
            re += vi * w_re[k];
            im += vi * w_im[k];
        }
        const cplx c = cplx(re, im) + far;
        const auto idx = static_cast<Eigen::Index>(n);
        if (n > 0) {
            out.sigma_minus[idx] = -amp * (c + 0.5 * dt * xi[n]);
            const double q = h_acc + dt * xi[n] * c.real() + 0.25 * dt * dt * xi[n] * xi[n];
            out.p_excited[idx] = 2.0 * rates.gamma_f1 * q;
        }
        const double wn = (n == 0 ? 0.5 * dt : dt);
        h_acc = decay2 * (h_acc + 2.0 * wn * xi[n] * c.real() + wn * wn * xi[n] * xi[n]);
        far *= z;
        if (n >= near) far += v[n - near] * z_enter;
    }

    Eigen::Index arg = 0;
    out.max_p_excited = out.p_excited.maxCoeff(&arg);
    out.argmax_time = out.time[arg];
    return out;
}

Eigen::VectorXcd transversal(const PulseSpec& pulse, const CouplingRates& rates, const DephasingKernel& kernel,
                             const SimGrid& grid, const DynamicsOptions& options) {
    return simulate(pulse, rates, kernel, grid, options).sigma_minus;
}

Eigen::VectorXd longitudinal(const PulseSpec& pulse, const CouplingRates& rates, const DephasingKernel& kernel,
                             const SimGrid& grid, const DynamicsOptions& options) {
    return simulate(pulse, rates, kernel, grid, options).p_excited;
}

FieldPropagation propagate_fields_nodephasing(const PulseSpec& pulse, const CouplingRates& rates,
                                              const SimGrid& grid) {
    pulse.validate();
    if (!(rates.gamma_f1 >= 0.0) || !(rates.gamma_f2 >= 0.0))
        throw DomainError("propagate_fields_nodephasing: rates must be >= 0");
    grid.validate(pulse, rates);

    const double gamma = rates.total();
    const double s1 = std::sqrt(2.0 * rates.gamma_f1);
    const double s2 = std::sqrt(2.0 * rates.gamma_f2);
    const double dt = grid.dt();
    const double half = 0.5 * dt;

    // Φ(b) = e^{-Γ(b-a)}Φ(a) - sqrt(2Γ_F1) ∫_a^b e^{-Γ(b-s)} ξ(s) ds
    auto advance = [&](cplx phi, double a, double b) {
        const double c = 0.5 * (a + b), h = 0.5 * (b - a);
        double src = 0.0;
        for (std::size_t j = 0; j < gl8_nodes.size(); ++j) {
            for (const double s : {c - h * gl8_nodes[j], c + h * gl8_nodes[j]})
                src += gl8_weights[j] * std::exp(-gamma * (b - s)) * pulse_envelope(s, pulse);
        }
        return std::exp(-gamma * (b - a)) * phi - s1 * h * src;
    };
    auto remaining = [&](double t) { return 0.5 * std::erfc(2.0 * (t - pulse.arrival_time) / pulse.duration); };

    FieldPropagation out;
    out.time = grid.times();
    const auto n_pts = out.time.size();
    out.excited.resize(n_pts);
    out.out_f1.resize(n_pts);
    out.out_f2.resize(n_pts);
    out.remaining_input.resize(n_pts);
    out.emitted_f1.resize(n_pts);
    out.emitted_f2.resize(n_pts);
    out.norm.resize(n_pts);

    cplx phi{0.0, 0.0};
    double e1 = 0.0, e2 = 0.0;
    for (Eigen::Index n = 0; n < n_pts; ++n) {
        const double t = out.time[n];
        const double x = pulse_envelope(t, pulse);
        out.excited[n] = phi;
        out.out_f1[n] = x + s1 * phi;
        out.out_f2[n] = s2 * phi;
        out.remaining_input[n] = remaining(t);
        out.emitted_f1[n] = e1;
        out.emitted_f2[n] = e2;
        out.norm[n] = std::norm(phi) + out.remaining_input[n] + e1 + e2;
        if (n + 1 == n_pts) break;

        const double t_mid = t + half, t_next = out.time[n + 1];
        const cplx phi_mid = advance(phi, t, t_mid);
        const cplx phi_next = advance(phi_mid, t_mid, t_next);
        const double x_mid = pulse_envelope(t_mid, pulse), x_next = pulse_envelope(t_next, pulse);
        e1 += half / 3.0 *
              (std::norm(x + s1 * phi) + 4.0 * std::norm(x_mid + s1 * phi_mid) + std::norm(x_next + s1 * phi_next));
        e2 += half / 3.0 * 2.0 * rates.gamma_f2 * (std::norm(phi) + 4.0 * std::norm(phi_mid) + std::norm(phi_next));
        phi = phi_next;
    }
    return out;
}

}  // namespace simqd
