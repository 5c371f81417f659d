#include "simqd/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "simqd/constants.hpp"
#include "simqd/errors.hpp"

namespace simqd {

namespace {

// 1 - cos x without cancellation.
double one_minus_cos(double x) {
    const double s = std::sin(0.5 * x);
    return 2.0 * s * s;
}

// sin x - x without cancellation for small x.
double sin_minus_x(double x) {
    if (std::abs(x) < 1e-2) {
        const double x2 = x * x;
        return -x * x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0));
    }
    return std::sin(x) - x;
}

double max_panel_for(double t, double limit, const QuadratureSpec& quad) {
    const double by_gaussian = limit / static_cast<double>(quad.min_panels);
    if (t <= 0.0) return by_gaussian;
    return std::min(by_gaussian, 2.0 * constants::pi / t / quad.panels_per_period);
}

template <class V>
V checked(const QuadratureResult<V>& r, const char* what, double t) {
    if (!r.converged) {
        std::ostringstream os;
        os << what << ": quadrature did not converge at t = " << t << " s (error estimate " << r.error << ")";
        throw NumericError(os.str(), r.error);
    }
    return r.value;
}

void check_time(double t, const char* what) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError(std::string(what) + ": t must be finite and >= 0");
}

}  // namespace

double integration_limit(const MaterialParams& m) {
    // exp(-π²ω²/ω_l²) = 1e-16
    return m.cutoff_frequency() * std::sqrt(16.0 * std::log(10.0)) / constants::pi;
}

double kernel_real(double t, const MaterialParams& m, const ThermalEnv& env, const QuadratureSpec& quad) {
    check_time(t, "kernel_real");
    m.validate();
    env.validate();
    if (t == 0.0) return 0.0;
    const double hi = integration_limit(m);
    auto f = [&](double w) { return dephasing_integrand(w, m, env) * one_minus_cos(w * t); };
    return checked(integrate_adaptive<double>(f, 0.0, hi, max_panel_for(t, hi, quad), quad), "kernel_real", t);
}

double kernel_imag(double t, const MaterialParams& m, const ThermalEnv& env, const QuadratureSpec& quad) {
    check_time(t, "kernel_imag");
    m.validate();
    env.validate();
    if (t == 0.0) return 0.0;
    const double hi = integration_limit(m);
    auto f = [&](double w) { return spectral_density_over_omega_sq(w, m) * sin_minus_x(w * t); };
    return checked(integrate_adaptive<double>(f, 0.0, hi, max_panel_for(t, hi, quad), quad), "kernel_imag", t);
}

cplx kernel_value(double t, const MaterialParams& m, const ThermalEnv& env, const QuadratureSpec& quad) {
    check_time(t, "kernel_value");
    if (t == 0.0) return {0.0, 0.0};
    const double hi = integration_limit(m);
    auto f = [&](double w) {
        const double x = w * t;
        return cplx(dephasing_integrand(w, m, env) * one_minus_cos(x),
                    spectral_density_over_omega_sq(w, m) * sin_minus_x(x));
    };
    return checked(integrate_adaptive<cplx>(f, 0.0, hi, max_panel_for(t, hi, quad), quad), "kernel_value", t);
}

double plateau_real(const MaterialParams& m, const ThermalEnv& env, const QuadratureSpec& quad) {
    m.validate();
    env.validate();
    const double hi = integration_limit(m);
    auto f = [&](double w) { return dephasing_integrand(w, m, env); };
    return checked(integrate_adaptive<double>(f, 0.0, hi, max_panel_for(0.0, hi, quad), quad), "plateau_real", 0.0);
}

double polaron_rate(const MaterialParams& m, const QuadratureSpec& quad) {
    m.validate();
    const double hi = integration_limit(m);
    auto f = [&](double w) { return spectral_density_over_omega_sq(w, m) * w; };
    return checked(integrate_adaptive<double>(f, 0.0, hi, max_panel_for(0.0, hi, quad), quad), "polaron_rate", 0.0);
}

double sine_part_bound(const MaterialParams& m, const QuadratureSpec& quad) {
    m.validate();
    const double hi = integration_limit(m);
    auto f = [&](double w) { return spectral_density_over_omega_sq(w, m); };
    return checked(integrate_adaptive<double>(f, 0.0, hi, max_panel_for(0.0, hi, quad), quad), "sine_part_bound",
                   0.0);
}

double cutoff_frequency(const MaterialParams& m, const ThermalEnv& env, double fraction) {
    m.validate();
    env.validate();
    if (!(fraction > 0.0 && fraction < 1.0)) throw DomainError("cutoff_frequency: fraction must lie in (0, 1)");
    const double hi = integration_limit(m);
    constexpr int n = 8000;
    const double h = hi / n;
    std::vector<double> f(n + 1);
    for (int i = 0; i <= n; ++i) f[i] = dephasing_integrand(h * i, m, env);
    const double peak = *std::max_element(f.begin(), f.end());
    const double level = fraction * peak;
    int last = n;
    while (last > 0 && f[last] < level) --last;
    if (last == n) return hi;
    // Bisect the crossing in [last, last + 1].
    double lo = h * last, up = h * (last + 1);
    for (int it = 0; it < 100 && up - lo > 1e-12 * up; ++it) {
        const double mid = 0.5 * (lo + up);
        (dephasing_integrand(mid, m, env) >= level ? lo : up) = mid;
    }
    return 0.5 * (lo + up);
}

namespace {

DephasingKernel make_kernel_shell(const MaterialParams& m, const ThermalEnv& env, double t_max,
                                  const QuadratureSpec& quad) {
    m.validate();
    env.validate();
    if (!(t_max > 0.0) || !std::isfinite(t_max)) throw DomainError("tabulate_kernel: t_max must be finite and > 0");
    DephasingKernel k;
    k.t_max = t_max;
    k.plateau_re = plateau_real(m, env, quad);
    k.polaron_rate = polaron_rate(m, quad);
    k.provenance = KernelProvenance{m, env, quad};
    return k;
}

}  // namespace

DephasingKernel tabulate_kernel(const MaterialParams& m, const ThermalEnv& env, double t_max, std::size_t n_points,
                                const QuadratureSpec& quad) {
    if (n_points < 2) throw DomainError("tabulate_kernel: n_points must be >= 2");
    DephasingKernel k = make_kernel_shell(m, env, t_max, quad);
    const auto n = static_cast<Eigen::Index>(n_points);
    k.times = Eigen::VectorXd::LinSpaced(n, 0.0, t_max);
    k.values.resize(n);
    k.values[0] = 0.0;
    for (Eigen::Index i = 1; i < n; ++i) k.values[i] = kernel_value(k.times[i], m, env, quad);
    k.settle_time = t_max;
    k.settle_residual = std::abs(k.values[n - 1] - k.asymptote(t_max));
    return k;
}

DephasingKernel tabulate_kernel_adaptive(const MaterialParams& m, const ThermalEnv& env, double t_max,
                                         const QuadratureSpec& quad, const TabulationPolicy& policy) {
    if (!(policy.fine_step > 0.0) || !(policy.fine_span > 0.0) || !(policy.growth > 1.0) ||
        !(policy.settle_tol > 0.0))
        throw DomainError("tabulate_kernel_adaptive: invalid tabulation policy");
    DephasingKernel k = make_kernel_shell(m, env, t_max, quad);

    std::vector<double> t;
    std::vector<cplx> v;
    const double fine_end = std::min(policy.fine_span, t_max);
    const auto n_fine = static_cast<std::size_t>(std::floor(fine_end / policy.fine_step + 1e-9));
    for (std::size_t i = 0; i <= n_fine; ++i) t.push_back(policy.fine_step * static_cast<double>(i));
    if (t.back() < fine_end * (1.0 - 1e-12)) t.push_back(fine_end);
    v.reserve(t.size());
    for (double ti : t) v.push_back(kernel_value(ti, m, env, quad));

    // The remainder must stay below settle_tol over a stretch of at least a quarter
    // of the current time before the asymptote takes over.
    double settled_since = -1.0;
    double worst_residual = 0.0;
    double now = t.back();
    bool settled = false;
    while (now < t_max) {
        const double step = std::max(policy.fine_step, (policy.growth - 1.0) * now);
        now = std::min(now + step, t_max);
        const cplx value = kernel_value(now, m, env, quad);
        t.push_back(now);
        v.push_back(value);
        const double residual = std::abs(value - k.asymptote(now));
        if (residual < policy.settle_tol) {
            if (settled_since < 0.0) {
                settled_since = now;
                worst_residual = 0.0;
            }
            worst_residual = std::max(worst_residual, residual);
            if (now >= 1.25 * settled_since && now < t_max) {
                settled = true;
                break;
            }
        } else {
            settled_since = -1.0;
        }
    }

    const auto n = static_cast<Eigen::Index>(t.size());
    k.times = Eigen::Map<const Eigen::VectorXd>(t.data(), n);
    k.values = Eigen::Map<const Eigen::VectorXcd>(v.data(), n);
    k.settle_time = t.back();
    k.settle_residual = settled ? worst_residual : std::abs(v.back() - k.asymptote(t.back()));
    return k;
}

DephasingKernel zero_kernel(double t_max) {
    if (!(t_max > 0.0)) throw DomainError("zero_kernel: t_max must be > 0");
    DephasingKernel k;
    k.times = Eigen::VectorXd::Zero(1);
    k.values = Eigen::VectorXcd::Zero(1);
    k.t_max = t_max;
    k.identically_zero = true;
    return k;
}

cplx kernel_at(const DephasingKernel& kernel, double tau) {
    const double a = std::abs(tau);
    if (!(a <= kernel.t_max * (1.0 + 1e-12))) {
        std::ostringstream os;
        os << "kernel_at: |tau| = " << a << " s exceeds table range t_max = " << kernel.t_max << " s";
        throw RangeError(os.str());
    }
    if (kernel.identically_zero) return {0.0, 0.0};
    cplx value;
    if (a >= kernel.settle_time) {
        value = a == kernel.settle_time ? kernel.values[kernel.values.size() - 1] : kernel.asymptote(a);
    } else {
        const double* begin = kernel.times.data();
        const double* end = begin + kernel.times.size();
        const auto hi = static_cast<Eigen::Index>(std::upper_bound(begin, end, a) - begin);
        const Eigen::Index lo = hi - 1;
        const double t0 = kernel.times[lo], t1 = kernel.times[hi];
        const double w = (a - t0) / (t1 - t0);
        value = (1.0 - w) * kernel.values[lo] + w * kernel.values[hi];
    }
    return tau < 0.0 ? std::conj(value) : value;
}

}  // namespace simqd
