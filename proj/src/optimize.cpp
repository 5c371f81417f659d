#include <algorithm>
#include <cmath>
#include <vector>

#include "simqd/dynamics.hpp"
#include "simqd/errors.hpp"

namespace simqd {

double peak_excitation(const PulseSpec& pulse_template, double duration, const CouplingRates& rates,
                       const DephasingKernel& kernel, const DurationSearch& search, const DynamicsOptions& options) {
    PulseSpec pulse = pulse_template;
    pulse.duration = duration;
    pulse.start_time = pulse.arrival_time - 6.0 * duration;
    const SimGrid grid = SimGrid::for_pulse(pulse, rates, search.grid_divisor, search.grid_horizon);
    return simulate(pulse, rates, kernel, grid, options).max_p_excited;
}

namespace {

struct Golden {
    double x = 0.0, f = 0.0;
};

// Maximizes f on [a, b] (log-duration units).
template <class F>
Golden golden_section(F& f, double a, double b, double tol, int max_iter, int& evals) {
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - r * (b - a), x2 = a + r * (b - a);
    double f1 = f(x1), f2 = f(x2);
    evals += 2;
    for (int it = 0; it < max_iter && (b - a) > tol; ++it) {
        if (f1 >= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        }
        ++evals;
    }
    return f1 >= f2 ? Golden{x1, f1} : Golden{x2, f2};
}

}  // namespace

TransferOptimum max_transfer_efficiency(const PulseSpec& pulse_template, const CouplingRates& rates,
                                        const DephasingKernel& kernel, const DurationSearch& search,
                                        const DynamicsOptions& options) {
    if (!(search.d_min > 0.0) || !(search.d_max > search.d_min))
        throw DomainError("max_transfer_efficiency: need 0 < d_min < d_max");
    if (search.scan_points < 3) throw DomainError("max_transfer_efficiency: scan_points must be >= 3");

    auto objective = [&](double log_d) {
        return peak_excitation(pulse_template, std::exp(log_d), rates, kernel, search, options);
    };
    const double lo = std::log(search.d_min), hi = std::log(search.d_max);

    TransferOptimum out;
    int evals = 0;
    Golden best = golden_section(objective, lo, hi, search.rel_tol, search.max_iterations, evals);
    const double f_lo = objective(lo), f_hi = objective(hi);
    evals += 2;

    if (best.f >= std::max(f_lo, f_hi)) {
        out.method = "golden-section";
    } else {
        // Not bracketed: scan, then refine around the best cell.
        out.fallback_scan = true;
        const int n = search.scan_points;
        std::vector<double> xs(n), fs(n);
        for (int i = 0; i < n; ++i) {
            xs[i] = lo + (hi - lo) * i / (n - 1);
            fs[i] = i == 0 ? f_lo : i == n - 1 ? f_hi : objective(xs[i]);
        }
        evals += n - 2;
        const auto k = static_cast<int>(std::max_element(fs.begin(), fs.end()) - fs.begin());
        best = {xs[k], fs[k]};
        if (k > 0 && k < n - 1) {
            const Golden refined = golden_section(objective, xs[k - 1], xs[k + 1], search.rel_tol,
                                                  search.max_iterations, evals);
            if (refined.f > best.f) best = refined;
            out.method = "grid-scan+golden-section";
        } else {
            out.method = "grid-scan (optimum at search boundary)";
        }
    }
    out.duration = std::exp(best.x);
    out.efficiency = best.f;
    out.evaluations = evals;
    return out;
}

}  // namespace simqd
