#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <queue>
#include <vector>

namespace simqd {

/// Settings for the adaptive frequency quadrature. Kept as an explicit record so every
/// tabulated kernel can report exactly how it was computed.
struct QuadratureSpec {
    double rel_tol = 1e-9;
    double abs_tol = 1e-300;
    int max_depth = 40;                // bisections of any initial panel
    double panels_per_period = 8.0;    // initial panel width <= (2π/t)/panels_per_period
    std::size_t min_panels = 16;
    std::size_t max_panels = 200000;   // hard cap on the adaptive partition

    friend bool operator==(const QuadratureSpec&, const QuadratureSpec&) = default;
};

template <class V>
struct QuadratureResult {
    V value{};
    double error = 0.0;  // sum of per-panel |K15 - G7| estimates
    bool converged = false;
    std::size_t evaluations = 0;
};

namespace detail {

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1].
inline constexpr std::array<double, 8> gk15_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> gk15_kronrod = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gk15_gauss = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class V>
struct Panel {
    double a, b;
    V value;
    double error;
    int depth;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <class V, class F>
Panel<V> gk15(F& f, double a, double b, int depth) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const V fc = f(c);
    V kronrod = gk15_kronrod[7] * fc;
    V gauss = gk15_gauss[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const double dx = h * gk15_nodes[j];
        const V fsum = f(c - dx) + f(c + dx);
        kronrod += gk15_kronrod[j] * fsum;
        if (j % 2 == 1) gauss += gk15_gauss[j / 2] * fsum;
    }
    kronrod *= h;
    gauss *= h;
    return {a, b, kronrod, std::abs(kronrod - gauss), depth};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (G7/K15) quadrature of f over [a, b].
/// The interval is first split into panels no wider than `max_panel`, then the panel
/// with the largest error estimate is bisected until the summed estimate falls below
/// max(rel_tol·|I|, abs_tol) or a panel reaches `spec.max_depth`.
template <class V, class F>
QuadratureResult<V> integrate_adaptive(F&& f, double a, double b, double max_panel, const QuadratureSpec& spec) {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    QuadratureResult<V> out;
    if (!(b > a)) {
        out.converged = true;
        return out;
    }
    std::size_t n0 = spec.min_panels;
    if (max_panel > 0.0 && std::isfinite(max_panel))
        n0 = std::max<std::size_t>(n0, static_cast<std::size_t>(std::ceil((b - a) / max_panel)));
    std::priority_queue<detail::Panel<V>> heap;
    V total{};
    double err = 0.0;
    double magnitude = 0.0;
    const double w = (b - a) / static_cast<double>(n0);
    for (std::size_t i = 0; i < n0; ++i) {
        const double lo = a + w * static_cast<double>(i);
        const double hi = (i + 1 == n0) ? b : lo + w;
        auto p = detail::gk15<V>(f, lo, hi, 0);
        total += p.value;
        err += p.error;
        magnitude += std::abs(p.value);
        heap.push(p);
    }
    out.evaluations = 15 * n0;
    // Rounding floor: no partition can resolve the integral better than ε·∫|f|.
    auto target = [&] {
        return std::max({spec.rel_tol * std::abs(total), spec.abs_tol, 50.0 * eps * magnitude});
    };
    while (err > target() && heap.size() < spec.max_panels) {
        auto worst = heap.top();
        if (worst.depth >= spec.max_depth) break;
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        auto left = detail::gk15<V>(f, worst.a, mid, worst.depth + 1);
        auto right = detail::gk15<V>(f, mid, worst.b, worst.depth + 1);
        out.evaluations += 30;
        total += left.value + right.value - worst.value;
        magnitude += std::abs(left.value) + std::abs(right.value) - std::abs(worst.value);
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // Re-sum to shed the drift of the incremental updates.
    total = V{};
    err = 0.0;
    while (!heap.empty()) {
        total += heap.top().value;
        err += heap.top().error;
        heap.pop();
    }
    out.value = total;
    out.error = err;
    out.converged = err <= target();
    return out;
}

}  // namespace simqd
