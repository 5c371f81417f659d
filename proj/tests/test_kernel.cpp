#include <cmath>
#include <complex>
#include <random>

#include "doctest.h"

#include "simqd/constants.hpp"
#include "simqd/errors.hpp"
#include "simqd/kernel.hpp"

using namespace simqd;

namespace {

const MaterialParams gaas = MaterialParams::gaas_default();

// Composite Simpson over [0, 2.2 ω_l] with the integrands written out directly.
struct SimpsonKernel {
    double temperature;
    int n = 400000;

    cplx value(double t) const {
        const double wl = gaas.cutoff_frequency();
        const double hi = 2.2 * wl;
        const double h = hi / n;
        cplx sum{0.0, 0.0};
        for (int i = 1; i <= n; ++i) {  // integrand vanishes at ω = 0
            const double w = i * h;
            const double weight = (i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            const double over = gaas.coupling_prefactor() * w * std::exp(-M_PI * M_PI * w * w / (wl * wl));
            const double x = constants::hbar * w / (constants::k_boltzmann * temperature);
            const double coth = temperature == 0.0 ? 1.0 : 1.0 / std::tanh(0.5 * x);
            sum += weight * over * cplx((1.0 - std::cos(w * t)) * coth, std::sin(w * t) - w * t);
        }
        return sum * (h / 3.0);
    }

    double plateau() const {
        const double wl = gaas.cutoff_frequency();
        const double hi = 2.2 * wl;
        const double h = hi / n;
        // ω → 0 limit of ω coth(ħω/2kT) is 2kT/ħ
        double sum = gaas.coupling_prefactor() * 2.0 * constants::k_boltzmann * temperature / constants::hbar;
        for (int i = 1; i <= n; ++i) {
            const double w = i * h;
            const double weight = (i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            const double x = constants::hbar * w / (constants::k_boltzmann * temperature);
            sum += weight * gaas.coupling_prefactor() * w * std::exp(-M_PI * M_PI * w * w / (wl * wl)) /
                   std::tanh(0.5 * x);
        }
        return sum * h / 3.0;
    }
};

}  // namespace

TEST_CASE("kernel vanishes at t = 0") {
    for (double t : {0.0, 0.4, 4.0, 40.0}) {
        CHECK(kernel_real(0.0, gaas, ThermalEnv{t}) == 0.0);
        CHECK(kernel_imag(0.0, gaas, ThermalEnv{t}) == 0.0);
        CHECK(kernel_value(0.0, gaas, ThermalEnv{t}) == cplx{0.0, 0.0});
    }
}

TEST_CASE("quadrature against a brute-force Simpson oracle") {
    for (double temp : {0.4, 4.0, 40.0}) {
        const SimpsonKernel oracle{temp};
        for (double t : {0.05e-12, 0.7e-12, 3e-12, 9e-12}) {
            const cplx ref = oracle.value(t);
            const cplx got = kernel_value(t, gaas, ThermalEnv{temp});
            CHECK(std::abs(got.real() - ref.real()) <= 1e-8 * std::abs(ref.real()));
            CHECK(std::abs(got.imag() - ref.imag()) <= 1e-8 * std::abs(ref.imag()));
            CHECK(kernel_real(t, gaas, ThermalEnv{temp}) == doctest::Approx(got.real()).epsilon(1e-9));
            CHECK(kernel_imag(t, gaas, ThermalEnv{temp}) == doctest::Approx(got.imag()).epsilon(1e-9));
        }
        CHECK(plateau_real(gaas, ThermalEnv{temp}) == doctest::Approx(oracle.plateau()).epsilon(1e-8));
    }
}

TEST_CASE("plateau at 10 ps") {
    const ThermalEnv env{4.0};
    const double plateau = SimpsonKernel{4.0}.plateau();
    CHECK(std::abs(kernel_real(10e-12, gaas, env) - plateau) <= 0.01 * plateau);
}

TEST_CASE("plateau approach beyond five cut-off periods") {
    for (double temp : {0.4, 4.0, 40.0}) {
        const ThermalEnv env{temp};
        const double plateau = plateau_real(gaas, env);
        const double start = 5.0 * 2.0 * constants::pi / cutoff_frequency(gaas, env);
        for (double t = start; t < 60e-12; t *= 1.15)
            CHECK(std::abs(kernel_real(t, gaas, env) - plateau) <= 0.02 * plateau);
    }
}

TEST_CASE("imaginary part follows the polaron line") {
    const double delta = polaron_rate(gaas);
    CHECK(delta == doctest::Approx(1.3748e11).epsilon(1e-3));
    const double t = 5e-12;
    CHECK(std::abs(kernel_imag(t, gaas, ThermalEnv{4.0}) + delta * t) <= 0.02 * delta * t);
    // |Im Γ + Δt| never exceeds ∫J/ω²
    const double bound = sine_part_bound(gaas);
    for (double s = 0.1e-12; s < 30e-12; s *= 1.3)
        CHECK(std::abs(kernel_imag(s, gaas, ThermalEnv{4.0}) + delta * s) <= bound * (1.0 + 1e-9));
}

TEST_CASE("temperature dependence") {
    for (double t : {0.3e-12, 1e-12, 4e-12, 20e-12}) {
        double last = -1.0;
        for (double temp : {0.0, 0.4, 1.0, 4.0, 10.0, 40.0, 100.0}) {
            const double re = kernel_real(t, gaas, ThermalEnv{temp});
            CHECK(re >= last);
            last = re;
        }
        const double im = kernel_imag(t, gaas, ThermalEnv{0.4});
        for (double temp : {4.0, 40.0}) CHECK(std::abs(kernel_imag(t, gaas, ThermalEnv{temp}) - im) <= 1e-12 * std::abs(im));
    }
}

TEST_CASE("non-convergence raises a numeric error") {
    QuadratureSpec spec;
    spec.rel_tol = 1e-12;
    spec.max_depth = 0;
    spec.min_panels = 1;
    spec.panels_per_period = 1e-3;  // panels span many oscillations at 50 ps
    CHECK_THROWS_AS(kernel_real(50e-12, gaas, ThermalEnv{4.0}, spec), NumericError);
    try {
        kernel_real(50e-12, gaas, ThermalEnv{4.0}, spec);
    } catch (const NumericError& e) {
        CHECK(e.error_estimate() > 0.0);
    }
}

TEST_CASE("cut-off frequency") {
    const double wc = cutoff_frequency(gaas, ThermalEnv{4.0});
    CHECK(wc > 1.5e12);
    CHECK(wc < 3.5e12);

    // the integrand sits at half its peak there and stays below beyond
    const ThermalEnv env{4.0};
    double peak = 0.0;
    for (int i = 1; i <= 20000; ++i) peak = std::max(peak, dephasing_integrand(3.0 * gaas.cutoff_frequency() * i / 20000, gaas, env));
    CHECK(dephasing_integrand(wc, gaas, env) == doctest::Approx(0.5 * peak).epsilon(1e-5));
    for (double w = wc * 1.001; w < 3.0 * gaas.cutoff_frequency(); w *= 1.05) CHECK(dephasing_integrand(w, gaas, env) < 0.5 * peak);

    // Without thermal weighting the integrand is a function of ω/ω_l only.
    auto wide = gaas;
    wide.localization_length *= 2.0;
    const ThermalEnv cold{0.0};
    const double ratio = cutoff_frequency(wide, cold) / cutoff_frequency(gaas, cold);
    CHECK(std::abs(ratio - 0.5) <= 0.05);
    // At 4 K the coth factor does not rescale with l; the edge still moves down by more than a third.
    CHECK(cutoff_frequency(wide, env) / wc < 0.65);
}

TEST_CASE("uniform table") {
    const ThermalEnv env{4.0};
    const auto two = tabulate_kernel(gaas, env, 3e-12, 2);
    REQUIRE(two.times.size() == 2);
    CHECK(two.times[0] == 0.0);
    CHECK(two.values[0] == cplx{0.0, 0.0});
    CHECK(two.times[1] == 3e-12);
    CHECK(std::abs(two.values[1] - kernel_value(3e-12, gaas, env)) == 0.0);
    CHECK_THROWS_AS(tabulate_kernel(gaas, env, 3e-12, 1), DomainError);
    CHECK_THROWS_AS(tabulate_kernel(gaas, env, -1.0, 10), DomainError);
    REQUIRE(two.provenance.has_value());
    CHECK(two.provenance->env == env);
    CHECK(two.provenance->material == gaas);
}

TEST_CASE("lookup") {
    const ThermalEnv env{4.0};
    const auto k = tabulate_kernel(gaas, env, 10e-12, 2001);
    CHECK(kernel_at(k, 0.0) == cplx{0.0, 0.0});
    for (int i : {1, 17, 400, 2000}) {
        CHECK(kernel_at(k, k.times[i]) == k.values[i]);
        CHECK(kernel_at(k, -k.times[i]) == std::conj(k.values[i]));
    }
    CHECK_THROWS_AS(kernel_at(k, 10.1e-12), RangeError);
    CHECK_THROWS_AS(kernel_at(k, -10.1e-12), RangeError);
}

TEST_CASE("two-scale table interpolates within 1e-6") {
    for (double temp : {0.4, 40.0}) {
        const ThermalEnv env{temp};
        const auto k = tabulate_kernel_adaptive(gaas, env, 200e-12);
        CHECK(k.times[0] == 0.0);
        CHECK(k.settle_time <= k.t_max);
        CHECK(k.settle_residual < 1e-7);
        CHECK(k.plateau_re == doctest::Approx(plateau_real(gaas, env)).epsilon(1e-12));

        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> u(0.0, 200e-12);
        for (int i = 0; i < 200; ++i) {
            const double t = i < 100 ? u(rng) / 20.0 : u(rng);
            CHECK(std::abs(kernel_at(k, t) - kernel_value(t, gaas, env)) < 1e-6);
        }
        const double late = 150e-12;
        CHECK(kernel_at(k, late) == k.asymptote(late));
    }
}

TEST_CASE("zero kernel") {
    const auto z = zero_kernel(1e-9);
    CHECK(z.identically_zero);
    CHECK(kernel_at(z, 3e-10) == cplx{0.0, 0.0});
    CHECK(kernel_at(z, -3e-10) == cplx{0.0, 0.0});
    CHECK_THROWS_AS(kernel_at(z, 2e-9), RangeError);
}
