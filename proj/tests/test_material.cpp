#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"

#include "simqd/constants.hpp"
#include "simqd/errors.hpp"
#include "simqd/material.hpp"

using namespace simqd;

namespace {

const MaterialParams gaas = MaterialParams::gaas_default();

// Written out from the defining formula, independent of the library's helpers.
double reference_density(double w) {
    const double pi = 3.14159265358979323846;
    const double ev = 1.602176634e-19;
    const double hbar = 1.054571817e-34;
    const double dd = (-3.5 - 7.0) * ev;
    const double a = dd * dd / (4.0 * pi * pi * 5370.0 * hbar * std::pow(5110.0, 5));
    const double wl = 2.0 * pi * 5110.0 / 5e-9;
    return a * w * w * w * std::exp(-pi * pi * w * w / (wl * wl));
}

}  // namespace

TEST_CASE("default profile") {
    CHECK(gaas.mass_density == 5370.0);
    CHECK(gaas.sound_velocity == 5110.0);
    CHECK(gaas.deformation_electron == doctest::Approx(7.0 * constants::electron_volt));
    CHECK(gaas.deformation_hole == doctest::Approx(-3.5 * constants::electron_volt));
    CHECK(gaas.localization_length == 5e-9);
    CHECK(gaas.cutoff_frequency() == doctest::Approx(2.0 * constants::pi * 5110.0 / 5e-9).epsilon(1e-14));
    CHECK(gaas.coupling_prefactor() == doctest::Approx(3.633e-26).epsilon(1e-3));
    CHECK_NOTHROW(gaas.validate());

    auto bad = gaas;
    bad.mass_density = 0.0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = gaas;
    bad.localization_length = -1e-9;
    CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("spectral density") {
    CHECK(spectral_density_deformation(0.0, gaas) == 0.0);
    CHECK_THROWS_AS(spectral_density_deformation(-1.0, gaas), DomainError);

    for (double w : {1e10, 5e11, 2e12, 6e12, 1.2e13})
        CHECK(spectral_density_deformation(w, gaas) == doctest::Approx(reference_density(w)).epsilon(1e-12));

    SUBCASE("peak position") {
        const double wl = gaas.cutoff_frequency();
        const double analytic = wl * std::sqrt(1.5) / constants::pi;
        const int n = 300000;
        double best_w = 0.0, best = -1.0;
        for (int i = 0; i <= n; ++i) {
            const double w = 3.0 * wl * i / n;
            const double j = spectral_density_deformation(w, gaas);
            if (j > best) best = j, best_w = w;
        }
        CHECK(std::abs(best_w - analytic) <= 3.0 * wl / n);

        const double ratio = spectral_density_deformation(2.0 * analytic, gaas) / spectral_density_deformation(analytic, gaas);
        CHECK(ratio == doctest::Approx(8.0 * std::exp(-4.5)).epsilon(1e-12));
    }

    SUBCASE("positivity and vanishing coupling") {
        for (double w = 1e9; w < 3.0 * gaas.cutoff_frequency(); w *= 1.7) CHECK(spectral_density_deformation(w, gaas) > 0.0);
        auto equal = gaas;
        equal.deformation_hole = equal.deformation_electron;
        CHECK(spectral_density_deformation(1e12, equal) == 0.0);
    }

    SUBCASE("over omega squared") {
        for (double w : {1e11, 1e12, 4e12})
            CHECK(spectral_density_over_omega_sq(w, gaas) ==
                  doctest::Approx(spectral_density_deformation(w, gaas) / (w * w)).epsilon(1e-13));
        CHECK(spectral_density_over_omega_sq(0.0, gaas) == 0.0);
    }
}

TEST_CASE("form factor") {
    CHECK(form_factor(0.0, 5e-9) == 1.0);
    CHECK(form_factor(2.0 / 5e-9, 5e-9) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
}

TEST_CASE("bose occupation") {
    const double t = 4.0;
    const double w_ln2 = std::log(2.0) * constants::k_boltzmann * t / constants::hbar;
    CHECK(bose_occupation(w_ln2, ThermalEnv{t}) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(bose_occupation(1e12, ThermalEnv{0.0}) == 0.0);
    CHECK_THROWS_AS(bose_occupation(1e12, ThermalEnv{-1.0}), DomainError);
    CHECK_THROWS_AS(bose_occupation(-1.0, ThermalEnv{4.0}), DomainError);

    for (double x : {1e-4, 1e-3, 1e-2}) {
        const double w = x * constants::k_boltzmann * t / constants::hbar;
        CHECK(std::abs(bose_occupation(w, ThermalEnv{t}) * x - 1.0) < 0.01);
    }
}

TEST_CASE("thermal weight and integrand at the origin") {
    const ThermalEnv env{4.0};
    const double kt = constants::k_boltzmann * env.temperature / constants::hbar;
    CHECK(thermal_weight(0.0, env) == doctest::Approx(2.0 * kt).epsilon(1e-15));
    // both sides of the series switch agree
    const double below = thermal_weight(0.999e-6 * kt, env);
    const double above = thermal_weight(1.001e-6 * kt, env);
    CHECK(above == doctest::Approx(below).epsilon(1e-9));
    CHECK(dephasing_integrand(0.0, gaas, env) == doctest::Approx(gaas.coupling_prefactor() * 2.0 * kt).epsilon(1e-14));
    CHECK(dephasing_integrand(0.0, gaas, ThermalEnv{0.0}) == 0.0);

    // J(2n̄+1)/ω² written out
    for (double w : {1e11, 1e12, 5e12}) {
        const double n = bose_occupation(w, env);
        CHECK(dephasing_integrand(w, gaas, env) ==
              doctest::Approx(reference_density(w) * (2.0 * n + 1.0) / (w * w)).epsilon(1e-11));
    }
}

TEST_CASE("cavity rate") {
    CHECK(gamma_from_cavity(0.0, 1e12) == 0.0);
    CHECK(gamma_from_cavity(1e11, 1e12) == doctest::Approx(1e10).epsilon(1e-15));
    CHECK_THROWS_AS(gamma_from_cavity(1e9, 0.0), DomainError);
    CHECK_THROWS_AS(gamma_from_cavity(1e9, -1.0), DomainError);

    std::vector<std::string> seen;
    auto previous = set_warning_handler([&](std::string_view m) { seen.emplace_back(m); });
    gamma_from_cavity(1e11, 1e12);
    CHECK(seen.empty());
    gamma_from_cavity(1e12, 1e12);
    CHECK(seen.size() == 1);
    set_warning_handler(previous);
}
