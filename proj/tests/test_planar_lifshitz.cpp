#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "casimir/constants.hpp"
#include "casimir/errors.hpp"
#include "casimir/planar_lifshitz.hpp"

using namespace casimir;

namespace {

PlanarPair ideal_pair() { return {DielectricModel::perfect_conductor(), DielectricModel::perfect_conductor(), {}}; }
PlanarPair gold_silicon() { return {presets::gold_drude(), presets::silicon_doped(), {}}; }

}  // namespace

TEST_CASE("Fresnel limits") {
    const auto pc = fresnel_te_tm(DielectricModel::perfect_conductor(), 1e15, 3e6);
    CHECK(pc.te == -1.0);
    CHECK(pc.tm == 1.0);
    const auto vac = fresnel_te_tm(presets::by_name("vacuum"), 1e15, 3e6);
    CHECK(vac.te == 0.0);
    CHECK(vac.tm == 0.0);
    CHECK_THROWS_AS(fresnel_te_tm(presets::gold_drude(), 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(fresnel_te_tm(presets::gold_drude(), 1.0, -1.0), DomainError);
}

TEST_CASE("Fresnel gold at xi = 1e15 rad/s, k = xi/c against the (p, s) form") {
    // Frozen from an extended-precision evaluation of r_TE = (p - s)/(p + s),
    // r_TM = (eps p - s)/(eps p + s), p = c kappa / xi, s = sqrt(eps - 1 + p^2).
    const double xi = 1e15;
    const auto r = fresnel_te_tm(presets::gold_drude(), xi, xi / PhysicalConstants::c);
    CHECK(r.te == doctest::Approx(-0.809055345090234).epsilon(1e-12));
    CHECK(r.tm == doctest::Approx(0.899208429055980).epsilon(1e-12));
}

TEST_CASE("Fresnel amplitudes stay inside (-1, 1) for real materials") {
    for (double xi : {1e11, 1e13, 1e15, 1e17})
        for (double k : {0.0, 1e5, 1e7, 1e9}) {
            for (const auto& m : {presets::gold_drude(), presets::silicon_doped()}) {
                const auto r = fresnel_te_tm(m, xi, k);
                CHECK(r.te > -1.0);
                CHECK(r.te <= 0.0);
                CHECK(r.tm < 1.0);
                CHECK(r.tm >= 0.0);
            }
        }
}

TEST_CASE("ideal conductors reproduce -pi^2 hbar c / 240 z^4") {
    for (double z : {100e-9, 300e-9, 1e-6}) {
        const double p = casimir_pressure_planar(ideal_pair(), z);
        CHECK(std::abs(p / ideal_casimir_pressure(z) - 1.0) < 1e-3);
    }
    CHECK(ideal_casimir_pressure(1e-6) == doctest::Approx(-1.3001e-3).epsilon(1e-4));
}

TEST_CASE("sphere-plane gradient for ideal conductors at 1 um") {
    const double g = force_gradient_sphere_plane(ideal_pair(), 1e-6, 50e-6);
    CHECK(g == doctest::Approx(4.084e-7).epsilon(1e-3));
    CHECK(force_gradient_sphere_plane(ideal_pair(), 1e-6, 100e-6) == doctest::Approx(2.0 * g).epsilon(1e-12));
}

TEST_CASE("gold-silicon pressure is attractive, below the ideal bound and monotone") {
    double prev = 0.0;
    for (int i = 0; i <= 16; ++i) {
        const double z = 600e-9 * std::pow(100.0 / 600.0, i / 16.0);  // decreasing z
        const double p = casimir_pressure_planar(gold_silicon(), z);
        CHECK(p < 0.0);
        CHECK(std::abs(p) < std::abs(ideal_casimir_pressure(z)));
        CHECK(std::abs(p) > std::abs(prev));
        prev = p;
    }
    const double p200 = casimir_pressure_planar(gold_silicon(), 200e-9);
    CHECK(std::abs(p200) < std::abs(ideal_casimir_pressure(200e-9)));
}

TEST_CASE("pressure vanishes monotonically at large separation") {
    double prev = INFINITY;
    for (double z : {1e-6, 3e-6, 1e-5, 3e-5}) {
        const double mag = std::abs(casimir_pressure_planar(gold_silicon(), z));
        CHECK(mag < prev);
        prev = mag;
    }
    CHECK(prev < 1e-8);
}

TEST_CASE("doubling node counts changes the pressure by < 0.1%") {
    QuadratureSpec q;
    q.check_convergence = false;
    for (double z : {100e-9, 300e-9, 1e-6}) {
        const double a = casimir_pressure_planar_fixed(gold_silicon(), z, q);
        const double b = casimir_pressure_planar_fixed(gold_silicon(), z, q.doubled());
        CHECK(std::abs(a - b) / std::abs(b) < 1e-3);
    }
}

TEST_CASE("quadrature spec validation and escalation failure") {
    QuadratureSpec q;
    q.radial_nodes = 4;
    CHECK_THROWS_AS(casimir_pressure_planar(ideal_pair(), 1e-7, q), DomainError);
    QuadratureSpec strict;
    strict.tolerance = 1e-300;
    strict.max_escalations = 0;
    strict.radial_nodes = 8;
    strict.angular_nodes = 8;
    try {
        casimir_pressure_planar(gold_silicon(), 1e-7, strict);
        FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
        CHECK(e.residual() > 0.0);
    }
    CHECK_THROWS_AS(casimir_pressure_planar(ideal_pair(), 0.0), DomainError);
}

TEST_CASE("roughness: zero rms is the identity") {
    ForceCurve c;
    for (int i = 0; i < 10; ++i) c.push_back((100 + 50 * i) * 1e-9, 1.0 / std::pow(100 + 50 * i, 4));
    const auto out = apply_roughness_correction(c, RoughnessSpec{});
    CHECK(out.value == c.value);
}

TEST_CASE("roughness: symmetric two-point distribution on 1/z^4") {
    const double h = 5e-9;
    RoughnessSpec spec;
    spec.distribution = TabulatedRoughness{{-h, h}, {1.0, 1.0}};
    auto law = [](double z) { return 1.0 / std::pow(z, 4); };
    for (double z : {50e-9, 100e-9, 300e-9}) {
        const double expected = 0.5 * (std::pow(1.0 + h / z, -4) + std::pow(1.0 - h / z, -4));
        CHECK(roughness_average(law, spec, z) / law(z) == doctest::Approx(expected).epsilon(1e-13));
        CHECK(expected > 1.0);
    }
    ForceCurve c;
    for (int i = 0; i <= 20; ++i) c.push_back((80 + 20 * i) * 1e-9, law((80 + 20 * i) * 1e-9));
    const auto out = apply_roughness_correction(c, spec);
    CHECK(out.value[1] / c.value[1] == doctest::Approx(0.5 * (std::pow(1.0 + h / 100e-9, -4) + std::pow(1.0 - h / 100e-9, -4))).epsilon(1e-9));
}

TEST_CASE("roughness: measured rms on gold-silicon gives a few percent, decreasing with z") {
    RoughnessSpec spec{4e-9, 0.6e-9, GaussianRoughness{}};
    CHECK(spec.combined_rms() == doctest::Approx(std::hypot(4e-9, 0.6e-9)));
    QuadratureSpec q;
    q.check_convergence = false;
    auto law = [&](double z) { return -casimir_pressure_planar_fixed(gold_silicon(), z, q); };
    double prev = INFINITY;
    for (double z : {100e-9, 200e-9, 400e-9}) {
        const double ratio = roughness_average(law, spec, z) / law(z);
        // Oracle: trapezoidal average of the untruncated Gaussian on a 10x finer height grid.
        const double sigma = spec.combined_rms();
        double num = 0.0, den = 0.0;
        const int n = 201;
        for (int i = 0; i < n; ++i) {
            const double hh = -3.0 * sigma + 6.0 * sigma * i / (n - 1);
            const double w = std::exp(-0.5 * hh * hh / (sigma * sigma)) * ((i == 0 || i == n - 1) ? 0.5 : 1.0);
            num += w * law(z + hh);
            den += w;
        }
        CHECK(ratio == doctest::Approx(num / den / law(z)).epsilon(2e-3));
        CHECK(ratio > 1.0);
        CHECK(ratio < prev);
        prev = ratio;
        if (z == 100e-9) {
            CHECK(ratio > 1.005);
            CHECK(ratio < 1.06);
        }
    }
}

TEST_CASE("roughness: separation inside roughness span is rejected") {
    RoughnessSpec spec{4e-9, 0.6e-9, GaussianRoughness{}};
    CHECK_THROWS_AS(roughness_average([](double) { return 1.0; }, spec, 10e-9), DomainError);
}
