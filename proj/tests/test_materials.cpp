#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "casimir/constants.hpp"
#include "casimir/errors.hpp"
#include "casimir/materials.hpp"

using namespace casimir;

TEST_CASE("Drude gold at xi = 9 eV") {
    const auto gold = presets::gold_drude();
    const double xi = ev_to_rad_per_s(9.0);
    // 1 + 81 / (9 * 9.035), evaluated in extended precision.
    CHECK(epsilon_at_imaginary_frequency(gold, xi) == doctest::Approx(1.99612617598229).epsilon(1e-12));
}

TEST_CASE("Drude tends to one at high frequency") {
    const auto gold = presets::gold_drude();
    CHECK(epsilon_at_imaginary_frequency(gold, 1e22) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("silicon carrier term at xi = omega_p") {
    const auto p = presets::silicon_carrier_params();
    CHECK(drude_term(p, p.plasma_frequency) == doctest::Approx(1.36 / 1.835).epsilon(1e-12));
    const auto si = presets::silicon_doped();
    const double xi = p.plasma_frequency;
    CHECK(epsilon_at_imaginary_frequency(si, xi) ==
          doctest::Approx(std::get<DrudeLorentz>(si.variant()).params.intrinsic(xi) + 1.36 / 1.835).epsilon(1e-12));
}

TEST_CASE("domain errors") {
    const auto gold = presets::gold_drude();
    CHECK_THROWS_AS(epsilon_at_imaginary_frequency(gold, 0.0), DomainError);
    CHECK_THROWS_AS(epsilon_at_imaginary_frequency(gold, -1.0), DomainError);
    CHECK_THROWS_AS(epsilon_at_imaginary_frequency(DielectricModel::perfect_conductor(), 1e15), DomainError);
    CHECK_THROWS_AS(DrudeParams::from_ev(0.0, 0.1), DomainError);
}

TEST_CASE("epsilon is >= 1 and non-increasing on a log grid") {
    const DielectricModel models[] = {presets::gold_drude(), presets::silicon_doped()};
    for (const auto& m : models) {
        double prev = INFINITY;
        for (int i = 0; i <= 120; ++i) {
            const double xi = std::pow(10.0, 12.0 + 6.0 * i / 120.0);
            const double eps = epsilon_at_imaginary_frequency(m, xi);
            CHECK(eps >= 1.0);
            CHECK(eps <= prev);
            prev = eps;
        }
    }
}

TEST_CASE("eV round trip keeps 12 significant digits") {
    const double w = ev_to_rad_per_s(9.0);
    CHECK(std::abs(rad_per_s_to_ev(w) - 9.0) / 9.0 < 1e-12);
}

TEST_CASE("table interpolation is exact at knots and linear in log xi") {
    EpsilonTable t({1e14, 1e15, 1e16}, {11.0, 9.0, 3.0});
    CHECK(t(1e14) == 11.0);
    CHECK(t(1e15) == 9.0);
    CHECK(t(1e16) == 3.0);
    CHECK(t(std::sqrt(1e14 * 1e15)) == doctest::Approx(10.0).epsilon(1e-14));
    SUBCASE("extrapolation rules") {
        CHECK(t(1e12) == 11.0);
        CHECK(t(1e17) == doctest::Approx(1.0 + 2.0 * 1e-2).epsilon(1e-14));
        t.set_extrapolate(false);
        CHECK_THROWS_AS(t(1e17), RangeError);
        CHECK_THROWS_AS(t(1e12), RangeError);
    }
}

TEST_CASE("bundled intrinsic silicon table matches its oscillator model at midpoints") {
    const auto table = load_tabulated_epsilon("data/intrinsic_si.dat");
    CHECK(table.size() > 100);
    CHECK(table.frequencies().front() <= 1e11);
    CHECK(table.frequencies().back() >= 1e19);
    const auto& xi = table.frequencies();
    for (std::size_t i = 0; i + 1 < xi.size(); ++i) {
        const double mid = std::sqrt(xi[i] * xi[i + 1]);
        CHECK(table(mid) == doctest::Approx(presets::intrinsic_silicon_oscillator(mid)).epsilon(2e-3));
    }
}

TEST_CASE("parse tabulated epsilon") {
    SUBCASE("two valid rows") {
        const auto t = parse_tabulated_epsilon("# xi eps\n1e15 2.0\n1e14 3.0  # unsorted\n");
        CHECK(t.size() == 2);
        CHECK(t.frequencies().front() == 1e14);
    }
    SUBCASE("epsilon below one") {
        try {
            parse_tabulated_epsilon("1e14 3.0\n1e15 0.5\n");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 2);
        }
    }
    SUBCASE("non-numeric row names its line") {
        try {
            parse_tabulated_epsilon("1e14 3.0\n\n1e15 abc\n");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 3);
        }
    }
    SUBCASE("non-monotone epsilon") {
        CHECK_THROWS_AS(parse_tabulated_epsilon("1e14 3.0\n1e15 4.0\n"), ParseError);
    }
    SUBCASE("duplicate frequency") {
        CHECK_THROWS_AS(parse_tabulated_epsilon("1e14 3.0\n1e14 3.0\n"), ParseError);
    }
}
