#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "casimir/constants.hpp"
#include "casimir/errors.hpp"
#include "casimir/grating_scattering.hpp"
#include "casimir/planar_lifshitz.hpp"
#include "grating_oracle.hpp"

using namespace casimir;

namespace {

const double lambda = 400e-9;

GratingProfile measured_profile() { return GratingProfile::measured_sample(); }

GratingProfile vertical_walls() { return GratingProfile(lambda, 185.3e-9, 214.7e-9, 98e-9, 90.0); }

TruncationSpec coarse(int orders) {
    TruncationSpec s;
    s.orders = orders;
    s.quadrature = {4, 16, 8};
    return s;
}

double max_singular_value(const Eigen::MatrixXd& m) {
    return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0);
}

}  // namespace

TEST_CASE("vertical-wall slab matches the transfer-matrix oracle at N = 1") {
    const auto si = presets::silicon_doped();
    TruncationSpec spec;
    spec.orders = 1;
    spec.n_slices = 1;
    const auto g = vertical_walls();
    for (const auto& [xi, kx, ky] : {std::tuple{2e15, 0.3 * pi / lambda, 4e6}, std::tuple{5e14, -0.9 * pi / lambda, 0.0},
                                     std::tuple{1e16, 0.0, 2e7}}) {
        const auto r = grating_reflection(g, si, xi, kx, ky, spec);
        const auto o = oracle::slab_reflection(lambda, g.p1(), g.depth(), epsilon_at_imaginary_frequency(si, xi), xi,
                                               kx, ky, 1);
        CHECK((r.matrix - o).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("flat grating equals Fresnel on every order") {
    const auto gold = presets::gold_drude();
    const GratingProfile flat(lambda, 200e-9, 200e-9, 0.0, 90.0);
    TruncationSpec spec;
    spec.orders = 3;
    const double xi = 3e15, kx = 0.2 * pi / lambda, ky = 1e6;
    const auto r = grating_reflection(flat, gold, xi, kx, ky, spec);
    const auto p = planar_reflection(gold, lambda, xi, kx, ky, 3);
    CHECK(r.dimension() == 14);
    CHECK((r.matrix - p.matrix).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::MatrixXd off = p.matrix;
    off.diagonal().setZero();
    CHECK(off.cwiseAbs().maxCoeff() == 0.0);
    for (int n = 0; n < 7; ++n) {
        const double kn = std::hypot(kx + 2 * pi / lambda * (n - 3), ky);
        const auto f = fresnel_te_tm(gold, xi, kn);
        CHECK(p.matrix(n, n) == doctest::Approx(f.te).epsilon(1e-13));
        CHECK(p.matrix(7 + n, 7 + n) == doctest::Approx(f.tm).epsilon(1e-13));
    }
}

TEST_CASE("fill fraction one is a planar half-space") {
    const auto si = presets::silicon_doped();
    const GratingProfile full(lambda, lambda, 0.0, 98e-9, 90.0);
    TruncationSpec spec;
    spec.orders = 2;
    const auto r = grating_reflection(full, si, 1e15, 0.5 * pi / lambda, 3e6, spec);
    const auto p = planar_reflection(si, lambda, 1e15, 0.5 * pi / lambda, 3e6, 2);
    CHECK((r.matrix - p.matrix).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("passivity over a sample of points") {
    const auto si = presets::silicon_doped();
    TruncationSpec spec;
    spec.orders = 4;
    for (double xi : {1e13, 1e15, 1e16})
        for (double kx : {0.0, 0.5 * pi / lambda, pi / lambda})
            for (double ky : {0.0, 1e7}) {
                const auto r = grating_reflection(measured_profile(), si, xi, kx, ky, spec);
                CHECK(max_singular_value(flux_normalized(r, lambda)) <= 1.0 + 1e-8);
            }
}

TEST_CASE("loop integrand is even in k_x") {
    const auto si = presets::silicon_doped();
    const auto gold = presets::gold_drude();
    TruncationSpec spec;
    spec.orders = 3;
    for (double kx : {0.17 * pi / lambda, 0.8 * pi / lambda}) {
        const double xi = 2e15, ky = 5e6, z = 150e-9;
        const auto plus = loop_trace_integrand(planar_reflection(gold, lambda, xi, kx, ky, 3),
                                               grating_reflection(measured_profile(), si, xi, kx, ky, spec), z, lambda);
        const auto minus = loop_trace_integrand(planar_reflection(gold, lambda, xi, -kx, ky, 3),
                                                grating_reflection(measured_profile(), si, xi, -kx, ky, spec), z, lambda);
        CHECK(std::abs(plus - minus) <= 1e-10 * std::abs(plus));
    }
}

TEST_CASE("k_x outside the Brillouin zone is a domain error") {
    TruncationSpec spec;
    spec.orders = 1;
    CHECK_THROWS_AS(grating_reflection(measured_profile(), presets::gold_drude(), 1e15, 1.01 * pi / lambda, 0.0, spec),
                    DomainError);
    CHECK_THROWS_AS(grating_reflection(measured_profile(), presets::gold_drude(), 0.0, 0.0, 0.0, spec), DomainError);
    spec.orders = -1;
    CHECK_THROWS_AS(spec.validate(), DomainError);
}

TEST_CASE("flat grating reproduces planar Lifshitz") {
    const GratingProfile flat(lambda, 200e-9, 200e-9, 0.0, 90.0);
    const auto gold = presets::gold_drude();
    const auto si = presets::silicon_doped();
    TruncationSpec spec;
    spec.orders = 4;
    for (double z : {100e-9, 300e-9}) {
        const double p = casimir_force_grating(flat, si, gold, z, spec);
        const double ref = casimir_pressure_planar({gold, si, {}}, z);
        CHECK(p == doctest::Approx(ref).epsilon(1e-3));
    }
}

TEST_CASE("order sweep converges monotonically") {
    const auto trace = grating_order_sweep(measured_profile(), presets::silicon_doped(), presets::gold_drude(), {150e-9},
                                           coarse(2), {2, 4, 6, 8});
    REQUIRE(trace.values.size() == 4);
    double previous = INFINITY;
    for (std::size_t i = 1; i < trace.values.size(); ++i) {
        const double change = std::abs(trace.values[i][0] - trace.values[i - 1][0]);
        CHECK(change < previous);
        previous = change;
    }
    CHECK(trace.last_relative_change() < 5e-3);
    CHECK(trace.to_csv().rfind("N,z_nm,value", 0) == 0);
}

TEST_CASE("rho tends to one at small separation and is one for a flat grating") {
    const auto si = presets::silicon_doped();
    const auto gold = presets::gold_drude();
    const auto rho = rho_ratio(measured_profile(), si, gold, {50e-9, 100e-9, 150e-9}, coarse(6));
    REQUIRE(rho.value.size() == 3);
    for (double r : rho.value) CHECK(r > 1.0);
    CHECK(rho.value[0] < rho.value[1]);
    CHECK(rho.value[1] < rho.value[2]);

    const GratingProfile flat(lambda, 200e-9, 200e-9, 0.0, 90.0);
    TruncationSpec spec;
    spec.orders = 3;
    const auto one = rho_ratio(flat, si, gold, {100e-9, 200e-9}, spec);
    for (double r : one.value) CHECK(r == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("ideal conductors deviate more from PFA than real materials") {
    const std::vector<double> z{100e-9, 200e-9};
    const auto real = rho_ratio(measured_profile(), presets::silicon_doped(), presets::gold_drude(), z, coarse(6));
    const auto ideal = rho_ratio(measured_profile(), DielectricModel::perfect_conductor(),
                                 DielectricModel::perfect_conductor(), z, coarse(6));
    for (std::size_t i = 0; i < z.size(); ++i) CHECK(ideal.value[i] > real.value[i]);
}
