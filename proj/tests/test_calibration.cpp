#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "casimir/calibration.hpp"
#include "casimir/constants.hpp"
#include "casimir/errors.hpp"

using namespace casimir;

namespace {

const double R = 50e-6;

std::vector<double> piezo_grid(double z0, double z_lo, double z_hi, int n) {
    std::vector<double> zp;
    for (int i = 0; i < n; ++i) zp.push_back(z0 - (z_lo + (z_hi - z_lo) * i / (n - 1)));
    return zp;
}

SyntheticSweep reference_sweep() {
    SyntheticSweep s;
    s.voltages = {-0.499 + 0.245, -0.499 + 0.3, -0.499 - 0.27};
    s.z_piezo = piezo_grid(800e-9, 100e-9, 600e-9, 21);
    return s;
}

FitOptions reference_options() {
    FitOptions o;
    o.residual_voltage = -0.499;
    return o;
}

FlatForceLaw ideal_gradient() {
    return FlatForceLaw::analytic(
        [](double z) { return -2.0 * pi * R * ideal_casimir_pressure(z); }, 1e-9, INFINITY, "N/m");
}

}  // namespace

TEST_CASE("frequency shift arithmetic") {
    CHECK(predict_frequency_shift(-614.0, 0.0) == 0.0);
    CHECK(std::abs(predict_frequency_shift(-614.0, 1e-6)) == doctest::Approx(6.14e-4));
    CHECK(predict_frequency_shift(-614.0, 1e-6) < 0.0);
}

TEST_CASE("calibration constant and moment of inertia round trip") {
    const double inertia = inertia_from_constant(-614.0, 210e-6, 1783.0);
    CHECK(inertia > 0.0);
    CHECK(calibration_constant(210e-6, inertia, 1783.0) == doctest::Approx(-614.0).epsilon(1e-14));
    CHECK_THROWS_AS(inertia_from_constant(614.0, 210e-6, 1783.0), DomainError);
    CHECK_THROWS_AS(calibration_constant(210e-6, -1.0, 1783.0), DomainError);
}

TEST_CASE("noiseless series data are recovered exactly") {
    const auto model = ElectrostaticModel::eq3(R);
    const auto data = synthesize_sweep(reference_sweep(), model);
    for (const auto& s : data) CHECK(DistanceModel{800e-9}.separation(s.z_piezo, s.theta) > 0.0);
    const auto fit = fit_calibration(data, model, reference_options());
    CHECK(fit.c == doctest::Approx(-614.0).epsilon(1e-6));
    CHECK(fit.z0 == doctest::Approx(800e-9).epsilon(1e-6));
    CHECK(fit.rms_residual < 1e-9 * std::abs(data.front().delta_f));
}

TEST_CASE("noiseless FEM-model data are recovered exactly") {
    std::vector<double> grid;
    for (double z = 80e-9; z <= 720e-9; z += 40e-9) grid.push_back(z);
    MeshControl coarse;
    coarse.columns = 80;
    coarse.gap_rows = 20;
    coarse.trench_rows = 12;
    const auto model = ElectrostaticModel::fem(GratingProfile::measured_sample(), R, grid, coarse);
    const auto data = synthesize_sweep(reference_sweep(), model);
    const auto fit = fit_calibration(data, model, reference_options());
    CHECK(fit.c == doctest::Approx(-614.0).epsilon(1e-6));
    CHECK(fit.z0 == doctest::Approx(800e-9).epsilon(1e-6));
    CHECK_THROWS_AS(model.gradient(50e-9, 0.3), DomainError);
}

TEST_CASE("1% noise: estimates within 3 sigma of the truth") {
    const auto model = ElectrostaticModel::eq3(R);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto spec = reference_sweep();
        spec.relative_noise = 0.01;
        spec.seed = seed;
        auto options = reference_options();
        options.weighting = FitOptions::Weighting::Relative;
        const auto fit = fit_calibration(synthesize_sweep(spec, model), model, options);
        CHECK(fit.sigma_c > 0.0);
        CHECK(std::abs(fit.c + 614.0) < 3.0 * fit.sigma_c);
        CHECK(std::abs(fit.z0 - 800e-9) < 3.0 * fit.sigma_z0);
    }
}

TEST_CASE("degenerate designs are rejected") {
    const auto model = ElectrostaticModel::eq3(R);
    auto spec = reference_sweep();
    spec.z_piezo = {300e-9};
    CHECK_THROWS_AS(fit_calibration(synthesize_sweep(spec, model), model, reference_options()), FitError);
    spec = reference_sweep();
    spec.voltages = {-0.499};
    CHECK_THROWS_AS(fit_calibration(synthesize_sweep(spec, model), model, reference_options()), FitError);
    CHECK_THROWS_AS(fit_calibration({}, model, reference_options()), FitError);
}

TEST_CASE("a constant piezo offset moves only z0") {
    const auto model = ElectrostaticModel::eq3(R);
    auto data = synthesize_sweep(reference_sweep(), model);
    const auto base = fit_calibration(data, model, reference_options());
    for (auto& s : data) s.z_piezo += 57e-9;
    const auto shifted = fit_calibration(data, model, reference_options());
    CHECK(shifted.c == doctest::Approx(base.c).epsilon(1e-8));
    CHECK(shifted.z0 - base.z0 == doctest::Approx(57e-9).epsilon(1e-6));
}

TEST_CASE("tilt enters through b theta") {
    const auto model = ElectrostaticModel::eq3(R);
    auto spec = reference_sweep();
    spec.theta = 1e-4;
    const auto fit = fit_calibration(synthesize_sweep(spec, model), model, reference_options());
    CHECK(fit.z0 == doctest::Approx(800e-9).epsilon(1e-6));
}

TEST_CASE("known Casimir background and voltage differences give the same C") {
    const auto model = ElectrostaticModel::eq3(R);
    auto spec = reference_sweep();
    spec.casimir_background = ideal_gradient();
    const auto data = synthesize_sweep(spec, model);

    auto with_background = reference_options();
    with_background.casimir_background = ideal_gradient();
    const auto a = fit_calibration(data, model, with_background);

    auto differences = reference_options();
    differences.difference_reference_voltage = spec.voltages.front();
    const auto b = fit_calibration(data, model, differences);

    CHECK(a.c == doctest::Approx(-614.0).epsilon(1e-6));
    CHECK(b.c == doctest::Approx(a.c).epsilon(1e-6));
    CHECK(b.z0 == doctest::Approx(a.z0).epsilon(1e-6));

    // Ignoring the background biases the fit.
    const auto ignored = fit_calibration(data, model, reference_options());
    CHECK(std::abs(ignored.c + 614.0) > 1.0);
}

TEST_CASE("averaging six voltage sets shrinks the spread by about sqrt(6)") {
    const auto model = ElectrostaticModel::eq3(R);
    const std::vector<double> dvs{0.245, 0.256, 0.267, 0.278, 0.289, 0.3};
    std::vector<double> single, averaged;
    for (std::uint64_t trial = 0; trial < 40; ++trial) {
        std::vector<std::vector<FrequencyShiftSample>> sets;
        for (std::size_t k = 0; k < dvs.size(); ++k) {
            SyntheticSweep s;
            s.voltages = {-0.499 + dvs[k]};
            s.z_piezo = piezo_grid(800e-9, 100e-9, 600e-9, 21);
            s.relative_noise = 0.01;
            s.seed = 1000 * trial + k + 1;
            sets.push_back(synthesize_sweep(s, model));
        }
        const auto avg = fit_calibration_sets(sets, model, reference_options());
        CHECK(avg.sets.size() == 6);
        single.push_back(avg.sets.front().c);
        averaged.push_back(avg.c);
    }
    auto spread = [](const std::vector<double>& v) {
        const double m = std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
        double s = 0.0;
        for (double x : v) s += (x - m) * (x - m);
        return std::sqrt(s / double(v.size() - 1));
    };
    const double ratio = spread(single) / spread(averaged);
    CHECK(ratio > std::sqrt(6.0) / 1.6);
    CHECK(ratio < std::sqrt(6.0) * 1.6);
}

TEST_CASE("residual voltage from the parabola vertex") {
    const auto model = ElectrostaticModel::eq3(R);
    SyntheticSweep s;
    s.z_piezo = {500e-9};
    for (double v = -0.8; v <= -0.2 + 1e-12; v += 0.05) s.voltages.push_back(v);
    const auto fit = find_residual_voltage(synthesize_sweep(s, model));
    CHECK(fit.v0 == doctest::Approx(-0.499).epsilon(1e-9));
    CHECK(fit.curvature < 0.0);

    const std::vector<FrequencyShiftSample> three{{0.0, 0.0, -1.0, 4.0}, {0.0, 0.0, 0.0, 1.0}, {0.0, 0.0, 1.0, 4.0}};
    CHECK(find_residual_voltage(three).v0 == doctest::Approx(0.0).epsilon(1e-15));

    const std::vector<FrequencyShiftSample> line{{0.0, 0.0, -1.0, 1.0}, {0.0, 0.0, 0.0, 2.0}, {0.0, 0.0, 1.0, 3.0}};
    CHECK_THROWS_AS(find_residual_voltage(line), FitError);
    CHECK_THROWS_AS(find_residual_voltage({three[0], three[1]}), FitError);
    const std::vector<FrequencyShiftSample> mixed{{0.0, 0.0, -1.0, 4.0}, {1e-7, 0.0, 0.0, 1.0}, {0.0, 0.0, 1.0, 4.0}};
    CHECK_THROWS_AS(find_residual_voltage(mixed), DomainError);
}

TEST_CASE("residual voltage drift check") {
    const auto model = ElectrostaticModel::eq3(R);
    auto vertex_at = [&](double v0, double zp) {
        SyntheticSweep s;
        s.residual_voltage = v0;
        s.z_piezo = {zp};
        s.voltages = {-0.8, -0.65, -0.5, -0.35, -0.2};
        return find_residual_voltage(synthesize_sweep(s, model));
    };
    const auto near = vertex_at(-0.499, 700e-9);
    CHECK(residual_voltage_drift({near, vertex_at(-0.4975, 200e-9)}).within_tolerance);
    CHECK_FALSE(residual_voltage_drift({near, vertex_at(-0.495, 200e-9)}).within_tolerance);
}

TEST_CASE("sweep CSV round trip and parse errors") {
    const auto data = synthesize_sweep(reference_sweep(), ElectrostaticModel::eq3(R));
    const auto back = parse_sweep_csv(format_sweep_csv(data));
    REQUIRE(back.size() == data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        CHECK(back[i].z_piezo == doctest::Approx(data[i].z_piezo).epsilon(1e-15));
        CHECK(back[i].delta_f == data[i].delta_f);
    }
    try {
        parse_sweep_csv("z_piezo_nm,theta_rad,V_volt,delta_f_hz\n1,0,0.3,-1e-3\n2,0,x,1\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    CHECK_THROWS_AS(parse_sweep_csv("a,b\n"), ParseError);
    const auto report = format_fit_report(fit_calibration(data, ElectrostaticModel::eq3(R), reference_options()));
    CHECK(report.find("C: -614") != std::string::npos);
    CHECK(report.find("z0_nm: 800") != std::string::npos);
}
