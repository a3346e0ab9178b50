#include "casimir/checks.hpp"

#include <cmath>
#include <functional>

#include <Eigen/SVD>
#include <fmt/format.h>

#include "casimir/calibration.hpp"
#include "casimir/constants.hpp"
#include "casimir/electrostatics.hpp"
#include "casimir/errors.hpp"
#include "casimir/grating_scattering.hpp"
#include "casimir/pfa.hpp"
#include "casimir/pipeline.hpp"
#include "casimir/planar_lifshitz.hpp"

namespace casimir {

namespace {

using Suite = std::vector<CheckResult>;

void add(Suite& out, const std::string& name, const std::function<std::pair<bool, std::string>()>& body) {
    try {
        auto [ok, detail] = body();
        out.push_back({name, ok, detail});
    } catch (const std::exception& e) {
        out.push_back({name, false, e.what()});
    }
}

double rel(double a, double b) { return std::abs(a / b - 1.0); }

Suite materials_checks() {
    Suite out;
    for (const char* name : {"gold_drude", "si_paper"}) {
        add(out, fmt::format("{} decreasing above 1", name), [name] {
            const auto m = presets::by_name(name);
            double prev = INFINITY;
            for (int i = 0; i <= 40; ++i) {
                const double xi = 1e12 * std::pow(10.0, i * 0.1);
                const double e = epsilon_at_imaginary_frequency(m, xi);
                if (!(e > 1.0) || !(e < prev)) return std::pair{false, fmt::format("eps({:.3e}) = {:.6g}", xi, e)};
                prev = e;
            }
            return std::pair{true, std::string("xi in [1e12, 1e16] rad/s")};
        });
    }
    add(out, "perfect conductor has no finite permittivity", [] {
        try {
            epsilon_at_imaginary_frequency(DielectricModel::perfect_conductor(), 1e15);
        } catch (const DomainError&) {
            return std::pair{true, std::string("DomainError")};
        }
        return std::pair{false, std::string("no error raised")};
    });
    return out;
}

Suite planar_checks() {
    Suite out;
    const auto pc = DielectricModel::perfect_conductor();
    for (double z : {100e-9, 300e-9, 1e-6}) {
        add(out, fmt::format("ideal mirrors at {:g} nm", z * 1e9), [&] {
            const double p = casimir_pressure_planar({pc, pc, {}}, z);
            const double e = rel(p, ideal_casimir_pressure(z));
            return std::pair{e < 1e-3, fmt::format("relative error {:.2e}", e)};
        });
    }
    add(out, "gold-silicon weaker than ideal at 200 nm", [] {
        const double p = casimir_pressure_planar({presets::gold_drude(), presets::by_name("si_paper"), {}}, 200e-9);
        return std::pair{p < 0.0 && std::abs(p) < std::abs(ideal_casimir_pressure(200e-9)), fmt::format("P = {:.4g} Pa", p)};
    });
    add(out, "fresnel limits of the ideal mirror", [] {
        const auto r = fresnel_te_tm(presets::gold_drude(), 1e13, 1e5);
        return std::pair{r.te < 0.0 && r.te > -1.0 && r.tm > 0.0 && r.tm < 1.0,
                         fmt::format("r_te = {:.6f}, r_tm = {:.6f}", r.te, r.tm)};
    });
    return out;
}

Suite pfa_checks() {
    Suite out;
    const auto profile = GratingProfile::measured_sample();
    const auto law = FlatForceLaw::analytic([](double z) { return -1.0 / std::pow(z, 4); });
    add(out, "zero depth collapses to the flat law", [&] {
        const auto flat = profile.with_depth(0.0);
        const double e = rel(pfa_corrugated(law, flat, 150e-9), law(150e-9));
        return std::pair{e < 1e-12, fmt::format("relative error {:.2e}", e)};
    });
    add(out, "bounded by p1 F(z) and F(z)", [&] {
        for (double z : {100e-9, 200e-9, 400e-9}) {
            const double f = std::abs(pfa_corrugated(law, profile, z));
            if (!(f > profile.p1() * std::abs(law(z)) && f < std::abs(law(z))))
                return std::pair{false, fmt::format("z = {:g} nm", z * 1e9)};
        }
        return std::pair{true, std::string("z = 100, 200, 400 nm")};
    });
    add(out, "terms sum to the total", [&] {
        const auto t = pfa_terms(law, profile, 200e-9);
        const double e = rel(t.total(), pfa_corrugated(law, profile, 200e-9));
        return std::pair{e < 1e-14, fmt::format("relative error {:.2e}", e)};
    });
    return out;
}

Suite grating_checks() {
    Suite out;
    const auto profile = GratingProfile::measured_sample();
    const auto si = presets::by_name("si_paper");
    TruncationSpec spec;
    spec.orders = 4;
    add(out, "passivity in flux-normalized amplitudes", [&] {
        double worst = 0.0;
        for (double xi : {3e14, 3e15})
            for (double kx : {0.0, 0.5 * pi / profile.period()}) {
                const auto r = grating_reflection(profile, si, xi, kx, 1e6, spec);
                const Eigen::JacobiSVD<Eigen::MatrixXd> svd(flux_normalized(r, profile.period()));
                worst = std::max(worst, svd.singularValues()(0));
            }
        return std::pair{worst <= 1.0 + 1e-9, fmt::format("largest singular value {:.9f}", worst)};
    });
    add(out, "zero-depth grating equals the flat half-space", [&] {
        const auto flat = profile.with_depth(0.0);
        const auto g = grating_reflection(flat, si, 1e15, 0.3e6, 2e6, spec);
        const auto p = planar_reflection(si, flat.period(), 1e15, 0.3e6, 2e6, spec.orders);
        const double d = (g.matrix - p.matrix).cwiseAbs().maxCoeff();
        return std::pair{d < 1e-10, fmt::format("max difference {:.2e}", d)};
    });
    add(out, "zero-depth rho is one", [&] {
        TruncationSpec s = spec;
        s.orders = 2;
        const auto rho = rho_ratio(profile.with_depth(0.0), si, presets::gold_drude(), {150e-9}, s);
        const double e = std::abs(rho.value[0] - 1.0);
        return std::pair{e < 2e-3, fmt::format("|rho - 1| = {:.2e}", e)};
    });
    return out;
}

Suite electrostatics_checks() {
    Suite out;
    add(out, "zero force at the residual voltage", [] {
        const double f = sphere_plane_force({50e-6, 200e-9, -0.499, -0.499});
        return std::pair{f == 0.0, fmt::format("F = {:g}", f)};
    });
    add(out, "series approaches the small-gap limit", [] {
        const double r = 50e-6;
        const auto deviation = [r](double d) {
            return rel(sphere_plane_force({r, d, 0.3, 0.0}), pi * PhysicalConstants::epsilon0 * r * 0.09 / d);
        };
        const double coarse = deviation(1e-6), fine = deviation(1e-7);
        return std::pair{fine < coarse, fmt::format("deviation {:.2e} at d/R = 0.02, {:.2e} at 0.002", coarse, fine)};
    });
    add(out, "flat capacitor energy", [] {
        const auto flat = GratingProfile::measured_sample().with_depth(0.0);
        const double z = 200e-9;
        const double e = rel(solve_corrugated_capacitor(flat, z, 1.0), 0.5 * PhysicalConstants::epsilon0 / z);
        return std::pair{e < 1e-3, fmt::format("relative error {:.2e}", e)};
    });
    add(out, "corrugated gradient below flat", [] {
        const auto profile = GratingProfile::measured_sample();
        const double g = corrugated_sphere_gradient(profile, 200e-9, 0.3, 50e-6);
        const double f = sphere_plane_gradient({50e-6, 200e-9, 0.3, 0.0});
        return std::pair{g < f, fmt::format("{:.4g} < {:.4g} N/m", g, f)};
    });
    return out;
}

Suite calibration_checks() {
    Suite out;
    add(out, "noiseless round trip", [] {
        SyntheticSweep s;
        s.voltages = {-0.2, 0.1, 0.4};
        for (int i = 0; i < 12; ++i) s.z_piezo.push_back(i * 50e-9);
        const auto model = ElectrostaticModel::eq3(50e-6);
        FitOptions o;
        o.residual_voltage = s.residual_voltage;
        const auto fit = fit_calibration(synthesize_sweep(s, model), model, o);
        const double e = std::max(rel(fit.c, s.c), rel(fit.z0, s.z0));
        return std::pair{e < 1e-6, fmt::format("C = {:.9g}, z0 = {:.9g} nm", fit.c, fit.z0 * 1e9)};
    });
    add(out, "parabola vertex", [] {
        SyntheticSweep s;
        s.voltages = {-1.0, -0.6, -0.2, 0.2};
        s.z_piezo = {0.0};
        const auto v = find_residual_voltage(synthesize_sweep(s, ElectrostaticModel::eq3(50e-6)));
        return std::pair{std::abs(v.v0 - s.residual_voltage) < 1e-9, fmt::format("V0 = {:.9f} V", v.v0)};
    });
    return out;
}

Suite pipeline_checks() {
    Suite out;
    const std::string text =
        "[pipeline]\nrecipe = fig3a\n[grid]\nz = 100nm, 200nm, 400nm\n"
        "[quadrature]\ncheck_convergence = false\n[roughness]\nenabled = true\n";
    add(out, "fig3a deterministic", [&] {
        const auto a = run_pipeline(Config::parse(text)).csv();
        const auto b = run_pipeline(Config::parse(text)).csv();
        return std::pair{a == b, fmt::format("{} bytes", a.size())};
    });
    add(out, "fig3a monotone and roughness raises the gradient", [&] {
        const auto rough = run_pipeline(Config::parse(text)).curves.front();
        auto smooth_cfg = Config::parse(text);
        smooth_cfg.set("roughness.enabled", "false");
        const auto smooth = run_pipeline(smooth_cfg).curves.front();
        const bool monotone = rough.value[0] > rough.value[1] && rough.value[1] > rough.value[2];
        return std::pair{monotone && rough.value[0] > smooth.value[0],
                         fmt::format("{:.4g} vs {:.4g} N/m at 100 nm", rough.value[0], smooth.value[0])};
    });
    return out;
}

}  // namespace

std::vector<CheckResult> run_checks(const std::string& module) {
    if (module == "materials") return materials_checks();
    if (module == "planar") return planar_checks();
    if (module == "pfa") return pfa_checks();
    if (module == "grating") return grating_checks();
    if (module == "electrostatics") return electrostatics_checks();
    if (module == "calibrate") return calibration_checks();
    if (module == "pipeline") return pipeline_checks();
    throw DomainError(fmt::format("no checks for module '{}'", module));
}

std::string format_checks(const std::vector<CheckResult>& results) {
    std::string out;
    for (const auto& r : results) out += fmt::format("{} {}: {}\n", r.passed ? "PASS" : "FAIL", r.name, r.detail);
    return out;
}

}  // namespace casimir
