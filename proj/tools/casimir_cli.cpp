#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "casimir/calibration.hpp"
#include "casimir/checks.hpp"
#include "casimir/config.hpp"
#include "casimir/constants.hpp"
#include "casimir/electrostatics.hpp"
#include "casimir/errors.hpp"
#include "casimir/force_curve.hpp"
#include "casimir/grating_scattering.hpp"
#include "casimir/interpolation.hpp"
#include "casimir/materials.hpp"
#include "casimir/parallel.hpp"
#include "casimir/pfa.hpp"
#include "casimir/pipeline.hpp"
#include "casimir/planar_lifshitz.hpp"

namespace {

using namespace casimir;

constexpr int exit_ok = 0;
constexpr int exit_failure = 1;
constexpr int exit_usage = 2;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void emit(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    write_text(path, text);
    std::cerr << "wrote " << path << "\n";
}

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = lo * std::pow(hi / lo, double(i) / (n - 1));
    return out;
}

int run_check(const std::string& module) {
    const auto results = run_checks(module);
    std::cout << format_checks(results);
    for (const auto& r : results)
        if (!r.passed) return exit_failure;
    return exit_ok;
}

Config load_config(const std::string& path, const std::vector<std::string>& overrides) {
    Config cfg = path.empty() ? Config::parse("", "<command line>") : Config::load(path);
    for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw UsageError(fmt::format("--set expects key=value, got '{}'", kv));
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    return cfg;
}

struct MaterialsArgs {
    std::string material = "gold_drude";
    std::string table;
    std::string xi;
    std::string output;
};

int cmd_materials(const MaterialsArgs& a) {
    const DielectricModel model = a.table.empty()
                                      ? presets::by_name(a.material)
                                      : DielectricModel::tabulated(load_tabulated_epsilon(a.table), a.table);
    const auto xi = a.xi.empty() ? log_grid(1e12, 1e18, 61) : parse_quantity_list(a.xi, Quantity::AngularFrequency);
    std::string text = fmt::format("# material: {}\nxi_rad_s,xi_ev,epsilon\n", model.name());
    for (double x : xi)
        text += fmt::format("{},{},{}\n", format_number(x), format_number(rad_per_s_to_ev(x)),
                            format_number(epsilon_at_imaginary_frequency(model, x)));
    emit(text, a.output);
    return exit_ok;
}

struct PlanarArgs {
    std::string material_a = "gold_drude";
    std::string material_b = "si_paper";
    std::string z = "100:600:25nm";
    std::string radius;
    std::string rms_a;
    std::string rms_b;
    std::string output;
};

int cmd_planar(const PlanarArgs& a) {
    std::optional<RoughnessSpec> roughness;
    if (!a.rms_a.empty() || !a.rms_b.empty()) {
        RoughnessSpec r;
        if (!a.rms_a.empty()) r.rms_a = parse_quantity(a.rms_a, Quantity::Length);
        if (!a.rms_b.empty()) r.rms_b = parse_quantity(a.rms_b, Quantity::Length);
        r.validate();
        roughness = r;
    }
    const PlanarPair pair{presets::by_name(a.material_a), presets::by_name(a.material_b), roughness};
    const auto z = parse_quantity_list(a.z, Quantity::Length);
    const double radius = a.radius.empty() ? 0.0 : parse_quantity(a.radius, Quantity::Length);

    ForceCurve c;
    c.z = z;
    c.value.resize(z.size());
    parallel_for(z.size(), [&](std::size_t i) {
        const double p = casimir_pressure_planar(pair, z[i]);
        c.value[i] = radius > 0.0 ? -2.0 * pi * radius * p : p;
    });
    c.label = radius > 0.0 ? "gradient" : "pressure";
    c.unit = radius > 0.0 ? "N/m" : "Pa";
    c.metadata = {{"materials", pair.material_a.name() + "/" + pair.material_b.name()},
                  {"roughness", roughness ? fmt::format("rms_a_nm={} rms_b_nm={}", format_number(roughness->rms_a * 1e9),
                                                        format_number(roughness->rms_b * 1e9))
                                          : "off"}};
    if (radius > 0.0) c.metadata["sphere_radius_um"] = format_number(radius * 1e6);
    emit(format_csv(c), a.output);
    return exit_ok;
}

struct PfaArgs {
    std::string config;
    std::string material_a = "gold_drude";
    std::string material_b = "si_paper";
    std::string z = "100:300:20nm";
    std::string output;
};

int cmd_pfa(const PfaArgs& a) {
    const Config cfg = load_config(a.config, {});
    const auto profile = profile_from_config(cfg);
    const PlanarPair pair{presets::by_name(a.material_a), presets::by_name(a.material_b), {}};
    const auto z = parse_quantity_list(a.z, Quantity::Length);

    const double lo = z.front(), hi = z.back() + profile.depth();
    const auto table = log_grid(lo, hi, 48);
    std::vector<double> p(table.size());
    parallel_for(table.size(), [&](std::size_t i) { p[i] = casimir_pressure_planar(pair, table[i]); });
    const MonotoneInterpolant interp(table, p, MonotoneInterpolant::Scale::LogLog);
    const auto law = FlatForceLaw::computed([interp](double x) { return interp(x); }, lo, hi, "Pa");

    ForceCurve pressure, share;
    pressure.label = "pfa_pressure";
    pressure.unit = "Pa";
    share.label = "top_bottom_share";
    share.unit = "1";
    for (double zi : z) {
        pressure.push_back(zi, pfa_corrugated(law, profile, zi));
        share.push_back(zi, pfa_share_topbottom(law, profile, zi));
    }
    const std::map<std::string, std::string> meta{
        {"materials", pair.material_a.name() + "/" + pair.material_b.name()},
        {"profile", fmt::format("period_nm={} l1_nm={} l2_nm={} depth_nm={}", format_number(profile.period() * 1e9),
                                format_number(profile.top_width() * 1e9), format_number(profile.bottom_width() * 1e9),
                                format_number(profile.depth() * 1e9))}};
    emit(format_curves_csv({pressure, share}, meta), a.output);
    return exit_ok;
}

struct GratingArgs {
    std::string config;
    std::string sweep;
    std::vector<std::string> overrides;
    std::string output;
    std::string convergence_output;
};

int cmd_grating(const GratingArgs& a) {
    Config cfg = load_config(a.config, a.overrides);
    cfg.set("pipeline.recipe", "fig3d");
    if (!a.sweep.empty()) cfg.set("sweep.orders", a.sweep);
    if (!a.output.empty()) cfg.set("pipeline.output", a.output);
    if (!a.convergence_output.empty()) cfg.set("pipeline.convergence_output", a.convergence_output);
    const auto result = run_pipeline(cfg);
    for (const auto& p : write_pipeline_outputs(result)) std::cerr << "wrote " << p.string() << "\n";
    return exit_ok;
}

struct ElectrostaticsArgs {
    std::string config;
    std::string radius = "50um";
    std::string z = "100:600:25nm";
    std::string voltage = "300mV";
    bool fem = false;
    std::string output;
};

int cmd_electrostatics(const ElectrostaticsArgs& a) {
    const double radius = parse_quantity(a.radius, Quantity::Length);
    const double dv = parse_quantity(a.voltage, Quantity::Voltage);
    const auto z = parse_quantity_list(a.z, Quantity::Length);

    ForceCurve force, gradient, corr;
    force.label = "flat_force";
    force.unit = "N";
    gradient.label = "flat_gradient";
    gradient.unit = corr.unit = "N/m";
    corr.label = "corrugated_fem_gradient";
    for (double zi : z) {
        const auto s = sphere_plane_series({radius, zi, dv, 0.0});
        force.push_back(zi, s.force);
        gradient.push_back(zi, s.gradient);
    }
    std::vector<ForceCurve> curves{force, gradient};
    std::map<std::string, std::string> meta{{"sphere_radius_um", format_number(radius * 1e6)},
                                            {"voltage_offset_v", format_number(dv)}};
    if (a.fem) {
        const Config cfg = load_config(a.config, {});
        const auto profile = profile_from_config(cfg);
        corr.z = z;
        corr.value.resize(z.size());
        parallel_for(z.size(), [&](std::size_t i) { corr.value[i] = corrugated_sphere_gradient(profile, z[i], dv, radius); });
        curves.push_back(corr);
        meta["depth_nm"] = format_number(profile.depth() * 1e9);
    }
    emit(format_curves_csv(curves, meta), a.output);
    return exit_ok;
}

struct CalibrateArgs {
    std::string input;
    std::string model = "eq3";
    std::string config;
    std::string radius = "50um";
    std::string residual_voltage;
    std::string weighting = "uniform";
    std::string lever_arm = "210um";
    std::string output;
};

int cmd_calibrate(const CalibrateArgs& a) {
    const auto samples = read_sweep_csv(a.input);
    const double radius = parse_quantity(a.radius, Quantity::Length);

    // Parabola vertex at every position with at least three distinct voltages.
    std::map<std::pair<double, double>, std::vector<FrequencyShiftSample>> by_position;
    for (const auto& s : samples) by_position[{s.z_piezo, s.theta}].push_back(s);
    std::vector<ResidualVoltageFit> vertices;
    for (const auto& [pos, group] : by_position) {
        std::vector<double> volts;
        for (const auto& s : group)
            if (std::find(volts.begin(), volts.end(), s.voltage) == volts.end()) volts.push_back(s.voltage);
        if (volts.size() >= 3) vertices.push_back(find_residual_voltage(group));
    }

    std::optional<ResidualVoltageFit> v0;
    FitOptions options;
    options.lever_arm = parse_quantity(a.lever_arm, Quantity::Length);
    if (a.weighting == "relative") options.weighting = FitOptions::Weighting::Relative;
    else if (a.weighting != "uniform") throw UsageError(fmt::format("--weighting must be uniform or relative, got '{}'", a.weighting));
    if (!a.residual_voltage.empty()) {
        options.residual_voltage = parse_quantity(a.residual_voltage, Quantity::Voltage);
    } else if (!vertices.empty()) {
        ResidualVoltageFit mean{0.0, 0.0, 0.0};
        for (const auto& v : vertices) {
            mean.v0 += v.v0 / double(vertices.size());
            mean.curvature += v.curvature / double(vertices.size());
        }
        double var = 0.0;
        for (const auto& v : vertices) var += (v.v0 - mean.v0) * (v.v0 - mean.v0);
        mean.sigma_v0 = vertices.size() > 1 ? std::sqrt(var / double(vertices.size() - 1) / double(vertices.size()))
                                            : vertices.front().sigma_v0;
        v0 = mean;
        options.residual_voltage = mean.v0;
    } else {
        throw UsageError("no position has three voltages; pass --residual-voltage");
    }

    ElectrostaticModel model = ElectrostaticModel::eq3(radius);
    if (a.model == "fem") {
        const Config cfg = load_config(a.config, {});
        model = ElectrostaticModel::fem(profile_from_config(cfg), radius, log_grid(50e-9, 5e-6, 48));
    } else if (a.model != "eq3") {
        throw UsageError(fmt::format("--model must be eq3 or fem, got '{}'", a.model));
    }

    const auto fit = fit_calibration(samples, model, options);
    std::string report = format_fit_report(fit, v0);
    if (vertices.size() >= 2) {
        const auto drift = residual_voltage_drift(vertices);
        report += fmt::format("v0_positions: {}\nv0_max_drift_mv: {}\nv0_drift_within_3mv: {}\n", vertices.size(),
                              fmt::format("{:.3g}", drift.max_difference * 1e3), drift.within_tolerance ? "yes" : "no");
    }
    emit(report, a.output);
    return exit_ok;
}

struct PipelineArgs {
    std::string config;
    std::vector<std::string> overrides;
    std::string output;
};

int cmd_pipeline(const PipelineArgs& a) {
    Config cfg = load_config(a.config, a.overrides);
    if (!a.output.empty()) cfg.set("pipeline.output", a.output);
    const auto result = run_pipeline(cfg);
    for (const auto& p : write_pipeline_outputs(result)) std::cerr << "wrote " << p.string() << "\n";
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Casimir forces on flat and corrugated surfaces"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "casimir 0.1.0");

    MaterialsArgs ma;
    PlanarArgs pa;
    PfaArgs fa;
    GratingArgs ga;
    ElectrostaticsArgs ea;
    CalibrateArgs ca;
    PipelineArgs pl;
    bool check = false;

    auto* materials = app.add_subcommand("materials", "Permittivity at imaginary frequency");
    materials->add_option("--material", ma.material, "gold_drude, si_paper, perfect, vacuum or plasma:<m>");
    materials->add_option("--table", ma.table, "Two-column xi/epsilon file")->check(CLI::ExistingFile);
    materials->add_option("--xi", ma.xi, "Frequencies, e.g. 1e13rad/s, 0.1eV or a range");
    materials->add_option("-o,--output", ma.output, "Output file (default stdout)");

    auto* planar = app.add_subcommand("planar", "Lifshitz pressure between half-spaces");
    planar->add_option("--material-a", pa.material_a);
    planar->add_option("--material-b", pa.material_b);
    planar->add_option("--z", pa.z, "Separations, e.g. 100:600:25nm");
    planar->add_option("--radius", pa.radius, "Sphere radius: output the PFA force gradient instead");
    planar->add_option("--rms-a", pa.rms_a, "Roughness rms of body a");
    planar->add_option("--rms-b", pa.rms_b, "Roughness rms of body b");
    planar->add_option("-o,--output", pa.output);

    auto* pfa = app.add_subcommand("pfa", "Corrugation PFA pressure and top+bottom share");
    pfa->add_option("--config", fa.config, "Config with a [grating] section (default: measured sample)")
        ->check(CLI::ExistingFile);
    pfa->add_option("--material-a", fa.material_a);
    pfa->add_option("--material-b", fa.material_b);
    pfa->add_option("--z", fa.z);
    pfa->add_option("-o,--output", fa.output);

    auto* grating = app.add_subcommand("grating", "Exact grating pressure ratio rho(z)");
    grating->add_option("--config", ga.config)->check(CLI::ExistingFile);
    grating->add_option("--sweep-N", ga.sweep, "Order sweep, e.g. 4:14:2");
    grating->add_option("--set", ga.overrides, "Override config key=value");
    grating->add_option("-o,--output", ga.output);
    grating->add_option("--convergence-output", ga.convergence_output);

    auto* electrostatics = app.add_subcommand("electrostatics", "Sphere-plane electrostatics");
    electrostatics->add_option("--config", ea.config, "Grating geometry for --fem")->check(CLI::ExistingFile);
    electrostatics->add_option("--radius", ea.radius);
    electrostatics->add_option("--z", ea.z);
    electrostatics->add_option("--voltage", ea.voltage, "V - V0");
    electrostatics->add_flag("--fem", ea.fem, "Add the corrugated FEM gradient");
    electrostatics->add_option("-o,--output", ea.output);

    auto* calibrate = app.add_subcommand("calibrate", "Fit C, z0 and V0 to a frequency-shift sweep");
    calibrate->add_option("--input", ca.input)->check(CLI::ExistingFile);
    calibrate->add_option("--model", ca.model, "eq3 or fem");
    calibrate->add_option("--config", ca.config, "Grating geometry for --model fem")->check(CLI::ExistingFile);
    calibrate->add_option("--radius", ca.radius);
    calibrate->add_option("--residual-voltage", ca.residual_voltage, "Fix V0 instead of estimating it");
    calibrate->add_option("--weighting", ca.weighting, "uniform or relative");
    calibrate->add_option("--lever-arm", ca.lever_arm);
    calibrate->add_option("-o,--output", ca.output);

    auto* pipeline = app.add_subcommand("pipeline", "Run a figure recipe from a config file");
    pipeline->add_option("--config", pl.config)->check(CLI::ExistingFile);
    pipeline->add_option("--set", pl.overrides, "Override config key=value");
    pipeline->add_option("-o,--output", pl.output);

    for (auto* sub : app.get_subcommands({})) sub->add_flag("--check", check, "Run the module's invariant checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    const std::map<std::string, std::string> check_module{
        {"materials", "materials"}, {"planar", "planar"},   {"pfa", "pfa"},           {"grating", "grating"},
        {"electrostatics", "electrostatics"}, {"calibrate", "calibrate"}, {"pipeline", "pipeline"}};

    try {
        const auto* sub = app.get_subcommands().front();
        if (check) return run_check(check_module.at(sub->get_name()));
        if (sub == materials) return cmd_materials(ma);
        if (sub == planar) return cmd_planar(pa);
        if (sub == pfa) return cmd_pfa(fa);
        if (sub == grating) {
            if (ga.config.empty()) throw UsageError("grating needs --config");
            return cmd_grating(ga);
        }
        if (sub == electrostatics) return cmd_electrostatics(ea);
        if (sub == calibrate) {
            if (ca.input.empty()) throw UsageError("calibrate needs --input");
            return cmd_calibrate(ca);
        }
        if (sub == pipeline) {
            if (pl.config.empty()) throw UsageError("pipeline needs --config");
            return cmd_pipeline(pl);
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what();
        if (e.residual() != 0.0) std::cerr << " (residual " << e.residual() << ")";
        std::cerr << "\n";
        return exit_failure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_failure;
    }
    return exit_usage;
}
