#include "casimir/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "casimir/constants.hpp"
#include "casimir/electrostatics.hpp"
#include "casimir/errors.hpp"
#include "casimir/interpolation.hpp"
#include "casimir/parallel.hpp"
#include "casimir/pfa.hpp"

namespace casimir {

namespace {

constexpr const char* default_z_grid = "100:600:10nm";

std::string param(double v) { return fmt::format("{:.10g}", v); }

std::vector<double> z_grid(const Config& cfg, const char* fallback = default_z_grid) {
    if (!cfg.has("grid.z")) return parse_quantity_list(fallback, Quantity::Length);
    auto z = cfg.quantity_list("grid.z", Quantity::Length);
    if (!std::is_sorted(z.begin(), z.end()) || !(z.front() > 0.0))
        throw DomainError("grid.z must be positive and increasing");
    return z;
}

double sphere_radius(const Config& cfg) { return cfg.quantity("sphere.radius", Quantity::Length, 50e-6); }

std::string quadrature_text(const QuadratureSpec& q) {
    return fmt::format("radial={} angular={} tolerance={} check={}", q.radial_nodes, q.angular_nodes,
                       param(q.tolerance), q.check_convergence ? "on" : "off");
}

std::string truncation_text(const TruncationSpec& t) {
    return fmt::format("orders={} n_slices={} skin_depth_nm={}", t.orders, t.n_slices,
                       param(t.perfect_conductor_skin_depth * 1e9));
}

std::string grating_quadrature_text(const TruncationSpec& t) {
    return fmt::format("bz={} radial={} angular={}", t.quadrature.bz_nodes, t.quadrature.radial_nodes,
                       t.quadrature.angular_nodes);
}

std::string profile_text(const GratingProfile& g) {
    return fmt::format("period_nm={} l1_nm={} l2_nm={} depth_nm={} angle_deg={}", param(g.period() * 1e9),
                       param(g.top_width() * 1e9), param(g.bottom_width() * 1e9),
                       param(g.depth() * 1e9), param(g.sidewall_angle_deg()));
}

std::map<std::string, std::string> base_metadata(const Config& cfg, const std::string& recipe) {
    const auto inputs = cfg.without({"pipeline.output", "pipeline.convergence_output"});
    return {{"recipe", recipe}, {"inputs_hash", inputs.hash()}};
}

// Flat sphere-plate gradient -2 pi R P on z, roughness-corrected when configured. The
// pressure is computed on a grid padded by the roughness span so the correction never
// extrapolates far.
std::vector<double> flat_gradient(const PlanarPair& smooth, const std::optional<RoughnessSpec>& roughness,
                                  const std::vector<double>& z, const QuadratureSpec& quad, double radius) {
    std::vector<double> grid = z;
    if (roughness && roughness->combined_rms() > 0.0) {
        const double span = roughness->span();
        if (!(z.front() > span))
            throw DomainError(fmt::format("roughness span {:.3g} nm exceeds the smallest separation", span * 1e9));
        grid.push_back(z.front() - 0.5 * span);
        grid.push_back(z.back() + span);
        std::sort(grid.begin(), grid.end());
        grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    }
    std::vector<double> p(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) { p[i] = casimir_pressure_planar(smooth, grid[i], quad); });
    ForceCurve curve;
    curve.z = grid;
    curve.value = p;
    if (roughness && roughness->combined_rms() > 0.0) curve = apply_roughness_correction(curve, *roughness);
    std::vector<double> out;
    for (double zi : z) {
        const auto it = std::lower_bound(curve.z.begin(), curve.z.end(), zi);
        out.push_back(-2.0 * pi * radius * curve.value[it - curve.z.begin()]);
    }
    return out;
}

std::string roughness_text(const std::optional<RoughnessSpec>& r) {
    if (!r) return "off";
    return fmt::format("rms_a_nm={} rms_b_nm={} combined_nm={}", param(r->rms_a * 1e9),
                       param(r->rms_b * 1e9), param(r->combined_rms() * 1e9));
}

std::filesystem::path output_path(const Config& cfg, const std::string& recipe) {
    return cfg.text("pipeline.output", "out/" + recipe + ".csv");
}

}  // namespace

const ForceCurve& PipelineResult::curve(const std::string& label) const {
    for (const auto& c : curves)
        if (c.label == label) return c;
    throw DomainError(fmt::format("pipeline result has no curve '{}'", label));
}

std::string PipelineResult::csv() const { return format_curves_csv(curves, metadata); }

DielectricModel material_from_config(const Config& cfg, const std::string& key, const std::string& fallback) {
    return presets::by_name(cfg.text(key, fallback));
}

GratingProfile profile_from_config(const Config& cfg) {
    const auto sample = GratingProfile::measured_sample();
    return GratingProfile(cfg.quantity("grating.period", Quantity::Length, sample.period()),
                          cfg.quantity("grating.top_width", Quantity::Length, sample.top_width()),
                          cfg.quantity("grating.bottom_width", Quantity::Length, sample.bottom_width()),
                          cfg.quantity("grating.depth", Quantity::Length, sample.depth()),
                          cfg.quantity("grating.sidewall_angle", Quantity::Angle, sample.sidewall_angle_deg()));
}

TruncationSpec truncation_from_config(const Config& cfg) {
    TruncationSpec t;
    t.orders = cfg.integer("truncation.orders", t.orders);
    t.n_slices = cfg.integer("truncation.n_slices", t.n_slices);
    t.quadrature.bz_nodes = cfg.integer("truncation.bz_nodes", t.quadrature.bz_nodes);
    t.quadrature.radial_nodes = cfg.integer("truncation.radial_nodes", t.quadrature.radial_nodes);
    t.quadrature.angular_nodes = cfg.integer("truncation.angular_nodes", t.quadrature.angular_nodes);
    t.perfect_conductor_skin_depth = cfg.quantity("truncation.skin_depth", Quantity::Length, t.perfect_conductor_skin_depth);
    t.validate();
    return t;
}

QuadratureSpec quadrature_from_config(const Config& cfg) {
    QuadratureSpec q;
    q.radial_nodes = cfg.integer("quadrature.radial_nodes", q.radial_nodes);
    q.angular_nodes = cfg.integer("quadrature.angular_nodes", q.angular_nodes);
    q.tolerance = cfg.quantity("quadrature.tolerance", Quantity::Dimensionless, q.tolerance);
    q.check_convergence = cfg.flag("quadrature.check_convergence", q.check_convergence);
    q.max_escalations = cfg.integer("quadrature.max_escalations", q.max_escalations);
    q.validate();
    return q;
}

std::optional<RoughnessSpec> roughness_from_config(const Config& cfg) {
    if (!cfg.flag("roughness.enabled", false)) {
        for (const char* k : {"roughness.rms_sphere", "roughness.rms_plate", "roughness.truncation", "roughness.points"})
            if (cfg.has(k)) cfg.text(k);
        return std::nullopt;
    }
    RoughnessSpec r;
    r.rms_a = cfg.quantity("roughness.rms_sphere", Quantity::Length, 4e-9);
    r.rms_b = cfg.quantity("roughness.rms_plate", Quantity::Length, 0.6e-9);
    GaussianRoughness g;
    g.truncation = cfg.quantity("roughness.truncation", Quantity::Dimensionless, g.truncation);
    g.points = cfg.integer("roughness.points", g.points);
    r.distribution = g;
    r.validate();
    return r;
}

PipelineResult reproduce_fig3a(const Config& cfg) {
    const auto z = z_grid(cfg);
    const PlanarPair pair{material_from_config(cfg, "materials.sphere", "gold_drude"),
                          material_from_config(cfg, "materials.plate", "si_paper"), {}};
    const auto roughness = roughness_from_config(cfg);
    const auto quad = quadrature_from_config(cfg);
    const double radius = sphere_radius(cfg);

    ForceCurve c;
    c.label = "casimir_gradient";
    c.unit = "N/m";
    c.z = z;
    c.value = flat_gradient(pair, roughness, z, quad, radius);

    PipelineResult r;
    r.recipe = "fig3a";
    r.metadata = base_metadata(cfg, r.recipe);
    r.metadata["materials"] = pair.material_a.name() + "/" + pair.material_b.name();
    r.metadata["roughness"] = roughness_text(roughness);
    r.metadata["quadrature"] = quadrature_text(quad);
    r.metadata["sphere_radius_um"] = param(radius * 1e6);
    r.curves.push_back(std::move(c));
    r.output_path = output_path(cfg, r.recipe);
    return r;
}

PipelineResult reproduce_fig3c(const Config& cfg) {
    const auto z = z_grid(cfg);
    const auto profile = profile_from_config(cfg);
    const PlanarPair pair{material_from_config(cfg, "materials.sphere", "gold_drude"),
                          material_from_config(cfg, "materials.plate", "si_paper"), {}};
    const auto roughness = roughness_from_config(cfg);
    const auto quad = quadrature_from_config(cfg);
    const double radius = sphere_radius(cfg);

    // Flat law on a log grid covering [z_min, z_max + t].
    const int n = 48;
    std::vector<double> table(n);
    const double lo = z.front(), hi = z.back() + profile.depth();
    for (int i = 0; i < n; ++i) table[i] = lo * std::pow(hi / lo, double(i) / (n - 1));
    const auto flat = flat_gradient(pair, roughness, table, quad, radius);
    const MonotoneInterpolant interp(table, flat, MonotoneInterpolant::Scale::LogLog);
    const auto law = FlatForceLaw::computed([interp](double x) { return interp(x); }, lo, hi, "N/m");

    ForceCurve c;
    c.label = "pfa_gradient";
    c.unit = "N/m";
    for (double zi : z) c.push_back(zi, pfa_corrugated(law, profile, zi));

    PipelineResult r;
    r.recipe = "fig3c";
    r.metadata = base_metadata(cfg, r.recipe);
    r.metadata["materials"] = pair.material_a.name() + "/" + pair.material_b.name();
    r.metadata["roughness"] = roughness_text(roughness);
    r.metadata["quadrature"] = quadrature_text(quad);
    r.metadata["profile"] = profile_text(profile);
    r.metadata["sphere_radius_um"] = param(radius * 1e6);
    r.curves.push_back(std::move(c));
    r.output_path = output_path(cfg, r.recipe);
    return r;
}

PipelineResult reproduce_fig3d(const Config& cfg) {
    const auto z = z_grid(cfg, "100:250:30nm");
    const auto profile = profile_from_config(cfg);
    const auto plane = material_from_config(cfg, "materials.sphere", "gold_drude");
    const auto grating = material_from_config(cfg, "materials.grating", "si_paper");
    const auto spec = truncation_from_config(cfg);
    const bool ideal_variant = cfg.flag("variant.perfect_conductor", false);

    PipelineResult r;
    r.recipe = "fig3d";
    r.metadata = base_metadata(cfg, r.recipe);
    r.metadata["materials"] = plane.name() + "/" + grating.name();
    r.metadata["profile"] = profile_text(profile);
    r.metadata["quadrature"] = grating_quadrature_text(spec);

    const auto effective = effective_grating_material(profile, grating, spec);
    ForceCurve theory;
    TruncationSpec used = spec;
    if (cfg.has("sweep.orders")) {
        std::vector<int> orders;
        for (double v : cfg.quantity_list("sweep.orders", Quantity::Dimensionless)) orders.push_back(int(std::lround(v)));
        std::sort(orders.begin(), orders.end());
        r.convergence = grating_order_sweep(profile, effective, plane, z, spec, orders);
        used.orders = orders.back();
        theory = rho_from_exact(profile, effective, plane, z, r.convergence->values.back());
        r.metadata["sweep_orders"] = cfg.text("sweep.orders");
        r.metadata["sweep_last_relative_change"] = fmt::format("{:.3e}", r.convergence->last_relative_change());
        r.convergence_path = cfg.text("pipeline.convergence_output", "out/fig3d_convergence.csv");
    } else {
        theory = rho_ratio(profile, grating, plane, z, spec);
    }
    r.metadata["truncation"] = truncation_text(used);
    theory.label = "rho_theory";
    theory.metadata.clear();
    r.curves.push_back(std::move(theory));

    if (ideal_variant) {
        const auto pc = DielectricModel::perfect_conductor();
        TruncationSpec ideal_spec = used;
        ForceCurve ideal = rho_ratio(profile, pc, pc, z, ideal_spec);
        ideal.label = "rho_perfect_conductor";
        ideal.metadata.clear();
        r.curves.push_back(std::move(ideal));
    }

    if (cfg.has("measurement.flat") || cfg.has("measurement.corrugated")) {
        const auto flat = read_force_curve_csv(cfg.text("measurement.flat"));
        const auto corr = read_force_curve_csv(cfg.text("measurement.corrugated"));
        const auto law = FlatForceLaw::from_table(flat);
        const MonotoneInterpolant corr_interp(corr.z, corr.value);
        ForceCurve measured;
        measured.label = "rho_measured";
        measured.unit = "1";
        for (double zi : corr.z)
            if (law.covers(zi, zi + profile.depth())) measured.push_back(zi, corr_interp(zi) / pfa_corrugated(law, profile, zi));
        if (measured.size() == 0)
            throw DomainError("measured flat curve does not cover z + depth for any corrugated sample");
        r.curves.push_back(std::move(measured));
    }
    r.output_path = output_path(cfg, r.recipe);
    return r;
}

PipelineResult reproduce_fig2(const Config& cfg) {
    const auto z = z_grid(cfg, "100:600:25nm");
    const auto profile = profile_from_config(cfg);
    const double radius = sphere_radius(cfg);
    const double dv = cfg.quantity("electrostatics.voltage_offset", Quantity::Voltage, 0.3);
    MeshControl mesh;
    mesh.columns = cfg.integer("mesh.columns", mesh.columns);
    mesh.gap_rows = cfg.integer("mesh.gap_rows", mesh.gap_rows);
    mesh.trench_rows = cfg.integer("mesh.trench_rows", mesh.trench_rows);
    mesh.validate();

    ForceCurve flat, corr;
    flat.label = "flat_eq3";
    corr.label = "corrugated_fem";
    flat.unit = corr.unit = "N/m";
    flat.z = corr.z = z;
    flat.value.resize(z.size());
    corr.value.resize(z.size());
    parallel_for(z.size(), [&](std::size_t i) {
        flat.value[i] = sphere_plane_gradient({radius, z[i], dv, 0.0});
        corr.value[i] = corrugated_sphere_gradient(profile, z[i], dv, radius, mesh);
    });

    PipelineResult r;
    r.recipe = "fig2";
    r.metadata = base_metadata(cfg, r.recipe);
    r.metadata["profile"] = profile_text(profile);
    r.metadata["voltage_offset_v"] = param(dv);
    r.metadata["sphere_radius_um"] = param(radius * 1e6);
    r.metadata["mesh"] = fmt::format("columns={} gap_rows={} trench_rows={} triangles={}", mesh.columns, mesh.gap_rows,
                                     mesh.trench_rows, build_capacitor_mesh(profile, z.front(), mesh).triangle_count());
    r.curves.push_back(std::move(flat));
    r.curves.push_back(std::move(corr));
    r.output_path = output_path(cfg, r.recipe);
    return r;
}

PipelineResult run_pipeline(const Config& cfg) {
    const std::string recipe = cfg.text("pipeline.recipe");
    PipelineResult r;
    if (recipe == "fig3a") r = reproduce_fig3a(cfg);
    else if (recipe == "fig3c") r = reproduce_fig3c(cfg);
    else if (recipe == "fig3d") r = reproduce_fig3d(cfg);
    else if (recipe == "fig2") r = reproduce_fig2(cfg);
    else throw ParseError(fmt::format("{}: unknown recipe '{}' (fig2, fig3a, fig3c, fig3d)", cfg.source(), recipe));
    cfg.reject_unused();
    return r;
}

std::vector<std::filesystem::path> write_pipeline_outputs(const PipelineResult& result) {
    std::vector<std::filesystem::path> written;
    write_text(result.output_path, result.csv());
    written.push_back(result.output_path);
    if (result.convergence) {
        std::string text;
        for (const auto& [k, v] : result.metadata) text += fmt::format("# {}: {}\n", k, v);
        text += result.convergence->to_csv();
        write_text(result.convergence_path, text);
        written.push_back(result.convergence_path);
    }
    return written;
}

}  // namespace casimir
