#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "casimir/calibration.hpp"
#include "casimir/config.hpp"
#include "casimir/constants.hpp"
#include "casimir/electrostatics.hpp"
#include "casimir/errors.hpp"
#include "casimir/grating_scattering.hpp"
#include "casimir/pfa.hpp"
#include "casimir/pipeline.hpp"
#include "casimir/planar_lifshitz.hpp"

namespace py = pybind11;
using namespace casimir;

namespace {

TruncationSpec truncation(int orders, int n_slices, int bz_nodes, int radial_nodes, int angular_nodes) {
    TruncationSpec t;
    t.orders = orders;
    t.n_slices = n_slices;
    t.quadrature = {bz_nodes, radial_nodes, angular_nodes};
    t.validate();
    return t;
}

py::dict curve_dict(const ForceCurve& c) {
    py::dict d;
    d["label"] = c.label;
    d["unit"] = c.unit;
    d["z"] = c.z;
    d["value"] = c.value;
    return d;
}

std::vector<FrequencyShiftSample> samples_from(const std::vector<std::array<double, 4>>& rows) {
    std::vector<FrequencyShiftSample> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back({r[0], r[1], r[2], r[3]});
    return out;
}

std::vector<std::array<double, 4>> rows_from(const std::vector<FrequencyShiftSample>& samples) {
    std::vector<std::array<double, 4>> out;
    for (const auto& s : samples) out.push_back({s.z_piezo, s.theta, s.voltage, s.delta_f});
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Casimir and electrostatic forces between flat and corrugated surfaces (SI units throughout).";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<RangeError>(m, "RangeError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception<FitError>(m, "FitError", PyExc_RuntimeError);

    py::class_<GratingProfile>(m, "GratingProfile")
        .def(py::init<double, double, double, double, double>(), py::arg("period"), py::arg("top_width"),
             py::arg("bottom_width"), py::arg("depth"), py::arg("sidewall_angle_deg") = 90.0)
        .def_static("measured_sample", &GratingProfile::measured_sample)
        .def_property_readonly("period", &GratingProfile::period)
        .def_property_readonly("top_width", &GratingProfile::top_width)
        .def_property_readonly("bottom_width", &GratingProfile::bottom_width)
        .def_property_readonly("depth", &GratingProfile::depth)
        .def_property_readonly("sidewall_angle_deg", &GratingProfile::sidewall_angle_deg)
        .def_property_readonly("p1", &GratingProfile::p1)
        .def_property_readonly("p2", &GratingProfile::p2)
        .def("with_depth", &GratingProfile::with_depth)
        .def("__repr__", [](const GratingProfile& g) {
            return "GratingProfile(period=" + std::to_string(g.period()) + ", depth=" + std::to_string(g.depth()) + ")";
        });

    m.def(
        "epsilon", [](const std::string& material, double xi) {
            return epsilon_at_imaginary_frequency(presets::by_name(material), xi);
        },
        py::arg("material"), py::arg("xi"), "epsilon(i xi) of a named material, xi in rad/s.");

    m.def("ideal_pressure", &ideal_casimir_pressure, py::arg("z"), "Ideal-mirror pressure in Pa.");

    m.def(
        "planar_pressure",
        [](const std::string& a, const std::string& b, double z, int radial_nodes, int angular_nodes) {
            QuadratureSpec q;
            q.radial_nodes = radial_nodes;
            q.angular_nodes = angular_nodes;
            return casimir_pressure_planar({presets::by_name(a), presets::by_name(b), {}}, z, q);
        },
        py::arg("material_a"), py::arg("material_b"), py::arg("z"), py::arg("radial_nodes") = 80,
        py::arg("angular_nodes") = 40, "Zero-temperature Lifshitz pressure in Pa, negative when attractive.");

    m.def(
        "pfa_corrugated",
        [](const std::function<double(double)>& law, const GratingProfile& profile, double z) {
            return pfa_corrugated(FlatForceLaw::analytic(law), profile, z);
        },
        py::arg("law"), py::arg("profile"), py::arg("z"), "Corrugation PFA of a flat force law given as a callable.");
    m.def(
        "pfa_share_topbottom",
        [](const std::function<double(double)>& law, const GratingProfile& profile, double z) {
            return pfa_share_topbottom(FlatForceLaw::analytic(law), profile, z);
        },
        py::arg("law"), py::arg("profile"), py::arg("z"));

    m.def(
        "grating_pressure",
        [](const GratingProfile& profile, const std::string& grating, const std::string& plane, const std::vector<double>& z,
           int orders, int n_slices, int bz, int radial, int angular) {
            py::gil_scoped_release release;
            return casimir_force_grating(profile, presets::by_name(grating), presets::by_name(plane), z,
                                         truncation(orders, n_slices, bz, radial, angular));
        },
        py::arg("profile"), py::arg("grating_material"), py::arg("plane_material"), py::arg("z"), py::arg("orders") = 10,
        py::arg("n_slices") = 4, py::arg("bz_nodes") = 8, py::arg("radial_nodes") = 32, py::arg("angular_nodes") = 16);

    m.def(
        "rho_ratio",
        [](const GratingProfile& profile, const std::string& grating, const std::string& plane, const std::vector<double>& z,
           int orders, int n_slices, int bz, int radial, int angular) {
            ForceCurve c;
            {
                py::gil_scoped_release release;
                c = rho_ratio(profile, presets::by_name(grating), presets::by_name(plane), z,
                              truncation(orders, n_slices, bz, radial, angular));
            }
            return c.value;
        },
        py::arg("profile"), py::arg("grating_material"), py::arg("plane_material"), py::arg("z"), py::arg("orders") = 10,
        py::arg("n_slices") = 4, py::arg("bz_nodes") = 8, py::arg("radial_nodes") = 32, py::arg("angular_nodes") = 16);

    m.def(
        "sphere_plane_force", [](double radius, double d, double dv) { return sphere_plane_force({radius, d, dv, 0.0}); },
        py::arg("radius"), py::arg("separation"), py::arg("voltage"), "Attractive force magnitude in N.");
    m.def(
        "sphere_plane_gradient",
        [](double radius, double d, double dv) { return sphere_plane_gradient({radius, d, dv, 0.0}); },
        py::arg("radius"), py::arg("separation"), py::arg("voltage"));
    m.def(
        "capacitor_energy",
        [](const GratingProfile& profile, double gap, double voltage) {
            return solve_corrugated_capacitor(profile, gap, voltage);
        },
        py::arg("profile"), py::arg("gap"), py::arg("voltage"), "FEM energy per unit area, J/m^2.");
    m.def(
        "corrugated_sphere_gradient",
        [](const GratingProfile& profile, double gap, double voltage, double radius) {
            return corrugated_sphere_gradient(profile, gap, voltage, radius);
        },
        py::arg("profile"), py::arg("gap"), py::arg("voltage"), py::arg("radius"));

    m.def(
        "synthesize_sweep",
        [](const std::vector<double>& voltages, const std::vector<double>& z_piezo, double c, double z0,
           double residual_voltage, double radius, double relative_noise, std::uint64_t seed) {
            SyntheticSweep s;
            s.voltages = voltages;
            s.z_piezo = z_piezo;
            s.c = c;
            s.z0 = z0;
            s.residual_voltage = residual_voltage;
            s.relative_noise = relative_noise;
            s.seed = seed;
            return rows_from(synthesize_sweep(s, ElectrostaticModel::eq3(radius)));
        },
        py::arg("voltages"), py::arg("z_piezo"), py::arg("c") = -614.0, py::arg("z0") = 800e-9,
        py::arg("residual_voltage") = -0.499, py::arg("radius") = 50e-6, py::arg("relative_noise") = 0.0,
        py::arg("seed") = 1, "Rows (z_piezo, theta, V, delta_f).");

    m.def(
        "fit_calibration",
        [](const std::vector<std::array<double, 4>>& rows, double residual_voltage, double radius, bool relative) {
            FitOptions o;
            o.residual_voltage = residual_voltage;
            if (relative) o.weighting = FitOptions::Weighting::Relative;
            const auto fit = fit_calibration(samples_from(rows), ElectrostaticModel::eq3(radius), o);
            py::dict d;
            d["c"] = fit.c;
            d["z0"] = fit.z0;
            d["sigma_c"] = fit.sigma_c;
            d["sigma_z0"] = fit.sigma_z0;
            d["rms_residual"] = fit.rms_residual;
            return d;
        },
        py::arg("rows"), py::arg("residual_voltage"), py::arg("radius") = 50e-6, py::arg("relative_weighting") = false);

    m.def(
        "find_residual_voltage",
        [](const std::vector<std::array<double, 4>>& rows) {
            const auto v = find_residual_voltage(samples_from(rows));
            return py::make_tuple(v.v0, v.sigma_v0);
        },
        py::arg("rows"), "Parabola vertex (V0, sigma) from rows at one position.");

    m.def(
        "run_pipeline",
        [](const std::string& config_text) {
            PipelineResult r;
            {
                py::gil_scoped_release release;
                r = run_pipeline(Config::parse(config_text, "<python>"));
            }
            py::dict d;
            d["recipe"] = r.recipe;
            d["metadata"] = r.metadata;
            py::list curves;
            for (const auto& c : r.curves) curves.append(curve_dict(c));
            d["curves"] = curves;
            d["csv"] = r.csv();
            return d;
        },
        py::arg("config_text"), "Runs a recipe from config text; returns curves, metadata and the CSV text.");
}
