#include "casimir/planar_lifshitz.hpp"

#include <cmath>
#include <sstream>

#include "casimir/constants.hpp"
#include "casimir/diagnostics.hpp"
#include "casimir/errors.hpp"
#include "casimir/interpolation.hpp"
#include "casimir/quadrature.hpp"

namespace casimir {

namespace {

// Radial variable u = 2 kappa z; the integrand carries exp(-u).
constexpr double kRadialMin = 1e-4;
constexpr double kRadialMax = 90.0;

}  // namespace

double RoughnessSpec::combined_rms() const { return std::hypot(rms_a, rms_b); }

void RoughnessSpec::validate() const {
    if (!(rms_a >= 0.0) || !(rms_b >= 0.0)) throw DomainError("roughness rms must be non-negative");
    if (const auto* g = std::get_if<GaussianRoughness>(&distribution)) {
        if (!(g->truncation > 0.0)) throw DomainError("roughness truncation must be positive");
        if (g->points < 1) throw DomainError("roughness discretization needs at least one point");
    } else {
        const auto& t = std::get<TabulatedRoughness>(distribution);
        if (t.heights.empty() || t.heights.size() != t.weights.size())
            throw DomainError("tabulated roughness: heights and weights must be non-empty and aligned");
        for (double w : t.weights)
            if (!(w >= 0.0)) throw DomainError("tabulated roughness: weights must be non-negative");
    }
}

std::vector<std::pair<double, double>> RoughnessSpec::discretize() const {
    validate();
    std::vector<std::pair<double, double>> out;
    if (const auto* g = std::get_if<GaussianRoughness>(&distribution)) {
        const double sigma = combined_rms();
        if (sigma == 0.0 || g->points == 1) return {{0.0, 1.0}};
        const double hmax = g->truncation * sigma;
        double total = 0.0;
        for (int i = 0; i < g->points; ++i) {
            const double h = -hmax + 2.0 * hmax * i / (g->points - 1);
            const double w = std::exp(-0.5 * h * h / (sigma * sigma));
            out.emplace_back(h, w);
            total += w;
        }
        for (auto& [h, w] : out) w /= total;
    } else {
        const auto& t = std::get<TabulatedRoughness>(distribution);
        double total = 0.0;
        for (double w : t.weights) total += w;
        if (!(total > 0.0)) throw DomainError("tabulated roughness: weights sum to zero");
        for (std::size_t i = 0; i < t.heights.size(); ++i) out.emplace_back(t.heights[i], t.weights[i] / total);
    }
    return out;
}

double RoughnessSpec::span() const {
    double s = 0.0;
    for (const auto& [h, w] : discretize()) s = std::max(s, std::abs(h));
    return s;
}

void QuadratureSpec::validate() const {
    if (radial_nodes < 8 || angular_nodes < 8) throw DomainError("quadrature node counts must be >= 8");
    if (!(tolerance > 0.0)) throw DomainError("quadrature tolerance must be positive");
}

QuadratureSpec QuadratureSpec::doubled() const {
    QuadratureSpec q = *this;
    q.radial_nodes *= 2;
    q.angular_nodes *= 2;
    return q;
}

FresnelPair fresnel_te_tm(const DielectricModel& model, double xi, double k_perp) {
    if (!(xi > 0.0)) throw DomainError("fresnel_te_tm: xi must be positive");
    if (!(k_perp >= 0.0)) throw DomainError("fresnel_te_tm: k_perp must be non-negative");
    if (model.is_perfect_conductor()) return {-1.0, 1.0};
    const double eps = epsilon_at_imaginary_frequency(model, xi);
    const double k0 = xi / PhysicalConstants::c;
    const double kappa = std::sqrt(k0 * k0 + k_perp * k_perp);
    const double kappa_m = std::sqrt(eps * k0 * k0 + k_perp * k_perp);
    return {(kappa - kappa_m) / (kappa + kappa_m), (eps * kappa - kappa_m) / (eps * kappa + kappa_m)};
}

double casimir_pressure_planar_fixed(const PlanarPair& pair, double z, const QuadratureSpec& quad) {
    if (!(z > 0.0)) throw DomainError("casimir_pressure_planar: z must be positive");
    quad.validate();
    const QuadratureRule radial = log_gauss_legendre(static_cast<std::size_t>(quad.radial_nodes), kRadialMin, kRadialMax);
    const QuadratureRule angular = gauss_legendre(static_cast<std::size_t>(quad.angular_nodes), 0.0, pi / 2.0);
    const double c = PhysicalConstants::c;
    double sum = 0.0;
    for (std::size_t i = 0; i < radial.size(); ++i) {
        const double u = radial.nodes[i];
        const double kappa = u / (2.0 * z);
        const double decay = std::exp(-u);
        double inner = 0.0;
        for (std::size_t j = 0; j < angular.size(); ++j) {
            const double theta = angular.nodes[j];
            const double xi = c * kappa * std::cos(theta);
            const double k = kappa * std::sin(theta);
            const FresnelPair a = fresnel_te_tm(pair.material_a, xi, k);
            const FresnelPair b = fresnel_te_tm(pair.material_b, xi, k);
            const double m_te = a.te * b.te * decay;
            const double m_tm = a.tm * b.tm * decay;
            inner += angular.weights[j] * std::sin(theta) * (m_te / (1.0 - m_te) + m_tm / (1.0 - m_tm));
        }
        sum += radial.weights[i] * u * u * u * inner;
    }
    // P = -(hbar c / 2 pi^2) int dkappa kappa^3 int dtheta sin(theta) sum_p M/(1-M), kappa = u/2z.
    const double z2 = 2.0 * z;
    return -PhysicalConstants::hbar * c / (2.0 * pi * pi) * sum / (z2 * z2 * z2 * z2);
}

double casimir_pressure_planar(const PlanarPair& pair, double z, const QuadratureSpec& quad) {
    double value = casimir_pressure_planar_fixed(pair, z, quad);
    if (!quad.check_convergence) return value;
    QuadratureSpec q = quad;
    double residual = 0.0;
    for (int attempt = 0; attempt <= quad.max_escalations; ++attempt) {
        q = q.doubled();
        const double refined = casimir_pressure_planar_fixed(pair, z, q);
        residual = std::abs(refined - value) / std::abs(refined);
        value = refined;
        if (residual < quad.tolerance) return value;
    }
    std::ostringstream msg;
    msg << "casimir_pressure_planar: no convergence at z = " << z << " m (relative residual " << residual << ")";
    throw NumericalError(msg.str(), residual);
}

double force_gradient_sphere_plane(const PlanarPair& pair, double z, double sphere_radius, const QuadratureSpec& quad) {
    if (!(sphere_radius > 0.0)) throw DomainError("sphere radius must be positive");
    if (z / sphere_radius > 0.05) {
        std::ostringstream msg;
        msg << "proximity approximation used at z/R = " << z / sphere_radius << " > 0.05";
        diagnostics::warn(msg.str());
    }
    return -2.0 * pi * sphere_radius * casimir_pressure_planar(pair, z, quad);
}

double roughness_average(const std::function<double(double)>& law, const RoughnessSpec& spec, double z) {
    const auto dist = spec.discretize();
    double span = 0.0;
    for (const auto& [h, w] : dist) span = std::max(span, std::abs(h));
    if (!(z > span)) {
        std::ostringstream msg;
        msg << "roughness correction: separation " << z * 1e9 << " nm does not exceed the roughness span "
            << span * 1e9 << " nm";
        throw DomainError(msg.str());
    }
    double acc = 0.0;
    for (const auto& [h, w] : dist) acc += w * law(z + h);
    return acc;
}

ForceCurve apply_roughness_correction(const ForceCurve& curve, const RoughnessSpec& spec) {
    if (curve.size() < 2) throw DomainError("roughness correction needs at least two samples");
    if (spec.combined_rms() == 0.0 && std::holds_alternative<GaussianRoughness>(spec.distribution)) return curve;
    const MonotoneInterpolant interp(curve.z, curve.value, MonotoneInterpolant::Scale::LogLog, true);
    ForceCurve out = curve;
    for (std::size_t i = 0; i < curve.size(); ++i)
        out.value[i] = roughness_average([&](double zz) { return interp(zz); }, spec, curve.z[i]);
    std::ostringstream rms;
    rms << spec.combined_rms() * 1e9 << " nm";
    out.metadata["roughness_rms"] = rms.str();
    return out;
}

}  // namespace casimir
