#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "casimir/force_curve.hpp"
#include "casimir/materials.hpp"

namespace casimir {

/// Height distribution of the local gap deviation.
struct GaussianRoughness {
    double truncation = 3.0;  ///< in multiples of the combined rms
    int points = 21;
};
/// Explicit discrete distribution of gap deviations (metres) and their weights.
struct TabulatedRoughness {
    std::vector<double> heights;
    std::vector<double> weights;
};

struct RoughnessSpec {
    double rms_a = 0.0;
    double rms_b = 0.0;
    std::variant<GaussianRoughness, TabulatedRoughness> distribution = GaussianRoughness{};

    double combined_rms() const;
    /// Largest |h| in the discretized distribution.
    double span() const;
    /// Gap deviations h_i with weights summing to one.
    std::vector<std::pair<double, double>> discretize() const;
    void validate() const;
};

struct PlanarPair {
    DielectricModel material_a;
    DielectricModel material_b;
    std::optional<RoughnessSpec> roughness;
};

/// Node counts of the planar integral. The integration variables are the modulus kappa of
/// the imaginary-frequency wavevector (radial) and its polar angle (angular).
struct QuadratureSpec {
    int radial_nodes = 80;
    int angular_nodes = 40;
    /// Relative change allowed when all node counts double.
    double tolerance = 1e-4;
    /// Verify convergence by doubling; escalate up to max_escalations times.
    bool check_convergence = true;
    int max_escalations = 2;

    void validate() const;
    QuadratureSpec doubled() const;
};

struct FresnelPair {
    double te;
    double tm;
};

/// Reflection amplitudes of a half-space at imaginary frequency. TM refers to the magnetic
/// field amplitude, so an ideal mirror gives (-1, +1).
FresnelPair fresnel_te_tm(const DielectricModel& model, double xi, double k_perp);

/// Zero-temperature Lifshitz pressure in Pa, negative when attractive.
double casimir_pressure_planar(const PlanarPair& pair, double z, const QuadratureSpec& quad = {});

/// Single evaluation at fixed node counts, no convergence check.
double casimir_pressure_planar_fixed(const PlanarPair& pair, double z, const QuadratureSpec& quad);

/// Sphere-plane gradient dF/dz = -2 pi R P(z) (positive for attraction), from the PFA mapping.
double force_gradient_sphere_plane(const PlanarPair& pair, double z, double sphere_radius,
                                   const QuadratureSpec& quad = {});

/// F_corr(z) = sum_i w_i F(z + h_i).
double roughness_average(const std::function<double(double)>& law, const RoughnessSpec& spec, double z);

/// Applies the height-distribution average to a sampled curve. Off-grid values come from a
/// monotone cubic in log-log coordinates, extended as a power law beyond the ends.
ForceCurve apply_roughness_correction(const ForceCurve& curve, const RoughnessSpec& spec);

}  // namespace casimir
