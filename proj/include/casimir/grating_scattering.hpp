#pragma once

#include <Eigen/Dense>
#include <vector>

#include "casimir/force_curve.hpp"
#include "casimir/geometry.hpp"
#include "casimir/materials.hpp"

namespace casimir {

/// Reflection amplitudes of one surface at (xi, k_x, k_y) between plane waves with lateral
/// wavevectors (k_x + 2 pi n / period, k_y), n in [-N, N].
///
/// Rows and columns are ordered [TE_{-N} .. TE_{N}, TM_{-N} .. TM_{N}]. TE amplitudes are the
/// electric field along s = z x k_par / |k_par|; TM amplitudes follow the magnetic field along
/// s, so a flat ideal mirror is diag(-1, +1). At imaginary frequency all entries are real.
struct ReflectionOperator {
    Eigen::MatrixXd matrix;
    int orders = 0;
    double xi = 0.0;
    double kx = 0.0;
    double ky = 0.0;

    int dimension() const { return 2 * (2 * orders + 1); }
};

/// Node counts of the (k_x, q, phi) integral. k_x covers half the Brillouin zone (the
/// integrand is even); q = sqrt(xi^2/c^2 + k_y^2) is log-mapped; phi = atan(c k_y / xi).
struct GratingQuadrature {
    int bz_nodes = 8;
    int radial_nodes = 32;
    int angular_nodes = 16;
};

struct TruncationSpec {
    int orders = 10;  ///< N: diffraction orders -N..N
    int n_slices = 4;
    GratingQuadrature quadrature;
    /// Skin depth of the plasma-model stand-in when the grating is an ideal conductor
    /// with non-zero depth.
    double perfect_conductor_skin_depth = 2e-9;

    void validate() const;
};

/// Diagonal operator of a flat half-space on the same order/polarization grid.
ReflectionOperator planar_reflection(const DielectricModel& model, double period, double xi, double kx,
                                     double ky, int orders);

/// Fourier modal reflection operator of the staircased grating (ridges of `model` in vacuum
/// on a half-space of `model`), using the inverse rule for the normal field component and a
/// reflection-matrix recursion through the slabs. Requires |k_x| <= pi / period.
ReflectionOperator grating_reflection(const GratingProfile& profile, const DielectricModel& model, double xi,
                                      double kx, double ky, const TruncationSpec& spec);

/// kappa_n of the vacuum orders of `op`, repeated for TE and TM.
Eigen::VectorXd vacuum_kappa(const ReflectionOperator& op, double period);

/// kappa^{-1/2} R kappa^{1/2}: the operator in flux-normalized amplitudes, where passivity
/// bounds every singular value by 1. Traces of loop products are unchanged.
Eigen::MatrixXd flux_normalized(const ReflectionOperator& op, double period);

/// tr[(1 - M)^{-1} dM/dz] for M = R1 e^{-kappa z} R2 e^{-kappa z}, R1 the plate (upper body),
/// R2 the grating. Throws NumericalError when det(1 - M) <= 0.
double loop_trace_integrand(const ReflectionOperator& plate, const ReflectionOperator& grating, double z,
                            double period);

/// Zero-temperature pressure (Pa, negative attractive) between a flat plate of `plane` and
/// the grating, for each separation in z_grid. Reflection operators are computed once per
/// quadrature node and reused across separations.
std::vector<double> casimir_force_grating(const GratingProfile& profile, const DielectricModel& grating_material,
                                          const DielectricModel& plane_material, const std::vector<double>& z_grid,
                                          const TruncationSpec& spec);

double casimir_force_grating(const GratingProfile& profile, const DielectricModel& grating_material,
                             const DielectricModel& plane_material, double z, const TruncationSpec& spec);

/// Pressure versus truncation order N at one separation.
struct ConvergenceTrace {
    std::vector<int> orders;
    std::vector<std::vector<double>> values;  ///< values[i][j]: order i, separation j
    std::vector<double> z_grid;

    /// Largest relative change between the last two orders over the z-grid.
    double last_relative_change() const;
    std::string to_csv() const;
};

ConvergenceTrace grating_order_sweep(const GratingProfile& profile, const DielectricModel& grating_material,
                                     const DielectricModel& plane_material, const std::vector<double>& z_grid,
                                     TruncationSpec spec, const std::vector<int>& orders);

/// The material the solver actually uses: the plasma surrogate for an ideal-conductor
/// grating of non-zero depth, the model itself otherwise.
DielectricModel effective_grating_material(const GratingProfile& profile, const DielectricModel& model,
                                           const TruncationSpec& spec);

/// rho(z) = P_exact(z) / P_PFA(z), where P_PFA applies the corrugation PFA to the flat
/// plate/grating-material Lifshitz pressure. Sphere mapping factors cancel.
ForceCurve rho_ratio(const GratingProfile& profile, const DielectricModel& grating_material,
                     const DielectricModel& plane_material, const std::vector<double>& z_grid, const TruncationSpec& spec);

/// Same ratio from an already computed exact pressure curve.
ForceCurve rho_from_exact(const GratingProfile& profile, const DielectricModel& grating_material,
                          const DielectricModel& plane_material, const std::vector<double>& z_grid,
                          const std::vector<double>& exact_pressure);

}  // namespace casimir
