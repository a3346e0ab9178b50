#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

#include "casimir/geometry.hpp"

namespace casimir {

/// Conducting sphere of radius R at closest distance d from a conducting plane.
struct SpherePlaneES {
    double radius;
    double separation;
    double voltage;
    double residual_voltage = 0.0;

    void validate() const;
};

struct SeriesSum {
    double force;     ///< attractive magnitude, N
    double gradient;  ///< d(signed force)/dz, N/m; positive for attraction
    int terms;        ///< terms summed; 0 when the small-gap form was used
};

/// Below this alpha = acosh(1 + d/R) the series is replaced by pi eps0 R (V - V0)^2 / d.
inline constexpr double small_gap_alpha = 1e-4;

/// Exact sphere-plane series with its derivative. With n_max = 0 the sum stops once the geometric tail bound
/// falls below 1e-10 of the partial sum; otherwise exactly n_max terms are used.
SeriesSum sphere_plane_series(const SpherePlaneES& es, int n_max = 0);

/// Magnitude of the attractive sphere-plane force, N.
double sphere_plane_force(const SpherePlaneES& es, int n_max = 0);

/// Gradient of the signed (attractive negative) force with respect to separation, N/m.
double sphere_plane_gradient(const SpherePlaneES& es, int n_max = 0);

// Corrugated capacitor, finite elements.

/// Structured mesh density for one period of the gap between a flat electrode and the
/// corrugated surface. Columns are shared by the gap above the top plateau and the trench.
struct MeshControl {
    int columns = 160;      ///< nodes across one period
    int gap_rows = 40;      ///< element rows between the top plateau and the electrode
    int trench_rows = 24;   ///< element rows between the trench floor and the top plateau
    int min_segment_nodes = 4;  ///< columns per profile segment, at least

    /// Same mesh with every count multiplied by `factor` (sqrt 2 doubles the triangles).
    MeshControl scaled(double factor) const;
    void validate() const;
};

struct Mesh2D {
    enum Tag : int { Interior = 0, Electrode = 1, Grating = 2 };

    std::vector<Eigen::Vector2d> nodes;
    std::vector<std::array<int, 3>> triangles;
    std::vector<int> tags;
    /// Degree of freedom of each node; right-edge nodes share the dof of their left partner.
    std::vector<int> dof;
    std::vector<std::pair<int, int>> periodic_pairs;  ///< (left node, right node)
    int dof_count = 0;

    std::size_t triangle_count() const { return triangles.size(); }
    double signed_area(std::size_t triangle) const;
    double min_signed_area() const;
};

/// Mesh of the region between y = -h(x) and the electrode at y = gap.
Mesh2D build_capacitor_mesh(const GratingProfile& profile, double gap, const MeshControl& control = {});

/// Electrostatic energy per unit area (J/m^2) with the electrode at `voltage` and the
/// grating grounded.
double solve_corrugated_capacitor(const GratingProfile& profile, double gap, double voltage,
                                  const MeshControl& control = {});

/// Same solve on a prepared mesh.
double capacitor_energy(const Mesh2D& mesh, double period, double voltage);

/// Sphere-grating force magnitude from the proximity mapping 2 pi R E, N.
double corrugated_sphere_force(const GratingProfile& profile, double gap, double voltage, double radius,
                               const MeshControl& control = {});

/// d(signed force)/dz of the sphere-grating force, central difference of FEM energies.
double corrugated_sphere_gradient(const GratingProfile& profile, double gap, double voltage, double radius,
                                  const MeshControl& control = {});

}  // namespace casimir
