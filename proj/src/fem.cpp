#include <algorithm>
#include <cmath>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <fmt/format.h>

#include "casimir/constants.hpp"
#include "casimir/electrostatics.hpp"
#include "casimir/errors.hpp"

namespace casimir {

namespace {

struct ColumnGrid {
    std::vector<double> x;  // x[0] = 0, x.back() = period
    int trench_start = -1;  // index of x = l1
};

// Chebyshev-clustered nodes inside each profile segment, so every corner gets fine columns.
ColumnGrid column_grid(const GratingProfile& g, const MeshControl& c) {
    const double lambda = g.period();
    const double l1 = g.top_width();
    const double w = g.sidewall_width();
    const double breaks[] = {0.0, l1, l1 + w, l1 + w + g.bottom_width(), lambda};
    const double min_len = 1e-9 * lambda;
    ColumnGrid grid;
    grid.x.push_back(0.0);
    for (int s = 0; s < 4; ++s) {
        const double a = breaks[s], b = breaks[s + 1];
        if (s == 1) grid.trench_start = static_cast<int>(grid.x.size()) - 1;
        if (b - a < min_len) continue;
        const int n = std::max(c.min_segment_nodes, static_cast<int>(std::lround(c.columns * (b - a) / lambda)));
        for (int k = 1; k <= n; ++k) grid.x.push_back(a + (b - a) * 0.5 * (1.0 - std::cos(pi * k / n)));
    }
    grid.x.back() = lambda;
    return grid;
}

// Trench depth below the top plateau for x in [l1, period], vertical walls included.
double trench_height(const GratingProfile& g, double x) {
    const double t = g.depth();
    const double w = g.sidewall_width();
    const double l1 = g.top_width();
    const double tol = 1e-12 * g.period();
    if (w <= tol) return t;
    if (x <= l1 + w) return std::max(0.0, t * (x - l1) / w);
    if (x >= g.period() - w) return std::max(0.0, t * (g.period() - x) / w);
    return t;
}

void add_quad(Mesh2D& mesh, int a, int b, int c, int d, bool flip) {
    const std::array<std::array<int, 3>, 2> tris =
        flip ? std::array<std::array<int, 3>, 2>{{{a, b, d}, {b, c, d}}}
             : std::array<std::array<int, 3>, 2>{{{a, b, c}, {a, c, d}}};
    for (const auto& t : tris)
        if (t[0] != t[1] && t[1] != t[2] && t[0] != t[2]) mesh.triangles.push_back(t);
}

}  // namespace

MeshControl MeshControl::scaled(double factor) const {
    if (!(factor > 0.0)) throw DomainError("mesh: scale factor must be positive");
    MeshControl m = *this;
    m.columns = static_cast<int>(std::lround(columns * factor));
    m.gap_rows = static_cast<int>(std::lround(gap_rows * factor));
    m.trench_rows = static_cast<int>(std::lround(trench_rows * factor));
    return m;
}

void MeshControl::validate() const {
    if (columns < 8 || gap_rows < 2 || trench_rows < 2 || min_segment_nodes < 1)
        throw DomainError("mesh: need columns >= 8, rows >= 2, min_segment_nodes >= 1");
}

double Mesh2D::signed_area(std::size_t t) const {
    const auto& p = nodes[triangles[t][0]];
    const auto& q = nodes[triangles[t][1]];
    const auto& r = nodes[triangles[t][2]];
    return 0.5 * ((q.x() - p.x()) * (r.y() - p.y()) - (r.x() - p.x()) * (q.y() - p.y()));
}

double Mesh2D::min_signed_area() const {
    double m = INFINITY;
    for (std::size_t t = 0; t < triangles.size(); ++t) m = std::min(m, signed_area(t));
    return m;
}

Mesh2D build_capacitor_mesh(const GratingProfile& profile, double gap, const MeshControl& control) {
    if (!(gap > 0.0)) throw DomainError("capacitor: gap must be positive");
    control.validate();
    const ColumnGrid grid = column_grid(profile, control);
    const int nc = static_cast<int>(grid.x.size()) - 1;
    const int ny = control.gap_rows;
    const int nb = control.trench_rows;
    const bool corrugated = profile.depth() > 0.0;
    const double l1 = profile.top_width();
    const double tol = 1e-12 * profile.period();

    Mesh2D mesh;
    auto add_node = [&](double x, double y, int tag) {
        mesh.nodes.emplace_back(x, y);
        mesh.tags.push_back(tag);
        return static_cast<int>(mesh.nodes.size()) - 1;
    };

    // Gap above the top plateau: rows clustered towards the corrugated surface.
    std::vector<std::vector<int>> gap_node(nc + 1, std::vector<int>(ny + 1));
    for (int i = 0; i <= nc; ++i) {
        const double x = grid.x[i];
        const bool on_plateau = !corrugated || x <= l1 + tol || i == nc;
        for (int j = 0; j <= ny; ++j) {
            const double y = gap * (1.0 - std::cos(0.5 * pi * j / ny));
            const int tag = j == ny ? Mesh2D::Electrode : (j == 0 && on_plateau ? Mesh2D::Grating : Mesh2D::Interior);
            gap_node[i][j] = add_node(x, j == ny ? gap : y, tag);
        }
    }

    // Trench: columns from the floor (or sidewall) up to y = 0.
    std::vector<std::vector<int>> trench_node;
    const int i0 = grid.trench_start;
    if (corrugated) {
        trench_node.assign(nc + 1, std::vector<int>(nb + 1, -1));
        for (int i = i0; i <= nc; ++i) {
            const double h = trench_height(profile, grid.x[i]);
            const bool wall = i == i0 || i == nc;
            for (int k = 0; k < nb; ++k) {
                if (h <= tol) {
                    trench_node[i][k] = gap_node[i][0];
                    continue;
                }
                const double y = -h + h * 0.5 * (1.0 - std::cos(pi * k / nb));
                trench_node[i][k] = add_node(grid.x[i], y, (k == 0 || wall) ? Mesh2D::Grating : Mesh2D::Interior);
            }
            trench_node[i][nb] = gap_node[i][0];
        }
    }

    for (int i = 0; i < nc; ++i)
        for (int j = 0; j < ny; ++j)
            add_quad(mesh, gap_node[i][j], gap_node[i + 1][j], gap_node[i + 1][j + 1], gap_node[i][j + 1],
                     (i + j) % 2 == 1);
    if (corrugated)
        for (int i = i0; i < nc; ++i)
            for (int k = 0; k < nb; ++k)
                add_quad(mesh, trench_node[i][k], trench_node[i + 1][k], trench_node[i + 1][k + 1],
                         trench_node[i][k + 1], (i + k) % 2 == 1);

    // Degrees of freedom: Dirichlet nodes get none; the right cut reuses the left cut's.
    mesh.dof.assign(mesh.nodes.size(), -1);
    std::vector<int> partner(mesh.nodes.size(), -1);
    for (int j = 0; j <= ny; ++j) {
        mesh.periodic_pairs.emplace_back(gap_node[0][j], gap_node[nc][j]);
        partner[gap_node[nc][j]] = gap_node[0][j];
    }
    for (std::size_t n = 0; n < mesh.nodes.size(); ++n)
        if (mesh.tags[n] == Mesh2D::Interior && partner[n] < 0) mesh.dof[n] = mesh.dof_count++;
    for (std::size_t n = 0; n < mesh.nodes.size(); ++n)
        if (partner[n] >= 0) mesh.dof[n] = mesh.dof[partner[n]];

    if (!(mesh.min_signed_area() > 0.0))
        throw NumericalError(fmt::format("capacitor mesh has an inverted triangle at gap {:.3e}", gap),
                             mesh.min_signed_area());
    return mesh;
}

double capacitor_energy(const Mesh2D& mesh, double period, double voltage) {
    const std::size_t nn = mesh.nodes.size();
    Eigen::VectorXd fixed = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nn));
    for (std::size_t n = 0; n < nn; ++n)
        if (mesh.tags[n] == Mesh2D::Electrode) fixed(static_cast<Eigen::Index>(n)) = voltage;

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(mesh.triangles.size() * 9);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(mesh.dof_count);
    std::vector<std::array<double, 9>> local(mesh.triangles.size());
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        const double area = mesh.signed_area(t);
        double b[3], c[3];
        for (int a = 0; a < 3; ++a) {
            const auto& p1 = mesh.nodes[tri[(a + 1) % 3]];
            const auto& p2 = mesh.nodes[tri[(a + 2) % 3]];
            b[a] = p1.y() - p2.y();
            c[a] = p2.x() - p1.x();
        }
        for (int a = 0; a < 3; ++a)
            for (int e = 0; e < 3; ++e) {
                const double k = (b[a] * b[e] + c[a] * c[e]) / (4.0 * area);
                local[t][3 * a + e] = k;
                const int ra = mesh.dof[tri[a]];
                if (ra < 0) continue;
                const int re = mesh.dof[tri[e]];
                if (re >= 0) triplets.emplace_back(ra, re, k);
                else rhs(ra) -= k * fixed(tri[e]);
            }
    }
    Eigen::VectorXd u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nn));
    if (mesh.dof_count > 0) {
        Eigen::SparseMatrix<double> k(mesh.dof_count, mesh.dof_count);
        k.setFromTriplets(triplets.begin(), triplets.end());
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(k);
        if (solver.info() != Eigen::Success) throw NumericalError("capacitor: stiffness factorization failed", 0.0);
        const Eigen::VectorXd free = solver.solve(rhs);
        if (solver.info() != Eigen::Success) throw NumericalError("capacitor: linear solve failed", 0.0);
        const double residual = (k * free - rhs).norm() / std::max(rhs.norm(), 1e-300);
        if (!(residual < 1e-8)) throw NumericalError("capacitor: linear solve residual too large", residual);
        for (std::size_t n = 0; n < nn; ++n)
            u(static_cast<Eigen::Index>(n)) = mesh.dof[n] >= 0 ? free(mesh.dof[n]) : fixed(static_cast<Eigen::Index>(n));
    } else {
        u = fixed;
    }
    double energy = 0.0;
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        for (int a = 0; a < 3; ++a)
            for (int e = 0; e < 3; ++e) energy += local[t][3 * a + e] * u(tri[a]) * u(tri[e]);
    }
    return 0.5 * PhysicalConstants::epsilon0 * energy / period;
}

double solve_corrugated_capacitor(const GratingProfile& profile, double gap, double voltage,
                                  const MeshControl& control) {
    return capacitor_energy(build_capacitor_mesh(profile, gap, control), profile.period(), voltage);
}

double corrugated_sphere_force(const GratingProfile& profile, double gap, double voltage, double radius,
                               const MeshControl& control) {
    if (!(radius > 0.0)) throw DomainError("capacitor: sphere radius must be positive");
    return 2.0 * pi * radius * solve_corrugated_capacitor(profile, gap, voltage, control);
}

double corrugated_sphere_gradient(const GratingProfile& profile, double gap, double voltage, double radius,
                                  const MeshControl& control) {
    if (!(radius > 0.0)) throw DomainError("capacitor: sphere radius must be positive");
    const double h = 1e-3 * gap;
    const double up = solve_corrugated_capacitor(profile, gap + h, voltage, control);
    const double down = solve_corrugated_capacitor(profile, gap - h, voltage, control);
    return -2.0 * pi * radius * (up - down) / (2.0 * h);
}

}  // namespace casimir
