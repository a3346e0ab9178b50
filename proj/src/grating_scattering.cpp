#include "casimir/grating_scattering.hpp"

#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "casimir/constants.hpp"
#include "casimir/errors.hpp"
#include "casimir/parallel.hpp"
#include "casimir/pfa.hpp"
#include "casimir/planar_lifshitz.hpp"
#include "casimir/quadrature.hpp"

namespace casimir {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Radial variable u = 2 q z (same mapping as the planar integral).
constexpr double kRadialMin = 1e-4;
constexpr double kRadialMax = 90.0;

// Wavevectors inside the modal solver are measured in units of the reciprocal lattice
// constant G = 2 pi / period, lengths in units of 1/G.
struct Lateral {
    VectorXd kx;  // k_x + n, n = -N..N
    double ky;
    double k0;  // xi / c
    int m() const { return static_cast<int>(kx.size()); }
};

Lateral make_lateral(double period, double xi, double kx, double ky, int orders) {
    const double g = 2.0 * pi / period;
    Lateral lat;
    const int m = 2 * orders + 1;
    lat.kx.resize(m);
    for (int i = 0; i < m; ++i) lat.kx(i) = kx / g + (i - orders);
    lat.ky = ky / g;
    lat.k0 = xi / PhysicalConstants::c / g;
    return lat;
}

// Modes of one z-invariant region: columns of W hold the tangential E field (Ex; Ey) and
// columns of V the scaled tangential H field k0 * Z0 * (Hx; Hy), for a mode growing as
// exp(+lambda z); the decaying partner has the same W and -V.
struct Modes {
    MatrixXd w;
    MatrixXd v;
    VectorXd lambda;
};

// Unit in-plane vectors of order n: s = z x k_par / |k_par|, p = k_par / |k_par|.
void in_plane_basis(double kxn, double ky, double& sx, double& sy, double& px, double& py) {
    const double kp = std::hypot(kxn, ky);
    if (kp == 0.0) {
        // Normal incidence: any orthonormal pair works as long as it is used consistently.
        sx = 0.0, sy = 1.0, px = 1.0, py = 0.0;
        return;
    }
    sx = -ky / kp, sy = kxn / kp, px = kxn / kp, py = ky / kp;
}

// Homogeneous region with permittivity eps; columns ordered TE_n then TM_n.
Modes homogeneous_modes(const Lateral& lat, double eps) {
    const int m = lat.m();
    Modes md{MatrixXd::Zero(2 * m, 2 * m), MatrixXd::Zero(2 * m, 2 * m), VectorXd(2 * m)};
    const double k2 = lat.k0 * lat.k0;
    for (int n = 0; n < m; ++n) {
        const double kxn = lat.kx(n);
        const double kappa = std::sqrt(kxn * kxn + lat.ky * lat.ky + eps * k2);
        double sx, sy, px, py;
        in_plane_basis(kxn, lat.ky, sx, sy, px, py);
        // TE: E along s, scaled H along p with magnitude kappa.
        md.w(n, n) = sx;
        md.w(m + n, n) = sy;
        md.v(n, n) = kappa * px;
        md.v(m + n, n) = kappa * py;
        // TM: E along p, scaled H = -(eps k0^2 / kappa) s.
        md.w(n, m + n) = px;
        md.w(m + n, m + n) = py;
        md.v(n, m + n) = -eps * k2 / kappa * sx;
        md.v(m + n, m + n) = -eps * k2 / kappa * sy;
        md.lambda(n) = kappa;
        md.lambda(m + n) = kappa;
    }
    return md;
}

// Toeplitz matrix of the Fourier coefficients of a two-valued function that equals
// `inside` on a centred window of width fill*period and `outside` elsewhere.
MatrixXd toeplitz_two_valued(int m, double fill, double inside, double outside) {
    MatrixXd t(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            const int d = i - j;
            const double sinc = d == 0 ? 1.0 : std::sin(pi * d * fill) / (pi * d * fill);
            t(i, j) = (d == 0 ? outside : 0.0) + (inside - outside) * fill * sinc;
        }
    return t;
}

// Lamellar slab: ridge of permittivity eps_ridge and fill fraction `fill`, vacuum elsewhere.
//
// With Kx = diag(k_x + n), the second-order system for (Ex, Ey) is block lower triangular:
//   TE-like family (Ex = 0):  [Kx^2 + ky^2 + k0^2 [[eps]]] Ey = lambda^2 Ey
//   TM-like family (Hx = 0):  [A B + ky^2] Hy = lambda^2 Hy,  A = [[1/eps]]^{-1},
//                             B = Kx [[eps]]^{-1} Kx + k0^2
// [[eps]] multiplies the field components tangential to the ridge walls, the inverse rule A
// the normal component Ex. Both families reduce to symmetric eigenproblems.
Modes lamellar_modes(const Lateral& lat, double fill, double eps_ridge) {
    const int m = lat.m();
    const double k2 = lat.k0 * lat.k0;
    const double ky = lat.ky;
    const MatrixXd eps_t = toeplitz_two_valued(m, fill, eps_ridge, 1.0);
    const MatrixXd inv_eps_t = toeplitz_two_valued(m, fill, 1.0 / eps_ridge, 1.0);
    const Eigen::LDLT<MatrixXd> eps_ldlt(eps_t);
    const MatrixXd eps_inv = eps_ldlt.solve(MatrixXd::Identity(m, m));
    const Eigen::LLT<MatrixXd> inv_eps_llt(inv_eps_t);
    if (inv_eps_llt.info() != Eigen::Success) throw NumericalError("lamellar_modes: inverse-rule matrix is not positive definite");
    // A = (L L^T)^{-1} = L^{-T} L^{-1}; store its Cholesky factor C = L^{-T} so that A = C C^T.
    const MatrixXd l_inv = inv_eps_llt.matrixL().solve(MatrixXd::Identity(m, m));
    const MatrixXd c_fac = l_inv.transpose();
    const auto kxd = lat.kx.asDiagonal();

    MatrixXd b = kxd * eps_inv * kxd;
    b.diagonal().array() += k2;
    b = 0.5 * (b + b.transpose());

    MatrixXd a22 = k2 * eps_t;
    a22.diagonal().array() += lat.kx.array().square() + ky * ky;
    a22 = 0.5 * (a22 + a22.transpose());
    const Eigen::SelfAdjointEigenSolver<MatrixXd> te(a22);

    MatrixXd s = c_fac.transpose() * b * c_fac;
    s = 0.5 * (s + s.transpose());
    const Eigen::SelfAdjointEigenSolver<MatrixXd> tm(s);
    if (te.info() != Eigen::Success || tm.info() != Eigen::Success)
        throw NumericalError("lamellar_modes: eigensolver failed");

    Modes md{MatrixXd::Zero(2 * m, 2 * m), MatrixXd::Zero(2 * m, 2 * m), VectorXd(2 * m)};
    // TE-like: psi = (0, w), phi = Qm psi / lambda.
    for (int j = 0; j < m; ++j) {
        const double mu = te.eigenvalues()(j);
        if (!(mu > 0.0)) throw NumericalError("lamellar_modes: non-positive TE eigenvalue");
        const double lam = std::sqrt(mu);
        const VectorXd w = te.eigenvectors().col(j);
        md.w.col(j).tail(m) = w;
        md.v.col(j).head(m) = (lat.kx.array().square().matrix().asDiagonal() * w + k2 * (eps_t * w)) / lam;
        md.v.col(j).tail(m) = ky * (kxd * w) / lam;
        md.lambda(j) = lam;
    }
    // TM-like: phi = (0, k0^2 h), psi = Pm (0, h) / lambda with h = C y.
    for (int j = 0; j < m; ++j) {
        const double mu = tm.eigenvalues()(j) + ky * ky;
        if (!(mu > 0.0)) throw NumericalError("lamellar_modes: non-positive TM eigenvalue");
        const double lam = std::sqrt(mu);
        const VectorXd h = c_fac * tm.eigenvectors().col(j);
        md.w.col(m + j).head(m) = -(b * h) / lam;
        md.w.col(m + j).tail(m) = -ky * (eps_inv * (kxd * h)) / lam;
        md.v.col(m + j).tail(m) = k2 * h;
        md.lambda(m + j) = lam;
    }
    // Mode amplitudes are arbitrary; normalize columns to keep the interface solves balanced.
    for (int j = 0; j < 2 * m; ++j) {
        const double nrm = std::sqrt(md.w.col(j).squaredNorm() + md.v.col(j).squaredNorm());
        md.w.col(j) /= nrm;
        md.v.col(j) /= nrm;
    }
    return md;
}

// Reflection (upward = R * downward amplitudes) just above the interface between `upper`
// and a lower region described by its modes and its own reflection at that interface.
MatrixXd interface_reflection(const Modes& upper, const Modes& lower, const MatrixXd& lower_reflection) {
    const Eigen::Index n = upper.w.rows();
    const MatrixXd id = MatrixXd::Identity(n, n);
    const MatrixXd x = lower.w * (id + lower_reflection);
    const MatrixXd y = lower.v * (id - lower_reflection);
    MatrixXd g(2 * n, 2 * n);
    g << upper.w, -x, -upper.v, -y;
    MatrixXd rhs(2 * n, n);
    rhs << -upper.w, -upper.v;
    const Eigen::PartialPivLU<MatrixXd> lu(g);
    const MatrixXd sol = lu.solve(rhs);
    return sol.topRows(n);
}

void check_truncation(const TruncationSpec& s) {
    s.validate();
}

}  // namespace

void TruncationSpec::validate() const {
    if (orders < 0) throw DomainError("truncation: orders must be >= 0");
    if (n_slices < 1) throw DomainError("truncation: n_slices must be >= 1");
    if (quadrature.bz_nodes < 1 || quadrature.radial_nodes < 8 || quadrature.angular_nodes < 8)
        throw DomainError("truncation: quadrature needs bz_nodes >= 1 and radial/angular nodes >= 8");
    if (!(perfect_conductor_skin_depth > 0.0)) throw DomainError("truncation: skin depth must be positive");
}

ReflectionOperator planar_reflection(const DielectricModel& model, double period, double xi, double kx, double ky,
                                     int orders) {
    const int m = 2 * orders + 1;
    const double g = 2.0 * pi / period;
    ReflectionOperator r{MatrixXd::Zero(2 * m, 2 * m), orders, xi, kx, ky};
    for (int i = 0; i < m; ++i) {
        const double kxn = kx + g * (i - orders);
        const FresnelPair f = fresnel_te_tm(model, xi, std::hypot(kxn, ky));
        r.matrix(i, i) = f.te;
        r.matrix(m + i, m + i) = f.tm;
    }
    return r;
}

ReflectionOperator grating_reflection(const GratingProfile& profile, const DielectricModel& model, double xi,
                                      double kx, double ky, const TruncationSpec& spec) {
    check_truncation(spec);
    if (!(xi > 0.0)) throw DomainError("grating_reflection: xi must be positive");
    if (std::abs(kx) > pi / profile.period() * (1.0 + 1e-12))
        throw DomainError("grating_reflection: k_x outside the first Brillouin zone");
    const int m = 2 * spec.orders + 1;
    ReflectionOperator out{MatrixXd(2 * m, 2 * m), spec.orders, xi, kx, ky};

    const bool flat = profile.depth() == 0.0;
    if (model.is_perfect_conductor() && flat) {
        out.matrix = MatrixXd::Zero(2 * m, 2 * m);
        out.matrix.diagonal().head(m).setConstant(-1.0);
        out.matrix.diagonal().tail(m).setConstant(1.0);
        return out;
    }
    const DielectricModel material =
        model.is_perfect_conductor() ? presets::plasma_surrogate(spec.perfect_conductor_skin_depth) : model;
    const double eps = epsilon_at_imaginary_frequency(material, xi);
    const double g = 2.0 * pi / profile.period();
    const Lateral lat = make_lateral(profile.period(), xi, kx, ky, spec.orders);

    try {
        const Modes substrate = homogeneous_modes(lat, eps);
        Modes below = substrate;
        MatrixXd r_below = MatrixXd::Zero(2 * m, 2 * m);
        const auto slabs = staircase_approximation(profile, spec.n_slices);
        for (auto it = slabs.rbegin(); it != slabs.rend(); ++it) {
            const Modes slab = it->fill_fraction >= 1.0 ? homogeneous_modes(lat, eps)
                                                        : lamellar_modes(lat, it->fill_fraction, eps);
            const MatrixXd r_bottom = interface_reflection(slab, below, r_below);
            const VectorXd decay = (-slab.lambda * (it->thickness * g)).array().exp();
            r_below = decay.asDiagonal() * r_bottom * decay.asDiagonal();
            below = slab;
        }
        const Modes vacuum = homogeneous_modes(lat, 1.0);
        const MatrixXd r_vac = interface_reflection(vacuum, below, r_below);
        // Incoming TM amplitude is -p.E, outgoing +p.E: flip the sign of the TM columns.
        out.matrix = r_vac;
        out.matrix.rightCols(m) *= -1.0;
    } catch (const NumericalError& e) {
        throw NumericalError(fmt::format("{} at xi = {:.6e} rad/s, kx = {:.6e} 1/m, ky = {:.6e} 1/m", e.what(), xi, kx, ky));
    }
    if (!out.matrix.allFinite())
        throw NumericalError(fmt::format("grating_reflection: non-finite result at xi = {:.6e}, kx = {:.6e}, ky = {:.6e}", xi, kx, ky));
    return out;
}

VectorXd vacuum_kappa(const ReflectionOperator& op, double period) {
    const int m = 2 * op.orders + 1;
    const double g = 2.0 * pi / period;
    const double k0 = op.xi / PhysicalConstants::c;
    VectorXd kappa(2 * m);
    for (int i = 0; i < m; ++i) {
        const double kxn = op.kx + g * (i - op.orders);
        kappa(i) = kappa(m + i) = std::sqrt(k0 * k0 + kxn * kxn + op.ky * op.ky);
    }
    return kappa;
}

MatrixXd flux_normalized(const ReflectionOperator& op, double period) {
    const VectorXd s = vacuum_kappa(op, period).cwiseSqrt();
    return s.cwiseInverse().asDiagonal() * op.matrix * s.asDiagonal();
}

double loop_trace_integrand(const ReflectionOperator& plate, const ReflectionOperator& grating, double z,
                            double period) {
    const VectorXd kappa = vacuum_kappa(grating, period);
    const VectorXd prop = (-kappa * z).array().exp();
    // M = R1 D R2 D with D = exp(-kappa z); dM/dz = -(R1 kappa D R2 D + R1 D R2 kappa D).
    const MatrixXd r1d = plate.matrix * prop.asDiagonal();
    const MatrixXd r2d = grating.matrix * prop.asDiagonal();
    const MatrixXd m_loop = r1d * r2d;
    const MatrixXd dm = -(plate.matrix * (kappa.array() * prop.array()).matrix().asDiagonal() * r2d +
                          r1d * grating.matrix * (kappa.array() * prop.array()).matrix().asDiagonal());
    const MatrixXd one_minus = MatrixXd::Identity(kappa.size(), kappa.size()) - m_loop;
    const Eigen::PartialPivLU<MatrixXd> lu(one_minus);
    const double det = lu.determinant();
    if (!(det > 0.0))
        throw NumericalError(fmt::format("loop operator: det(1 - M) = {} at xi = {:.6e}, kx = {:.6e}, ky = {:.6e}", det,
                                         grating.xi, grating.kx, grating.ky));
    return lu.solve(dm).trace();
}

std::vector<double> casimir_force_grating(const GratingProfile& profile, const DielectricModel& grating_material,
                                          const DielectricModel& plane_material, const std::vector<double>& z_grid,
                                          const TruncationSpec& spec) {
    check_truncation(spec);
    if (z_grid.empty()) return {};
    double z_min = z_grid.front(), z_max = z_grid.front();
    for (double z : z_grid) {
        if (!(z > 0.0)) throw DomainError("casimir_force_grating: separations must be positive");
        z_min = std::min(z_min, z);
        z_max = std::max(z_max, z);
    }
    const auto& q = spec.quadrature;
    const double period = profile.period();
    const QuadratureRule kx_rule = gauss_legendre(static_cast<std::size_t>(q.bz_nodes), 0.0, pi / period);
    // One q-grid serves all separations: it spans u = 2 q z in [kRadialMin, kRadialMax] for
    // every z, with nodes added in proportion to the extra logarithmic range.
    const double q_lo = kRadialMin / (2.0 * z_max);
    const double q_hi = kRadialMax / (2.0 * z_min);
    const double stretch = std::log(q_hi / q_lo) / std::log(kRadialMax / kRadialMin);
    const auto radial_n = static_cast<std::size_t>(std::ceil(q.radial_nodes * stretch));
    const QuadratureRule q_rule = log_gauss_legendre(radial_n, q_lo, q_hi);
    const QuadratureRule phi_rule = gauss_legendre(static_cast<std::size_t>(q.angular_nodes), 0.0, pi / 2.0);

    const std::size_t nz = z_grid.size();
    const std::size_t n_nodes = kx_rule.size() * q_rule.size() * phi_rule.size();
    std::vector<double> contrib(n_nodes * nz, 0.0);
    parallel_for(n_nodes, [&](std::size_t idx) {
        const std::size_t ip = idx % phi_rule.size();
        const std::size_t iq = (idx / phi_rule.size()) % q_rule.size();
        const std::size_t ik = idx / (phi_rule.size() * q_rule.size());
        const double qq = q_rule.nodes[iq];
        const double phi = phi_rule.nodes[ip];
        const double xi = PhysicalConstants::c * qq * std::cos(phi);
        const double ky = qq * std::sin(phi);
        const double kx = kx_rule.nodes[ik];
        const ReflectionOperator r2 = grating_reflection(profile, grating_material, xi, kx, ky, spec);
        const ReflectionOperator r1 = planar_reflection(plane_material, period, xi, kx, ky, spec.orders);
        const double w = kx_rule.weights[ik] * q_rule.weights[iq] * qq * phi_rule.weights[ip];
        for (std::size_t j = 0; j < nz; ++j) {
            // Nodes far outside this separation's mass (u = 2 q z beyond the cut-off) are skipped.
            const double u = 2.0 * qq * z_grid[j];
            if (u > kRadialMax || u < kRadialMin) continue;
            contrib[idx * nz + j] = w * loop_trace_integrand(r1, r2, z_grid[j], period);
        }
    });
    // P = hbar/(8 pi^3) int_0^inf dxi int d^2k tr[...]; the k_x and k_y half-ranges give a factor 4
    // and dxi dk_y = c q dq dphi.
    const double prefactor = 4.0 * PhysicalConstants::hbar * PhysicalConstants::c / (8.0 * pi * pi * pi);
    std::vector<double> pressure(nz, 0.0);
    for (std::size_t j = 0; j < nz; ++j) {
        double acc = 0.0;
        for (std::size_t idx = 0; idx < n_nodes; ++idx) acc += contrib[idx * nz + j];
        pressure[j] = prefactor * acc;
    }
    return pressure;
}

double casimir_force_grating(const GratingProfile& profile, const DielectricModel& grating_material,
                             const DielectricModel& plane_material, double z, const TruncationSpec& spec) {
    return casimir_force_grating(profile, grating_material, plane_material, std::vector<double>{z}, spec).front();
}

double ConvergenceTrace::last_relative_change() const {
    if (values.size() < 2) return INFINITY;
    const auto& a = values[values.size() - 2];
    const auto& b = values.back();
    double worst = 0.0;
    for (std::size_t j = 0; j < b.size(); ++j) worst = std::max(worst, std::abs(b[j] - a[j]) / std::abs(b[j]));
    return worst;
}

std::string ConvergenceTrace::to_csv() const {
    std::string out = "N,z_nm,value\n";
    for (std::size_t i = 0; i < orders.size(); ++i)
        for (std::size_t j = 0; j < z_grid.size(); ++j)
            out += fmt::format("{},{},{}\n", orders[i], format_number(z_grid[j] * 1e9), format_number(values[i][j]));
    return out;
}

ConvergenceTrace grating_order_sweep(const GratingProfile& profile, const DielectricModel& grating_material,
                                     const DielectricModel& plane_material, const std::vector<double>& z_grid,
                                     TruncationSpec spec, const std::vector<int>& orders) {
    ConvergenceTrace trace;
    trace.z_grid = z_grid;
    for (int n : orders) {
        spec.orders = n;
        trace.orders.push_back(n);
        trace.values.push_back(casimir_force_grating(profile, grating_material, plane_material, z_grid, spec));
    }
    return trace;
}

}  // namespace casimir

namespace casimir {

DielectricModel effective_grating_material(const GratingProfile& profile, const DielectricModel& model,
                                           const TruncationSpec& spec) {
    if (model.is_perfect_conductor() && profile.depth() > 0.0)
        return presets::plasma_surrogate(spec.perfect_conductor_skin_depth);
    return model;
}

namespace {

ForceCurve rho_curve(const GratingProfile& profile, const DielectricModel& grating_material,
                     const DielectricModel& plane_material, const std::vector<double>& z_grid,
                     const std::vector<double>& exact_pressure) {
    if (exact_pressure.size() != z_grid.size()) throw DomainError("rho: pressure and separation grids differ in length");
    const PlanarPair flat{plane_material, grating_material, {}};
    const auto law = FlatForceLaw::computed([flat](double z) { return casimir_pressure_planar(flat, z); }, 0.0,
                                            INFINITY, "Pa");
    ForceCurve out;
    out.unit = "1";
    out.label = "rho";
    for (std::size_t j = 0; j < z_grid.size(); ++j)
        out.push_back(z_grid[j], exact_pressure[j] / pfa_corrugated(law, profile, z_grid[j]));
    return out;
}

}  // namespace

ForceCurve rho_from_exact(const GratingProfile& profile, const DielectricModel& grating_material,
                          const DielectricModel& plane_material, const std::vector<double>& z_grid,
                          const std::vector<double>& exact_pressure) {
    return rho_curve(profile, grating_material, plane_material, z_grid, exact_pressure);
}

ForceCurve rho_ratio(const GratingProfile& profile, const DielectricModel& grating_material,
                     const DielectricModel& plane_material, const std::vector<double>& z_grid, const TruncationSpec& spec) {
    const DielectricModel material = effective_grating_material(profile, grating_material, spec);
    const auto exact = casimir_force_grating(profile, material, plane_material, z_grid, spec);
    ForceCurve out = rho_curve(profile, material, plane_material, z_grid, exact);
    out.metadata["orders"] = std::to_string(spec.orders);
    out.metadata["n_slices"] = std::to_string(spec.n_slices);
    out.metadata["quadrature"] = fmt::format("bz={} radial={} angular={}", spec.quadrature.bz_nodes,
                                             spec.quadrature.radial_nodes, spec.quadrature.angular_nodes);
    return out;
}

}  // namespace casimir
