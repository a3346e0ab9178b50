#pragma once

// Independent reflection operator for a single lamellar slab on a substrate, used only by
// tests. Complex first-order Maxwell system at omega = i xi, slab crossed with a matrix
// exponential (transfer matrix), half-space modes from a general complex eigensolver.

#include <Eigen/Dense>
#include <complex>
#include <unsupported/Eigen/MatrixFunctions>

#include "casimir/constants.hpp"

namespace oracle {

using cd = std::complex<double>;
using CMat = Eigen::MatrixXcd;

inline CMat toeplitz(int m, double fill, double inside, double outside) {
    CMat t(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            const int d = i - j;
            const double x = casimir::pi * d * fill;
            t(i, j) = (d == 0 ? outside : 0.0) + (inside - outside) * fill * (d == 0 ? 1.0 : std::sin(x) / x);
        }
    return t;
}

// d/dz [Ex, Ey, Hx, Hy] = T [Ex, Ey, Hx, Hy], H scaled by the vacuum impedance.
inline CMat system_matrix(const Eigen::VectorXd& kxn, double ky, cd k0, const CMat& eps, const CMat& a_inv_rule) {
    const int m = static_cast<int>(kxn.size());
    const cd i(0, 1);
    const CMat kx = kxn.cast<cd>().asDiagonal();
    const CMat id = CMat::Identity(m, m);
    const CMat eps_inv = eps.inverse();
    // Ez = -eps^{-1} (Kx Hy - ky Hx) / k0 ; Hz = (Kx Ey - ky Ex) / k0
    CMat t = CMat::Zero(4 * m, 4 * m);
    // dEx = i Kx Ez + i k0 Hy
    t.block(0, 2 * m, m, m) = i * kx * eps_inv * ky / k0;
    t.block(0, 3 * m, m, m) = -i * kx * eps_inv * kx / k0 + i * k0 * id;
    // dEy = i ky Ez - i k0 Hx
    t.block(m, 2 * m, m, m) = i * ky * eps_inv * ky / k0 - i * k0 * id;
    t.block(m, 3 * m, m, m) = -i * ky * eps_inv * kx / k0;
    // dHx = i Kx Hz - i k0 eps Ey
    t.block(2 * m, 0, m, m) = -i * kx * ky / k0;
    t.block(2 * m, m, m, m) = i * kx * kx / k0 - i * k0 * eps;
    // dHy = i ky Hz + i k0 A Ex
    t.block(3 * m, 0, m, m) = -i * ky * ky / k0 * id + i * k0 * a_inv_rule;
    t.block(3 * m, m, m, m) = i * ky * kx / k0;
    return t;
}

// Eigenvectors of T split by the sign of the real part of the eigenvalue.
inline void split_modes(const CMat& t, CMat& growing, CMat& decaying) {
    Eigen::ComplexEigenSolver<CMat> es(t);
    const int n = static_cast<int>(t.rows());
    growing.resize(n, n / 2);
    decaying.resize(n, n / 2);
    int g = 0, d = 0;
    for (int j = 0; j < n; ++j) {
        if (es.eigenvalues()(j).real() > 0) growing.col(g++) = es.eigenvectors().col(j);
        else decaying.col(d++) = es.eigenvectors().col(j);
    }
}

// Reflection in the (E.s, kappa/k0 H.s) basis of the library, for a slab of thickness h
// (metres) and ridge fill `fill` on a substrate of the same permittivity.
inline Eigen::MatrixXd slab_reflection(double period, double fill, double h, double eps_r, double xi, double kx,
                                       double ky, int orders) {
    const int m = 2 * orders + 1;
    const double g = 2.0 * casimir::pi / period;
    Eigen::VectorXd kxn(m);
    for (int n = 0; n < m; ++n) kxn(n) = kx + g * (n - orders);
    const double k0r = xi / casimir::PhysicalConstants::c;
    const cd k0(0.0, k0r);  // omega / c with omega = i xi
    const CMat vac = CMat::Identity(m, m);
    const CMat t_vac = system_matrix(kxn, ky, k0, vac, vac);
    const CMat eps_sub = eps_r * CMat::Identity(m, m);
    const CMat t_sub = system_matrix(kxn, ky, k0, eps_sub, eps_sub);
    const CMat eps_slab = toeplitz(m, fill, eps_r, 1.0);
    const CMat a_slab = toeplitz(m, fill, 1.0 / eps_r, 1.0).inverse();
    const CMat t_slab = system_matrix(kxn, ky, k0, eps_slab, a_slab);

    CMat vin, vout, sub_up, sub_down;
    split_modes(t_vac, vin, vout);        // vacuum: growing with z = incident from above
    split_modes(t_sub, sub_down, sub_up);  // substrate: keep modes decaying towards -infinity
    const CMat transfer = (t_slab * h).exp();  // F(0) = transfer * F(-h)

    // Vacuum amplitudes in the (TE, TM) basis: TE = E.s, TM = H.s.
    auto to_te_tm = [&](const CMat& modes) {
        CMat out(2 * m, modes.cols());
        for (int n = 0; n < m; ++n) {
            const double kp = std::hypot(kxn(n), ky);
            const double sx = -ky / kp, sy = kxn(n) / kp;
            out.row(n) = sx * modes.row(n) + sy * modes.row(m + n);
            out.row(m + n) = sx * modes.row(2 * m + n) + sy * modes.row(3 * m + n);
        }
        return out;
    };
    const CMat in_basis = to_te_tm(vin);
    const CMat out_basis = to_te_tm(vout);
    CMat lhs(4 * m, 4 * m);
    lhs << vout, -transfer * sub_down;
    // For each unit incident (TE/TM) amplitude vector, find vacuum mode coefficients.
    const CMat in_coeff = in_basis.inverse();
    const CMat rhs = -vin * in_coeff;
    const CMat sol = lhs.partialPivLu().solve(rhs);
    const CMat r_h = out_basis * sol.topRows(2 * m);
    // Library TM amplitude = (kappa / k0) H.s for both directions.
    Eigen::MatrixXd r(2 * m, 2 * m);
    for (int i2 = 0; i2 < 2 * m; ++i2)
        for (int j = 0; j < 2 * m; ++j) {
            const auto scale = [&](int idx) {
                if (idx < m) return 1.0;
                const int n = idx - m;
                return std::sqrt(k0r * k0r + kxn(n) * kxn(n) + ky * ky) / k0r;
            };
            r(i2, j) = (r_h(i2, j) * scale(i2) / scale(j)).real();
        }
    return r;
}

}  // namespace oracle
