#pragma once

#include <cstddef>
#include <vector>

namespace casimir {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }
};

/// n-point Gauss-Legendre rule on [a, b].
QuadratureRule gauss_legendre(std::size_t n, double a = -1.0, double b = 1.0);

/// Gauss-Legendre in s = ln(u) over [u_min, u_max]. Weights include the Jacobian du = u ds,
/// so sum_i w_i f(u_i) approximates the integral of f(u) du.
QuadratureRule log_gauss_legendre(std::size_t n, double u_min, double u_max);

/// Composite rule: `panels` equal panels of an n-point Gauss-Legendre rule each.
QuadratureRule composite_gauss_legendre(std::size_t n, std::size_t panels, double a, double b);

}  // namespace casimir
