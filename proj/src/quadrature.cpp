#include "casimir/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace casimir {

QuadratureRule gauss_legendre(std::size_t n, double a, double b) {
    if (n == 0) throw std::invalid_argument("gauss_legendre: n must be positive");
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (b + a);
    const std::size_t m = (n + 1) / 2;
    for (std::size_t i = 0; i < m; ++i) {
        // Tricomi initial guess, then Newton on P_n.
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
                p0 = p1;
                p1 = pk;
            }
            if (n == 1) {
                p1 = x;
                p0 = 1.0;
            }
            dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = mid - half * x;
        rule.nodes[n - 1 - i] = mid + half * x;
        rule.weights[i] = half * w;
        rule.weights[n - 1 - i] = half * w;
    }
    return rule;
}

QuadratureRule log_gauss_legendre(std::size_t n, double u_min, double u_max) {
    if (!(u_min > 0.0 && u_max > u_min)) throw std::invalid_argument("log_gauss_legendre: need 0 < u_min < u_max");
    QuadratureRule rule = gauss_legendre(n, std::log(u_min), std::log(u_max));
    for (std::size_t i = 0; i < n; ++i) {
        rule.nodes[i] = std::exp(rule.nodes[i]);
        rule.weights[i] *= rule.nodes[i];
    }
    return rule;
}

QuadratureRule composite_gauss_legendre(std::size_t n, std::size_t panels, double a, double b) {
    if (panels == 0) throw std::invalid_argument("composite_gauss_legendre: panels must be positive");
    QuadratureRule out;
    const double h = (b - a) / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
        const QuadratureRule r = gauss_legendre(n, a + h * p, a + h * (p + 1));
        out.nodes.insert(out.nodes.end(), r.nodes.begin(), r.nodes.end());
        out.weights.insert(out.weights.end(), r.weights.begin(), r.weights.end());
    }
    return out;
}

}  // namespace casimir
