#include "casimir/electrostatics.hpp"

#include <cmath>

#include <fmt/format.h>

#include "casimir/constants.hpp"
#include "casimir/errors.hpp"

namespace casimir {

namespace {

constexpr int max_series_terms = 10'000'000;
constexpr double series_tolerance = 1e-10;

double csch(double x) { return 2.0 * std::exp(-x) / -std::expm1(-2.0 * x); }

}  // namespace

void SpherePlaneES::validate() const {
    if (!(radius > 0.0)) throw DomainError("sphere-plane: radius must be positive");
    if (!(separation > 0.0)) throw DomainError("sphere-plane: separation must be positive");
    if (!std::isfinite(voltage) || !std::isfinite(residual_voltage))
        throw DomainError("sphere-plane: voltages must be finite");
}

SeriesSum sphere_plane_series(const SpherePlaneES& es, int n_max) {
    es.validate();
    if (n_max < 0) throw DomainError("sphere-plane: n_max must be >= 0");
    const double dv = es.voltage - es.residual_voltage;
    const double prefactor = 2.0 * pi * PhysicalConstants::epsilon0 * dv * dv;
    if (dv == 0.0) return {0.0, 0.0, 0};

    const double alpha = std::acosh(1.0 + es.separation / es.radius);
    if (alpha < small_gap_alpha && n_max == 0) {
        const double f = pi * PhysicalConstants::epsilon0 * es.radius * dv * dv / es.separation;
        return {f, f / es.separation, 0};
    }

    const double coth_a = 1.0 / std::tanh(alpha);
    const double csch_a = csch(alpha);
    // q^n = exp(-n alpha) by recurrence; csch and coth of n alpha follow from q^{2n}.
    const double q = std::exp(-alpha);
    double qn = 1.0;
    double sum = 0.0, dsum = 0.0, previous = 0.0;
    int n = 1;
    for (;; ++n) {
        qn *= q;
        const double q2 = qn * qn;
        const double one_minus = n * alpha < 0.5 ? -std::expm1(-2.0 * n * alpha) : 1.0 - q2;
        const double cs = 2.0 * qn / one_minus;
        const double ct = (1.0 + q2) / one_minus;
        const double a = n * ct - coth_a;
        const double term = a * cs;
        const double da = -n * n * cs * cs + csch_a * csch_a;
        const double dterm = da * cs - a * n * cs * ct;
        sum += term;
        dsum += dterm;
        if (n_max > 0) {
            if (n == n_max) break;
            continue;
        }
        if (n > 1 && term < previous && term > 0.0) {
            const double r = term / previous;
            if (term * r / (1.0 - r) < series_tolerance * sum) break;
        }
        if (term == 0.0 && n > 1) break;
        if (n >= max_series_terms)
            throw NumericalError(fmt::format("sphere-plane series did not converge at alpha = {:.3e}", alpha),
                                 term / sum);
        previous = term;
    }
    const double dalpha_dd = 1.0 / (es.radius * std::sinh(alpha));
    return {prefactor * sum, -prefactor * dsum * dalpha_dd, n};
}

double sphere_plane_force(const SpherePlaneES& es, int n_max) { return sphere_plane_series(es, n_max).force; }

double sphere_plane_gradient(const SpherePlaneES& es, int n_max) { return sphere_plane_series(es, n_max).gradient; }

}  // namespace casimir
