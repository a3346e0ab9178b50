#include "casimir/pfa.hpp"

#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "casimir/errors.hpp"
#include "casimir/interpolation.hpp"

namespace casimir {

double FlatForceLaw::operator()(double z) const {
    if (z < z_min || z > z_max) {
        std::ostringstream msg;
        msg << "flat force law evaluated at " << z * 1e9 << " nm outside [" << z_min * 1e9 << ", " << z_max * 1e9
            << "] nm";
        throw DomainError(msg.str());
    }
    return law(z);
}

FlatForceLaw FlatForceLaw::analytic(std::function<double(double)> f, double z_min, double z_max, std::string unit) {
    return {std::move(f), z_min, z_max, Provenance::Analytic, std::move(unit)};
}

FlatForceLaw FlatForceLaw::computed(std::function<double(double)> f, double z_min, double z_max, std::string unit) {
    return {std::move(f), z_min, z_max, Provenance::Computed, std::move(unit)};
}

FlatForceLaw FlatForceLaw::from_table(const ForceCurve& curve) {
    MonotoneInterpolant interp(curve.z, curve.value);
    const double lo = interp.x_min(), hi = interp.x_max();
    return {[interp](double z) { return interp(z); }, lo, hi, Provenance::MeasuredTable, curve.unit};
}

PfaTerms pfa_terms(const FlatForceLaw& law, const GratingProfile& g, double z) {
    if (!(z > 0.0)) throw DomainError("pfa_corrugated: z must be positive");
    const double t = g.depth();
    if (!law.covers(z, z + t)) {
        std::ostringstream msg;
        msg << "pfa_corrugated: force law not defined on [" << z * 1e9 << ", " << (z + t) * 1e9 << "] nm";
        throw DomainError(msg.str());
    }
    PfaTerms terms{g.p1() * law(z), g.p2() * law(z + t), 0.0};
    const double p3 = g.p3();
    if (p3 > 0.0) {
        // 2 int_0^p3 F(z + t x/p3) dx = 2 p3 int_0^1 F(z + t y) dy
        auto f = [&](double y) { return law(z + t * y); };
        const double integral =
            boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, 0.0, 1.0, 15, 1e-6);
        terms.sidewalls = 2.0 * p3 * integral;
    }
    return terms;
}

double pfa_corrugated(const FlatForceLaw& law, const GratingProfile& g, double z) { return pfa_terms(law, g, z).total(); }

double pfa_share_topbottom(const FlatForceLaw& law, const GratingProfile& g, double z) {
    const PfaTerms terms = pfa_terms(law, g, z);
    return (terms.top + terms.bottom) / terms.total();
}

}  // namespace casimir
