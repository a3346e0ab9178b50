#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "casimir/force_curve.hpp"
#include "casimir/geometry.hpp"

namespace casimir {

/// Force (or pressure, or gradient) between flat surfaces as a function of separation.
struct FlatForceLaw {
    enum class Provenance { Analytic, Computed, MeasuredTable };

    std::function<double(double)> law;
    double z_min = 0.0;
    double z_max = INFINITY;
    Provenance provenance = Provenance::Analytic;
    std::string unit;

    double operator()(double z) const;
    bool covers(double lo, double hi) const { return lo >= z_min && hi <= z_max; }

    static FlatForceLaw analytic(std::function<double(double)> f, double z_min = 0.0, double z_max = INFINITY,
                                 std::string unit = {});
    static FlatForceLaw computed(std::function<double(double)> f, double z_min, double z_max, std::string unit = {});
    /// Shape-preserving cubic through a measured curve; defined only on its sampled range.
    static FlatForceLaw from_table(const ForceCurve& curve);
};

struct PfaTerms {
    double top;        ///< p1 F(z)
    double bottom;     ///< p2 F(z + t)
    double sidewalls;  ///< 2 int_0^p3 F(z + t x / p3) dx
    double total() const { return top + bottom + sidewalls; }
};

/// Term-by-term corrugation PFA. The sidewall integral uses adaptive Gauss-Kronrod to
/// relative tolerance 1e-6.
PfaTerms pfa_terms(const FlatForceLaw& law, const GratingProfile& profile, double z);

/// p1 F(z) + p2 F(z + t) + 2 int_0^p3 F(z + t x / p3) dx.
double pfa_corrugated(const FlatForceLaw& law, const GratingProfile& profile, double z);

/// Share of the plateau terms, (top + bottom) / total.
double pfa_share_topbottom(const FlatForceLaw& law, const GratingProfile& profile, double z);

}  // namespace casimir
