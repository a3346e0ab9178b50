#include "casimir/geometry.hpp"

#include <cmath>
#include <sstream>

#include "casimir/constants.hpp"
#include "casimir/errors.hpp"

namespace casimir {

GratingProfile::GratingProfile(double period, double top_width, double bottom_width, double depth,
                               double sidewall_angle_deg)
    : period_(period),
      top_width_(top_width),
      bottom_width_(bottom_width),
      depth_(depth),
      sidewall_angle_deg_(sidewall_angle_deg) {
    if (!(period > 0.0)) throw DomainError("grating period must be positive");
    if (!(top_width >= 0.0) || !(bottom_width >= 0.0)) throw DomainError("plateau widths must be non-negative");
    if (top_width + bottom_width > period * (1.0 + 1e-12))
        throw DomainError("plateau widths exceed the period");
    if (!(depth >= 0.0)) throw DomainError("grating depth must be non-negative");
    if (!(sidewall_angle_deg >= 90.0 && sidewall_angle_deg < 180.0))
        throw DomainError("sidewall angle must lie in [90, 180) degrees");
}

double GratingProfile::sidewall_width_from_angle() const {
    return depth_ * std::tan((sidewall_angle_deg_ - 90.0) * pi / 180.0);
}

std::optional<std::string> GratingProfile::consistency_warning() const {
    const double from_widths = sidewall_width();
    const double from_angle = sidewall_width_from_angle();
    const double scale = std::max(from_widths, from_angle);
    if (scale <= 0.0 || depth_ == 0.0) return std::nullopt;
    if (std::abs(from_widths - from_angle) <= 0.1 * scale) return std::nullopt;
    std::ostringstream msg;
    msg << "sidewall extent from widths (" << from_widths * 1e9 << " nm) and from the "
        << sidewall_angle_deg_ << " deg angle (" << from_angle * 1e9 << " nm) differ by more than 10%";
    return msg.str();
}

GratingProfile GratingProfile::with_depth(double depth) const {
    return {period_, top_width_, bottom_width_, depth, sidewall_angle_deg_};
}

GratingProfile GratingProfile::measured_sample() { return {400e-9, 185.3e-9, 199.1e-9, 98e-9, 94.6}; }

double height_profile(const GratingProfile& g, double x) {
    if (!(x >= 0.0 && x < g.period())) throw DomainError("height_profile: x outside [0, period)");
    const double l1 = g.top_width();
    const double w = g.sidewall_width();
    const double l2 = g.bottom_width();
    const double t = g.depth();
    if (x < l1) return 0.0;
    if (x < l1 + w) return t * (x - l1) / w;
    if (x < l1 + w + l2) return t;
    if (w <= 0.0) return 0.0;
    return t * (1.0 - (x - l1 - w - l2) / w);
}

std::vector<LamellarSlab> staircase_approximation(const GratingProfile& g, int n_slices) {
    if (n_slices < 1) throw DomainError("staircase_approximation: n_slices must be >= 1");
    std::vector<LamellarSlab> slabs;
    if (g.depth() == 0.0) return slabs;
    const double h = g.depth() / n_slices;
    for (int i = 0; i < n_slices; ++i) {
        const double mid = (i + 0.5) / n_slices;  // fractional depth
        const double fill = g.p1() + 2.0 * g.p3() * mid;
        slabs.push_back({h, fill, i * h});
    }
    return slabs;
}

double staircase_area_error(const GratingProfile& g, int n_slices) {
    // Per sidewall and slab the ramp crosses the vertical step at mid-height, leaving two
    // triangles of legs (h/2, dw/2) each.
    if (n_slices < 1) throw DomainError("staircase_area_error: n_slices must be >= 1");
    const double h = g.depth() / n_slices;
    const double dw = g.sidewall_width() / n_slices;
    const double per_side_per_slab = 2.0 * 0.5 * (0.5 * h) * (0.5 * dw);
    return 2.0 * n_slices * per_side_per_slab;
}

void ExperimentGeometry::validate() const {
    if (!(sphere_radius > 0.0)) throw DomainError("sphere radius must be positive");
    if (!(lever_arm > 0.0)) throw DomainError("lever arm must be positive");
    if (!(resonance_frequency > 0.0)) throw DomainError("resonance frequency must be positive");
    if (moment_of_inertia && !(*moment_of_inertia > 0.0)) throw DomainError("moment of inertia must be positive");
}

}  // namespace casimir
