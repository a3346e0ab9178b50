#pragma once

#include <optional>
#include <string>
#include <vector>

namespace casimir {

/// One period of a trapezoidal trench array, lengths in metres.
///
/// Within [0, period): top plateau on [0, l1), falling sidewall, trench bottom of width l2,
/// rising sidewall back to the top at x = period. Each sidewall spans p3 * period horizontally.
class GratingProfile {
public:
    GratingProfile(double period, double top_width, double bottom_width, double depth,
                   double sidewall_angle_deg = 90.0);

    double period() const { return period_; }
    double top_width() const { return top_width_; }
    double bottom_width() const { return bottom_width_; }
    double depth() const { return depth_; }
    double sidewall_angle_deg() const { return sidewall_angle_deg_; }

    double p1() const { return top_width_ / period_; }
    double p2() const { return bottom_width_ / period_; }
    double p3() const { return 0.5 * (1.0 - p1() - p2()); }
    double sidewall_width() const { return p3() * period_; }

    /// Horizontal sidewall extent implied by the angle alone, depth / tan(angle - 90 deg).
    double sidewall_width_from_angle() const;

    /// Non-empty when widths and angle disagree on the sidewall extent by more than 10%.
    std::optional<std::string> consistency_warning() const;

    /// Same profile with a different depth (t = 0 gives a flat surface).
    GratingProfile with_depth(double depth) const;

    /// The measured trench array: 400 nm period, 185.3/199.1 nm plateaus, 98 nm deep, 94.6 deg walls.
    static GratingProfile measured_sample();

private:
    double period_;
    double top_width_;
    double bottom_width_;
    double depth_;
    double sidewall_angle_deg_;
};

/// Local depth below the top plateau at lateral position x in [0, period).
double height_profile(const GratingProfile& profile, double x);

/// Homogeneous slab of a staircased profile. fill_fraction is the solid share of one period;
/// the solid part is centred on the middle of the top plateau.
struct LamellarSlab {
    double thickness;
    double fill_fraction;
    double depth_top;  ///< distance of the slab's upper face below the top plateau
};

/// Cuts the trapezoid into n_slices equal-thickness slabs whose widths are the trapezoid
/// cross-section at mid-slab depth, ordered from the top plateau downwards.
std::vector<LamellarSlab> staircase_approximation(const GratingProfile& profile, int n_slices);

/// Area of the symmetric difference between the staircase and the trapezoid, per period.
double staircase_area_error(const GratingProfile& profile, int n_slices);

/// Sphere-on-oscillator setup. Moment of inertia is optional; it can be derived from a
/// calibration constant.
struct ExperimentGeometry {
    double sphere_radius = 50e-6;
    double lever_arm = 210e-6;
    double resonance_frequency = 1783.0;
    std::optional<double> moment_of_inertia;
    double quality_factor = 32000.0;

    void validate() const;
};

}  // namespace casimir
