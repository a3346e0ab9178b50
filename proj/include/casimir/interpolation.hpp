#pragma once

#include <memory>
#include <vector>

namespace casimir {

/// Shape-preserving (PCHIP) cubic through strictly increasing knots. Falls back to linear
/// interpolation for fewer than four knots.
///
/// In LogLog mode the cubic runs through (ln x, ln |y|); all y must share one sign. Outside
/// the knots, Linear mode refuses (RangeError) unless extrapolation is enabled, in which case
/// the end segments' slopes are continued (a power law in LogLog mode).
class MonotoneInterpolant {
public:
    enum class Scale { Linear, LogLog };

    MonotoneInterpolant(std::vector<double> x, std::vector<double> y, Scale scale = Scale::Linear,
                        bool extrapolate = false);

    double operator()(double x) const;
    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }

private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
    std::vector<double> x_;
    Scale scale_;
    bool extrapolate_;
    double sign_ = 1.0;
};

}  // namespace casimir
