#include "casimir/interpolation.hpp"

#include <cmath>
#include <functional>

#include <math.h>  // boost 1.74 pchip calls unqualified isnan
#include <boost/math/interpolators/pchip.hpp>

#include "casimir/errors.hpp"

namespace casimir {

struct MonotoneInterpolant::Impl {
    std::vector<double> u, v;  // transformed knots
    std::function<double(double)> eval;
    double slope_lo, slope_hi;
};

MonotoneInterpolant::MonotoneInterpolant(std::vector<double> x, std::vector<double> y, Scale scale,
                                         bool extrapolate)
    : x_(x), scale_(scale), extrapolate_(extrapolate) {
    if (x.size() != y.size() || x.size() < 2) throw DomainError("interpolant: need at least two (x, y) pairs");
    for (std::size_t i = 1; i < x.size(); ++i)
        if (!(x[i] > x[i - 1])) throw DomainError("interpolant: abscissae must be strictly increasing");
    auto impl = std::make_shared<Impl>();
    if (scale == Scale::LogLog) {
        sign_ = y.front() < 0.0 ? -1.0 : 1.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (!(x[i] > 0.0) || !(sign_ * y[i] > 0.0))
                throw DomainError("interpolant: log-log mode needs positive x and single-signed non-zero y");
            impl->u.push_back(std::log(x[i]));
            impl->v.push_back(std::log(sign_ * y[i]));
        }
    } else {
        impl->u = x;
        impl->v = y;
    }
    const auto& u = impl->u;
    const auto& v = impl->v;
    const std::size_t n = u.size();
    impl->slope_lo = (v[1] - v[0]) / (u[1] - u[0]);
    impl->slope_hi = (v[n - 1] - v[n - 2]) / (u[n - 1] - u[n - 2]);
    if (n >= 4) {
        auto spline = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(
            std::vector<double>(u), std::vector<double>(v));
        impl->eval = [spline](double t) { return (*spline)(t); };
    } else {
        impl->eval = [uu = u, vv = v](double t) {
            std::size_t i = 0;
            while (i + 2 < uu.size() && t > uu[i + 1]) ++i;
            const double s = (t - uu[i]) / (uu[i + 1] - uu[i]);
            return vv[i] + s * (vv[i + 1] - vv[i]);
        };
    }
    impl_ = std::move(impl);
}

double MonotoneInterpolant::operator()(double x) const {
    double t = x;
    if (scale_ == Scale::LogLog) {
        if (!(x > 0.0)) throw DomainError("interpolant: log-log query needs x > 0");
        t = std::log(x);
    }
    const auto& u = impl_->u;
    const auto& v = impl_->v;
    double r;
    if (t < u.front() || t > u.back()) {
        if (!extrapolate_) throw RangeError("interpolant: query outside tabulated range");
        r = t < u.front() ? v.front() + impl_->slope_lo * (t - u.front())
                          : v.back() + impl_->slope_hi * (t - u.back());
    } else {
        r = impl_->eval(t);
    }
    return scale_ == Scale::LogLog ? sign_ * std::exp(r) : r;
}

}  // namespace casimir
