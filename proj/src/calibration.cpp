#include "casimir/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>
#include <fmt/format.h>

#include "casimir/constants.hpp"
#include "casimir/errors.hpp"
#include "casimir/force_curve.hpp"
#include "casimir/interpolation.hpp"
#include "casimir/parallel.hpp"

namespace casimir {

namespace {

struct Row {
    double position;    // z_piezo + b theta
    double es_weight;   // (V - V0)^2, or a difference of two
    double background;  // 1 when the Casimir term applies
    double delta_f;
};

std::vector<Row> design_rows(const std::vector<FrequencyShiftSample>& samples, const FitOptions& o) {
    std::vector<Row> rows;
    auto dv2 = [&](double v) { return (v - o.residual_voltage) * (v - o.residual_voltage); };
    if (!o.difference_reference_voltage) {
        const double bg = o.casimir_background ? 1.0 : 0.0;
        for (const auto& s : samples) rows.push_back({s.z_piezo + o.lever_arm * s.theta, dv2(s.voltage), bg, s.delta_f});
        return rows;
    }
    const double ref = *o.difference_reference_voltage;
    std::map<std::pair<double, double>, const FrequencyShiftSample*> refs;
    for (const auto& s : samples)
        if (s.voltage == ref) refs[{s.z_piezo, s.theta}] = &s;
    for (const auto& s : samples) {
        if (s.voltage == ref) continue;
        const auto it = refs.find({s.z_piezo, s.theta});
        if (it == refs.end())
            throw FitError(fmt::format("calibration: no reference-voltage sample at z_piezo = {:.6e}", s.z_piezo));
        rows.push_back({s.z_piezo + o.lever_arm * s.theta, dv2(s.voltage) - dv2(ref), 0.0,
                        s.delta_f - it->second->delta_f});
    }
    return rows;
}

class Problem {
public:
    Problem(std::vector<Row> rows, const ElectrostaticModel& model, const FitOptions& o)
        : rows_(std::move(rows)), model_(model), options_(o) {
        for (const auto& r : rows_) positions_.push_back(r.position);
        std::sort(positions_.begin(), positions_.end());
        positions_.erase(std::unique(positions_.begin(), positions_.end()), positions_.end());
        for (const auto& r : rows_)
            slot_.push_back(std::lower_bound(positions_.begin(), positions_.end(), r.position) - positions_.begin());
        weight_.resize(rows_.size(), 1.0);
        if (o.weighting == FitOptions::Weighting::Relative)
            for (std::size_t i = 0; i < rows_.size(); ++i) {
                const double f = std::abs(rows_[i].delta_f);
                if (!(f > 0.0)) throw FitError("calibration: relative weighting needs non-zero frequency shifts");
                weight_[i] = 1.0 / f;
            }
    }

    // Model response of every row at this z0, evaluating the force laws once per distance.
    std::vector<double> responses(double z0) const {
        std::vector<double> g(positions_.size()), b(positions_.size(), 0.0);
        const bool background = options_.casimir_background.has_value();
        for (std::size_t k = 0; k < positions_.size(); ++k) {
            const double z = z0 - positions_[k];
            g[k] = model_.unit_gradient(z);
            if (background) b[k] = (*options_.casimir_background)(z);
        }
        std::vector<double> h(rows_.size());
        for (std::size_t i = 0; i < rows_.size(); ++i)
            h[i] = rows_[i].es_weight * g[slot_[i]] + (rows_[i].background != 0.0 ? b[slot_[i]] : 0.0);
        return h;
    }

    // Best C and its weighted residual sum of squares at fixed z0.
    std::pair<double, double> profile(double z0) const {
        const std::vector<double> hv = responses(z0);
        double hf = 0.0, hh = 0.0;
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            const double w2 = weight_[i] * weight_[i];
            hf += w2 * hv[i] * rows_[i].delta_f;
            hh += w2 * hv[i] * hv[i];
        }
        const double c = hf / hh;
        double s = 0.0;
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            const double r = weight_[i] * (rows_[i].delta_f - c * hv[i]);
            s += r * r;
        }
        return {c, s};
    }

    // Unweighted model derivatives with respect to (C, z0).
    Eigen::MatrixXd jacobian(double c, double z0, double step) const {
        const auto h0 = responses(z0), hp = responses(z0 + step), hm = responses(z0 - step);
        Eigen::MatrixXd j(rows_.size(), 2);
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            j(i, 0) = h0[i];
            j(i, 1) = c * (hp[i] - hm[i]) / (2.0 * step);
        }
        return j;
    }

    const std::vector<Row>& rows() const { return rows_; }
    const std::vector<double>& weights() const { return weight_; }

private:
    std::vector<Row> rows_;
    std::vector<double> positions_;
    std::vector<std::size_t> slot_;
    std::vector<double> weight_;
    const ElectrostaticModel& model_;
    const FitOptions& options_;
};

}  // namespace

double predict_frequency_shift(double c, double gradient) { return c * gradient; }

double calibration_constant(double lever_arm, double moment_of_inertia, double resonance_frequency) {
    if (!(lever_arm > 0.0) || !(moment_of_inertia > 0.0) || !(resonance_frequency > 0.0))
        throw DomainError("calibration constant: lever arm, inertia and frequency must be positive");
    return -lever_arm * lever_arm / (8.0 * pi * pi * moment_of_inertia * resonance_frequency);
}

double inertia_from_constant(double c, double lever_arm, double resonance_frequency) {
    if (!(c < 0.0)) throw DomainError("calibration constant must be negative for a physical inertia");
    if (!(lever_arm > 0.0) || !(resonance_frequency > 0.0))
        throw DomainError("calibration constant: lever arm and frequency must be positive");
    return -lever_arm * lever_arm / (8.0 * pi * pi * c * resonance_frequency);
}

double ElectrostaticModel::gradient(double z, double dv) const {
    if (z < z_min || z > z_max)
        throw DomainError(fmt::format("{} model: separation {:.4e} m outside [{:.4e}, {:.4e}]", name, z, z_min, z_max));
    return unit_gradient(z) * dv * dv;
}

ElectrostaticModel ElectrostaticModel::eq3(double sphere_radius) {
    if (!(sphere_radius > 0.0)) throw DomainError("eq3 model: sphere radius must be positive");
    ElectrostaticModel m;
    m.name = "eq3";
    m.unit_gradient = [sphere_radius](double z) { return sphere_plane_gradient({sphere_radius, z, 1.0, 0.0}); };
    m.z_min = std::numeric_limits<double>::min();
    return m;
}

ElectrostaticModel ElectrostaticModel::fem(const GratingProfile& profile, double sphere_radius,
                                           const std::vector<double>& z_grid, const MeshControl& mesh) {
    if (z_grid.size() < 2) throw DomainError("fem model: need at least two separations");
    if (!std::is_sorted(z_grid.begin(), z_grid.end()) || !(z_grid.front() > 0.0))
        throw DomainError("fem model: separations must be positive and increasing");
    std::vector<double> g(z_grid.size());
    parallel_for(z_grid.size(), [&](std::size_t i) {
        g[i] = corrugated_sphere_gradient(profile, z_grid[i], 1.0, sphere_radius, mesh);
    });
    const MonotoneInterpolant interp(z_grid, g, MonotoneInterpolant::Scale::LogLog);
    ElectrostaticModel m;
    m.name = "fem";
    m.unit_gradient = [interp](double z) { return interp(z); };
    m.z_min = z_grid.front();
    m.z_max = z_grid.back();
    return m;
}

CalibrationFit fit_calibration(const std::vector<FrequencyShiftSample>& samples, const ElectrostaticModel& model,
                               const FitOptions& options) {
    for (const auto& s : samples)
        if (!std::isfinite(s.z_piezo) || !std::isfinite(s.theta) || !std::isfinite(s.voltage) ||
            !std::isfinite(s.delta_f))
            throw DomainError("calibration: non-finite sample");
    std::set<double> voltages;
    for (const auto& s : samples) voltages.insert(s.voltage);
    if (voltages.size() < 2 && samples.size() < 10)
        throw FitError("calibration: need at least two voltages or ten samples");
    const Problem problem(design_rows(samples, options), model, options);
    const auto& rows = problem.rows();
    if (rows.size() < 3) throw FitError("calibration: fewer than three usable samples");

    std::set<double> positions;
    double pos_min = INFINITY, pos_max = -INFINITY;
    bool any_signal = false;
    for (const auto& r : rows) {
        positions.insert(r.position);
        pos_min = std::min(pos_min, r.position);
        pos_max = std::max(pos_max, r.position);
        any_signal = any_signal || r.es_weight != 0.0;
    }
    if (positions.size() < 2) throw FitError("calibration: rank-deficient design, all samples at one distance");
    if (!any_signal) throw FitError("calibration: every voltage equals the residual voltage");

    double z_floor = std::max(model.z_min, 1e-12);
    double z_ceiling = model.z_max;
    if (options.casimir_background && !options.difference_reference_voltage) {
        z_floor = std::max(z_floor, options.casimir_background->z_min);
        z_ceiling = std::min(z_ceiling, options.casimir_background->z_max);
    }
    double lo = pos_max + z_floor;
    double hi = std::min(lo + 20e-6, pos_min + z_ceiling);
    if (options.z0_bracket) {
        lo = std::max(lo, options.z0_bracket->first);
        hi = std::min(hi, options.z0_bracket->second);
    }
    if (!(hi > lo)) throw FitError("calibration: empty z0 search interval");

    // Coarse log scan of the profiled residual, then Brent inside the best cell.
    constexpr int scan = 160;
    const double span = hi - lo;
    std::vector<double> grid(scan);
    for (int k = 0; k < scan; ++k) grid[k] = lo + span * std::pow(1e-5, 1.0 - double(k) / (scan - 1));
    int best = 0;
    double best_s = INFINITY;
    for (int k = 0; k < scan; ++k) {
        const double s = problem.profile(grid[k]).second;
        if (s < best_s) {
            best_s = s;
            best = k;
        }
    }
    const double a = best > 0 ? grid[best - 1] : lo + 1e-3 * (grid[0] - lo);
    const double b = best < scan - 1 ? grid[best + 1] : hi;
    auto [z0, s_min] = boost::math::tools::brent_find_minima(
        [&](double z) { return problem.profile(z).second; }, a, b, std::numeric_limits<double>::digits / 2);
    double c = problem.profile(z0).first;

    // Gauss-Newton polish on (C, z0).
    const std::size_t n = rows.size();
    const Eigen::Map<const Eigen::VectorXd> w(problem.weights().data(), static_cast<Eigen::Index>(n));
    for (int it = 0; it < 8; ++it) {
        const double step = 1e-6 * (z0 - pos_max);
        const Eigen::MatrixXd j = w.asDiagonal() * problem.jacobian(c, z0, step);
        Eigen::VectorXd r(n);
        for (std::size_t i = 0; i < n; ++i) r(i) = w(i) * rows[i].delta_f - c * j(i, 0);
        const Eigen::Vector2d delta = (j.transpose() * j).ldlt().solve(j.transpose() * r);
        const double z_new = z0 + delta(1);
        if (!(z_new > lo && z_new < hi)) break;
        const auto [c_new, s_new] = problem.profile(z_new);
        if (!(s_new <= s_min)) break;
        const bool small = std::abs(delta(1)) < 1e-14 * z0;
        z0 = z_new;
        c = c_new;
        s_min = s_new;
        if (small) break;
    }

    const double step = 1e-6 * (z0 - pos_max);
    const Eigen::MatrixXd j_raw = problem.jacobian(c, z0, step);
    const Eigen::MatrixXd j = w.asDiagonal() * j_raw;
    const Eigen::Matrix2d jtj = j.transpose() * j;
    const Eigen::Vector2d scale = jtj.diagonal().cwiseSqrt();
    const Eigen::Matrix2d normalized = scale.cwiseInverse().asDiagonal() * jtj * scale.cwiseInverse().asDiagonal();
    if (!(scale.minCoeff() > 0.0) || std::abs(normalized.determinant()) < 1e-12)
        throw FitError("calibration: rank-deficient design; C and z0 are not separately identifiable");

    CalibrationFit fit;
    fit.c = c;
    fit.z0 = z0;
    fit.samples = n;
    fit.residuals.resize(n);
    double ss = 0.0, raw = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        fit.residuals[i] = rows[i].delta_f - c * j_raw(i, 0);
        raw += fit.residuals[i] * fit.residuals[i];
        ss += w(i) * w(i) * fit.residuals[i] * fit.residuals[i];
    }
    fit.rms_residual = std::sqrt(raw / double(n));
    const double s2 = n > 2 ? ss / double(n - 2) : 0.0;
    const Eigen::Matrix2d cov = s2 * jtj.inverse();
    fit.sigma_c = std::sqrt(std::max(0.0, cov(0, 0)));
    fit.sigma_z0 = std::sqrt(std::max(0.0, cov(1, 1)));
    return fit;
}

AveragedCalibration fit_calibration_sets(const std::vector<std::vector<FrequencyShiftSample>>& sets,
                                         const ElectrostaticModel& model, const FitOptions& options) {
    if (sets.empty()) throw FitError("calibration: no data sets");
    AveragedCalibration avg;
    for (const auto& s : sets) avg.sets.push_back(fit_calibration(s, model, options));
    const double n = double(avg.sets.size());
    double mc = 0.0, mz = 0.0;
    for (const auto& f : avg.sets) {
        mc += f.c;
        mz += f.z0;
    }
    avg.c = mc / n;
    avg.z0 = mz / n;
    if (avg.sets.size() == 1) {
        avg.sigma_c = avg.sets[0].sigma_c;
        avg.sigma_z0 = avg.sets[0].sigma_z0;
        return avg;
    }
    double vc = 0.0, vz = 0.0;
    for (const auto& f : avg.sets) {
        vc += (f.c - avg.c) * (f.c - avg.c);
        vz += (f.z0 - avg.z0) * (f.z0 - avg.z0);
    }
    avg.sigma_c = std::sqrt(vc / (n - 1.0) / n);
    avg.sigma_z0 = std::sqrt(vz / (n - 1.0) / n);
    return avg;
}

ResidualVoltageFit find_residual_voltage(const std::vector<FrequencyShiftSample>& samples) {
    if (samples.empty()) throw FitError("residual voltage: no samples");
    for (const auto& s : samples)
        if (s.z_piezo != samples[0].z_piezo || s.theta != samples[0].theta)
            throw DomainError("residual voltage: samples must share one separation");
    std::set<double> volts;
    for (const auto& s : samples) volts.insert(s.voltage);
    if (volts.size() < 3) throw FitError("residual voltage: need at least three distinct voltages");

    const std::size_t n = samples.size();
    double mean = 0.0;
    for (const auto& s : samples) mean += s.voltage;
    mean /= double(n);
    Eigen::MatrixXd x(n, 3);
    Eigen::VectorXd y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = samples[i].voltage - mean;
        x.row(i) << 1.0, u, u * u;
        y(i) = samples[i].delta_f;
    }
    const Eigen::Vector3d p = x.colPivHouseholderQr().solve(y);
    const double ss = (y - x * p).squaredNorm();
    const Eigen::Matrix3d cov = (n > 3 ? ss / double(n - 3) : 0.0) * (x.transpose() * x).inverse();
    if (p(2) == 0.0 || (n > 3 && std::abs(p(2)) <= 3.0 * std::sqrt(cov(2, 2))))
        throw FitError("residual voltage: data show no parabolic curvature");
    const double u0 = -p(1) / (2.0 * p(2));
    const double v0 = mean + u0;
    if (v0 < *volts.begin() || v0 > *volts.rbegin())
        throw FitError(fmt::format("residual voltage: vertex {:.4f} V lies outside the sampled voltages", v0));
    const Eigen::Vector3d grad(0.0, -1.0 / (2.0 * p(2)), p(1) / (2.0 * p(2) * p(2)));
    return {v0, std::sqrt(std::max(0.0, double(grad.transpose() * cov * grad))), p(2)};
}

DriftReport residual_voltage_drift(const std::vector<ResidualVoltageFit>& fits, double tolerance) {
    if (fits.size() < 2) throw DomainError("drift check: need at least two residual-voltage fits");
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& f : fits) {
        lo = std::min(lo, f.v0);
        hi = std::max(hi, f.v0);
    }
    return {hi - lo, hi - lo < tolerance};
}

std::vector<FrequencyShiftSample> synthesize_sweep(const SyntheticSweep& spec, const ElectrostaticModel& model) {
    if (spec.voltages.empty() || spec.z_piezo.empty()) throw DomainError("synthetic sweep: empty voltage or z grid");
    if (spec.relative_noise < 0.0) throw DomainError("synthetic sweep: noise must be >= 0");
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const DistanceModel dist{spec.z0, spec.lever_arm};
    std::vector<FrequencyShiftSample> out;
    for (double zp : spec.z_piezo)
        for (double v : spec.voltages) {
            const double z = dist.separation(zp, spec.theta);
            if (!(z > 0.0)) throw DomainError(fmt::format("synthetic sweep: non-positive separation at z_piezo = {:.4e}", zp));
            double grad = model.gradient(z, v - spec.residual_voltage);
            if (spec.casimir_background) grad += (*spec.casimir_background)(z);
            double df = predict_frequency_shift(spec.c, grad);
            if (spec.relative_noise > 0.0) df *= 1.0 + spec.relative_noise * normal(rng);
            out.push_back({zp, spec.theta, v, df});
        }
    return out;
}

std::vector<FrequencyShiftSample> parse_sweep_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    bool header = false;
    std::vector<FrequencyShiftSample> out;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        if (!header) {
            std::string h = line.substr(first);
            h.erase(std::remove_if(h.begin(), h.end(), [](char ch) { return ch == ' ' || ch == '\r'; }), h.end());
            if (h != "z_piezo_nm,theta_rad,V_volt,delta_f_hz")
                throw ParseError("sweep csv: expected header z_piezo_nm,theta_rad,V_volt,delta_f_hz", line_no);
            header = true;
            continue;
        }
        std::istringstream row(line);
        std::string cell;
        double v[4];
        int k = 0;
        while (std::getline(row, cell, ',')) {
            if (k >= 4) throw ParseError("sweep csv: too many columns", line_no);
            std::size_t used = 0;
            try {
                v[k] = std::stod(cell, &used);
            } catch (const std::exception&) {
                throw ParseError(fmt::format("sweep csv: not a number '{}'", cell), line_no);
            }
            if (cell.find_first_not_of(" \t\r", used) != std::string::npos)
                throw ParseError(fmt::format("sweep csv: not a number '{}'", cell), line_no);
            ++k;
        }
        if (k != 4) throw ParseError("sweep csv: expected four columns", line_no);
        out.push_back({v[0] * 1e-9, v[1], v[2], v[3]});
    }
    if (!header) throw ParseError("sweep csv: missing header", line_no);
    return out;
}

std::vector<FrequencyShiftSample> read_sweep_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError(fmt::format("cannot open '{}'", path));
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_sweep_csv(ss.str());
}

std::string format_sweep_csv(const std::vector<FrequencyShiftSample>& samples) {
    std::string out = "z_piezo_nm,theta_rad,V_volt,delta_f_hz\n";
    for (const auto& s : samples)
        out += fmt::format("{},{},{},{}\n", format_number(s.z_piezo * 1e9), format_number(s.theta),
                           format_number(s.voltage), format_number(s.delta_f));
    return out;
}

std::string format_fit_report(const CalibrationFit& fit, const std::optional<ResidualVoltageFit>& v0) {
    std::string out;
    out += fmt::format("C: {:.6g}\n", fit.c);
    out += fmt::format("sigma_C: {:.3g}\n", fit.sigma_c);
    out += fmt::format("z0_nm: {:.6g}\n", fit.z0 * 1e9);
    out += fmt::format("sigma_z0_nm: {:.3g}\n", fit.sigma_z0 * 1e9);
    if (v0) {
        out += fmt::format("V0: {:.6g}\n", v0->v0);
        out += fmt::format("sigma_V0: {:.3g}\n", v0->sigma_v0);
    }
    out += fmt::format("rms_residual_hz: {:.6g}\n", fit.rms_residual);
    out += fmt::format("samples: {}\n", fit.samples);
    return out;
}

}  // namespace casimir
