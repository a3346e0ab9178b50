#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "casimir/electrostatics.hpp"
#include "casimir/pfa.hpp"

namespace casimir {

/// z = z0 - z_piezo - b theta.
struct DistanceModel {
    double z0;
    double lever_arm = 210e-6;

    double separation(double z_piezo, double theta) const { return z0 - z_piezo - lever_arm * theta; }
};

struct FrequencyShiftSample {
    double z_piezo;  ///< m
    double theta;    ///< rad
    double voltage;  ///< V
    double delta_f;  ///< Hz
};

/// Delta f = C dF/dz. C is signed: negative for the torsional oscillator.
double predict_frequency_shift(double c, double gradient);

/// C = -b^2 / (8 pi^2 I f0).
double calibration_constant(double lever_arm, double moment_of_inertia, double resonance_frequency);

/// Moment of inertia that yields calibration constant `c`.
double inertia_from_constant(double c, double lever_arm, double resonance_frequency);

/// Electrostatic force gradient per volt squared, d(signed force)/dz / (V - V0)^2, N/(m V^2).
struct ElectrostaticModel {
    std::string name;
    std::function<double(double)> unit_gradient;
    double z_min = 0.0;
    double z_max = INFINITY;

    double gradient(double z, double dv) const;

    /// Exact sphere-plane series.
    static ElectrostaticModel eq3(double sphere_radius);
    /// FEM sphere-grating gradient on a separation grid, interpolated log-log.
    static ElectrostaticModel fem(const GratingProfile& profile, double sphere_radius, const std::vector<double>& z_grid,
                                  const MeshControl& mesh = {});
};

struct FitOptions {
    /// Uniform: plain least squares (constant noise). Relative: residuals scaled by
    /// 1/|Delta f|, for noise proportional to the signal.
    enum class Weighting { Uniform, Relative };

    double residual_voltage = 0.0;
    Weighting weighting = Weighting::Uniform;
    double lever_arm = 210e-6;
    /// Casimir force gradient (N/m) as a function of z, added to the electrostatic term.
    std::optional<FlatForceLaw> casimir_background;
    /// When set, each sample is replaced by its difference to the sample taken at this
    /// voltage at the same (z_piezo, theta); the Casimir background then cancels.
    std::optional<double> difference_reference_voltage;
    /// Search interval for z0; defaults to [closest admissible, closest + 20 um].
    std::optional<std::pair<double, double>> z0_bracket;
};

struct CalibrationFit {
    double c;
    double z0;
    double sigma_c;
    double sigma_z0;
    double rms_residual;
    std::vector<double> residuals;
    std::size_t samples;
};

/// Separable least squares: C is linear, z0 minimizes the profiled residual. 1-sigma
/// uncertainties from the residual covariance.
CalibrationFit fit_calibration(const std::vector<FrequencyShiftSample>& samples, const ElectrostaticModel& model,
                               const FitOptions& options = {});

struct AveragedCalibration {
    std::vector<CalibrationFit> sets;
    double c;
    double z0;
    double sigma_c;   ///< standard error of the mean
    double sigma_z0;
};

/// Fits every voltage set separately and averages C and z0.
AveragedCalibration fit_calibration_sets(const std::vector<std::vector<FrequencyShiftSample>>& sets,
                                         const ElectrostaticModel& model, const FitOptions& options = {});

struct ResidualVoltageFit {
    double v0;
    double sigma_v0;
    double curvature;  ///< d^2 (Delta f) / dV^2 / 2
};

/// Vertex of the parabola through Delta f(V) at one separation.
ResidualVoltageFit find_residual_voltage(const std::vector<FrequencyShiftSample>& samples);

struct DriftReport {
    double max_difference;
    bool within_tolerance;
};

DriftReport residual_voltage_drift(const std::vector<ResidualVoltageFit>& fits, double tolerance = 3e-3);

/// Inputs for synthetic sweeps. Noise is Gaussian, relative to each |Delta f|.
struct SyntheticSweep {
    double c = -614.0;
    double z0 = 800e-9;
    double residual_voltage = -0.499;
    double lever_arm = 210e-6;
    std::vector<double> voltages;
    std::vector<double> z_piezo;
    double theta = 0.0;
    double relative_noise = 0.0;
    std::uint64_t seed = 1;
    std::optional<FlatForceLaw> casimir_background;
};

std::vector<FrequencyShiftSample> synthesize_sweep(const SyntheticSweep& spec, const ElectrostaticModel& model);

/// CSV with columns z_piezo_nm, theta_rad, V_volt, delta_f_hz.
std::vector<FrequencyShiftSample> parse_sweep_csv(const std::string& text);
std::vector<FrequencyShiftSample> read_sweep_csv(const std::string& path);
std::string format_sweep_csv(const std::vector<FrequencyShiftSample>& samples);

/// "key: value" report.
std::string format_fit_report(const CalibrationFit& fit, const std::optional<ResidualVoltageFit>& v0 = {});

}  // namespace casimir
