#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace casimir {

/// Drude parameters, stored in rad/s.
struct DrudeParams {
    double plasma_frequency;
    double relaxation_rate;

    static DrudeParams from_ev(double plasma_ev, double relaxation_ev);
    void validate() const;
};

/// epsilon(i xi) sampled on strictly increasing imaginary frequencies (rad/s).
///
/// Interpolation is linear in log(xi). Below the first knot the value is held; above the
/// last knot the excess (epsilon - 1) decays as 1/xi^2, unless extrapolation is disabled,
/// in which case any query outside [front, back] raises RangeError.
class EpsilonTable {
public:
    EpsilonTable() = default;
    EpsilonTable(std::vector<double> xi, std::vector<double> eps, bool extrapolate = true);

    double operator()(double xi) const;

    std::size_t size() const { return xi_.size(); }
    const std::vector<double>& frequencies() const { return xi_; }
    const std::vector<double>& values() const { return eps_; }
    bool extrapolates() const { return extrapolate_; }
    void set_extrapolate(bool on) { extrapolate_ = on; }

private:
    std::vector<double> xi_;
    std::vector<double> eps_;
    bool extrapolate_ = true;
};

/// Parses two-column text (xi in rad/s, epsilon). '#' starts a comment. Rows may appear in
/// any order; they are sorted, then checked for duplicates and epsilon >= 1.
EpsilonTable load_tabulated_epsilon(const std::filesystem::path& path);
EpsilonTable parse_tabulated_epsilon(const std::string& text);

/// Doped semiconductor: tabulated intrinsic part plus a Drude carrier term.
struct DrudeLorentzSilicon {
    DrudeParams drude;
    EpsilonTable intrinsic;
};

struct PerfectConductor {};
struct Drude {
    DrudeParams params;
};
struct DrudeLorentz {
    DrudeLorentzSilicon params;
};
struct Tabulated {
    EpsilonTable table;
};

/// Tagged dielectric response at imaginary frequency. Immutable after construction.
class DielectricModel {
public:
    using Variant = std::variant<PerfectConductor, Drude, DrudeLorentz, Tabulated>;

    DielectricModel(Variant v, std::string name = {});

    static DielectricModel perfect_conductor();
    static DielectricModel drude(DrudeParams p, std::string name = "drude");
    static DielectricModel drude_lorentz(DrudeLorentzSilicon p, std::string name = "drude_lorentz");
    static DielectricModel tabulated(EpsilonTable t, std::string name = "tabulated");

    bool is_perfect_conductor() const { return std::holds_alternative<PerfectConductor>(model_); }
    const Variant& variant() const { return model_; }
    const std::string& name() const { return name_; }

private:
    Variant model_;
    std::string name_;
};

/// epsilon(i xi) for xi > 0. Throws DomainError for xi <= 0 and for the perfect
/// conductor, which has no finite permittivity (callers test is_perfect_conductor()).
double epsilon_at_imaginary_frequency(const DielectricModel& model, double xi);

/// Additive Drude term omega_p^2 / (xi (xi + gamma)).
double drude_term(const DrudeParams& p, double xi);

namespace presets {

/// Gold: omega_p = 9 eV, gamma = 35 meV.
DrudeParams gold_drude_params();
/// Doped silicon carriers at 2e18 cm^-3: omega_p = 1.36e14 rad/s, gamma = 4.75e13 rad/s.
DrudeParams silicon_carrier_params();

/// Intrinsic silicon single-oscillator response:
/// eps_inf + (eps_0 - eps_inf) w0^2 / (w0^2 + xi^2) with eps_0 = 11.87, eps_inf = 1.035,
/// w0 = 4.34 eV. The bundled data/intrinsic_si.dat is sampled from this.
double intrinsic_silicon_oscillator(double xi);
/// Log-spaced table of the oscillator over [1e11, 1e19] rad/s.
EpsilonTable intrinsic_silicon_table(std::size_t points = 161);

DielectricModel gold_drude();
DielectricModel silicon_doped(EpsilonTable intrinsic = intrinsic_silicon_table());

/// Plasma-model stand-in for an ideal metal where a finite permittivity is required
/// (lamellar grating solver): eps = 1 + (c / (delta xi))^2 with skin depth delta.
DielectricModel plasma_surrogate(double skin_depth);

/// Resolves "gold_drude", "si_paper", "perfect", "vacuum" or "plasma:<skin depth m>".
DielectricModel by_name(const std::string& name);

}  // namespace presets

}  // namespace casimir
