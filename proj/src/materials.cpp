#include "casimir/materials.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "casimir/constants.hpp"
#include "casimir/errors.hpp"

namespace casimir {

DrudeParams DrudeParams::from_ev(double plasma_ev, double relaxation_ev) {
    DrudeParams p{ev_to_rad_per_s(plasma_ev), ev_to_rad_per_s(relaxation_ev)};
    p.validate();
    return p;
}

void DrudeParams::validate() const {
    if (!(plasma_frequency > 0.0) || !(relaxation_rate > 0.0))
        throw DomainError("Drude plasma frequency and relaxation rate must be positive");
}

double drude_term(const DrudeParams& p, double xi) {
    return p.plasma_frequency * p.plasma_frequency / (xi * (xi + p.relaxation_rate));
}

EpsilonTable::EpsilonTable(std::vector<double> xi, std::vector<double> eps, bool extrapolate)
    : xi_(std::move(xi)), eps_(std::move(eps)), extrapolate_(extrapolate) {
    if (xi_.size() != eps_.size()) throw ParseError("epsilon table: column length mismatch");
    if (xi_.empty()) throw ParseError("epsilon table: no rows");
    for (std::size_t i = 0; i < xi_.size(); ++i) {
        if (!(xi_[i] > 0.0)) throw ParseError("epsilon table: frequencies must be positive", static_cast<int>(i + 1));
        if (!(eps_[i] >= 1.0)) throw ParseError("epsilon table: epsilon(i xi) must be >= 1", static_cast<int>(i + 1));
        if (i > 0 && !(xi_[i] > xi_[i - 1]))
            throw ParseError("epsilon table: frequencies must be strictly increasing", static_cast<int>(i + 1));
    }
}

double EpsilonTable::operator()(double xi) const {
    if (!(xi > 0.0)) throw DomainError("epsilon table: xi must be positive");
    if (xi < xi_.front() || xi > xi_.back()) {
        if (!extrapolate_) throw RangeError("epsilon table: xi outside tabulated range");
        if (xi < xi_.front()) return eps_.front();
        const double r = xi_.back() / xi;
        return 1.0 + (eps_.back() - 1.0) * r * r;
    }
    const auto it = std::upper_bound(xi_.begin(), xi_.end(), xi);
    if (it == xi_.end()) return eps_.back();
    const std::size_t hi = static_cast<std::size_t>(it - xi_.begin());
    const std::size_t lo = hi - 1;
    const double s = std::log(xi / xi_[lo]) / std::log(xi_[hi] / xi_[lo]);
    return eps_[lo] + s * (eps_[hi] - eps_[lo]);
}

EpsilonTable parse_tabulated_epsilon(const std::string& text) {
    struct Row {
        double xi, eps;
        int line;
    };
    std::vector<Row> rows;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        std::string a, b, extra;
        if (!(fields >> a)) continue;
        if (!(fields >> b) || (fields >> extra)) throw ParseError("epsilon table: expected two columns", lineno);
        try {
            std::size_t ua = 0, ub = 0;
            const double xi = std::stod(a, &ua);
            const double eps = std::stod(b, &ub);
            if (ua != a.size() || ub != b.size()) throw std::invalid_argument("trailing");
            if (!std::isfinite(xi) || !std::isfinite(eps)) throw std::invalid_argument("non-finite");
            rows.push_back({xi, eps, lineno});
        } catch (const std::exception&) {
            throw ParseError("epsilon table: non-numeric value", lineno);
        }
    }
    if (rows.empty()) throw ParseError("epsilon table: no data rows");
    for (const Row& r : rows) {
        if (!(r.xi > 0.0)) throw ParseError("epsilon table: frequency must be positive", r.line);
        if (!(r.eps >= 1.0)) throw ParseError("epsilon table: epsilon(i xi) must be >= 1", r.line);
    }
    std::stable_sort(rows.begin(), rows.end(), [](const Row& x, const Row& y) { return x.xi < y.xi; });
    std::vector<double> xi, eps;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i > 0 && rows[i].xi == rows[i - 1].xi) throw ParseError("epsilon table: duplicate frequency", rows[i].line);
        xi.push_back(rows[i].xi);
        eps.push_back(rows[i].eps);
    }
    // epsilon(i xi) of a passive medium never increases with xi.
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (eps[i] > eps[i - 1] * (1.0 + 1e-12))
            throw ParseError("epsilon table: epsilon(i xi) must be non-increasing in xi", rows[i].line);
    return EpsilonTable(std::move(xi), std::move(eps));
}

EpsilonTable load_tabulated_epsilon(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open epsilon table " + path.string());
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_tabulated_epsilon(ss.str());
}

DielectricModel::DielectricModel(Variant v, std::string name) : model_(std::move(v)), name_(std::move(name)) {
    if (const auto* d = std::get_if<Drude>(&model_)) d->params.validate();
    if (const auto* d = std::get_if<DrudeLorentz>(&model_)) d->params.drude.validate();
}

DielectricModel DielectricModel::perfect_conductor() { return {PerfectConductor{}, "perfect"}; }
DielectricModel DielectricModel::drude(DrudeParams p, std::string name) { return {Drude{p}, std::move(name)}; }
DielectricModel DielectricModel::drude_lorentz(DrudeLorentzSilicon p, std::string name) {
    return {DrudeLorentz{std::move(p)}, std::move(name)};
}
DielectricModel DielectricModel::tabulated(EpsilonTable t, std::string name) {
    return {Tabulated{std::move(t)}, std::move(name)};
}

double epsilon_at_imaginary_frequency(const DielectricModel& model, double xi) {
    if (!(xi > 0.0)) throw DomainError("epsilon_at_imaginary_frequency: xi must be positive");
    struct Visitor {
        double xi;
        double operator()(const PerfectConductor&) const {
            throw DomainError("perfect conductor has no finite permittivity");
        }
        double operator()(const Drude& d) const { return 1.0 + drude_term(d.params, xi); }
        double operator()(const DrudeLorentz& d) const { return d.params.intrinsic(xi) + drude_term(d.params.drude, xi); }
        double operator()(const Tabulated& t) const { return t.table(xi); }
    };
    return std::visit(Visitor{xi}, model.variant());
}

namespace presets {

DrudeParams gold_drude_params() { return DrudeParams::from_ev(9.0, 0.035); }

DrudeParams silicon_carrier_params() { return {1.36e14, 4.75e13}; }

double intrinsic_silicon_oscillator(double xi) {
    constexpr double eps_static = 11.87;
    constexpr double eps_inf = 1.035;
    const double w0 = ev_to_rad_per_s(4.34);
    return eps_inf + (eps_static - eps_inf) * w0 * w0 / (w0 * w0 + xi * xi);
}

EpsilonTable intrinsic_silicon_table(std::size_t points) {
    std::vector<double> xi(points), eps(points);
    const double lo = std::log10(1e11), hi = std::log10(1e19);
    for (std::size_t i = 0; i < points; ++i) {
        xi[i] = std::pow(10.0, lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1));
        eps[i] = intrinsic_silicon_oscillator(xi[i]);
    }
    return EpsilonTable(std::move(xi), std::move(eps));
}

DielectricModel gold_drude() { return DielectricModel::drude(gold_drude_params(), "gold_drude"); }

DielectricModel silicon_doped(EpsilonTable intrinsic) {
    return DielectricModel::drude_lorentz({silicon_carrier_params(), std::move(intrinsic)}, "si_paper");
}

DielectricModel plasma_surrogate(double skin_depth) {
    if (!(skin_depth > 0.0)) throw DomainError("plasma surrogate: skin depth must be positive");
    // Tiny relaxation keeps the Drude form valid; at imaginary frequency it is indistinguishable
    // from the plasma model over the quadrature range.
    const double wp = PhysicalConstants::c / skin_depth;
    return DielectricModel::drude({wp, wp * 1e-12}, "plasma_surrogate");
}

DielectricModel by_name(const std::string& name) {
    if (name == "gold_drude" || name == "gold") return gold_drude();
    if (name == "si_paper" || name == "silicon") return silicon_doped();
    if (name == "perfect" || name == "perfect_conductor") return DielectricModel::perfect_conductor();
    if (name == "vacuum") return DielectricModel::tabulated(EpsilonTable({1.0}, {1.0}), "vacuum");
    if (name.rfind("plasma:", 0) == 0) return plasma_surrogate(std::stod(name.substr(7)));
    throw DomainError("unknown material '" + name + "'");
}

}  // namespace presets

}  // namespace casimir
