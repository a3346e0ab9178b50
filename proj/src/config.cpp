#include "casimir/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "casimir/constants.hpp"
#include "casimir/errors.hpp"

namespace casimir {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

struct UnitEntry {
    const char* name;
    double scale;
};

const std::vector<UnitEntry>& units_for(Quantity kind) {
    static const std::vector<UnitEntry> length{{"nm", 1e-9}, {"um", 1e-6}, {"µm", 1e-6}, {"mm", 1e-3}, {"m", 1.0}};
    static const std::vector<UnitEntry> angle{{"deg", 1.0}, {"rad", 180.0 / pi}};
    static const std::vector<UnitEntry> angular{
        {"rad/s", 1.0}, {"meV", ev_to_rad_per_s(1e-3)}, {"eV", ev_to_rad_per_s(1.0)}};
    static const std::vector<UnitEntry> frequency{{"kHz", 1e3}, {"MHz", 1e6}, {"Hz", 1.0}};
    static const std::vector<UnitEntry> voltage{{"mV", 1e-3}, {"V", 1.0}};
    static const std::vector<UnitEntry> none{};
    switch (kind) {
        case Quantity::Length: return length;
        case Quantity::Angle: return angle;
        case Quantity::AngularFrequency: return angular;
        case Quantity::Frequency: return frequency;
        case Quantity::Voltage: return voltage;
        case Quantity::Dimensionless: return none;
    }
    return none;
}

const char* kind_name(Quantity kind) {
    switch (kind) {
        case Quantity::Length: return "length (nm, um, mm, m)";
        case Quantity::Angle: return "angle (deg, rad)";
        case Quantity::AngularFrequency: return "angular frequency (rad/s, eV, meV)";
        case Quantity::Frequency: return "frequency (Hz, kHz, MHz)";
        case Quantity::Voltage: return "voltage (V, mV)";
        case Quantity::Dimensionless: return "number";
    }
    return "";
}

// Splits "12.5 nm" into the number and the unit text.
std::pair<double, std::string> split_number(const std::string& text) {
    const std::string t = trim(text);
    double v = 0.0;
    const char* begin = t.data();
    const char* end = t.data() + t.size();
    if (begin != end && *begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || !std::isfinite(v)) throw ParseError(fmt::format("not a number: '{}'", text));
    return {v, trim(std::string(ptr, end))};
}

double unit_scale(const std::string& unit, Quantity kind, const std::string& text) {
    if (kind == Quantity::Dimensionless) {
        if (!unit.empty()) throw ParseError(fmt::format("unexpected unit in '{}'", text));
        return 1.0;
    }
    if (unit.empty()) throw ParseError(fmt::format("'{}' needs a unit: {}", text, kind_name(kind)));
    for (const auto& u : units_for(kind))
        if (unit == u.name) return u.scale;
    throw ParseError(fmt::format("unknown unit '{}' in '{}', expected {}", unit, text, kind_name(kind)));
}

// '#' comments and inline comments are not understood by the INI reader; strip them first.
std::string strip_comments(const std::string& text) {
    std::istringstream in(text);
    std::string line, out;
    while (std::getline(in, line)) {
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        out += line;
        out += '\n';
    }
    return out;
}

}  // namespace

double parse_quantity(const std::string& text, Quantity kind) {
    const auto [v, unit] = split_number(text);
    return v * unit_scale(unit, kind, text);
}

std::vector<double> parse_quantity_list(const std::string& text, Quantity kind) {
    std::vector<double> out;
    const std::string t = trim(text);
    if (t.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(t);
        std::string part;
        while (std::getline(ss, part, ':')) parts.push_back(trim(part));
        if (parts.size() != 3) throw ParseError(fmt::format("range '{}' must be start:stop:step", text));
        const auto [step, unit] = split_number(parts[2]);
        const double scale = unit_scale(unit, kind, text);
        const auto [a, ua] = split_number(parts[0]);
        const auto [b, ub] = split_number(parts[1]);
        const double sa = ua.empty() ? scale : unit_scale(ua, kind, text);
        const double sb = ub.empty() ? scale : unit_scale(ub, kind, text);
        const double start = a * sa, stop = b * sb, dx = step * scale;
        if (!(dx > 0.0) || stop < start) throw ParseError(fmt::format("range '{}' must have step > 0 and stop >= start", text));
        const long count = std::lround(std::floor((stop - start) / dx * (1.0 + 1e-12)));
        for (long i = 0; i <= count; ++i) out.push_back(start + dx * double(i));
        return out;
    }
    std::stringstream ss(t);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_quantity(item, kind));
    if (out.empty()) throw ParseError(fmt::format("empty list '{}'", text));
    return out;
}

Config Config::parse(const std::string& text, const std::string& source) {
    boost::property_tree::ptree tree;
    std::istringstream in(strip_comments(text));
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ParseError(fmt::format("{}: {}", source, e.message()), static_cast<int>(e.line()));
    }
    Config c;
    c.source_ = source;
    for (const auto& [section, body] : tree) {
        if (body.empty()) {
            c.values_[section] = trim(body.data());
            continue;
        }
        for (const auto& [key, value] : body) c.values_[section + "." + key] = trim(value.data());
    }
    return c;
}

Config Config::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError(fmt::format("cannot open config '{}'", path));
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str(), path);
}

bool Config::has(const std::string& key) const { return values_.count(key) > 0; }

const std::string& Config::raw(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ParseError(fmt::format("{}: missing key '{}'", source_, key));
    used_.insert(key);
    return it->second;
}

std::string Config::text(const std::string& key) const { return raw(key); }

std::string Config::text(const std::string& key, const std::string& fallback) const {
    return has(key) ? raw(key) : fallback;
}

double Config::quantity(const std::string& key, Quantity kind) const {
    try {
        return parse_quantity(raw(key), kind);
    } catch (const ParseError& e) {
        throw ParseError(fmt::format("{}: key '{}': {}", source_, key, e.what()));
    }
}

double Config::quantity(const std::string& key, Quantity kind, double fallback) const {
    return has(key) ? quantity(key, kind) : fallback;
}

std::vector<double> Config::quantity_list(const std::string& key, Quantity kind) const {
    try {
        return parse_quantity_list(raw(key), kind);
    } catch (const ParseError& e) {
        throw ParseError(fmt::format("{}: key '{}': {}", source_, key, e.what()));
    }
}

int Config::integer(const std::string& key) const {
    const std::string& v = raw(key);
    int out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
        throw ParseError(fmt::format("{}: key '{}': '{}' is not an integer", source_, key, v));
    return out;
}

int Config::integer(const std::string& key, int fallback) const { return has(key) ? integer(key) : fallback; }

bool Config::flag(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    std::string v = raw(key);
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
    if (v == "false" || v == "no" || v == "off" || v == "0") return false;
    throw ParseError(fmt::format("{}: key '{}': '{}' is not a boolean", source_, key, v));
}

void Config::set(const std::string& key, const std::string& value) { values_[key] = trim(value); }

Config Config::without(const std::vector<std::string>& keys) const {
    Config c = *this;
    for (const auto& k : keys) c.values_.erase(k);
    return c;
}

std::vector<std::string> Config::unused_keys() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : values_)
        if (!used_.count(k)) out.push_back(k);
    return out;
}

void Config::reject_unused() const {
    const auto unused = unused_keys();
    if (unused.empty()) return;
    std::string list;
    for (const auto& k : unused) list += (list.empty() ? "" : ", ") + k;
    throw ParseError(fmt::format("{}: unknown keys: {}", source_, list));
}

std::string Config::canonical() const {
    std::string out;
    for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
    return out;
}

std::string Config::hash() const { return fmt::format("{:016x}", fnv1a64(canonical())); }

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace casimir
