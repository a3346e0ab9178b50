#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace casimir {

enum class Quantity {
    Length,            ///< nm, um, mm, m
    Angle,             ///< deg, rad
    AngularFrequency,  ///< rad/s, eV, meV
    Frequency,         ///< Hz, kHz
    Voltage,           ///< V, mV
    Dimensionless,
};

/// Value in SI units from text such as "98nm", "94.6 deg", "35meV", "-0.499V".
/// A unit is mandatory for every quantity except Dimensionless.
double parse_quantity(const std::string& text, Quantity kind);

/// "100:600:25nm" (inclusive range, unit after the last number) or "100nm, 150nm, 2um".
std::vector<double> parse_quantity_list(const std::string& text, Quantity kind);

/// Sectioned key-value configuration ("[section]" headers, "key = value", '#' or ';'
/// comments). Keys are addressed as "section.key". Reads are recorded so that unknown or
/// misspelled keys can be reported.
class Config {
public:
    static Config parse(const std::string& text, const std::string& source = "<string>");
    static Config load(const std::string& path);

    bool has(const std::string& key) const;
    std::string text(const std::string& key) const;
    std::string text(const std::string& key, const std::string& fallback) const;
    double quantity(const std::string& key, Quantity kind) const;
    double quantity(const std::string& key, Quantity kind, double fallback) const;
    std::vector<double> quantity_list(const std::string& key, Quantity kind) const;
    int integer(const std::string& key) const;
    int integer(const std::string& key, int fallback) const;
    bool flag(const std::string& key, bool fallback) const;

    /// Overrides or adds a value (command-line overrides).
    void set(const std::string& key, const std::string& value);
    /// Copy without the given keys.
    Config without(const std::vector<std::string>& keys) const;

    /// Keys never read. reject_unused() throws ParseError naming them.
    std::vector<std::string> unused_keys() const;
    void reject_unused() const;

    /// Canonical "key = value" lines, sorted by key.
    std::string canonical() const;
    /// FNV-1a 64 of the canonical text, as 16 hex digits.
    std::string hash() const;

    const std::string& source() const { return source_; }

private:
    const std::string& raw(const std::string& key) const;

    std::map<std::string, std::string> values_;
    mutable std::set<std::string> used_;
    std::string source_;
};

/// FNV-1a 64-bit.
std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace casimir
