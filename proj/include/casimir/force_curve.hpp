#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace casimir {

/// Sampled force, pressure or gradient versus separation. Separations are stored in metres;
/// CSV files carry them in nanometres.
struct ForceCurve {
    std::vector<double> z;
    std::vector<double> value;
    std::string unit;
    std::string label;
    /// Written as "# key: value" lines ahead of the CSV body.
    std::map<std::string, std::string> metadata;

    std::size_t size() const { return z.size(); }
    void push_back(double z_m, double v) {
        z.push_back(z_m);
        value.push_back(v);
    }
};

/// CSV body (header row + data rows) with columns z_nm,value,unit,label.
std::string format_csv_body(const ForceCurve& curve);
/// Metadata block followed by the body.
std::string format_csv(const ForceCurve& curve);
void write_csv(const ForceCurve& curve, const std::filesystem::path& path);

/// Several labelled curves under one metadata block and one header.
std::string format_curves_csv(const std::vector<ForceCurve>& curves,
                              const std::map<std::string, std::string>& metadata);
void write_text(const std::filesystem::path& path, const std::string& text);
/// The CSV text without its "#" metadata lines.
std::string csv_body(const std::string& text);

/// Curves grouped by label, in order of first appearance; each carries the file metadata.
std::vector<ForceCurve> parse_curves_csv(const std::string& text);
/// Single-label file; ParseError when several labels are present.
ForceCurve parse_force_curve_csv(const std::string& text);
ForceCurve read_force_curve_csv(const std::filesystem::path& path);

/// Number formatting shared by every CSV writer: shortest round-trip representation.
std::string format_number(double v);

}  // namespace casimir
