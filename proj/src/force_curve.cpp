#include "casimir/force_curve.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "casimir/errors.hpp"

namespace casimir {

std::string format_number(double v) { return fmt::format("{}", v); }

std::string format_csv_body(const ForceCurve& c) {
    std::string out = "z_nm,value,unit,label\n";
    for (std::size_t i = 0; i < c.size(); ++i)
        out += fmt::format("{},{},{},{}\n", format_number(c.z[i] * 1e9), format_number(c.value[i]), c.unit, c.label);
    return out;
}

std::string format_csv(const ForceCurve& c) {
    std::string out;
    for (const auto& [k, v] : c.metadata) out += fmt::format("# {}: {}\n", k, v);
    return out + format_csv_body(c);
}

void write_csv(const ForceCurve& c, const std::filesystem::path& path) { write_text(path, format_csv(c)); }

std::string format_curves_csv(const std::vector<ForceCurve>& curves,
                              const std::map<std::string, std::string>& metadata) {
    std::string out;
    for (const auto& [k, v] : metadata) out += fmt::format("# {}: {}\n", k, v);
    out += "z_nm,value,unit,label\n";
    for (const auto& c : curves) out += format_csv_body(c).substr(std::string_view("z_nm,value,unit,label\n").size());
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << text;
}

std::string csv_body(const std::string& text) {
    std::istringstream in(text);
    std::string line, out;
    while (std::getline(in, line))
        if (line.empty() || line[0] != '#') out += line + "\n";
    return out;
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

double to_double(const std::string& s, int line) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ParseError("force curve: non-numeric field '" + s + "'", line);
    }
    if (used != s.size()) throw ParseError("force curve: non-numeric field '" + s + "'", line);
    return v;
}

}  // namespace

std::vector<ForceCurve> parse_curves_csv(const std::string& text) {
    std::vector<ForceCurve> curves;
    std::map<std::string, std::string> metadata;
    std::map<std::string, std::size_t> index;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        if (line[0] == '#') {
            const auto colon = line.find(':');
            if (colon != std::string::npos) {
                auto key = line.substr(1, colon - 1);
                auto val = line.substr(colon + 1);
                key.erase(0, key.find_first_not_of(' '));
                val.erase(0, val.find_first_not_of(' '));
                if (!val.empty() && val.back() == '\r') val.pop_back();
                metadata[key] = val;
            }
            continue;
        }
        const auto fields = split(line, ',');
        if (!header) {
            if (fields.size() < 2 || fields[0] != "z_nm") throw ParseError("force curve: expected header starting with z_nm", lineno);
            header = true;
            continue;
        }
        if (fields.size() < 2) throw ParseError("force curve: expected at least two columns", lineno);
        const std::string label = fields.size() > 3 ? fields[3] : std::string();
        auto it = index.find(label);
        if (it == index.end()) {
            it = index.emplace(label, curves.size()).first;
            curves.emplace_back();
            curves.back().label = label;
            if (fields.size() > 2) curves.back().unit = fields[2];
        }
        curves[it->second].push_back(to_double(fields[0], lineno) * 1e-9, to_double(fields[1], lineno));
    }
    if (!header) throw ParseError("force curve: missing header");
    for (auto& c : curves) c.metadata = metadata;
    return curves;
}

ForceCurve parse_force_curve_csv(const std::string& text) {
    auto curves = parse_curves_csv(text);
    if (curves.empty()) {
        ForceCurve empty;
        return empty;
    }
    if (curves.size() > 1) throw ParseError("force curve: file holds several labelled curves");
    return curves.front();
}

ForceCurve read_force_curve_csv(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open " + path.string());
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_force_curve_csv(ss.str());
}

}  // namespace casimir
