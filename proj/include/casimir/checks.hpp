#pragma once

#include <string>
#include <vector>

namespace casimir {

struct CheckResult {
    std::string name;
    bool passed;
    std::string detail;
};

/// Fast invariant suite of one module: materials, planar, pfa, grating, electrostatics,
/// calibrate or pipeline. DomainError for any other name.
std::vector<CheckResult> run_checks(const std::string& module);

/// "PASS name: detail" lines.
std::string format_checks(const std::vector<CheckResult>& results);

}  // namespace casimir
