#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "casimir/config.hpp"
#include "casimir/force_curve.hpp"
#include "casimir/geometry.hpp"
#include "casimir/grating_scattering.hpp"
#include "casimir/materials.hpp"
#include "casimir/planar_lifshitz.hpp"

namespace casimir {

struct PipelineResult {
    std::string recipe;
    std::vector<ForceCurve> curves;
    std::map<std::string, std::string> metadata;
    std::optional<ConvergenceTrace> convergence;
    std::filesystem::path output_path;
    std::filesystem::path convergence_path;

    const ForceCurve& curve(const std::string& label) const;
    std::string csv() const;
};

// Config readers shared by the recipes and the command line.
DielectricModel material_from_config(const Config& cfg, const std::string& key, const std::string& fallback);
GratingProfile profile_from_config(const Config& cfg);
TruncationSpec truncation_from_config(const Config& cfg);
QuadratureSpec quadrature_from_config(const Config& cfg);
std::optional<RoughnessSpec> roughness_from_config(const Config& cfg);

/// Sphere-plate Casimir force gradient, N/m, z in [100, 600] nm by default, with the
/// roughness correction when configured.
PipelineResult reproduce_fig3a(const Config& cfg);

/// Corrugation PFA applied to the flat gradient of fig3a.
PipelineResult reproduce_fig3c(const Config& cfg);

/// rho(z) from the grating solver, with the optional ideal-conductor variant, N sweep and
/// measured ratio.
PipelineResult reproduce_fig3d(const Config& cfg);

/// Electrostatic force gradients: the exact series for the flat sample, FEM + PFA for the grating.
PipelineResult reproduce_fig2(const Config& cfg);

/// Dispatches on pipeline.recipe and rejects unknown keys.
PipelineResult run_pipeline(const Config& cfg);

/// Writes the curves to output_path (pipeline.output, default out/<recipe>.csv) and, when
/// present, the convergence trace to convergence_path. Returns the paths written.
std::vector<std::filesystem::path> write_pipeline_outputs(const PipelineResult& result);

}  // namespace casimir
