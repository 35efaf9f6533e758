#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "reconstruct/estimators.hpp"
#include "reconstruct/experiments.hpp"
#include "reconstruct/kernels.hpp"

namespace recon {

std::string_view to_string(KernelFamily f);
std::string_view to_string(InterpolatorKind k);
std::string_view to_string(MethodTag m);
std::string_view to_string(RegressionBasis g);
std::string_view to_string(SplineBoundary b);

// Each parser throws InvalidArgument on an unknown name.
KernelFamily parse_kernel_family(std::string_view s);
InterpolatorKind parse_interpolator_kind(std::string_view s);
MethodTag parse_method_tag(std::string_view s);
RegressionBasis parse_regression_basis(std::string_view s);
SplineBoundary parse_spline_boundary(std::string_view s);

/// {"family":"gaussian","theta":[...]} or {"family":"matern","nu":..,"phi":..}
nlohmann::json kernel_to_json(const KernelSpec& spec);
KernelSpec kernel_from_json(const nlohmann::json& j);

/// Knots are stored row-major as a list of rows. Non-finite diagnostics are
/// written as null and read back as NaN. Malformed documents throw BadSchema.
nlohmann::json model_to_json(const FittedModel& model);
FittedModel model_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const BenchmarkReport& report);

/// Two-space indented JSON with a trailing newline.
std::string dump_json(const nlohmann::json& j);

void save_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json load_json(const std::filesystem::path& path);

inline void save_model(const std::filesystem::path& path, const FittedModel& model) {
  save_json(path, model_to_json(model));
}
inline FittedModel load_model(const std::filesystem::path& path) { return model_from_json(load_json(path)); }

}  // namespace recon
