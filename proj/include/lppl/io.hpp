#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "lppl/fitter.hpp"
#include "lppl/mc.hpp"
#include "lppl/model.hpp"
#include "lppl/sloppy.hpp"
#include "lppl/synth.hpp"

namespace lppl {

using Json = nlohmann::ordered_json;

/// 17 significant digits, so every double round-trips exactly.
std::string format_double(double x);

/// JSON text with floats at 17 significant digits; non-finite floats
/// become null.
std::string dump_json(const Json& value, int indent = 2);

/// Rows `t,price` with an optional `t,price` header. Days must be
/// consecutive integers; error messages number data rows from 1. With
/// log_scale the prices are replaced by their natural logarithm.
PriceSeries parse_csv(std::string_view text, bool log_scale = false);
PriceSeries load_csv(const std::filesystem::path& path, bool log_scale = false);
std::string series_to_csv(const PriceSeries& series);

std::string read_file(const std::filesystem::path& path);
/// Writes to a temporary sibling and renames over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

Json params_to_json(const LpplParams& p);
LpplParams params_from_json(const Json& j);

Json fit_config_to_json(const FitConfig& config);
/// Missing keys keep their defaults.
FitConfig fit_config_from_json(const Json& j);

Json fit_to_json(const FitResult& fit);
std::string residuals_to_csv(const FitResult& fit, const PriceSeries& series);

Json synth_spec_to_json(const SynthSpec& spec);
SynthSpec synth_spec_from_json(const Json& j);

Json report_to_json(const SloppinessReport& report);
/// One row per eigenvalue: lambda then one column per parameter.
std::string report_to_csv(const SloppinessReport& report);

std::string track_to_csv(const EigenTrack& track);
Json track_to_json(const EigenTrack& track);

/// Columns window_end, n_used, n_failed, mean_tc, std_tc, bias, then
/// lo/hi per confidence level (lo80, hi80, lo95, hi95 by default).
std::string mc_to_csv(const McSummary& summary);
std::string mc_gaussianity_to_csv(const McSummary& summary);

std::string_view to_string(FitStatus status);

}  // namespace lppl
