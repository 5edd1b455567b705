#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lppl/io.hpp"

namespace lppl::cli {

/// Everything a subcommand needs. `config` is the complete, merged
/// configuration: it is what the manifest records, and rerunning from a
/// manifest replays exactly this object.
struct Invocation {
  std::string command;
  std::optional<std::string> input_path;
  std::filesystem::path output_dir;
  Json config;
  std::uint64_t seed = 0;
  int threads = 1;
};

/// Runs one subcommand and writes its outputs plus manifest.json. Returns
/// the process exit code: 0, or 2 when the best fit did not converge (the
/// outputs are still written). Throws lppl::Error and JSON/filesystem
/// exceptions.
int run(const Invocation& inv);

Json manifest_json(const Invocation& inv);
Invocation invocation_from_manifest(const Json& manifest);

/// "a:b:step" -> a, a+step, ... <= b.
std::vector<std::int64_t> parse_window_ends(const std::string& text);
/// "0.8,0.95" -> {0.8, 0.95}.
std::vector<double> parse_levels(const std::string& text);

}  // namespace lppl::cli
