#include "commands.hpp"

#include <charconv>
#include <sstream>

#include "lppl/error.hpp"
#include "lppl/objective.hpp"

namespace lppl::cli {

namespace {

constexpr const char* kCommands[] = {"fit", "sloppy", "track", "synth", "mc"};

bool known_command(const std::string& name) {
  for (const char* c : kCommands) {
    if (name == c) return true;
  }
  return false;
}

PriceSeries input_series(const Invocation& inv) {
  if (!inv.input_path) {
    throw Error(ErrorCode::InvalidArgument, inv.command + " needs --input");
  }
  return load_csv(*inv.input_path, inv.config.value("log_price", false));
}

FitConfig fit_config_of(const Invocation& inv) {
  FitConfig fc = fit_config_from_json(inv.config.at("fit"));
  fc.threads = inv.threads;
  fc.validate();
  return fc;
}

void put(const Invocation& inv, const char* name, const std::string& content) {
  write_file_atomic(inv.output_dir / name, content);
}

int cmd_fit(const Invocation& inv, bool with_report) {
  const PriceSeries series = input_series(inv);
  const FitConfig fc = fit_config_of(inv);
  const FitResult fit = multistart_fit(series, fc);
  put(inv, "fit.json", dump_json(fit_to_json(fit)));
  if (!with_report) {
    put(inv, "residuals.csv", residuals_to_csv(fit, series));
    return fit.converged ? 0 : 2;
  }
  if (!fit.converged) return 2;
  const SloppinessReport report =
      sloppiness_report(hessian_of_s(fit.params, series, fc.model));
  put(inv, "eigen.csv", report_to_csv(report));
  put(inv, "eigen.json", dump_json(report_to_json(report)));
  return 0;
}

int cmd_track(const Invocation& inv) {
  const PriceSeries series = input_series(inv);
  const FitConfig fc = fit_config_of(inv);
  const EigenTrack track =
      rolling_track(series, inv.config.at("tc").get<double>(),
                    inv.config.at("horizon").get<int>(),
                    inv.config.at("stride").get<int>(), fc);
  put(inv, "track.csv", track_to_csv(track));
  put(inv, "track.json", dump_json(track_to_json(track)));
  return 0;
}

int cmd_synth(const Invocation& inv) {
  const SynthSpec spec = synth_spec_from_json(inv.config.at("spec"));
  spec.validate();
  put(inv, "series.csv", series_to_csv(make_series(spec)));
  put(inv, "spec.json", dump_json(synth_spec_to_json(spec)));
  return 0;
}

int cmd_mc(const Invocation& inv) {
  McConfig mc;
  mc.spec = synth_spec_from_json(inv.config.at("spec"));
  mc.n_samples = inv.config.at("n_samples").get<int>();
  mc.window_ends = inv.config.at("window_ends").get<std::vector<std::int64_t>>();
  mc.confidence_levels = inv.config.at("levels").get<std::vector<double>>();
  mc.fit_config = fit_config_from_json(inv.config.at("fit"));
  mc.threads = inv.threads;
  const McSummary summary = run_mc(mc);
  put(inv, "mc.csv", mc_to_csv(summary));
  put(inv, "mc_gaussianity.csv", mc_gaussianity_to_csv(summary));
  return 0;
}

}  // namespace

Json manifest_json(const Invocation& inv) {
  Json j;
  j["command"] = inv.command;
  j["input_path"] = inv.input_path ? Json(*inv.input_path) : Json(nullptr);
  j["output_dir"] = inv.output_dir.string();
  j["config"] = inv.config;
  j["seed"] = inv.seed;
  j["version"] = LPPL_VERSION;
  return j;
}

Invocation invocation_from_manifest(const Json& manifest) {
  Invocation inv;
  inv.command = manifest.at("command").get<std::string>();
  if (!known_command(inv.command)) {
    throw Error(ErrorCode::Parse, "manifest names unknown command '" + inv.command + "'");
  }
  const Json& input = manifest.at("input_path");
  if (!input.is_null()) inv.input_path = input.get<std::string>();
  inv.output_dir = manifest.at("output_dir").get<std::string>();
  inv.config = manifest.at("config");
  inv.seed = manifest.at("seed").get<std::uint64_t>();
  return inv;
}

int run(const Invocation& inv) {
  if (!known_command(inv.command)) {
    throw Error(ErrorCode::InvalidArgument, "unknown command '" + inv.command + "'");
  }
  std::filesystem::create_directories(inv.output_dir);
  int code = 0;
  if (inv.command == "fit") {
    code = cmd_fit(inv, false);
  } else if (inv.command == "sloppy") {
    code = cmd_fit(inv, true);
  } else if (inv.command == "track") {
    code = cmd_track(inv);
  } else if (inv.command == "synth") {
    code = cmd_synth(inv);
  } else {
    code = cmd_mc(inv);
  }
  put(inv, "manifest.json", dump_json(manifest_json(inv)));
  return code;
}

std::vector<std::int64_t> parse_window_ends(const std::string& text) {
  std::int64_t v[3] = {0, 0, 0};
  std::size_t pos = 0;
  for (int k = 0; k < 3; ++k) {
    const std::size_t end = k < 2 ? text.find(':', pos) : text.size();
    if (end == std::string::npos) break;
    const char* first = text.data() + pos;
    const char* last = text.data() + end;
    auto [ptr, ec] = std::from_chars(first, last, v[k]);
    if (ec != std::errc{} || ptr != last) {
      throw Error(ErrorCode::InvalidArgument,
                  "--window-ends expects a:b:step, got '" + text + "'");
    }
    pos = end + 1;
    if (k == 2) {
      if (v[2] <= 0 || v[1] < v[0]) {
        throw Error(ErrorCode::InvalidArgument,
                    "--window-ends needs a <= b and step > 0, got '" + text + "'");
      }
      std::vector<std::int64_t> out;
      for (std::int64_t e = v[0]; e <= v[1]; e += v[2]) out.push_back(e);
      return out;
    }
  }
  throw Error(ErrorCode::InvalidArgument, "--window-ends expects a:b:step, got '" + text + "'");
}

std::vector<double> parse_levels(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || !(x > 0.0 && x < 1.0)) {
      throw Error(ErrorCode::InvalidArgument,
                  "--levels expects comma-separated values in (0, 1), got '" + text + "'");
    }
    out.push_back(x);
  }
  if (out.empty()) throw Error(ErrorCode::InvalidArgument, "--levels is empty");
  return out;
}

}  // namespace lppl::cli
