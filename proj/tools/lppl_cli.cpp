#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "lppl/error.hpp"
#include "lppl/parallel.hpp"

namespace {

using lppl::Json;

struct Options {
  std::string input;
  std::string output_dir;
  bool log_price = false;
  std::string model = "lppl";
  int starts = 0;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int max_iters = 500;
  int threads = 0;
  double tc = 0.0;
  int horizon = 150;
  int stride = 10;
  std::string config;
  int samples = 200;
  std::string window_ends;
  std::string levels = "0.8,0.95";
  std::string manifest;
};

void add_output(CLI::App* cmd, Options& o, bool required = true) {
  auto* opt = cmd->add_option("--output-dir,-o", o.output_dir, "Directory for outputs");
  if (required) opt->required();
  cmd->add_option("--threads", o.threads, "Worker threads (default: LPPL_THREADS or all cores)")
      ->check(CLI::NonNegativeNumber);
}

void add_fit_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--model", o.model, "lppl or power-law")
      ->check(CLI::IsMember({"lppl", "power-law"}));
  cmd->add_option("--starts", o.starts, "Number of random starts")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "Multistart seed");
  cmd->add_option("--max-iters", o.max_iters, "Iteration cap per start")
      ->check(CLI::PositiveNumber);
}

void add_input(CLI::App* cmd, Options& o) {
  cmd->add_option("--input,-i", o.input, "CSV with rows t,price")->required();
  cmd->add_flag("--log-price", o.log_price, "Fit the natural log of the prices");
}

Json fit_block(const Options& o, int default_starts) {
  lppl::FitConfig fc;
  fc.model = lppl::model_kind_from_string(o.model);
  fc.n_starts = o.starts > 0 ? o.starts : default_starts;
  fc.seed = o.seed;
  fc.max_iters = o.max_iters;
  fc.validate();
  return lppl::fit_config_to_json(fc);
}

lppl::SynthSpec spec_from(const Options& o) {
  if (o.config.empty()) return lppl::reference_1987_spec();
  return lppl::synth_spec_from_json(Json::parse(lppl::read_file(o.config)));
}

lppl::cli::Invocation build(const std::string& command, const Options& o) {
  lppl::cli::Invocation inv;
  inv.command = command;
  inv.output_dir = o.output_dir;
  inv.threads = lppl::resolve_threads(o.threads);
  if (!o.input.empty()) inv.input_path = o.input;
  Json& c = inv.config;
  if (command == "fit" || command == "sloppy") {
    c["log_price"] = o.log_price;
    c["fit"] = fit_block(o, 500);
    inv.seed = o.seed;
  } else if (command == "track") {
    c["log_price"] = o.log_price;
    c["tc"] = o.tc;
    c["horizon"] = o.horizon;
    c["stride"] = o.stride;
    c["fit"] = fit_block(o, 50);
    inv.seed = o.seed;
  } else if (command == "synth") {
    lppl::SynthSpec spec = spec_from(o);
    if (o.seed_given) spec.noise.seed = o.seed;
    spec.validate();
    c["spec"] = lppl::synth_spec_to_json(spec);
    inv.seed = spec.noise.seed;
  } else {
    const lppl::SynthSpec spec = spec_from(o);
    spec.validate();
    c["spec"] = lppl::synth_spec_to_json(spec);
    c["n_samples"] = o.samples;
    c["window_ends"] = o.window_ends.empty() ? lppl::default_window_ends(spec)
                                             : lppl::cli::parse_window_ends(o.window_ends);
    c["levels"] = lppl::cli::parse_levels(o.levels);
    c["fit"] = fit_block(o, 50);
    inv.seed = o.seed;
  }
  return inv;
}

int report(const std::exception& e, int code) {
  std::cerr << "lppl: " << e.what() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Log-periodic power-law fitting, sloppiness analysis and Monte Carlo"};
  app.set_version_flag("--version", LPPL_VERSION);
  app.require_subcommand(1);
  Options o;

  auto* fit = app.add_subcommand("fit", "Multistart fit of a price series");
  add_input(fit, o);
  add_output(fit, o);
  add_fit_flags(fit, o);

  auto* sloppy = app.add_subcommand("sloppy", "Fit, then eigen-analyse the Hessian of S");
  add_input(sloppy, o);
  add_output(sloppy, o);
  add_fit_flags(sloppy, o);

  auto* track = app.add_subcommand("track", "Nonlinear-block spectrum over a rolling end date");
  add_input(track, o);
  add_output(track, o);
  add_fit_flags(track, o);
  track->add_option("--tc", o.tc, "Critical time the dates are counted back from")->required();
  track->add_option("--horizon", o.horizon, "Days before t_c of the first date")
      ->check(CLI::PositiveNumber);
  track->add_option("--stride", o.stride, "Days between dates")->check(CLI::PositiveNumber);

  auto* synth = app.add_subcommand("synth", "Generate a synthetic series with AR(1) noise");
  add_output(synth, o);
  synth->add_option("--config", o.config, "Generator JSON (default: 1987 reference)");
  synth->add_option("--seed", o.seed, "Noise seed (overrides the config)");

  auto* mc = app.add_subcommand("mc", "Expanding-window Monte Carlo of the t_c estimate");
  add_output(mc, o);
  add_fit_flags(mc, o);
  mc->add_option("--config", o.config, "Generator JSON (default: 1987 reference)");
  mc->add_option("--samples", o.samples, "Noise realizations")->check(CLI::PositiveNumber);
  mc->add_option("--window-ends", o.window_ends, "a:b:step (default: t_c-150..t_c-10 by 10)");
  mc->add_option("--levels", o.levels, "Confidence levels");

  auto* rerun = app.add_subcommand("rerun", "Repeat a run from its manifest.json");
  rerun->add_option("--manifest", o.manifest, "manifest.json of an earlier run")->required();
  add_output(rerun, o, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    lppl::cli::Invocation inv;
    if (rerun->parsed()) {
      inv = lppl::cli::invocation_from_manifest(Json::parse(lppl::read_file(o.manifest)));
      if (!o.output_dir.empty()) inv.output_dir = o.output_dir;
      inv.threads = lppl::resolve_threads(o.threads);
    } else {
      const CLI::App* cmd = app.get_subcommands().front();
      o.seed_given = cmd->count("--seed") > 0;
      inv = build(cmd->get_name(), o);
    }
    const int code = lppl::cli::run(inv);
    if (code != 0) std::cerr << "lppl: best fit did not converge\n";
    return code;
  } catch (const lppl::Error& e) {
    return report(e, e.is_input_error() ? 1 : 2);
  } catch (const Json::exception& e) {
    return report(e, 1);
  } catch (const std::filesystem::filesystem_error& e) {
    return report(e, 1);
  } catch (const std::exception& e) {
    return report(e, 2);
  }
}
