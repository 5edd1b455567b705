#include "lppl/mc.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "lppl/error.hpp"
#include "lppl/parallel.hpp"
#include "lppl/rng.hpp"
#include "lppl/sloppy.hpp"
#include "lppl/stats.hpp"

namespace lppl {

namespace {
constexpr std::uint64_t kNoiseStream = 0xFFFFFFFFFFFFFFFFull;
}

FitConfig McConfig::default_mc_fit_config() {
  FitConfig fc;
  fc.n_starts = 50;
  return fc;
}

std::vector<std::int64_t> default_window_ends(const SynthSpec& spec, int horizon,
                                              int step) {
  return track_dates(spec.truth.t_c, horizon, step);
}

void McConfig::validate() const {
  spec.validate();
  fit_config.validate();
  if (n_samples < 2) throw Error(ErrorCode::InvalidArgument, "n_samples must be >= 2");
  const std::int64_t last_day = spec.t0 + spec.length - 1;
  const auto ends = window_ends.empty() ? default_window_ends(spec) : window_ends;
  for (std::size_t i = 0; i < ends.size(); ++i) {
    if (i > 0 && ends[i] <= ends[i - 1]) {
      throw Error(ErrorCode::InvalidArgument, "window ends must be strictly increasing");
    }
    if (!(static_cast<double>(ends[i]) < spec.truth.t_c) || ends[i] > last_day ||
        ends[i] <= spec.t0) {
      std::ostringstream os;
      os << "window end " << ends[i] << " must lie inside the series and before t_c";
      throw Error(ErrorCode::InvalidArgument, os.str());
    }
  }
  for (double level : confidence_levels) {
    if (!(level > 0.0 && level < 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "confidence levels must lie in (0, 1)");
    }
  }
}

std::uint64_t sample_noise_seed(const McConfig& config, int sample) {
  return derive_seed(config.spec.noise.seed, static_cast<std::uint64_t>(sample),
                     kNoiseStream);
}

std::uint64_t sample_fit_seed(const McConfig& config, int sample, int window) {
  return derive_seed(config.fit_config.seed, static_cast<std::uint64_t>(sample),
                     static_cast<std::uint64_t>(window));
}

Interval confidence_window(double mean, double std_dev, double level) {
  if (!(std_dev >= 0.0)) throw Error(ErrorCode::InvalidArgument, "std must be >= 0");
  if (!(level > 0.0 && level < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "level must lie in (0, 1)");
  }
  const double z = normal_quantile(0.5 * (1.0 + level));
  return {mean - z * std_dev, mean + z * std_dev};
}

McSummary run_mc(const McConfig& config) {
  config.validate();
  const auto ends = config.window_ends.empty() ? default_window_ends(config.spec)
                                               : config.window_ends;
  const auto n_samples = static_cast<std::size_t>(config.n_samples);
  const std::size_t n_windows = ends.size();

  std::vector<PriceSeries> series;
  series.reserve(n_samples);
  for (std::size_t s = 0; s < n_samples; ++s) {
    SynthSpec spec = config.spec;
    spec.noise.seed = sample_noise_seed(config, static_cast<int>(s));
    series.push_back(make_series(spec));
  }

  // Estimates indexed by (sample, window); empty when the fit failed.
  std::vector<std::optional<double>> estimates(n_samples * n_windows);
  parallel_for(estimates.size(), config.threads, [&](std::size_t task) {
    const std::size_t s = task / n_windows;
    const std::size_t w = task % n_windows;
    FitConfig fc = config.fit_config;
    fc.threads = 1;
    fc.seed = sample_fit_seed(config, static_cast<int>(s), static_cast<int>(w));
    try {
      const FitResult fit = multistart_fit(series[s].truncated(ends[w]), fc);
      if (fit.converged && std::isfinite(fit.params.t_c)) estimates[task] = fit.params.t_c;
    } catch (const Error&) {
      // counted as failed
    }
  });

  McSummary summary;
  summary.true_tc = config.spec.truth.t_c;
  summary.levels = config.confidence_levels;
  for (std::size_t w = 0; w < n_windows; ++w) {
    McRow row;
    row.window_end = ends[w];
    for (std::size_t s = 0; s < n_samples; ++s) {
      if (const auto& e = estimates[s * n_windows + w]) row.samples.push_back(*e);
    }
    row.n_used = static_cast<int>(row.samples.size());
    row.n_failed = config.n_samples - row.n_used;
    if (row.n_used == 0) {
      std::ostringstream os;
      os << "every fit failed at window end " << ends[w];
      throw Error(ErrorCode::SummaryEmpty, os.str());
    }
    const Moments m = sample_moments(row.samples);
    row.mean_tc = m.mean;
    row.std_tc = std::sqrt(m.variance);
    row.bias = row.mean_tc - summary.true_tc;
    for (double level : config.confidence_levels) {
      row.windows.push_back(confidence_window(row.mean_tc, row.std_tc, level));
    }
    summary.rows.push_back(std::move(row));
  }
  return summary;
}

GaussianityResult gaussianity_check(std::span<const double> samples) {
  const auto n = static_cast<double>(samples.size());
  if (samples.size() < 20) {
    throw Error(ErrorCode::TooFewSamples, "gaussianity check needs at least 20 samples");
  }
  const Moments m = sample_moments(samples);
  // Standard errors of sample skewness and kurtosis under normality.
  const double se_skew =
      std::sqrt(6.0 * n * (n - 1.0) / ((n - 2.0) * (n + 1.0) * (n + 3.0)));
  const double se_kurt =
      2.0 * se_skew * std::sqrt((n * n - 1.0) / ((n - 3.0) * (n + 5.0)));
  GaussianityResult r;
  r.skewness = m.skewness;
  r.excess_kurtosis = m.excess_kurtosis;
  r.z_skewness = m.skewness / se_skew;
  r.z_kurtosis = m.excess_kurtosis / se_kurt;
  r.pass = std::abs(r.z_skewness) <= 5.0 && std::abs(r.z_kurtosis) <= 5.0;
  return r;
}

}  // namespace lppl
