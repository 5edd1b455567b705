#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lppl/fitter.hpp"
#include "lppl/synth.hpp"

namespace lppl {

struct McConfig {
  SynthSpec spec = reference_1987_spec();
  int n_samples = 200;
  /// Last observed day of each expanding window; strictly increasing and
  /// before truth t_c. Empty means default_window_ends(spec).
  std::vector<std::int64_t> window_ends;
  FitConfig fit_config = default_mc_fit_config();
  std::vector<double> confidence_levels{0.80, 0.95};
  int threads = 1;

  static FitConfig default_mc_fit_config();

  void validate() const;
};

/// Every 10 days over the final 150 before t_c: t_c-150, t_c-140, ..., t_c-10.
std::vector<std::int64_t> default_window_ends(const SynthSpec& spec, int horizon = 150,
                                              int step = 10);

struct McRow {
  std::int64_t window_end = 0;
  int n_used = 0;
  int n_failed = 0;
  double mean_tc = 0.0;
  double std_tc = 0.0;
  double bias = 0.0;
  std::vector<Interval> windows;  // one per confidence level
  std::vector<double> samples;    // t_c estimates of converged fits
};

struct McSummary {
  double true_tc = 0.0;
  std::vector<double> levels;
  std::vector<McRow> rows;
};

/// Noise seed of sample `s`, and multistart seed of fit (s, w).
std::uint64_t sample_noise_seed(const McConfig& config, int sample);
std::uint64_t sample_fit_seed(const McConfig& config, int sample, int window);

/// Expanding-window experiment: for every sample and window end, fits the
/// truncated noisy series and aggregates the t_c estimates.
McSummary run_mc(const McConfig& config);

/// mean -/+ z std with z the standard normal quantile at (1 + level) / 2.
Interval confidence_window(double mean, double std_dev, double level);

struct GaussianityResult {
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  double z_skewness = 0.0;  // in standard errors
  double z_kurtosis = 0.0;
  bool pass = false;
};

/// Passes when both skewness and excess kurtosis are within 5 standard
/// errors of zero. Needs at least 20 samples.
GaussianityResult gaussianity_check(std::span<const double> samples);

}  // namespace lppl
