#pragma once

#include <cstdint>
#include <numbers>
#include <vector>

#include "lppl/model.hpp"
#include "lppl/objective.hpp"

namespace lppl {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Where multistart draws its initial nonlinear parameters. t_c is drawn
/// from (t1 + tc_offset, t1 + tc_span_factor * (t1 - t0)], the rest from
/// fixed intervals.
struct InitRanges {
  double tc_offset = 1.0;
  double tc_span_factor = 2.0;
  Interval alpha{0.05, 1.95};
  Interval omega{2.0, 25.0};
  Interval phi{0.0, 2.0 * std::numbers::pi};
};

struct FitConfig {
  int max_iters = 500;
  double grad_tol = 1e-8;
  double step_tol = 1e-10;
  double damping_init_factor = 1e-3;
  double damping_scale = 10.0;
  int n_starts = 1;
  std::uint64_t seed = 0;
  ModelKind model = ModelKind::Lppl;
  InitRanges init_ranges{};
  /// A run whose t_c passes t1 + tc_escape_factor * (t1 - t0) has left the
  /// region where a finite singularity is being fitted; it stops as
  /// FitStatus::Diverged.
  double tc_escape_factor = 10.0;
  /// Worker count for multistart; does not affect results.
  int threads = 1;

  /// Throws Error(InvalidArgument) on bad values.
  void validate() const;
};

enum class FitStatus {
  GradientTolerance,
  StepTolerance,
  ExactFit,
  MaxIterations,
  AllStepsRejected,
  Diverged,
};

struct FitResult {
  /// Canonical form: C >= 0 and phi in [0, 2 pi).
  LpplParams params;
  double s = 0.0;
  bool converged = false;
  int iterations = 0;
  int start_index = 0;
  FitStatus status = FitStatus::MaxIterations;
  ModelKind model = ModelKind::Lppl;
  /// S after each accepted step, starting with the initial point.
  std::vector<double> s_trace;
};

/// Levenberg-Marquardt over the nonlinear parameters with (A, B, C) solved
/// linearly at every trial point. For ModelKind::PowerLaw only t_c and
/// alpha of `init` are used.
FitResult lm_fit(const PriceSeries& series, const NonlinearParams& init,
                 const FitConfig& config);

/// Initial point for start `index`; depends only on (series window,
/// config.seed, config.init_ranges, index).
NonlinearParams sample_init(const PriceSeries& series, const FitConfig& config,
                            int index);

/// Best of config.n_starts lm_fit runs, ties broken by lowest start index.
FitResult multistart_fit(const PriceSeries& series, const FitConfig& config);

}  // namespace lppl
