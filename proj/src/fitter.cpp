#include "lppl/fitter.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <utility>

#include <Eigen/Cholesky>

#include "lppl/error.hpp"
#include "lppl/parallel.hpp"
#include "lppl/rng.hpp"

namespace lppl {

void FitConfig::validate() const {
  auto bad = [](const char* what) { throw Error(ErrorCode::InvalidArgument, what); };
  if (max_iters < 1) bad("max_iters must be at least 1");
  if (n_starts < 1) bad("n_starts must be at least 1");
  if (!(grad_tol >= 0.0) || !(step_tol >= 0.0)) bad("tolerances must be non-negative");
  if (!(damping_init_factor > 0.0)) bad("damping_init_factor must be positive");
  if (!(damping_scale > 1.0)) bad("damping_scale must exceed 1");
  const auto& r = init_ranges;
  if (!(tc_escape_factor > r.tc_span_factor)) bad("tc_escape_factor must exceed the t_c span factor");
  if (!(r.tc_offset >= 1.0)) bad("t_c range must start at least one day past the window");
  if (!(r.tc_span_factor > 0.0)) bad("t_c span factor must be positive");
  for (const Interval& iv : {r.alpha, r.omega, r.phi}) {
    if (!(iv.hi > iv.lo)) bad("init ranges must be non-empty intervals");
  }
}

namespace {

constexpr double kMaxDampingGrowth = 1e12;

double min_tc(const PriceSeries& series) {
  return static_cast<double>(series.t1()) + 1.0;
}

double wrap_phase(double phi) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(phi, two_pi);
  if (w < 0.0) w += two_pi;
  if (w >= two_pi) w = 0.0;
  return w;
}

/// Largest cosine between the residual and any Jacobian column, i.e. the
/// scale-free first-order optimality measure.
double normalized_gradient(const Eigen::MatrixXd& jac, const Eigen::VectorXd& resid,
                           const Eigen::VectorXd& grad) {
  const double rnorm = resid.norm();
  if (rnorm == 0.0) return 0.0;
  double worst = 0.0;
  for (Eigen::Index j = 0; j < jac.cols(); ++j) {
    const double cnorm = jac.col(j).norm();
    if (cnorm == 0.0) continue;
    worst = std::max(worst, std::abs(grad(j)) / (cnorm * rnorm));
  }
  return worst;
}

LpplParams assemble(const ReducedProblem& problem, const Eigen::VectorXd& theta,
                    const PriceSeries& series) {
  const NonlinearParams nl = ReducedProblem::unpack(theta, problem.model());
  const Eigen::VectorXd& coef = problem.coefficients();
  LpplParams p{coef(0), coef(1), 0.0, nl.t_c, nl.alpha, nl.omega, nl.phi};
  if (problem.model() == ModelKind::Lppl) {
    p.C = std::abs(p.B) >= 1e-12 * series.magnitude() ? coef(2) / p.B : 0.0;
    // (C, phi) and (-C, phi + pi) are the same curve; report C >= 0.
    if (p.C < 0.0) {
      p.C = -p.C;
      p.phi += std::numbers::pi;
    }
    p.phi = wrap_phase(p.phi);
  }
  return p;
}

}  // namespace

FitResult lm_fit(const PriceSeries& series, const NonlinearParams& init,
                 const FitConfig& config) {
  config.validate();
  const ModelKind model = config.model;
  degrees_of_freedom(series, model);

  Eigen::VectorXd theta = ReducedProblem::pack(init, model);
  if (!theta.allFinite() || !(init.t_c > min_tc(series))) {
    throw Error(ErrorCode::InitInvalid,
                "initial t_c must exceed the last observed day by more than one");
  }

  ReducedProblem first(series, model);
  ReducedProblem second(series, model);
  ReducedProblem* cur = &first;
  ReducedProblem* alt = &second;
  if (cur->evaluate(theta, true) != ReducedProblem::Status::Ok) {
    throw Error(ErrorCode::InitInvalid,
                "the linear subproblem is degenerate at the initial point");
  }

  FitResult result;
  result.model = model;
  result.s_trace.push_back(cur->s());

  Eigen::MatrixXd jtj = cur->jacobian().transpose() * cur->jacobian();
  Eigen::VectorXd grad = cur->jacobian().transpose() * cur->residuals();
  double mu = config.damping_init_factor * jtj.diagonal().maxCoeff();
  if (!(mu > 0.0)) mu = config.damping_init_factor;

  const double tc_escape =
      static_cast<double>(series.t1()) +
      config.tc_escape_factor * static_cast<double>(series.t1() - series.t0());
  std::optional<FitStatus> stop;
  int iter = 0;
  while (!stop && iter < config.max_iters) {
    ++iter;
    if (cur->rss() == 0.0) {
      stop = FitStatus::ExactFit;
      break;
    }
    if (normalized_gradient(cur->jacobian(), cur->residuals(), grad) <=
        config.grad_tol) {
      stop = FitStatus::GradientTolerance;
      break;
    }

    const double streak_start = mu;
    for (;;) {
      Eigen::MatrixXd damped = jtj;
      damped.diagonal().array() += mu;
      const Eigen::VectorXd step = damped.ldlt().solve(-grad);

      if (step.allFinite() &&
          step.norm() <= config.step_tol * (theta.norm() + config.step_tol)) {
        stop = FitStatus::StepTolerance;
        break;
      }

      const Eigen::VectorXd candidate = theta + step;
      const bool accepted =
          step.allFinite() && candidate(0) > min_tc(series) &&
          alt->evaluate(candidate, true) == ReducedProblem::Status::Ok &&
          alt->rss() < cur->rss();

      if (accepted) {
        theta = candidate;
        std::swap(cur, alt);
        jtj.noalias() = cur->jacobian().transpose() * cur->jacobian();
        grad.noalias() = cur->jacobian().transpose() * cur->residuals();
        mu /= config.damping_scale;
        result.s_trace.push_back(cur->s());
        if (theta(0) > tc_escape) stop = FitStatus::Diverged;
        break;
      }
      mu *= config.damping_scale;
      if (mu > kMaxDampingGrowth * streak_start) {
        stop = FitStatus::AllStepsRejected;
        break;
      }
    }
  }

  result.iterations = iter;
  result.status = stop.value_or(FitStatus::MaxIterations);
  result.converged = result.status == FitStatus::GradientTolerance ||
                     result.status == FitStatus::StepTolerance ||
                     result.status == FitStatus::ExactFit;
  result.params = assemble(*cur, theta, series);
  result.s = cur->s();
  return result;
}

NonlinearParams sample_init(const PriceSeries& series, const FitConfig& config,
                            int index) {
  CounterRng rng(config.seed, static_cast<std::uint64_t>(index));
  const auto& r = config.init_ranges;
  const double t1 = static_cast<double>(series.t1());
  const double width = static_cast<double>(series.t1() - series.t0());
  const double tc_lo = t1 + r.tc_offset;
  const double tc_hi = std::max(t1 + r.tc_span_factor * width, tc_lo + 1.0);
  NonlinearParams nl;
  nl.t_c = rng.uniform(tc_lo, tc_hi);
  nl.alpha = rng.uniform(r.alpha.lo, r.alpha.hi);
  nl.omega = rng.uniform(r.omega.lo, r.omega.hi);
  nl.phi = rng.uniform(r.phi.lo, r.phi.hi);
  return nl;
}

FitResult multistart_fit(const PriceSeries& series, const FitConfig& config) {
  config.validate();
  degrees_of_freedom(series, config.model);
  const auto n = static_cast<std::size_t>(config.n_starts);
  std::vector<std::optional<FitResult>> results(n);
  std::vector<std::optional<Error>> errors(n);

  parallel_for(n, config.threads, [&](std::size_t i) {
    const NonlinearParams init = sample_init(series, config, static_cast<int>(i));
    try {
      results[i] = lm_fit(series, init, config);
      results[i]->start_index = static_cast<int>(i);
    } catch (const Error& e) {
      errors[i] = e;
    }
  });

  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < n; ++i) {
    if (!results[i] || !std::isfinite(results[i]->s)) continue;
    if (!best || results[i]->s < results[*best]->s) best = i;
  }
  if (!best) {
    for (const auto& e : errors)
      if (e) throw *e;
    throw Error(ErrorCode::InitInvalid, "every start failed");
  }
  return std::move(*results[*best]);
}

}  // namespace lppl
