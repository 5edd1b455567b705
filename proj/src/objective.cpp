#include "lppl/objective.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Cholesky>

#include "lppl/error.hpp"
#include "lppl/linalg.hpp"

namespace lppl {

double pairwise_sum(std::span<const double> x) {
  constexpr std::size_t kBlock = 8;
  if (x.size() <= kBlock) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  const std::size_t half = x.size() / 2;
  return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

int degrees_of_freedom(const PriceSeries& series, ModelKind model) {
  const auto dof = series.t1() - series.t0() - dof_param_count(model);
  if (dof <= 0) {
    std::ostringstream os;
    os << "window [" << series.t0() << ", " << series.t1() << "] leaves " << dof
       << " degrees of freedom for " << dof_param_count(model) << " parameters";
    throw Error(ErrorCode::DegenerateWindow, os.str());
  }
  return static_cast<int>(dof);
}

double normalized_sse(const LpplParams& params, const PriceSeries& series,
                      ModelKind model) {
  const int dof = degrees_of_freedom(series, model);
  if (!(params.t_c > static_cast<double>(series.t1()))) {
    throw Error(ErrorCode::Domain, "t_c must lie after the last observation");
  }
  std::vector<double> sq(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double t = static_cast<double>(series.t0() + static_cast<std::int64_t>(i));
    const double r = eval_model(model, params, t) - series[i];
    sq[i] = r * r;
  }
  return pairwise_sum(sq) / dof;
}

// ---------------------------------------------------------------------------
// ReducedProblem

ReducedProblem::ReducedProblem(const PriceSeries& series, ModelKind model)
    : series_(series), model_(model), dof_(degrees_of_freedom(series, model)) {
  const auto n = static_cast<Eigen::Index>(series.size());
  design_.resize(n, n_linear());
  log_dt_.resize(n);
  sin_.resize(n);
  cos_.resize(n);
  resid_.resize(n);
  sq_.resize(n);
  coef_.resize(n_linear());
}

Eigen::VectorXd ReducedProblem::pack(const NonlinearParams& nl, ModelKind model) {
  if (model == ModelKind::Lppl) {
    Eigen::VectorXd theta(4);
    theta << nl.t_c, nl.alpha, nl.omega, nl.phi;
    return theta;
  }
  Eigen::VectorXd theta(2);
  theta << nl.t_c, nl.alpha;
  return theta;
}

NonlinearParams ReducedProblem::unpack(const Eigen::VectorXd& theta,
                                       ModelKind model) {
  NonlinearParams nl;
  nl.t_c = theta(0);
  nl.alpha = theta(1);
  if (model == ModelKind::Lppl) {
    nl.omega = theta(2);
    nl.phi = theta(3);
  }
  return nl;
}

ReducedProblem::Status ReducedProblem::evaluate(const Eigen::VectorXd& theta,
                                                bool with_jacobian) {
  const bool lppl = model_ == ModelKind::Lppl;
  const double t_c = theta(0);
  const double alpha = theta(1);
  const double omega = lppl ? theta(2) : 0.0;
  const double phi = lppl ? theta(3) : 0.0;
  if (!(t_c > static_cast<double>(series_.t1())) || !theta.allFinite()) {
    return Status::Domain;
  }

  const Eigen::Index n = design_.rows();
  const auto t0 = static_cast<double>(series_.t0());
  for (Eigen::Index i = 0; i < n; ++i) {
    const double dt = t_c - (t0 + static_cast<double>(i));
    const double log_dt = std::log(dt);
    const double u = std::exp(alpha * log_dt);
    design_(i, 0) = 1.0;
    design_(i, 1) = u;
    log_dt_(i) = log_dt;
    if (lppl) {
      const double arg = omega * log_dt + phi;
      cos_(i) = std::cos(arg);
      sin_(i) = std::sin(arg);
      design_(i, 2) = u * cos_(i);
    }
  }
  if (!design_.allFinite()) return Status::Domain;

  const int k = n_linear();
  const Eigen::VectorXd col_norm = design_.colwise().norm().transpose();
  if ((col_norm.array() <= 0.0).any()) return Status::DegenerateDesign;
  const Eigen::VectorXd inv_norm = col_norm.cwiseInverse();
  const Eigen::MatrixXd scaled = design_ * inv_norm.asDiagonal();
  const Eigen::MatrixXd gram = scaled.transpose() * scaled;

  const SymmetricEigen spectrum = jacobi_eigen(gram);
  const double lo = spectrum.values(k - 1);
  const double hi = spectrum.values(0);
  if (!(lo > 0.0) || hi / lo > kMaxDesignCondition) {
    return Status::DegenerateDesign;
  }

  const Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) return Status::DegenerateDesign;

  const Eigen::Map<const Eigen::VectorXd> y(series_.values().data(), n);
  Eigen::VectorXd beta = llt.solve(scaled.transpose() * y);
  // One round of iterative refinement recovers most of the accuracy the
  // normal equations give up.
  resid_.noalias() = y - scaled * beta;
  beta += llt.solve(scaled.transpose() * resid_);

  coef_ = beta.cwiseProduct(inv_norm);
  resid_.noalias() = scaled * beta - y;
  sq_ = resid_.array().square();
  rss_ = pairwise_sum(std::span<const double>(sq_.data(), static_cast<std::size_t>(n)));
  if (!std::isfinite(rss_)) return Status::Domain;

  if (!with_jacobian) return Status::Ok;

  // Kaufman's approximation: J = P_perp * (dX/dtheta * coef).
  const int m = n_nonlinear();
  jac_.resize(n, m);
  const double B = coef_(1);
  const double C2 = lppl ? coef_(2) : 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double dt = t_c - (t0 + static_cast<double>(i));
    const double u = design_(i, 1);
    const double L = log_dt_(i);
    if (lppl) {
      const double c = cos_(i);
      const double s = sin_(i);
      jac_(i, 0) = (u / dt) * (B * alpha + C2 * (alpha * c - omega * s));
      jac_(i, 1) = L * (B * u + C2 * design_(i, 2));
      jac_(i, 2) = -C2 * u * s * L;
      jac_(i, 3) = -C2 * u * s;
    } else {
      jac_(i, 0) = B * alpha * u / dt;
      jac_(i, 1) = B * L * u;
    }
  }
  jac_ -= scaled * llt.solve(scaled.transpose() * jac_);
  return Status::Ok;
}

// ---------------------------------------------------------------------------

LinearSubfit linear_subfit(const NonlinearParams& nl, const PriceSeries& series,
                           ModelKind model) {
  if (!(nl.t_c > static_cast<double>(series.t1()))) {
    throw Error(ErrorCode::Domain, "t_c must lie after the last observation");
  }
  ReducedProblem problem(series, model);
  const auto status = problem.evaluate(ReducedProblem::pack(nl, model), false);
  if (status == ReducedProblem::Status::Domain) {
    throw Error(ErrorCode::Domain, "non-finite design at these nonlinear parameters");
  }
  if (status == ReducedProblem::Status::DegenerateDesign) {
    throw Error(ErrorCode::DegenerateDesign,
                "linear design is singular or ill-conditioned (condition > 1e12)");
  }
  const Eigen::VectorXd& coef = problem.coefficients();
  LinearSubfit out;
  out.A = coef(0);
  out.B = coef(1);
  if (model == ModelKind::Lppl) {
    if (std::abs(out.B) < 1e-12 * series.magnitude()) {
      throw Error(ErrorCode::BZero, "B vanishes; C = (C*B)/B is unrecoverable");
    }
    out.C = coef(2) / out.B;
  }
  out.s = normalized_sse(out.assemble(nl), series, model);
  return out;
}

// ---------------------------------------------------------------------------

double hessian_step(Param p, double value) {
  const double floor = p == Param::Omega ? 0.1 : 1.0;
  return std::cbrt(std::numeric_limits<double>::epsilon()) *
         std::max(std::abs(value), floor);
}

Eigen::VectorXd gradient_of_s(const LpplParams& params, const PriceSeries& series,
                              ModelKind model) {
  const int dof = degrees_of_freedom(series, model);
  const auto active = free_params(model);
  LpplParams p = params;
  if (model == ModelKind::PowerLaw) p.C = 0.0;

  const std::size_t n = series.size();
  std::vector<std::vector<double>> terms(active.size(), std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(series.t0() + static_cast<std::int64_t>(i));
    const double r = eval_model(model, p, t) - series[i];
    const auto g = grad_lppl(p, t);
    for (std::size_t j = 0; j < active.size(); ++j) {
      terms[j][i] = r * g[static_cast<int>(active[j])];
    }
  }
  Eigen::VectorXd grad(static_cast<Eigen::Index>(active.size()));
  for (std::size_t j = 0; j < active.size(); ++j) {
    grad(static_cast<Eigen::Index>(j)) = 2.0 * pairwise_sum(terms[j]) / dof;
  }
  return grad;
}

HessianMatrix hessian_of_s(const LpplParams& params, const PriceSeries& series,
                           ModelKind model) {
  degrees_of_freedom(series, model);
  HessianMatrix h;
  h.params = free_params(model);
  const int m = h.size();
  h.entries.resize(m, m);

  const double tc_step = hessian_step(Param::Tc, params.t_c);
  if (!(params.t_c - tc_step > static_cast<double>(series.t1()))) {
    throw Error(ErrorCode::Domain,
                "t_c too close to the window end for finite-difference probes");
  }

  for (int j = 0; j < m; ++j) {
    const Param p = h.params[static_cast<std::size_t>(j)];
    const double x = params.get(p);
    const double step = hessian_step(p, x);
    LpplParams plus = params;
    LpplParams minus = params;
    plus.set(p, x + step);
    minus.set(p, x - step);
    // Use the realised step, which differs from `step` by rounding.
    const double width = plus.get(p) - minus.get(p);
    h.entries.col(j) =
        (gradient_of_s(plus, series, model) - gradient_of_s(minus, series, model)) /
        width;
  }
  h.entries = 0.5 * (h.entries + h.entries.transpose()).eval();
  if (!h.entries.allFinite()) {
    throw Error(ErrorCode::Domain, "non-finite Hessian entries");
  }
  return h;
}

}  // namespace lppl
