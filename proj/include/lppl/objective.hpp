#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "lppl/model.hpp"

namespace lppl {

/// Sum with pairwise (tree) reduction; deterministic for a given length.
double pairwise_sum(std::span<const double> x);

/// The parameters that enter the LPPL nonlinearly.
struct NonlinearParams {
  double t_c = 0.0;
  double alpha = 0.0;
  double omega = 0.0;
  double phi = 0.0;
};

/// t1 - t0 - n. Throws Error(DegenerateWindow) when not positive.
int degrees_of_freedom(const PriceSeries& series, ModelKind model);

/// S = sum_t [f(t) - p(t)]^2 / (t1 - t0 - n).
double normalized_sse(const LpplParams& params, const PriceSeries& series,
                      ModelKind model = ModelKind::Lppl);

struct LinearSubfit {
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
  double s = 0.0;

  LpplParams assemble(const NonlinearParams& nl) const {
    return {A, B, C, nl.t_c, nl.alpha, nl.omega, nl.phi};
  }
};

/// Best (A, B, C) for fixed nonlinear parameters. The LPPL is linear in
/// (A, B, C*B); C is recovered by division. For ModelKind::PowerLaw only
/// (A, B) are solved and C = 0.
LinearSubfit linear_subfit(const NonlinearParams& nl, const PriceSeries& series,
                           ModelKind model = ModelKind::Lppl);

/// Condition number above which the linear design is rejected.
inline constexpr double kMaxDesignCondition = 1e12;

/// Evaluates the variable-projection reduction of S: for a point in the
/// nonlinear parameter space, solves the linear coefficients, the residual
/// vector and (optionally) Kaufman's approximation to the reduced Jacobian.
/// Holds scratch buffers, so one instance per thread.
class ReducedProblem {
 public:
  enum class Status { Ok, Domain, DegenerateDesign };

  ReducedProblem(const PriceSeries& series, ModelKind model);

  /// 4 for the LPPL (t_c, alpha, omega, phi), 2 for the power law.
  int n_nonlinear() const { return model_ == ModelKind::Lppl ? 4 : 2; }
  int n_linear() const { return model_ == ModelKind::Lppl ? 3 : 2; }
  int dof() const { return dof_; }
  ModelKind model() const { return model_; }
  const PriceSeries& series() const { return series_; }

  Status evaluate(const Eigen::VectorXd& theta, bool with_jacobian);

  /// Valid after a successful evaluate().
  double rss() const { return rss_; }
  double s() const { return rss_ / dof_; }
  /// (A, B, C*B) or (A, B).
  const Eigen::VectorXd& coefficients() const { return coef_; }
  const Eigen::VectorXd& residuals() const { return resid_; }
  const Eigen::MatrixXd& jacobian() const { return jac_; }

  static Eigen::VectorXd pack(const NonlinearParams& nl, ModelKind model);
  static NonlinearParams unpack(const Eigen::VectorXd& theta, ModelKind model);

 private:
  const PriceSeries& series_;
  ModelKind model_;
  int dof_;
  Eigen::MatrixXd design_;  // n x k columns: 1, u, u cos
  Eigen::VectorXd log_dt_;
  Eigen::VectorXd sin_;
  Eigen::VectorXd cos_;
  Eigen::VectorXd coef_;
  Eigen::VectorXd resid_;
  Eigen::VectorXd sq_;
  Eigen::MatrixXd jac_;
  double rss_ = 0.0;
};

/// Ordered set of parameters plus a symmetric matrix over them.
struct HessianMatrix {
  std::vector<Param> params;
  Eigen::MatrixXd entries;

  int size() const { return static_cast<int>(params.size()); }
};

/// Finite-difference step used for the Hessian along parameter p.
double hessian_step(Param p, double value);

/// Analytic gradient of S over free_params(model).
Eigen::VectorXd gradient_of_s(const LpplParams& params,
                              const PriceSeries& series,
                              ModelKind model = ModelKind::Lppl);

/// Second partials of S over free_params(model), by central differences of
/// the analytic gradient, then symmetrised.
HessianMatrix hessian_of_s(const LpplParams& params, const PriceSeries& series,
                           ModelKind model = ModelKind::Lppl);

}  // namespace lppl
