#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "lppl/fitter.hpp"
#include "lppl/objective.hpp"

namespace lppl {

/// Symmetry tolerance: |H_ij - H_ji| < 1e-9 * max(|H_ij|, 1).
bool is_symmetric(const Eigen::MatrixXd& h);

struct EigenDecomposition {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // orthonormal columns aligned with values
};

/// Full spectral decomposition via cyclic Jacobi. Throws
/// Error(NotSymmetric) if the matrix is not symmetric.
EigenDecomposition eigendecompose(const HessianMatrix& h);

/// Threshold on |component| for a parameter to count as part of an
/// eigendirection.
inline constexpr double kMajorComponent = 0.1;

struct SloppinessReport {
  std::vector<Param> params;
  std::vector<double> eigenvalues;                // descending
  std::vector<std::vector<double>> eigenvectors;  // row i pairs with eigenvalue i
  /// floor(log10(max/min)); empty when the smallest eigenvalue is <= 0.
  std::optional<int> orders_of_separation;
  /// Per eigenvector, the parameters whose |component| exceeds 0.1.
  std::vector<std::vector<Param>> major_components;

  /// Index into `params` of the largest |component| of eigenvector i.
  int dominant(int i) const;
};

SloppinessReport sloppiness_report(const HessianMatrix& h);

/// Indices (into the report's eigenvalues) of the eigendirections that
/// belong to the nonlinear parameters: those whose largest component lies
/// on t_c, alpha, omega or phi. Short lists are padded, and long lists
/// trimmed, by nonlinear component mass. Result is in descending order.
std::vector<int> nonlinear_block(const SloppinessReport& report);

struct EigenTrack {
  std::vector<std::int64_t> dates;
  /// Descending nonlinear-block eigenvalues per date; empty when the fit
  /// at that date failed.
  std::vector<std::vector<double>> spectra;
  /// Dominant nonlinear parameter of each entry of `spectra`.
  std::vector<std::vector<Param>> labels;
  int crossings = 0;
  int missing = 0;
};

/// Evaluation days for a track: `horizon` days before t_c stepping by
/// `stride`, i.e. t_c - horizon, t_c - horizon + stride, ... < t_c.
std::vector<std::int64_t> track_dates(double tc, int horizon, int stride);

/// Fits the series truncated at each evaluation date and records the
/// nonlinear-block spectrum of the Hessian at the best fit.
EigenTrack rolling_track(const PriceSeries& series, double tc, int horizon,
                         int stride, const FitConfig& fit_config);

/// Number of label pairs whose relative rank differs between consecutive
/// non-missing dates.
int count_crossings(const std::vector<std::vector<Param>>& labels);

}  // namespace lppl
