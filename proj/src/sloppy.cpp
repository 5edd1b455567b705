#include "lppl/sloppy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lppl/error.hpp"
#include "lppl/linalg.hpp"
#include "lppl/parallel.hpp"

namespace lppl {

bool is_symmetric(const Eigen::MatrixXd& h) {
  if (h.rows() != h.cols()) return false;
  for (Eigen::Index i = 0; i < h.rows(); ++i)
    for (Eigen::Index j = i + 1; j < h.cols(); ++j)
      if (!(std::abs(h(i, j) - h(j, i)) < 1e-9 * std::max(std::abs(h(i, j)), 1.0)))
        return false;
  return h.allFinite();
}

EigenDecomposition eigendecompose(const HessianMatrix& h) {
  if (!is_symmetric(h.entries)) {
    throw Error(ErrorCode::NotSymmetric, "Hessian is not symmetric or not finite");
  }
  SymmetricEigen eig = jacobi_eigen(h.entries);
  return {std::move(eig.values), std::move(eig.vectors)};
}

int SloppinessReport::dominant(int i) const {
  const auto& v = eigenvectors[static_cast<std::size_t>(i)];
  int best = 0;
  for (int k = 1; k < static_cast<int>(v.size()); ++k)
    if (std::abs(v[static_cast<std::size_t>(k)]) >
        std::abs(v[static_cast<std::size_t>(best)]))
      best = k;
  return best;
}

SloppinessReport sloppiness_report(const HessianMatrix& h) {
  const EigenDecomposition eig = eigendecompose(h);
  const auto n = static_cast<std::size_t>(h.size());

  SloppinessReport r;
  r.params = h.params;
  r.eigenvalues.assign(eig.values.data(), eig.values.data() + n);
  r.eigenvectors.resize(n);
  r.major_components.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> v(eig.vectors.col(static_cast<Eigen::Index>(i)).data(),
                          eig.vectors.col(static_cast<Eigen::Index>(i)).data() + n);
    // Sign convention: first major component positive.
    const auto first = std::find_if(v.begin(), v.end(), [](double x) {
      return std::abs(x) > kMajorComponent;
    });
    if (first != v.end() && *first < 0.0) {
      for (double& x : v) x = -x;
    }
    for (std::size_t k = 0; k < n; ++k)
      if (std::abs(v[k]) > kMajorComponent) r.major_components[i].push_back(h.params[k]);
    r.eigenvectors[i] = std::move(v);
  }
  const double lo = r.eigenvalues.back();
  const double hi = r.eigenvalues.front();
  if (lo > 0.0) {
    r.orders_of_separation = static_cast<int>(std::floor(std::log10(hi / lo)));
  }
  return r;
}

std::vector<int> nonlinear_block(const SloppinessReport& report) {
  const auto n = static_cast<int>(report.eigenvalues.size());
  const auto block_size = static_cast<std::size_t>(std::count_if(
      report.params.begin(), report.params.end(), [](Param p) { return is_nonlinear(p); }));

  auto nonlinear_mass = [&](int i) {
    double m = 0.0;
    for (std::size_t k = 0; k < report.params.size(); ++k)
      if (is_nonlinear(report.params[k])) {
        const double x = report.eigenvectors[static_cast<std::size_t>(i)][k];
        m += x * x;
      }
    return m;
  };
  auto by_mass = [&](int a, int b) {
    const double ma = nonlinear_mass(a), mb = nonlinear_mass(b);
    return ma != mb ? ma > mb : a < b;
  };

  std::vector<int> chosen, rest;
  for (int i = 0; i < n; ++i) {
    const Param p = report.params[static_cast<std::size_t>(report.dominant(i))];
    (is_nonlinear(p) ? chosen : rest).push_back(i);
  }
  if (chosen.size() > block_size) {
    std::stable_sort(chosen.begin(), chosen.end(), by_mass);
    chosen.resize(block_size);
  } else if (chosen.size() < block_size) {
    std::stable_sort(rest.begin(), rest.end(), by_mass);
    for (std::size_t k = 0; chosen.size() < block_size && k < rest.size(); ++k)
      chosen.push_back(rest[k]);
  }
  std::sort(chosen.begin(), chosen.end());  // eigenvalues already descending
  return chosen;
}

std::vector<std::int64_t> track_dates(double tc, int horizon, int stride) {
  if (horizon < 1 || stride < 1) {
    throw Error(ErrorCode::InvalidArgument, "horizon and stride must be positive");
  }
  const auto end = static_cast<std::int64_t>(std::ceil(tc));
  std::vector<std::int64_t> dates;
  for (std::int64_t d = end - horizon; d < end; d += stride) dates.push_back(d);
  return dates;
}

int count_crossings(const std::vector<std::vector<Param>>& labels) {
  int crossings = 0;
  const std::vector<Param>* prev = nullptr;
  for (const auto& cur : labels) {
    if (cur.empty()) continue;
    if (prev) {
      auto rank = [](const std::vector<Param>& v, Param p) {
        return static_cast<int>(std::find(v.begin(), v.end(), p) - v.begin());
      };
      // Labels present at both dates, in the previous order.
      std::vector<Param> common;
      for (Param p : *prev)
        if (std::find(cur.begin(), cur.end(), p) != cur.end() &&
            std::find(common.begin(), common.end(), p) == common.end())
          common.push_back(p);
      for (std::size_t i = 0; i < common.size(); ++i)
        for (std::size_t j = i + 1; j < common.size(); ++j)
          if (rank(cur, common[i]) > rank(cur, common[j])) ++crossings;
    }
    prev = &cur;
  }
  return crossings;
}

EigenTrack rolling_track(const PriceSeries& series, double tc, int horizon,
                         int stride, const FitConfig& fit_config) {
  if (horizon >= static_cast<int>(series.size())) {
    throw Error(ErrorCode::InvalidArgument, "horizon must be shorter than the series");
  }
  EigenTrack track;
  track.dates = track_dates(tc, horizon, stride);
  const std::size_t n = track.dates.size();
  track.spectra.resize(n);
  track.labels.resize(n);

  FitConfig inner = fit_config;
  inner.threads = 1;
  parallel_for(n, fit_config.threads, [&](std::size_t k) {
    const std::int64_t d = track.dates[k];
    if (d > series.t1() || d <= series.t0()) return;
    try {
      const PriceSeries window = series.truncated(d);
      const FitResult fit = multistart_fit(window, inner);
      const SloppinessReport report =
          sloppiness_report(hessian_of_s(fit.params, window, inner.model));
      for (int i : nonlinear_block(report)) {
        track.spectra[k].push_back(report.eigenvalues[static_cast<std::size_t>(i)]);
        // Dominant nonlinear component names the direction.
        const auto& v = report.eigenvectors[static_cast<std::size_t>(i)];
        std::size_t best = 0;
        double best_abs = -1.0;
        for (std::size_t j = 0; j < v.size(); ++j)
          if (is_nonlinear(report.params[j]) && std::abs(v[j]) > best_abs) {
            best = j;
            best_abs = std::abs(v[j]);
          }
        track.labels[k].push_back(report.params[best]);
      }
    } catch (const Error&) {
      track.spectra[k].clear();
      track.labels[k].clear();
    }
  });

  track.missing = static_cast<int>(std::count_if(
      track.spectra.begin(), track.spectra.end(), [](const auto& s) { return s.empty(); }));
  track.crossings = count_crossings(track.labels);
  return track;
}

}  // namespace lppl
