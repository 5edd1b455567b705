#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "lppl/error.hpp"
#include "lppl/model.hpp"

namespace testing {

/// Code of the lppl::Error thrown by f, or nullopt if nothing was thrown.
template <typename F>
std::optional<lppl::ErrorCode> thrown_code(F&& f) {
  try {
    f();
  } catch (const lppl::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

inline lppl::PriceSeries noiseless(const lppl::LpplParams& p, std::int64_t t0,
                                   std::int64_t length,
                                   lppl::ModelKind kind = lppl::ModelKind::Lppl) {
  std::vector<double> v;
  for (std::int64_t t = t0; t < t0 + length; ++t) {
    v.push_back(lppl::eval_model(kind, p, static_cast<double>(t)));
  }
  return lppl::PriceSeries(t0, std::move(v));
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

/// 1987-style truth used across tests.
inline lppl::LpplParams reference_truth() {
  return {6000.0, -1200.0, 0.08, 834.0, 0.5, 7.4, 2.0};
}

}  // namespace testing
