#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace lppl {

/// Position of each parameter in 7-vectors (gradients, eigenvectors, CSV
/// columns). Order is A, B, C, t_c, alpha, omega, phi throughout.
enum class Param : int { A = 0, B, C, Tc, Alpha, Omega, Phi };

inline constexpr int kNumParams = 7;
inline constexpr std::array<std::string_view, kNumParams> kParamNames = {
    "A", "B", "C", "t_c", "alpha", "omega", "phi"};

inline constexpr bool is_nonlinear(Param p) {
  return p == Param::Tc || p == Param::Alpha || p == Param::Omega ||
         p == Param::Phi;
}

enum class ModelKind { Lppl, PowerLaw };

std::string_view to_string(ModelKind kind);
ModelKind model_kind_from_string(std::string_view name);

/// Parameters actually free under a model: all seven for the LPPL, and
/// (A, B, t_c, alpha) for the pure power law.
std::vector<Param> free_params(ModelKind kind);

/// Parameter count used in the degrees of freedom of S.
int dof_param_count(ModelKind kind);

struct LpplParams {
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
  double t_c = 0.0;
  double alpha = 0.0;
  double omega = 0.0;
  double phi = 0.0;

  std::array<double, kNumParams> to_array() const {
    return {A, B, C, t_c, alpha, omega, phi};
  }
  static LpplParams from_array(const std::array<double, kNumParams>& x) {
    return {x[0], x[1], x[2], x[3], x[4], x[5], x[6]};
  }
  double get(Param p) const { return to_array()[static_cast<int>(p)]; }
  void set(Param p, double v);

  bool all_finite() const;
  friend bool operator==(const LpplParams&, const LpplParams&) = default;
};

enum class Scale { Raw, Log };

/// Observations at consecutive integer days t0, t0+1, ..., t1.
class PriceSeries {
 public:
  PriceSeries(std::int64_t t0, std::vector<double> values,
              Scale scale = Scale::Raw);

  std::int64_t t0() const { return t0_; }
  std::int64_t t1() const {
    return t0_ + static_cast<std::int64_t>(values_.size()) - 1;
  }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  Scale scale() const { return scale_; }

  /// Prefix ending at day `last` inclusive.
  PriceSeries truncated(std::int64_t last) const;

  /// Largest absolute observation; used as the natural price scale.
  double magnitude() const;

  friend bool operator==(const PriceSeries&, const PriceSeries&) = default;

 private:
  std::int64_t t0_;
  std::vector<double> values_;
  Scale scale_;
};

/// A + B (t_c - t)^alpha [1 + C cos(omega ln(t_c - t) + phi)].
/// Throws Error(Domain) for t >= t_c.
double eval_lppl(const LpplParams& p, double t);

/// Analytic partial derivatives in Param order.
std::array<double, kNumParams> grad_lppl(const LpplParams& p, double t);

/// A + B (t_c - t)^alpha; C, omega and phi are ignored.
double eval_power_law(const LpplParams& p, double t);

/// Dispatch on model kind.
double eval_model(ModelKind kind, const LpplParams& p, double t);

}  // namespace lppl
