#include "lppl/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lppl/error.hpp"

namespace lppl {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Domain: return "DomainError";
    case ErrorCode::DegenerateWindow: return "DegenerateWindow";
    case ErrorCode::DegenerateDesign: return "DegenerateDesign";
    case ErrorCode::BZero: return "BZero";
    case ErrorCode::InitInvalid: return "InitInvalid";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::SummaryEmpty: return "SummaryEmpty";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Parse: return "ParseError";
    case ErrorCode::Gap: return "GapError";
    case ErrorCode::NonPositive: return "NonPositiveError";
    case ErrorCode::Io: return "IoError";
  }
  return "Unknown";
}

std::string_view to_string(ModelKind kind) {
  return kind == ModelKind::Lppl ? "lppl" : "power-law";
}

ModelKind model_kind_from_string(std::string_view name) {
  if (name == "lppl") return ModelKind::Lppl;
  if (name == "power-law" || name == "powerlaw") return ModelKind::PowerLaw;
  throw Error(ErrorCode::InvalidArgument,
              "unknown model '" + std::string(name) + "'");
}

std::vector<Param> free_params(ModelKind kind) {
  if (kind == ModelKind::Lppl) {
    return {Param::A,     Param::B,     Param::C,  Param::Tc,
            Param::Alpha, Param::Omega, Param::Phi};
  }
  return {Param::A, Param::B, Param::Tc, Param::Alpha};
}

int dof_param_count(ModelKind kind) {
  return kind == ModelKind::Lppl ? 7 : 5;
}

void LpplParams::set(Param p, double v) {
  auto x = to_array();
  x[static_cast<int>(p)] = v;
  *this = from_array(x);
}

bool LpplParams::all_finite() const {
  const auto x = to_array();
  return std::all_of(x.begin(), x.end(),
                     [](double v) { return std::isfinite(v); });
}

PriceSeries::PriceSeries(std::int64_t t0, std::vector<double> values,
                         Scale scale)
    : t0_(t0), values_(std::move(values)), scale_(scale) {
  if (values_.size() < 2) {
    throw Error(ErrorCode::InvalidArgument,
                "a price series needs at least two observations");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      std::ostringstream os;
      os << "non-finite observation at day " << t0_ + static_cast<std::int64_t>(i);
      throw Error(ErrorCode::InvalidArgument, os.str());
    }
  }
}

PriceSeries PriceSeries::truncated(std::int64_t last) const {
  if (last < t0_ + 1 || last > t1()) {
    throw Error(ErrorCode::InvalidArgument, "truncation day outside series");
  }
  const auto n = static_cast<std::size_t>(last - t0_ + 1);
  return PriceSeries(t0_, {values_.begin(), values_.begin() + n}, scale_);
}

double PriceSeries::magnitude() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

namespace {

void check_domain(const LpplParams& p, double t) {
  if (!(t < p.t_c)) {
    std::ostringstream os;
    os << "t = " << t << " is not before the singularity t_c = " << p.t_c;
    throw Error(ErrorCode::Domain, os.str());
  }
}

}  // namespace

double eval_lppl(const LpplParams& p, double t) {
  check_domain(p, t);
  const double dt = p.t_c - t;
  const double u = std::pow(dt, p.alpha);
  return p.A + p.B * u * (1.0 + p.C * std::cos(p.omega * std::log(dt) + p.phi));
}

double eval_power_law(const LpplParams& p, double t) {
  check_domain(p, t);
  const double dt = p.t_c - t;
  const double u = std::pow(dt, p.alpha);
  return p.A + p.B * u;
}

double eval_model(ModelKind kind, const LpplParams& p, double t) {
  return kind == ModelKind::Lppl ? eval_lppl(p, t) : eval_power_law(p, t);
}

std::array<double, kNumParams> grad_lppl(const LpplParams& p, double t) {
  check_domain(p, t);
  const double dt = p.t_c - t;
  const double log_dt = std::log(dt);
  const double u = std::pow(dt, p.alpha);
  const double arg = p.omega * log_dt + p.phi;
  const double c = std::cos(arg);
  const double s = std::sin(arg);
  const double osc = 1.0 + p.C * c;

  std::array<double, kNumParams> g{};
  g[0] = 1.0;
  g[1] = u * osc;
  g[2] = p.B * u * c;
  // d/dt_c of u*osc = (u/dt) * (alpha*osc - C*omega*s)
  g[3] = p.B * (u / dt) * (p.alpha * osc - p.C * p.omega * s);
  g[4] = p.B * u * log_dt * osc;
  g[5] = -p.B * u * p.C * s * log_dt;
  g[6] = -p.B * u * p.C * s;
  return g;
}

}  // namespace lppl
