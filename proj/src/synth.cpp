#include "lppl/synth.hpp"

#include <cmath>
#include <sstream>

#include "lppl/error.hpp"
#include "lppl/rng.hpp"

namespace lppl {

void Ar1Config::validate() const {
  if (!(lambda > 0.0 && lambda <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "AR(1) lambda must lie in (0, 1]");
  }
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::InvalidArgument, "AR(1) sigma must be finite and >= 0");
  }
}

void SynthSpec::validate() const {
  noise.validate();
  if (length < 2) throw Error(ErrorCode::InvalidArgument, "length must be at least 2");
  if (!truth.all_finite()) {
    throw Error(ErrorCode::InvalidArgument, "truth parameters must be finite");
  }
  if (!(truth.t_c > static_cast<double>(t0))) {
    throw Error(ErrorCode::InvalidArgument, "truth t_c must lie after t0");
  }
}

SynthSpec reference_1987_spec(std::uint64_t seed) {
  SynthSpec spec;
  spec.truth = {6000.0, -1200.0, 0.08, 834.0, 0.5, 7.4, 2.0};
  spec.noise = {0.06, 25.0, seed};
  spec.length = 834;
  spec.t0 = 0;
  return spec;
}

std::vector<double> ar1_generate(const Ar1Config& config, std::int64_t length) {
  config.validate();
  if (length < 1) throw Error(ErrorCode::InvalidArgument, "length must be at least 1");
  CounterRng rng(config.seed, 0);
  const double keep = 1.0 - config.lambda;
  std::vector<double> eta(static_cast<std::size_t>(length));
  double prev = 0.0;
  for (auto& e : eta) {
    prev = prev * keep + rng.normal();
    e = prev;
  }
  return eta;
}

PriceSeries make_series(const SynthSpec& spec) {
  spec.validate();
  const std::int64_t last = spec.t0 + spec.length - 1;
  if (!(static_cast<double>(last) < spec.truth.t_c)) {
    std::ostringstream os;
    os << "day " << last << " is not before t_c = " << spec.truth.t_c;
    throw Error(ErrorCode::Domain, os.str());
  }
  const std::vector<double> eta = ar1_generate(spec.noise, spec.length);
  std::vector<double> values(eta.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double t = static_cast<double>(spec.t0 + static_cast<std::int64_t>(i));
    values[i] = eval_lppl(spec.truth, t) + spec.noise.sigma * eta[i];
  }
  return PriceSeries(spec.t0, std::move(values), Scale::Raw);
}

}  // namespace lppl
