#pragma once

#include <cstdint>
#include <vector>

#include "lppl/model.hpp"

namespace lppl {

struct Ar1Config {
  double lambda = 0.06;  // memory loss, in (0, 1]
  double sigma = 25.0;   // noise amplitude, price units
  std::uint64_t seed = 0;

  void validate() const;
};

struct SynthSpec {
  LpplParams truth;
  Ar1Config noise;
  std::int64_t length = 834;
  std::int64_t t0 = 0;

  void validate() const;
  friend bool operator==(const SynthSpec&, const SynthSpec&) = default;
};

inline bool operator==(const Ar1Config& a, const Ar1Config& b) {
  return a.lambda == b.lambda && a.sigma == b.sigma && a.seed == b.seed;
}

/// Synthetic stand-in for the 1987 Hang Seng bubble: 834 trading days
/// (t = 0..833) ending one day before t_c = 834, AR(1) noise with
/// lambda = 0.06 and sigma = 25.
SynthSpec reference_1987_spec(std::uint64_t seed = 1987);

/// eta(1..length) with eta(0) = 0 and eta(t) = (1 - lambda) eta(t-1) + eps(t),
/// eps standard normal from stream 0 of the seeded generator.
std::vector<double> ar1_generate(const Ar1Config& config, std::int64_t length);

/// values[i] = f(t0 + i) + sigma * eta(i + 1), Raw scale.
PriceSeries make_series(const SynthSpec& spec);

}  // namespace lppl
