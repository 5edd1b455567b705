#include <catch_amalgamated.hpp>

#include <chrono>
#include <cmath>
#include <set>

#include "lppl/rng.hpp"
#include "lppl/stats.hpp"
#include "lppl/synth.hpp"
#include "support.hpp"

using namespace lppl;
using testing::thrown_code;

TEST_CASE("Philox4x32-10 known answers") {
  using A4 = std::array<std::uint32_t, 4>;
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("counter generator streams") {
  CounterRng a(42, 3), b(42, 3), c(42, 4);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    CHECK(x != c.next_u64());
  }
  CounterRng u(9);
  double lo = 1.0, hi = 0.0, sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double x = u.uniform();
    lo = std::min(lo, x);
    hi = std::max(hi, x);
    sum += x;
  }
  CHECK(lo > 0.0);
  CHECK(hi < 1.0);
  CHECK(std::abs(sum / 100000 - 0.5) < 0.005);

  std::set<std::uint64_t> seeds;
  for (std::uint64_t s = 0; s < 50; ++s)
    for (std::uint64_t w = 0; w < 20; ++w) seeds.insert(derive_seed(7, s, w));
  CHECK(seeds.size() == 1000);
}

TEST_CASE("normal quantile and cdf") {
  CHECK(normal_quantile(0.975) == Catch::Approx(1.959963984540054).epsilon(1e-14));
  CHECK(normal_quantile(0.9) == Catch::Approx(1.2815515655446004).epsilon(1e-14));
  CHECK(normal_quantile(0.5) == 0.0);
  CHECK(normal_quantile(1e-300) == Catch::Approx(-37.04710).epsilon(1e-5));
  for (double p : {1e-10, 0.01, 0.2, 0.5, 0.73, 0.999}) {
    CHECK(normal_cdf(normal_quantile(p)) == Catch::Approx(p).epsilon(1e-13));
  }
  for (double p : {0.01, 0.2, 0.25, 0.4}) {
    CHECK(normal_quantile(1.0 - p) == Catch::Approx(-normal_quantile(p)).epsilon(1e-12));
  }
  CHECK(thrown_code([] { normal_quantile(0.0); }) == ErrorCode::InvalidArgument);
  CHECK(thrown_code([] { normal_quantile(1.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("standard normal draws have unit moments") {
  CounterRng rng(1);
  std::vector<double> x(200000);
  for (double& v : x) v = rng.normal();
  const Moments m = sample_moments(x);
  CHECK(std::abs(m.mean) < 5.0 / std::sqrt(200000.0));
  CHECK(std::abs(m.variance - 1.0) < 0.01);
  CHECK(std::abs(m.skewness) < 0.03);
  CHECK(std::abs(m.excess_kurtosis) < 0.06);
}

TEST_CASE("AR(1) memoryless case") {
  const auto eta = ar1_generate({1.0, 1.0, 5}, 1000000);
  CHECK(std::abs(lag1_autocorrelation(eta)) < 3.0 / 1000.0);
}

TEST_CASE("AR(1) stationary variance") {
  const auto start = std::chrono::steady_clock::now();
  const auto eta = ar1_generate({0.06, 1.0, 1987}, 1000000);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double target = 1.0 / (1.0 - 0.94 * 0.94);
  CHECK(std::abs(sample_moments(eta).variance / target - 1.0) < 0.02);
  const std::span<const double> tail(eta.data() + 500000, 500000);
  CHECK(std::abs(sample_moments(tail).variance / target - 1.0) < 0.02);
  CHECK(secs < 5.0);
  CHECK(ar1_generate({0.06, 1.0, 1987}, 1000) ==
        std::vector<double>(eta.begin(), eta.begin() + 1000));
}

TEST_CASE("AR(1) configuration checks") {
  CHECK(thrown_code([] { ar1_generate({0.0, 1.0, 1}, 10); }) == ErrorCode::InvalidArgument);
  CHECK(thrown_code([] { ar1_generate({1.5, 1.0, 1}, 10); }) == ErrorCode::InvalidArgument);
  CHECK(thrown_code([] { ar1_generate({0.5, -1.0, 1}, 10); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("make_series composition") {
  SynthSpec spec = reference_1987_spec();
  const PriceSeries s = make_series(spec);
  REQUIRE(s.size() == 834);
  CHECK(s.t0() == 0);
  CHECK(s.t1() == 833);
  const auto eta = ar1_generate(spec.noise, spec.length);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(s[i] == eval_lppl(spec.truth, static_cast<double>(i)) + spec.noise.sigma * eta[i]);
  }

  spec.noise.sigma = 0.0;
  const PriceSeries clean = make_series(spec);
  for (std::size_t i = 0; i < clean.size(); ++i) {
    CHECK(clean[i] == eval_lppl(spec.truth, static_cast<double>(i)));
  }

  spec.length = 835;
  CHECK(thrown_code([&] { make_series(spec); }) == ErrorCode::Domain);
}

TEST_CASE("reference noise re-estimates its memory parameter") {
  const SynthSpec spec = reference_1987_spec();
  const PriceSeries s = make_series(spec);
  std::vector<double> r;
  for (std::size_t i = 0; i < s.size(); ++i) r.push_back(s[i] - eval_lppl(spec.truth, i));
  // Least-squares slope of r(t) on r(t-1) estimates 1 - lambda.
  double num = 0.0, den = 0.0;
  for (std::size_t i = 1; i < r.size(); ++i) {
    num += r[i] * r[i - 1];
    den += r[i - 1] * r[i - 1];
  }
  const double lambda_hat = 1.0 - num / den;
  INFO("lambda estimate " << lambda_hat);
  CHECK(std::abs(lambda_hat - 0.06) <= 0.02);
}

TEST_CASE("noise seeds only change the noise") {
  SynthSpec a = reference_1987_spec(1);
  SynthSpec b = reference_1987_spec(2);
  const PriceSeries sa = make_series(a);
  const PriceSeries sb = make_series(b);
  std::vector<double> d;
  for (std::size_t i = 0; i < sa.size(); ++i) d.push_back(sa[i] - sb[i]);
  const Moments m = sample_moments(d);
  // AR(1) differences are strongly correlated; the effective sample size
  // shrinks by (1 - rho) / (1 + rho).
  const double rho = 0.94;
  const double n_eff = static_cast<double>(d.size()) * (1.0 - rho) / (1.0 + rho);
  CHECK(std::abs(m.mean) < 5.0 * std::sqrt(m.variance / n_eff));
}
