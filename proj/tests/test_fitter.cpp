#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "lppl/fitter.hpp"
#include "lppl/synth.hpp"
#include "support.hpp"

using namespace lppl;
using testing::rel_err;
using testing::thrown_code;

namespace {

// A shorter noiseless bubble keeps these tests quick.
const LpplParams kTruth{1000.0, -40.0, 0.1, 130.0, 0.6, 6.5, 1.0};

NonlinearParams nonlinear_of(const LpplParams& p) { return {p.t_c, p.alpha, p.omega, p.phi}; }

void check_params_close(const LpplParams& got, const LpplParams& want, double tol) {
  const auto g = got.to_array();
  const auto w = want.to_array();
  for (int k = 0; k < kNumParams; ++k) {
    INFO(kParamNames[k] << ": got " << g[k] << " want " << w[k]);
    CHECK(rel_err(g[k], w[k]) < tol);
  }
}

}  // namespace

TEST_CASE("lm_fit from the truth stays there") {
  const PriceSeries s = testing::noiseless(kTruth, 0, 120);
  const FitResult r = lm_fit(s, nonlinear_of(kTruth), FitConfig{});
  CHECK(r.converged);
  CHECK(r.s < 1e-12 * s.magnitude() * s.magnitude());
  check_params_close(r.params, kTruth, 1e-6);
}

TEST_CASE("lm_fit recovers the truth from a 5% perturbation") {
  const PriceSeries s = testing::noiseless(kTruth, 0, 120);
  const NonlinearParams init{kTruth.t_c * 1.05, kTruth.alpha * 1.05, kTruth.omega * 1.05,
                             kTruth.phi * 1.05};
  const FitResult r = lm_fit(s, init, FitConfig{});
  CHECK(r.converged);
  check_params_close(r.params, kTruth, 1e-4);
}

TEST_CASE("lm_fit accepted steps never increase S") {
  SynthSpec spec = reference_1987_spec(5);
  const PriceSeries s = make_series(spec);
  FitConfig fc;
  for (int i = 0; i < 10; ++i) {
    const FitResult r = lm_fit(s, sample_init(s, fc, i), fc);
    REQUIRE(!r.s_trace.empty());
    for (std::size_t k = 1; k < r.s_trace.size(); ++k) CHECK(r.s_trace[k] <= r.s_trace[k - 1]);
    CHECK(r.params.phi >= 0.0);
    CHECK(r.params.phi < 2.0 * std::numbers::pi);
  }
}

TEST_CASE("lm_fit rejects invalid initial points") {
  const PriceSeries s = testing::noiseless(kTruth, 0, 120);
  CHECK(thrown_code([&] { lm_fit(s, {119.0, 0.5, 7.0, 1.0}, FitConfig{}); }) ==
        ErrorCode::InitInvalid);
  CHECK(thrown_code([&] { lm_fit(s, {119.5, 0.5, 7.0, 1.0}, FitConfig{}); }) ==
        ErrorCode::InitInvalid);
  CHECK(thrown_code([&] { lm_fit(s, {150.0, std::nan(""), 7.0, 1.0}, FitConfig{}); }) ==
        ErrorCode::InitInvalid);
  FitConfig bad;
  bad.max_iters = 0;
  CHECK(thrown_code([&] { lm_fit(s, {150.0, 0.5, 7.0, 1.0}, bad); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("sample_init stays inside the configured ranges") {
  const PriceSeries s = testing::noiseless(kTruth, 0, 120);
  const FitConfig fc;
  for (int i = 0; i < 1000; ++i) {
    const NonlinearParams p = sample_init(s, fc, i);
    CHECK(p.t_c > 119.0 + 1.0);
    CHECK(p.t_c <= 119.0 + 2.0 * 119.0);
    CHECK(p.alpha > 0.05);
    CHECK(p.alpha < 1.95);
    CHECK(p.omega >= 2.0);
    CHECK(p.omega <= 25.0);
    CHECK(p.phi >= 0.0);
    CHECK(p.phi < 2.0 * std::numbers::pi);
  }
  const NonlinearParams a = sample_init(s, fc, 3);
  const NonlinearParams b = sample_init(s, fc, 3);
  CHECK(a.t_c == b.t_c);
  CHECK(a.phi == b.phi);
}

TEST_CASE("multistart with one start is a single lm_fit") {
  const PriceSeries s = make_series(reference_1987_spec(3));
  FitConfig fc;
  fc.seed = 99;
  const FitResult multi = multistart_fit(s, fc);
  const FitResult single = lm_fit(s, sample_init(s, fc, 0), fc);
  CHECK(multi.params == single.params);
  CHECK(multi.s == single.s);
  CHECK(multi.start_index == 0);
}

TEST_CASE("multistart returns the best start and is deterministic") {
  const PriceSeries s = make_series(reference_1987_spec(3));
  FitConfig fc;
  fc.seed = 5;
  fc.n_starts = 12;
  const FitResult best = multistart_fit(s, fc);
  for (int i = 0; i < fc.n_starts; ++i) {
    try {
      const FitResult r = lm_fit(s, sample_init(s, fc, i), fc);
      CHECK(best.s <= r.s);
    } catch (const Error&) {
    }
  }
  fc.threads = 3;
  const FitResult threaded = multistart_fit(s, fc);
  CHECK(threaded.params == best.params);
  CHECK(threaded.s == best.s);
  CHECK(threaded.start_index == best.start_index);
  CHECK(threaded.iterations == best.iterations);
}

TEST_CASE("more starts never give a worse best S") {
  const PriceSeries s = make_series(reference_1987_spec(8));
  FitConfig fc;
  fc.seed = 17;
  double previous = std::numeric_limits<double>::infinity();
  for (int n : {1, 2, 4, 8, 16}) {
    fc.n_starts = n;
    const double best = multistart_fit(s, fc).s;
    CHECK(best <= previous);
    previous = best;
  }
}

TEST_CASE("noiseless multistart recovers all seven parameters") {
  const PriceSeries s = testing::noiseless(kTruth, 0, 120);
  FitConfig fc;
  fc.n_starts = 30;
  fc.seed = 1;
  const FitResult r = multistart_fit(s, fc);
  CHECK(r.converged);
  check_params_close(r.params, kTruth, 1e-4);
}

TEST_CASE("power-law fits keep C at zero") {
  const LpplParams truth{500.0, -20.0, 0.0, 130.0, 0.6, 0.0, 0.0};
  std::vector<double> v;
  for (int t = 0; t < 120; ++t) v.push_back(eval_power_law(truth, t) + std::sin(1.3 * t));
  const PriceSeries s(0, v);
  FitConfig fc;
  fc.model = ModelKind::PowerLaw;
  fc.n_starts = 10;
  const FitResult r = multistart_fit(s, fc);
  CHECK(r.model == ModelKind::PowerLaw);
  CHECK(r.params.C == 0.0);
  CHECK(r.params.omega == 0.0);
  CHECK(r.params.phi == 0.0);
  CHECK(rel_err(r.s, normalized_sse(r.params, s, ModelKind::PowerLaw)) < 1e-10);
  CHECK(degrees_of_freedom(s, ModelKind::PowerLaw) == 119 - 5);
}

TEST_CASE("fit configuration validation") {
  FitConfig fc;
  CHECK_NOTHROW(fc.validate());
  fc.n_starts = 0;
  CHECK(thrown_code([&] { fc.validate(); }) == ErrorCode::InvalidArgument);
  fc = FitConfig{};
  fc.init_ranges.alpha = {1.0, 0.5};
  CHECK(thrown_code([&] { fc.validate(); }) == ErrorCode::InvalidArgument);
  fc = FitConfig{};
  fc.tc_escape_factor = 1.0;
  CHECK(thrown_code([&] { fc.validate(); }) == ErrorCode::InvalidArgument);
}
