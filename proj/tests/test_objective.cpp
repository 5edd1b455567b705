#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "lppl/objective.hpp"
#include "lppl/rng.hpp"
#include "lppl/sloppy.hpp"
#include "lppl/synth.hpp"
#include "support.hpp"

using namespace lppl;
using testing::thrown_code;

namespace {

PriceSeries noisy_instance(CounterRng& rng, const LpplParams& p, int n, double sigma) {
  std::vector<double> v;
  for (int t = 0; t < n; ++t) v.push_back(eval_lppl(p, t) + sigma * rng.normal());
  return PriceSeries(0, std::move(v));
}

// S straight from the definition with a plain loop, no shared code paths.
double direct_s(const LpplParams& p, const PriceSeries& s, int n_params) {
  long double sum = 0.0L;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double r = eval_lppl(p, static_cast<double>(s.t0()) + i) - s[i];
    sum += static_cast<long double>(r) * r;
  }
  return static_cast<double>(sum / (s.t1() - s.t0() - n_params));
}

}  // namespace

TEST_CASE("normalized_sse basic values") {
  const LpplParams p = testing::reference_truth();
  const PriceSeries exact = testing::noiseless(p, 0, 834);
  CHECK(normalized_sse(p, exact) <= 1e-18);

  std::vector<double> v(10, 2.0);
  v[5] = 4.0;
  const PriceSeries bump(0, v);
  CHECK(normalized_sse({2.0, 0.0, 0.0, 100.0, 0.5, 7.0, 0.0}, bump) == 2.0);

  const PriceSeries eight(0, std::vector<double>(8, 1.0));
  CHECK(thrown_code([&] { normalized_sse({1, 0, 0, 100, 0.5, 7, 0}, eight); }) ==
        ErrorCode::DegenerateWindow);
  CHECK(thrown_code([&] { normalized_sse({1, 0, 0, 9, 0.5, 7, 0}, bump); }) == ErrorCode::Domain);
  CHECK(degrees_of_freedom(eight, ModelKind::PowerLaw) == 2);
}

TEST_CASE("normalized_sse does not depend on accumulation order") {
  CounterRng rng(3);
  const LpplParams p = testing::reference_truth();
  const PriceSeries s = noisy_instance(rng, p, 834, 25.0);
  std::vector<double> sq;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double r = eval_lppl(p, static_cast<double>(i)) - s[i];
    sq.push_back(r * r);
  }
  const double dof = 833.0 - 7.0;
  const double forward = std::accumulate(sq.begin(), sq.end(), 0.0) / dof;
  const double backward = std::accumulate(sq.rbegin(), sq.rend(), 0.0) / dof;
  std::sort(sq.begin(), sq.end());
  const double sorted = std::accumulate(sq.begin(), sq.end(), 0.0) / dof;
  const double s_val = normalized_sse(p, s);
  for (double other : {forward, backward, sorted, direct_s(p, s, 7)}) {
    CHECK(testing::rel_err(s_val, other) < 1e-12);
  }
  CHECK(normalized_sse(p, s) == s_val);
}

TEST_CASE("pairwise_sum") {
  std::vector<double> x(10001);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = 0.1 * static_cast<double>(i);
  CHECK(pairwise_sum(x) == Catch::Approx(0.1 * 10000.0 * 10001.0 / 2.0).epsilon(1e-15));
  CHECK(pairwise_sum(std::span<const double>{}) == 0.0);
}

TEST_CASE("linear_subfit recovers exact coefficients") {
  const LpplParams p = testing::reference_truth();
  const PriceSeries s = testing::noiseless(p, 0, 834);
  const LinearSubfit fit = linear_subfit({p.t_c, p.alpha, p.omega, p.phi}, s);
  CHECK(testing::rel_err(fit.A, p.A) < 1e-8);
  CHECK(testing::rel_err(fit.B, p.B) < 1e-8);
  CHECK(testing::rel_err(fit.C, p.C) < 1e-8);
  CHECK(fit.s < 1e-12 * s.magnitude() * s.magnitude());

  const PriceSeries pl = testing::noiseless({10, 3, 0, 60, 0.7, 0, 0}, 0, 50, ModelKind::PowerLaw);
  const LinearSubfit pfit = linear_subfit({60, 0.7, 0, 0}, pl, ModelKind::PowerLaw);
  CHECK(pfit.C == 0.0);
  CHECK(testing::rel_err(pfit.B, 3.0) < 1e-8);
}

TEST_CASE("linear_subfit is no worse than a 50^3 grid") {
  CounterRng rng(77);
  for (int instance = 0; instance < 5; ++instance) {
    const LpplParams p{rng.uniform(100, 1000), rng.uniform(-50, -5), rng.uniform(-0.3, 0.3),
                       70.0, rng.uniform(0.2, 1.5), rng.uniform(4, 12), rng.uniform(0, 6)};
    const PriceSeries s = noisy_instance(rng, p, 60, 2.0);
    const NonlinearParams nl{p.t_c, p.alpha, p.omega, p.phi};
    const LinearSubfit fit = linear_subfit(nl, s);
    const double c2 = fit.C * fit.B;
    double best_grid = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 50; ++i) {
      const double a = -3.0 * std::abs(fit.A) + 6.0 * std::abs(fit.A) * i / 49.0;
      for (int j = 0; j < 50; ++j) {
        const double b = -3.0 * std::abs(fit.B) + 6.0 * std::abs(fit.B) * j / 49.0;
        for (int k = 0; k < 50; ++k) {
          const double c = -3.0 * std::abs(c2) + 6.0 * std::abs(c2) * k / 49.0;
          if (b == 0.0) continue;
          best_grid = std::min(best_grid, direct_s({a, b, c / b, nl.t_c, nl.alpha, nl.omega, nl.phi}, s, 7));
        }
      }
    }
    CHECK(fit.s <= best_grid);
  }
}

TEST_CASE("linear_subfit failure modes") {
  CounterRng rng(4);
  const PriceSeries s = noisy_instance(rng, testing::reference_truth(), 200, 10.0);
  CHECK(thrown_code([&] { linear_subfit({834, 0.0, 7.4, 2.0}, s); }) ==
        ErrorCode::DegenerateDesign);
  CHECK(thrown_code([&] { linear_subfit({199, 0.5, 7.4, 2.0}, s); }) == ErrorCode::Domain);
  const PriceSeries flat(0, std::vector<double>(50, 3.0));
  CHECK(thrown_code([&] { linear_subfit({80, 0.5, 7.4, 2.0}, flat); }) == ErrorCode::BZero);
}

TEST_CASE("linear_subfit is scale equivariant") {
  CounterRng rng(12);
  const LpplParams p = testing::reference_truth();
  const PriceSeries s = noisy_instance(rng, p, 834, 25.0);
  std::vector<double> scaled(s.values().begin(), s.values().end());
  const double k = 3.7;
  for (double& x : scaled) x *= k;
  const NonlinearParams nl{840.0, 0.45, 7.0, 1.0};
  const LinearSubfit a = linear_subfit(nl, s);
  const LinearSubfit b = linear_subfit(nl, PriceSeries(0, scaled));
  CHECK(testing::rel_err(b.A, k * a.A) < 1e-10);
  CHECK(testing::rel_err(b.B, k * a.B) < 1e-10);
  CHECK(testing::rel_err(b.C, a.C) < 1e-10);
  CHECK(testing::rel_err(b.s, k * k * a.s) < 1e-10);
}

TEST_CASE("reduced problem agrees with linear_subfit") {
  CounterRng rng(13);
  const PriceSeries s = noisy_instance(rng, testing::reference_truth(), 300, 25.0);
  ReducedProblem rp(s, ModelKind::Lppl);
  const NonlinearParams nl{400.0, 0.6, 8.0, 1.5};
  REQUIRE(rp.evaluate(ReducedProblem::pack(nl, ModelKind::Lppl), true) ==
          ReducedProblem::Status::Ok);
  const LinearSubfit fit = linear_subfit(nl, s);
  CHECK(testing::rel_err(rp.s(), fit.s) < 1e-10);
  CHECK(testing::rel_err(rp.coefficients()(1), fit.B) < 1e-10);
  CHECK(rp.jacobian().rows() == 300);
  CHECK(rp.jacobian().cols() == 4);
  CHECK(rp.evaluate(ReducedProblem::pack({299.0, 0.6, 8.0, 1.5}, ModelKind::Lppl), false) ==
        ReducedProblem::Status::Domain);
}

TEST_CASE("Hessian at a noiseless optimum") {
  const LpplParams p = testing::reference_truth();
  const PriceSeries s = testing::noiseless(p, 0, 834);
  const Eigen::VectorXd g = gradient_of_s(p, s);
  CHECK(g.lpNorm<Eigen::Infinity>() < 1e-6);
  const HessianMatrix h = hessian_of_s(p, s);
  CHECK(h.size() == 7);
  CHECK(is_symmetric(h.entries));
  CHECK(h.entries.allFinite());
  const EigenDecomposition ed = eigendecompose(h);
  CHECK(ed.values.minCoeff() >= -1e-6 * ed.values.maxCoeff());
}

TEST_CASE("Hessian matches second differences of S") {
  CounterRng rng(21);
  const LpplParams truth{1000.0, -40.0, 0.1, 130.0, 0.6, 6.5, 1.0};
  const PriceSeries s = noisy_instance(rng, truth, 120, 3.0);
  const LpplParams at{1003.0, -41.0, 0.09, 131.0, 0.58, 6.6, 1.1};
  const HessianMatrix h = hessian_of_s(at, s);
  const double scale = h.entries.norm();
  const double q = std::pow(std::numeric_limits<double>::epsilon(), 0.25);
  const double unit[7] = {1, 1, 1, 1, 1, 0.1, 1};
  auto s_at = [&](int i, double di, int j, double dj) {
    auto x = at.to_array();
    x[i] += di;
    x[j] += dj;
    return direct_s(LpplParams::from_array(x), s, 7);
  };
  double worst = 0.0;
  for (int i = 0; i < 7; ++i) {
    const double hi = q * std::max(std::abs(at.to_array()[i]), unit[i]);
    for (int j = 0; j < 7; ++j) {
      const double hj = q * std::max(std::abs(at.to_array()[j]), unit[j]);
      const double fd =
          (s_at(i, hi, j, hj) - s_at(i, hi, j, -hj) - s_at(i, -hi, j, hj) + s_at(i, -hi, j, -hj)) /
          (4.0 * hi * hj);
      if (std::abs(h.entries(i, j)) > 1e-8 * scale) {
        worst = std::max(worst, testing::rel_err(h.entries(i, j), fd));
      }
    }
  }
  INFO("worst relative error " << worst);
  CHECK(worst < 1e-4);
}

TEST_CASE("power-law Hessian covers the free parameters") {
  const LpplParams p{500.0, -20.0, 0.0, 130.0, 0.6, 0.0, 0.0};
  const PriceSeries s = testing::noiseless(p, 0, 120, ModelKind::PowerLaw);
  const HessianMatrix h = hessian_of_s(p, s, ModelKind::PowerLaw);
  CHECK(h.size() == 4);
  CHECK(h.params == free_params(ModelKind::PowerLaw));
}

TEST_CASE("Hessian probes must stay before the singularity") {
  const PriceSeries s(0, std::vector<double>(100, 1.0));
  CHECK(thrown_code([&] { hessian_of_s({1, 1, 0.1, 99.000001, 0.5, 7, 0}, s); }) ==
        ErrorCode::Domain);
}
