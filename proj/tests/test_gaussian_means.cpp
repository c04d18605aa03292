#include <doctest.h>

#include <cmath>

#include "gclab/errors.hpp"
#include "gclab/gaussian_means.hpp"

using namespace gclab;

namespace {

Trajectory free_gaussian(std::size_t K, std::size_t n = 1024, double L = 40.0) {
  Grid1D g(n, L);
  return sample_trajectory([&](double t) { return oracle_gaussian(1.0, t, cplx(0, 1), g); }, 0.0, 1.0, K);
}

Trajectory still(const WaveField& f, std::size_t K) {
  return sample_trajectory([&](double t) { return f.with_time(t); }, 0.0, 1.0, K);
}

}  // namespace

TEST_CASE("zero field gives a trivial trace") {
  auto tr = trace_H(still(WaveField::zeros(Grid1D(64, 5.0)), 20), GaussianWeight{0.1});
  CHECK(tr.trivial);
}

TEST_CASE("constant field has flat log H") {
  Grid1D g(256, 20.0);
  auto f = WaveField::from_function(g, [](double x) { return cplx(std::exp(-x * x)); });
  auto tr = trace_H(still(f, 32), GaussianWeight{0.05});
  for (std::size_t k = 1; k + 1 < tr.size(); ++k) CHECK(std::abs(tr.second_diff[k]) <= 1e-14);
}

TEST_CASE("trace requires enough samples") {
  CHECK_THROWS_AS(trace_H(free_gaussian(8, 256, 20.0), GaussianWeight{0.05}), PreconditionError);
}

TEST_CASE("free Gaussian is log-convex and N is nondecreasing") {
  auto tr = trace_H(free_gaussian(100), GaussianWeight{0.05});
  auto c = check_log_convexity(tr, 1e-5);
  CHECK(c.passed);
  CHECK(c.min_curvature >= -1e-5);
  CHECK(c.max_interpolation_excess <= 1e-6);
  for (std::size_t k = 2; k + 1 < tr.size(); ++k) CHECK(tr.frequency[k] >= tr.frequency[k - 1] - 1e-4);
}

TEST_CASE("perturbed convexity excess shrinks with the amplitude") {
  Grid1D g(512, 16.0);
  auto f = oracle_gaussian(0.25, 0.0, cplx(0, 1), g);
  const double gamma = 0.02;
  double prev = 1e300;
  for (double amp : {0.2, 0.1, 0.05}) {
    auto v = sech2_potential(amp);
    auto tr = split_step_evolve(f, v, cplx(0, 1), 1.0, 1e-3, 10);
    auto rep = theorem1_interpolation(tr, 1.0 / std::sqrt(gamma), 1.0 / std::sqrt(gamma), 0.5);
    REQUIRE(rep.finite);
    CHECK(rep.log_excess < prev);
    prev = rep.log_excess;
    CHECK(check_log_convexity(trace_H(tr, GaussianWeight{gamma}), 1e-5, amp + amp * amp).passed);
  }
  CHECK(prev <= 1e-4);
}

TEST_CASE("interpolation report") {
  auto tr = free_gaussian(100);
  auto r = theorem1_interpolation(tr, 6.0, 4.0, 0.5);
  CHECK(r.finite);
  CHECK(r.exponents_sum_exactly_one);
  CHECK(r.exponent_0 == doctest::Approx(0.4));
  CHECK(r.log_excess <= 1e-6);
  CHECK_THROWS_AS(theorem1_interpolation(tr, 6.0, 4.0, 0.0), PreconditionError);
  double prev = 1e300;
  for (double s : {0.2, 0.1, 0.05, 0.01}) {
    auto e = theorem1_interpolation(tr, 6.0, 4.0, s);
    CHECK(e.exponent_1 < 2 * s);
    CHECK(std::abs(e.log_excess) < prev);
    prev = std::abs(e.log_excess);
  }
  CHECK(theorem1_interpolation(tr, 3.0, 7.0, 0.37).exponents_sum_exactly_one);
}

TEST_CASE("smoothing functional") {
  auto z = smoothing_functional(still(WaveField::zeros(Grid1D(64, 5.0)), 64), GaussianWeight{0.05});
  CHECK(z.value == 0.0);
  auto a = smoothing_functional(free_gaussian(100), GaussianWeight{0.05});
  auto b = smoothing_functional(free_gaussian(200), GaussianWeight{0.05});
  CHECK(std::isfinite(a.value));
  CHECK(std::abs(a.value - b.value) <= 1e-4 * b.value);
}

TEST_CASE("linear weight interior bound") {
  auto tr = free_gaussian(100);
  CHECK(linear_weight_interior_bound(tr, 0.0).constant == doctest::Approx(0.5).epsilon(1e-12));
  for (double lam : {0.5, 1.0, 2.0}) CHECK(linear_weight_interior_bound(tr, lam).constant <= 10.0);
  const double c1 = linear_weight_interior_bound(tr, 1.0).constant;
  const double c2 = linear_weight_interior_bound(free_gaussian(200), 1.0).constant;
  CHECK(std::abs(c1 - c2) <= 1e-4 * c2);
}

TEST_CASE("subexponential persistence") {
  auto z = subexponential_persistence(still(WaveField::zeros(Grid1D(64, 5.0)), 20), 0.1, 1.5);
  CHECK(z.sup_value == 0.0);
  auto p = subexponential_persistence(free_gaussian(100, 2048, 20.0), 0.1, 1.5);
  CHECK_FALSE(p.divergent);
  CHECK(std::isfinite(p.sup_value));
  auto q = subexponential_persistence(free_gaussian(100, 4096, 20.0), 0.1, 1.5);
  CHECK(std::abs(p.sup_value - q.sup_value) <= 1e-4 * q.sup_value);
  // the sup sits at the last interior sample, next to t = 1
  auto r = subexponential_persistence(free_gaussian(200, 2048, 20.0), 0.1, 1.5);
  CHECK(std::abs(p.sup_value - r.sup_value) <= 0.05 * r.sup_value);
  // b = a/4 = 2 beats the rate 2 |u|^2 ~ exp(-2 x^2 / (1 + 16 t^2)) at t = 0
  CHECK(subexponential_persistence(free_gaussian(100), 8.0, 2.0).divergent);
}

TEST_CASE("misleading ODE") {
  auto even = misleading_ode_solve(4.0, OdeBoundary::kEvenAtOrigin);
  REQUIRE(!even.a.empty());
  CHECK(even.slope_at_origin == 0.0);
  CHECK(even.min_a > 0.0);
  CHECK(even.evenness_deviation <= 1e-8);
  CHECK(even.residual_max <= 1e-4);
  for (const auto& s : even.scaled) CHECK(s.residual <= 1e-3);
}

TEST_CASE("counterexample demonstration") {
  auto r = counterexample_demo(1.0, {10.0, 20.0, 40.0}, 1.0 / 9.0);
  CHECK(r.left_increasing);
  CHECK(r.growth_matches);
  CHECK(r.modulus_deviation <= 1e-12);
  CHECK(r.right_converged);
  CHECK(r.violated);
}
