#include <doctest.h>

#include <cmath>

#include "gclab/carleman.hpp"
#include "gclab/errors.hpp"

using namespace gclab;

TEST_CASE("test-function library") {
  CHECK(carleman_test_functions().size() == 5);
  CHECK_FALSE(carleman_test_function("zero").has_value());
  CHECK_THROWS_AS(carleman_test_function("bump-9"), PreconditionError);
  for (const auto& g : carleman_test_functions()) {
    CHECK(std::abs(g.envelope(0.0)) == 0.0);
    CHECK(std::abs(g.envelope(1.0)) <= 1e-12);
    CHECK(std::abs(g.envelope(0.5)) > 0.0);
  }
}

TEST_CASE("zero test function passes trivially") {
  ConvexityCarlemanCase c;
  c.test_id = "zero";
  auto r = convexity_carleman(c);
  CHECK(r.passed);
  CHECK(r.lhs == 0.0);
}

TEST_CASE("convexity Carleman estimate on a bump") {
  ConvexityCarlemanCase c;
  c.test_id = "bump-1";
  c.R = 8.0;
  c.eps = 0.1;
  c.gamma = 0.6;
  auto r = convexity_carleman(c);
  CHECK(r.mu == doctest::Approx(0.6 * 64 / std::pow(1.1, 3)));
  CHECK(r.prefactor_exact);
  CHECK(r.prefactor == doctest::Approx(0.1 * std::pow(8.0, 4) / (8 * r.mu)).epsilon(1e-12));
  CHECK(r.resolved);
  CHECK(r.passed);
  CHECK(r.lhs >= 0.0);
  CHECK(r.ratio <= 1.0 + 1e-8);
}

TEST_CASE("convexity Carleman validates radius") {
  ConvexityCarlemanCase c;
  c.R = 2.0;
  CHECK_THROWS_AS(convexity_carleman(c), PreconditionError);
}

TEST_CASE("second weighted estimate") {
  L110Case z;
  z.test_id = "zero";
  CHECK(schrodinger_carleman_l110(z).trivial);

  L110Case c;
  c.R = 8.0;
  auto r = schrodinger_carleman_l110(c);
  CHECK(r.alpha == 512.0);
  CHECK(r.x0 == 9.0);
  CHECK(r.constant > 0.0);
  CHECK(std::isfinite(r.constant));

  L110Case bad;
  bad.R = 8.0;
  bad.x0 = 4.0;
  CHECK_THROWS_WITH_AS(schrodinger_carleman_l110(bad), doctest::Contains("fails at x ="), PreconditionError);
  L110Case weak;
  weak.R = 8.0;
  weak.alpha = 100.0;
  CHECK_THROWS_AS(schrodinger_carleman_l110(weak), PreconditionError);

  auto st = l110_stability({8.0, 16.0});
  CHECK(st.stable);
  CHECK(st.max_relative_deviation <= 0.2);
}

TEST_CASE("annulus lower bound exponent") {
  Grid1D g(512, 30.0);
  auto tr = sample_trajectory([&](double t) { return oracle_gaussian(1.0, t, cplx(0, 1), g); }, 0.0, 1.0, 200);
  std::vector<double> radii;
  for (double R = 4.0; R <= 12.0 + 1e-9; R += 0.5) radii.push_back(R);
  auto a = annulus_lower_bound_scan(tr, radii);
  CHECK(a.p == doctest::Approx(2.0).epsilon(0.05));

  Grid1D g2(1024, 30.0);
  auto tr2 = sample_trajectory([&](double t) { return oracle_gaussian(1.0, t, cplx(0, 1), g2); }, 0.0, 1.0, 200);
  CHECK(std::abs(annulus_lower_bound_scan(tr2, radii).p - a.p) <= 0.05);

  auto zero = sample_trajectory([&](double t) { return WaveField::zeros(g, t); }, 0.0, 1.0, 20);
  CHECK_THROWS_AS(annulus_lower_bound_scan(zero, radii), PreconditionError);
}

TEST_CASE("threshold exponent") {
  CHECK(hardy_threshold_exponent(0.5, 0.0, 0.0) == 0.0);
  CHECK(hardy_threshold_exponent(0.4, 0.0, 0.0) < 0.0);
  CHECK(hardy_threshold_exponent(0.6, 0.0, 0.0) > 0.0);
  std::vector<double> gammas;
  for (int k = 0; k <= 400; ++k) gammas.push_back(0.3 + k * 1e-3);
  auto s = threshold_scan(gammas);
  CHECK(s.sign_changes == 1);
  CHECK(s.change_at_half);
  REQUIRE(s.sign_change_cell.has_value());
  CHECK(s.sign_change_cell->first <= 0.5);
  CHECK(s.sign_change_cell->second >= 0.5);
}

TEST_CASE("cutoff pipeline") {
  Grid1D g(2048, 100.0);
  auto src = gaussian_source(0.25, g);
  HardyPipelineCase c;
  c.R = 8.0;
  c.M = 20.0;
  auto r = hardy_cutoff_pipeline(src, c);
  CHECK(r.carleman_holds);
  CHECK(std::isfinite(r.log_III));
  CHECK(r.log_II_majorant >= r.log_II);
  c.eta_identically_one = true;
  auto one = hardy_cutoff_pipeline(src, c);
  CHECK(std::isinf(one.log_II));
  CHECK(one.log_II < 0);
  c.M = 60.0;
  CHECK_THROWS_AS(hardy_cutoff_pipeline(src, c), PreconditionError);
}

TEST_CASE("power law fit") {
  std::vector<double> x{1, 2, 4, 8}, ly;
  for (double v : x) ly.push_back(std::log(3.0) + 1.5 * std::log(v));
  CHECK(power_law_exponent(x, ly) == doctest::Approx(1.5).epsilon(1e-12));
}
