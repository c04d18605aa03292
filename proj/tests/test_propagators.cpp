#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include <gsl/gsl_sf_airy.h>
#include <gsl/gsl_sf_gamma.h>

#include "gclab/errors.hpp"
#include "gclab/propagators.hpp"

using namespace gclab;

namespace {

const Grid1D kGrid(1024, 30.0);

WaveField gauss(const Grid1D& g) {
  return WaveField::from_function(g, [](double x) { return cplx(std::exp(-x * x)); });
}

}  // namespace

TEST_CASE("free flow of a Gaussian") {
  auto u = free_propagate(gauss(kGrid), 1.0);
  auto ref = WaveField::from_function(kGrid, [](double x) {
    const cplx d(1.0, 4.0);
    return std::pow(d, -0.5) * std::exp(-x * x / d);
  });
  CHECK(relative_l2_error(u, ref) <= 1e-10);
  CHECK(u.time() == 1.0);
  CHECK(free_propagate(gauss(kGrid), 0.0).values() == gauss(kGrid).values());
}

TEST_CASE("free flow carries the counterexample from -1 to 1") {
  Grid1D g(2048, 60.0);
  auto u = free_propagate(oracle_counterexample(-1.0, g), 2.0);
  CHECK(relative_l2_error(u, oracle_counterexample(1.0, g)) <= 1e-8);
}

TEST_CASE("split step without potential matches the oracles") {
  auto tr = split_step_evolve(gauss(kGrid), zero_potential(), cplx(0, 1), 0.1, 1e-3, 100);
  CHECK(relative_l2_error(tr.fields.back(), oracle_gaussian(1.0, 0.1, cplx(0, 1), kGrid)) <= 1e-8);
  auto heat = split_step_evolve(gauss(kGrid), zero_potential(), cplx(0.5, 0), 0.2, 1e-3, 200);
  auto ref = WaveField::from_function(kGrid, [](double x) {
    const double d = 1 + 4 * 0.5 * 0.2;
    return cplx(std::exp(-x * x / d) / std::sqrt(d));
  });
  CHECK(relative_l2_error(heat.fields.back(), ref) <= 1e-8);
}

TEST_CASE("Strang splitting is second order") {
  auto c = strang_convergence_order(gauss(kGrid), sech2_potential(0.5), cplx(0, 1), 0.5, 0.01);
  CHECK(c.richardson_order == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("split step is unitary for real potentials") {
  auto tr = split_step_evolve(gauss(kGrid), sech2_potential(0.3), cplx(0, 1), 1.0, 0.01, 10);
  const double n0 = tr.fields.front().l2_norm();
  for (const auto& f : tr.fields) CHECK(std::abs(f.l2_norm() - n0) <= 1e-8 * n0);
}

TEST_CASE("heat regularisation") {
  auto f = gauss(kGrid);
  CHECK(heat_regularize(f, 0.0).values() == f.values());
  auto h = heat_regularize(f, 0.25);
  auto ref = WaveField::from_function(kGrid, [](double x) { return cplx(std::exp(-x * x / 2) / std::sqrt(2.0)); });
  CHECK(relative_l2_error(h, ref) <= 1e-10);
  auto two = heat_regularize(heat_regularize(f, 0.1), 0.15);
  CHECK(max_abs_difference(two, h) <= 1e-14);
  auto g = WaveField::from_function(kGrid, [](double x) { return cplx(std::exp(-(x - 2) * (x - 2)), 0.0); });
  CHECK(max_abs_difference(heat_regularize(f + g, 0.3), heat_regularize(f, 0.3) + heat_regularize(g, 0.3)) <= 1e-15);
  CHECK(max_abs_difference(free_propagate(heat_regularize(f, 0.2), 0.7), heat_regularize(free_propagate(f, 0.7), 0.2)) <=
        1e-12);
}

TEST_CASE("Airy function against GSL") {
  CHECK(airy_function(0.0) == doctest::Approx(std::pow(3.0, -2.0 / 3.0) / gsl_sf_gamma(2.0 / 3.0)).epsilon(1e-14));
  CHECK(airy_function(0.0) == doctest::Approx(0.3550280539).epsilon(1e-10));
  for (double x : {-15.0, -7.5, -2.0, 0.5, 1.9, 4.0, 9.0}) {
    const double ref = gsl_sf_airy_Ai(x, GSL_PREC_DOUBLE);
    CHECK(std::abs(airy_function(x) - ref) <= 1e-9 * std::max(1.0, std::abs(ref)) + 1e-12 * std::abs(ref));
  }
  auto fit = airy_decay_fit();
  CHECK(fit.coefficient_x32 == doctest::Approx(2.0 / 3.0).epsilon(0.03));
}

TEST_CASE("Airy flow forward then back") {
  Grid1D g(512, 20.0);
  auto f = gauss(g);
  auto back = airy_propagate(airy_propagate(f, 0.3), -0.3);
  CHECK(max_abs_difference(back, f) <= 1e-12);
}

TEST_CASE("counterexample modulus and residual") {
  for (double x : {-6.0, -1.0, 0.0, 2.5, 7.0}) {
    CHECK(std::abs(std::abs(counterexample_value(0.0, x)) - std::exp(-x * x / 4)) <= 1e-12);
    CHECK(std::abs(std::norm(counterexample_value(1.0, x)) - std::exp(-x * x / 4) / std::sqrt(2.0)) <= 1e-12);
  }
  CHECK(counterexample_residual(Grid1D(1024, 40.0), 0.3, 1e-4) <= 1e-6);
}

TEST_CASE("potentials") {
  auto v = sech2_potential(0.2);
  CHECK(v(0.0, 0.0) == cplx(0.2));
  CHECK(v.sup_bound == 0.2);
  CHECK(pulsed_sech2_potential(1.0)(0.0, 1.0).real() == doctest::Approx(-1.0));
  CHECK(complex_sech2_potential(1.0)(0.0, 0.0) == cplx(1.0, 0.5));
  CHECK(bump_potential(1.0, 2.0)(2.5, 0.0) == cplx(0.0));
  CHECK_THROWS_AS(potential_by_id("nope", 1.0), PreconditionError);
  Grid1D g(256, 20.0);
  double prev = 1e300;
  for (double R : {1.0, 2.0, 4.0, 8.0}) {
    const double t = potential_tail_norm(v, g, R);
    CHECK(t <= prev);
    prev = t;
  }
}

TEST_CASE("trajectory save and load") {
  auto tr = split_step_evolve(gauss(Grid1D(128, 10.0)), sech2_potential(0.1), cplx(0, 1), 0.05, 0.01);
  const auto dir = (std::filesystem::temp_directory_path() / "gclab_traj_roundtrip").string();
  std::filesystem::remove_all(dir);
  save_trajectory(tr, dir);
  auto back = load_trajectory(dir);
  REQUIRE(back.size() == tr.size());
  CHECK(back.times() == tr.times());
  CHECK(back.potential.id == "sech2");
  for (std::size_t k = 0; k < tr.size(); ++k) CHECK(back.fields[k].values() == tr.fields[k].values());
  std::filesystem::remove_all(dir);
}

TEST_CASE("trajectory validation") {
  Grid1D g(64, 5.0);
  Trajectory bad;
  bad.fields = {WaveField::zeros(g, 0.5), WaveField::zeros(g, 0.2)};
  CHECK_THROWS_AS(bad.validate(), PreconditionError);
  Trajectory back_heat;
  back_heat.fields = {WaveField::zeros(g, 0.0), WaveField::zeros(g, 0.1)};
  back_heat.z = cplx(-1.0, 0.0);
  CHECK_THROWS_AS(back_heat.validate(), PreconditionError);
}

TEST_CASE("heat weight loss and energy weight") {
  auto h = heat_weight_loss(1.0, 0.25, Grid1D(1024, 30.0));
  CHECK(h.predicted_rate == doctest::Approx(0.5));
  CHECK(h.relative_error <= 1e-6);
  CHECK(energy_weight_exponent(0.1, cplx(1.0, 0.0), 0.0) == doctest::Approx(0.1));
  auto e = energy_weight_check(1.0, 0.1, cplx(0.1, 1.0), 1.0, Grid1D(1024, 30.0));
  CHECK(e.holds);
}
