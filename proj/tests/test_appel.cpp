#include <doctest.h>

#include <cmath>

#include "gclab/appel.hpp"
#include "gclab/errors.hpp"

using namespace gclab;

namespace {

PointSampler free_gauss(cplx z = cplx(0, 1)) {
  return [z](double y, double s) { return gaussian_value(1.0, s, z, y); };
}

}  // namespace

TEST_CASE("time map") {
  AppelParams p{4.0, 6.0};
  CHECK(p.s(0.0) == 0.0);
  CHECK(p.s(1.0) == 1.0);
  double prev = -1.0;
  for (int k = 0; k <= 100; ++k) {
    const double s = p.s(k / 100.0);
    CHECK(s > prev);
    prev = s;
  }
  AppelParams same{3.0, 3.0};
  for (double t : {0.1, 0.5, 0.9}) {
    CHECK(same.s(t) == doctest::Approx(t).epsilon(1e-15));
    CHECK(same.lambda(t) == doctest::Approx(1.0).epsilon(1e-15));
  }
  CHECK_THROWS_AS((AppelParams{0.0, 1.0}.validate()), PreconditionError);
}

TEST_CASE("equal parameters leave the solution unchanged") {
  auto u = free_gauss();
  auto v = appel_sampler(u, AppelParams{5.0, 5.0});
  for (double x : {-2.0, 0.0, 1.3})
    for (double t : {0.2, 0.7}) CHECK(std::abs(v(x, t) - u(x, t)) <= 1e-15);
}

TEST_CASE("transform against the formula") {
  AppelParams p{4.0, 6.0};
  auto v = appel_sampler(free_gauss(), p);
  for (double x : {-3.0, -0.5, 0.0, 2.0}) {
    const double t = 0.4;
    const double D = 4.0 * 0.6 + 6.0 * 0.4;
    const double lam = std::sqrt(24.0) / D;
    const double s = 6.0 * t / D;
    const cplx expect = std::sqrt(lam) * gaussian_value(1.0, s, cplx(0, 1), lam * x) *
                        std::exp((4.0 - 6.0) * x * x / (4.0 * cplx(0, 1) * D));
    CHECK(std::abs(v(x, t) - expect) <= 1e-12);
  }
}

TEST_CASE("transformed field solves the transformed equation") {
  Grid1D g(1024, 30.0);
  CHECK(appel_residual(free_gauss(), zero_potential(), AppelParams{4.0, 6.0}, g) <= 1e-5);
  CHECK(appel_residual(free_gauss(), zero_potential(), AppelParams{6.0, 4.0}, g) <= 1e-5);
}

TEST_CASE("residual on a perturbed trajectory") {
  Grid1D g(1024, 40.0);
  auto f = WaveField::from_function(g, [](double x) { return cplx(std::exp(-x * x)); });
  auto tr = split_step_evolve(f, sech2_potential(0.2), cplx(0, 1), 1.0, 1e-3, 1);
  CHECK(appel_residual(tr, AppelParams{4.0, 6.0}) <= 1e-4);
}

TEST_CASE("mass is preserved for Schrodinger data") {
  AppelParams p{4.0, 6.0};
  Grid1D in(1024, 30.0), out(1024, 30.0);
  auto r = appel_norm_identity(free_gauss(), p, 0.0, 0.5, in, out);
  CHECK(r.relative_error <= 1e-10);
}

TEST_CASE("weighted norm identity") {
  Grid1D in(1024, 30.0), out(1024, 30.0);
  auto r = appel_norm_identity(free_gauss(), AppelParams{4.0, 6.0}, 0.02, 0.5, in, out);
  CHECK_FALSE(r.divergent);
  CHECK(r.relative_error <= 1e-10);
  auto h = appel_norm_identity(free_gauss(cplx(0.1, 1.0)), AppelParams{4.0, 6.0, cplx(0.1, 1.0)}, 0.02, 0.5, in, out);
  CHECK(h.relative_error <= 1e-8);
}

TEST_CASE("transformed potential") {
  AppelParams p{4.0, 6.0};
  auto v = appel_potential(sech2_potential(0.2), p);
  const double t = 0.3;
  const double D = p.D(t);
  CHECK(v(0.5, t).real() == doctest::Approx(24.0 / (D * D) * 0.2 / std::pow(std::cosh(p.lambda(t) * 0.5), 2)));
}
