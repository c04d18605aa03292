#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <vector>

#include "gclab/errors.hpp"
#include "gclab/grid_field.hpp"
#include "gclab/log_sum.hpp"

using namespace gclab;
using std::numbers::pi;

namespace {

WaveField gaussian(const Grid1D& g, double kappa) {
  return WaveField::from_function(g, [kappa](double x) { return cplx(std::exp(-kappa * x * x)); });
}

double rel_l2(const WaveField& f, const std::function<cplx(double)>& exact) {
  return relative_l2_error(f, WaveField::from_function(f.grid(), exact));
}

}  // namespace

TEST_CASE("grid nodes and wavenumbers") {
  Grid1D g(64, 4.0);
  CHECK(g.spacing() == doctest::Approx(0.125));
  CHECK(g.node(0) == -4.0);
  CHECK(g.node(32) == doctest::Approx(0.0));
  CHECK(g.wavenumber(1) == doctest::Approx(pi / 4.0));
  CHECK(g.wavenumber(63) == doctest::Approx(-pi / 4.0));
  CHECK(g.wavenumber(32) == doctest::Approx(-32 * pi / 4.0));
  CHECK_THROWS_AS(Grid1D(8, 1.0), PreconditionError);
  CHECK_THROWS_AS(Grid1D(100, 1.0), PreconditionError);
  CHECK_THROWS_AS(Grid1D(64, 0.0), PreconditionError);
}

TEST_CASE("non-finite samples are rejected") {
  Grid1D g(16, 1.0);
  std::vector<cplx> s(16, cplx(1.0));
  s[3] = cplx(NAN, 0.0);
  CHECK_THROWS_AS(WaveField(g, s), PreconditionError);
}

TEST_CASE("spectral derivative of sin is exact") {
  Grid1D g(64, 3.0 * pi);
  auto f = WaveField::from_function(g, [](double x) { return cplx(std::sin(x)); });
  auto d = spectral_derivative(f, 1);
  CHECK(max_abs_difference(d, WaveField::from_function(g, [](double x) { return cplx(std::cos(x)); })) <= 1e-12);
}

TEST_CASE("second derivative of a Gaussian") {
  Grid1D g(1024, 20.0);
  auto d2 = spectral_derivative(gaussian(g, 1.0), 2);
  CHECK(rel_l2(d2, [](double x) { return cplx((4 * x * x - 2) * std::exp(-x * x)); }) <= 1e-10);
  auto d11 = spectral_derivative(spectral_derivative(gaussian(g, 1.0), 1), 1);
  CHECK(relative_l2_error(d11, d2) <= 1e-10);
}

TEST_CASE("derivative of a constant vanishes") {
  Grid1D g(32, 2.0);
  auto one = WaveField::from_function(g, [](double) { return cplx(1.0); });
  CHECK(spectral_derivative(one, 1).max_abs() <= 1e-14);
}

TEST_CASE("Parseval with the documented normalisation") {
  Grid1D g(256, 10.0);
  auto f = WaveField::from_function(g, [](double x) { return std::exp(-0.3 * x * x) * cplx(std::cos(2 * x), x); });
  const double n2 = f.l2_norm() * f.l2_norm();
  CHECK(std::abs(spectral_energy(f) - n2) <= 1e-12 * n2);
}

TEST_CASE("Gaussian-weighted norm against the closed form") {
  Grid1D g(1024, 20.0);
  auto n = weighted_l2_norm(gaussian(g, 1.0), GaussianWeight{0.05});
  CHECK_FALSE(n.divergent);
  // int exp(2 gamma x^2 - 2 x^2) dx
  CHECK(n.value() == doctest::Approx(std::sqrt(std::sqrt(pi / 1.9))).epsilon(1e-12));
  auto plain = weighted_l2_norm(gaussian(g, 1.0), GaussianWeight{0.0});
  CHECK(plain.value() == doctest::Approx(gaussian(g, 1.0).l2_norm()).epsilon(1e-14));
}

TEST_CASE("weight stronger than the decay is flagged divergent") {
  Grid1D g(1024, 20.0);
  auto f = WaveField::from_function(g, [](double x) { return cplx(std::pow(2.0, -0.25) * std::exp(-x * x / 8.0)); });
  CHECK(weighted_l2_norm(f, GaussianWeight{0.2}).divergent);
  CHECK_FALSE(weighted_l2_norm(f, GaussianWeight{0.05}).divergent);
}

TEST_CASE("weighted norm of the zero field is -inf") {
  Grid1D g(64, 5.0);
  auto n = weighted_l2_norm(WaveField::zeros(g), GaussianWeight{0.1});
  CHECK(std::isinf(n.log_norm));
  CHECK(n.log_norm < 0);
  CHECK(n.value() == 0.0);
}

TEST_CASE("truncated weight increases to the Gaussian weight") {
  Grid1D g(1024, 20.0);
  auto f = gaussian(g, 1.0);
  const double full = weighted_l2_norm(f, GaussianWeight{0.3}).log_norm;
  double prev = -1e300;
  for (double R : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    const double v = weighted_l2_norm(f, TruncatedWeight{0.3, R}).log_norm;
    CHECK(v >= prev);
    CHECK(v <= full + 1e-14);
    prev = v;
  }
  CHECK(prev == doctest::Approx(full).epsilon(1e-12));
  CHECK(weight_exponent(TruncatedWeight{0.3, 2.0}, 5.0, 0.0) == weight_exponent(TruncatedWeight{0.3, 2.0}, 7.0, 0.0));
}

TEST_CASE("weight validation") {
  CHECK_THROWS_AS(validate_weight(GaussianWeight{-0.1}), PreconditionError);
  CHECK_THROWS_AS(validate_weight(MixedWeight{0.0, 1.0}), PreconditionError);
  CHECK_THROWS_AS(validate_weight(SubquadraticWeight{0.1, 1.5, 1.0}), PreconditionError);
  CHECK_THROWS_AS(validate_weight(SubquadraticWeight{0.1, 0.5, 0.0}), PreconditionError);
  CHECK_NOTHROW(validate_weight(SubquadraticWeight{0.1, 0.5, 1.0}));
}

TEST_CASE("log-domain sum does not overflow") {
  LogSum s;
  s.add_log(800.0);
  s.add_log(800.0);
  s.add_log(-1e6);
  CHECK(s.log() == doctest::Approx(800.0 + std::log(2.0)).epsilon(1e-15));
  LogSum e;
  CHECK(e.empty());
  CHECK(std::isinf(e.log()));
}

TEST_CASE("Gaussian averaging identity") {
  const std::vector<double> x0{0.0, 2.0};
  auto r = lambda_average_identity_check(0.25, x0);
  CHECK(r.converged);
  CHECK(r.relative_errors[0] <= 1e-10);
  CHECK(r.relative_errors[1] <= 1e-10);
  const std::vector<double> x1{1.0};
  auto q = lambda_average_identity_check(0.5, x1);
  CHECK(q.max_relative_error <= 1e-10);
}

TEST_CASE("spectral interpolant reproduces band-limited data off the nodes") {
  Grid1D g(128, 2.0 * pi);
  auto f = WaveField::from_function(g, [](double x) { return cplx(std::cos(3 * x), std::sin(x)); });
  SpectralInterpolant p(f);
  for (double x : {-5.1, -0.3, 0.77, 4.9}) {
    CHECK(std::abs(p(x) - cplx(std::cos(3 * x), std::sin(x))) <= 1e-12);
  }
}

TEST_CASE("binary field round trip is bitwise") {
  Grid1D g(64, 7.5);
  auto f = WaveField::from_function(g, [](double x) { return cplx(std::exp(-x * x), 1.0 / (1 + x * x)); }, 0.375);
  const auto path = (std::filesystem::temp_directory_path() / "gclab_field_roundtrip.bin").string();
  write_field_binary(f, path);
  auto back = read_field_binary(path);
  CHECK(back.grid() == g);
  CHECK(back.time() == 0.375);
  CHECK(back.values() == f.values());
  std::filesystem::remove(path);
}

TEST_CASE("spectral tail and boundary diagnostics") {
  Grid1D g(256, 20.0);
  auto smooth = gaussian(g, 1.0);
  CHECK(smooth.is_resolved());
  CHECK(smooth.spectral_tail_fraction() <= 1e-10);
  auto wide = gaussian(g, 1e-3);
  CHECK(wide.boundary_ratio() > 1e-14);
  CHECK_FALSE(wide.is_resolved());
}
