#include "gclab/carleman.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/minima.hpp>

#include "gclab/errors.hpp"
#include "gclab/identities.hpp"
#include "gclab/log_sum.hpp"

namespace gclab {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// C-infinity step 0 -> 1 on [0, 1] with its first two derivatives.
struct Step {
  double v, d1, d2;
};

Step smooth_step(double s) {
  if (s <= 0.0) return {0.0, 0.0, 0.0};
  if (s >= 1.0) return {1.0, 0.0, 0.0};
  const double r = 1.0 - s;
  const double a = std::exp(-1.0 / s);
  const double b = std::exp(-1.0 / r);
  const double a1 = a / (s * s);
  const double b1 = -b / (r * r);
  const double a2 = a * (1.0 / std::pow(s, 4) - 2.0 / std::pow(s, 3));
  const double b2 = b * (1.0 / std::pow(r, 4) - 2.0 / std::pow(r, 3));
  const double S = a + b;
  const double S1 = a1 + b1;
  const double num = a1 * b - a * b1;
  const double d1 = num / (S * S);
  const double d2 = (a2 * b - a * b2) / (S * S) - 2.0 * num * S1 / (S * S * S);
  return {a / S, d1, d2};
}

// 1 on |y| <= 1, 0 on |y| >= 2.
Step cutoff(double y) {
  const double ay = std::abs(y);
  const Step s = smooth_step(ay - 1.0);
  const double sg = y < 0 ? -1.0 : 1.0;
  return {1.0 - s.v, -s.d1 * sg, -s.d2};
}

// Gauss-Legendre nodes and weights on [a, b] split into `panels` pieces.
std::vector<std::pair<double, double>> gauss_panels(double a, double b, int panels) {
  using Rule = boost::math::quadrature::gauss<double, 20>;
  std::vector<std::pair<double, double>> out;
  if (!(b > a)) return out;
  const auto& xs = Rule::abscissa();
  const auto& ws = Rule::weights();
  const double width = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * width;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      const double dx = 0.5 * width * xs[k];
      const double w = 0.5 * width * ws[k];
      out.emplace_back(mid + dx, w);
      if (xs[k] != 0.0) out.emplace_back(mid - dx, w);
    }
  }
  return out;
}

// 6th-order centred first derivative of samples v[j], j = 0..n-1, padded by 3 on each side.
double fd6(const std::vector<cplx>& v, std::size_t j, double h, cplx* out) {
  static constexpr double c[4] = {0.0, 3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0};
  cplx acc{};
  for (int k = 1; k <= 3; ++k) acc += c[k] * (v[j + k] - v[j - k]);
  *out = acc / h;
  return 0.0;
}

double sine12(double t) { return std::pow(std::sin(kPi * t), 12); }

}  // namespace

// ---- test functions --------------------------------------------------------------

const std::vector<CarlemanTestFunction>& carleman_test_functions() {
  static const std::vector<CarlemanTestFunction> lib{
      {"bump-1", 5.0, 1.0, 0.0, [](double t) { return cplx(sine12(t)); }},
      {"bump-2", 2.0, 0.8, 0.0,
       [](double t) { return cplx(std::exp(1.0 - 1.0 / (4.0 * t * (1.0 - t)))); }},
      {"bump-3", -3.0, 1.2, 0.0, [](double t) { return cplx(sine12(t) * (1.0 + t)); }},
      {"bump-4", 0.0, 0.9, 1.5,
       [](double t) { return sine12(t) * std::exp(cplx(0.0, 2.0 * kPi * t)); }},
      {"bump-5", 8.0, 1.1, 0.0, [](double t) { return cplx(std::pow(std::sin(2.0 * kPi * t), 12)); }},
  };
  return lib;
}

std::optional<CarlemanTestFunction> carleman_test_function(const std::string& id) {
  if (id == "zero") return std::nullopt;
  for (const auto& f : carleman_test_functions()) {
    if (f.id == id) return f;
  }
  throw PreconditionError("carleman_test_function: unknown test function '" + id + "'");
}

// ---- convexity Carleman ----------------------------------------------------------------

double ConvexityCarlemanCase::effective_mu() const {
  return mu > 0.0 ? mu : gamma * R * R / std::pow(1.0 + eps, 3);
}

CarlemanReport convexity_carleman(const ConvexityCarlemanCase& c) {
  require(c.R >= 4.0, "convexity_carleman: R must be >= 4");
  require(c.eps >= 0.0, "convexity_carleman: eps must be >= 0");
  const double mu = c.effective_mu();
  require(mu > 0.0, "convexity_carleman: mu must be > 0");
  require(c.nt >= 64, "convexity_carleman: nt must be >= 64");
  const auto tf = carleman_test_function(c.test_id);

  CarlemanReport r{};
  r.test_id = c.test_id;
  r.R = c.R;
  r.mu = mu;
  r.eps = c.eps;
  r.nt = c.nt;
  const double R4 = std::pow(c.R, 4);
  const double psi2 = (1.0 + c.eps) * R4 / (8.0 * mu);
  const double phi2 = -2.0;
  r.prefactor = psi2 - R4 / (32.0 * mu) * phi2 * phi2;
  const double exact = c.eps * R4 / (8.0 * mu);
  r.prefactor_exact = weyl::verify_identity("carleman-prefactor").passed &&
                      std::abs(r.prefactor - exact) <= 1e-12 * std::max(exact, 1.0);

  if (!tf) {
    r.log_lhs = r.log_rhs = kNegInf;
    r.lhs = r.rhs = r.ratio = 0.0;
    r.passed = r.resolved = true;
    return r;
  }

  const double w2 = 1.0 / (tf->width * tf->width);
  const double kappa = w2 - mu / (c.R * c.R);
  require(kappa > 0.0, "convexity_carleman: weight grows faster than the test function decays "
                       "(need mu / R^2 < width^-2)");
  // Peak of the weighted profile over phi in [0, 1/4].
  const double x_peak = std::max(std::abs(tf->center * w2 / kappa),
                                 std::abs((tf->center * w2 + mu / (4.0 * c.R)) / kappa));
  const double L = x_peak + std::sqrt(45.0 / kappa) + 1.0;
  const double h_max = kPi / (std::abs(tf->wavenumber) + 16.0 * std::sqrt(std::max(kappa, w2)));
  const std::size_t nx =
      c.nx > 0 ? c.nx
               : std::max<std::size_t>(256, std::bit_ceil(static_cast<std::size_t>(std::ceil(2.0 * L / h_max))));
  const Grid1D grid(nx, L);
  r.nx = nx;
  r.half_width = L;

  const double dt = 1.0 / static_cast<double>(c.nt);
  std::vector<cplx> eta(c.nt + 7);
  for (std::size_t j = 0; j < eta.size(); ++j) {
    const double t = (static_cast<double>(j) - 3.0) * dt;
    eta[j] = (t > 0.0 && t < 1.0) ? tf->envelope(t) : cplx{};
  }

  LogSum lhs;
  LogSum rhs;
  const double hx = grid.spacing();
  std::vector<double> A(nx);
  std::vector<cplx> F(nx);
  for (std::size_t j = 1; j < c.nt; ++j) {
    const double t = static_cast<double>(j) * dt;
    const cplx e = eta[j + 3];
    cplx de;
    fd6(eta, j + 3, dt, &de);
    if (e == cplx{} && de == cplx{}) continue;
    const double phi = t * (1.0 - t);
    const double psi = -(1.0 + c.eps) * R4 / (16.0 * mu) * phi;
    double m = kNegInf;
    for (std::size_t i = 0; i < nx; ++i) {
      const double x = grid.node(i);
      const double q = x / c.R + phi;
      const double y = (x - tf->center) / tf->width;
      A[i] = mu * q * q + psi - y * y;
      m = std::max(m, A[i]);
    }
    for (std::size_t i = 0; i < nx; ++i) {
      F[i] = std::exp(A[i] - m) * std::exp(cplx(0.0, tf->wavenumber * grid.node(i)));
    }
    const WaveField f(grid, F, t);
    r.boundary_ratio = std::max(r.boundary_ratio, f.boundary_ratio());
    r.spectral_tail = std::max(r.spectral_tail, f.spectral_tail_fraction());
    const WaveField fx = spectral_derivative(f, 1);
    const WaveField fxx = spectral_derivative(f, 2);
    double sum_l = 0.0;
    double sum_r = 0.0;
    const double Wxx = 2.0 * mu / (c.R * c.R);
    for (std::size_t i = 0; i < nx; ++i) {
      const double q = grid.node(i) / c.R + phi;
      const double Wx = 2.0 * mu * q / c.R;
      const cplx lg = cplx(0.0, 1.0) * de * F[i] +
                      e * (fxx[i] - 2.0 * Wx * fx[i] + (Wx * Wx - Wxx) * F[i]);
      sum_l += std::norm(F[i]);
      sum_r += std::norm(lg);
    }
    if (e != cplx{} && r.prefactor > 0.0) {
      lhs.add_log(std::log(r.prefactor) + 2.0 * m + std::log(std::norm(e)) + std::log(sum_l * hx * dt));
    }
    if (sum_r > 0.0) rhs.add_log(2.0 * m + std::log(sum_r * hx * dt));
  }
  r.log_lhs = lhs.log();
  r.log_rhs = rhs.log();
  r.lhs = std::exp(r.log_lhs);
  r.rhs = std::exp(r.log_rhs);
  r.ratio = std::exp(r.log_lhs - r.log_rhs);
  r.passed = r.log_lhs <= r.log_rhs + std::log1p(1e-8);
  r.resolved = r.boundary_ratio <= kBoundaryAmplitudeThreshold &&
               r.spectral_tail <= kSpectralTailThreshold;
  return r;
}

// ---- L110 -----------------------------------------------------------------------------

L110Report schrodinger_carleman_l110(const L110Case& c) {
  require(c.R >= 1.0, "schrodinger_carleman_l110: R must be >= 1");
  require(c.radius > 0.0, "schrodinger_carleman_l110: bump radius must be > 0");
  require(c.nx >= 64 && c.nt >= 64, "schrodinger_carleman_l110: need nx, nt >= 64");
  L110Report r{};
  r.test_id = c.test_id;
  r.R = c.R;
  r.alpha = c.alpha > 0.0 ? c.alpha : 8.0 * c.R * c.R;
  require(r.alpha >= 8.0 * c.R * c.R * (1.0 - 1e-12), "schrodinger_carleman_l110: alpha must be >= 8 R^2");
  r.x0 = c.x0 != 0.0 ? c.x0 : c.R + 1.0;
  r.scale = std::pow(r.alpha, 1.5) / (c.R * c.R);
  if (c.test_id == "zero") {
    r.trivial = r.resolved = true;
    return r;
  }
  require(c.test_id == "bump", "schrodinger_carleman_l110: unknown test function '" + c.test_id + "'");

  auto phi = [&](double t) { return c.phi ? c.phi(t) : 0.0; };
  const double rho = c.radius;
  const Grid1D grid(c.nx, 2.0 * rho);
  const double dt = 1.0 / static_cast<double>(c.nt);

  // supp g = [x0 - rho, x0 + rho] x [0, 1]
  for (std::size_t j = 1; j < c.nt; ++j) {
    const double t = static_cast<double>(j) * dt;
    auto check = [&](double x) {
      if (std::abs(x / c.R + phi(t)) < 1.0) {
        throw PreconditionError("schrodinger_carleman_l110: support condition |x/R + phi(t)| >= 1 "
                                "fails at x = " + std::to_string(x) + ", t = " + std::to_string(t) +
                                " (value " + std::to_string(std::abs(x / c.R + phi(t))) + ")");
      }
    };
    check(r.x0 - rho);
    check(r.x0 + rho);
    for (std::size_t i = 0; i < c.nx; ++i) {
      if (std::abs(grid.node(i)) < rho) check(r.x0 + grid.node(i));
    }
  }

  auto Wx_at = [&](double x, double t) { return 2.0 * r.alpha * (x / c.R + phi(t)) / c.R; };
  r.carrier = std::pow(Wx_at(r.x0, 0.5), 2);

  const WaveField b = WaveField::from_function(grid, [&](double y) {
    const double s = y / rho;
    return std::abs(s) < 1.0 ? cplx(std::exp(1.0 - 1.0 / (1.0 - s * s))) : cplx{};
  });
  const WaveField bx = spectral_derivative(b, 1);
  const WaveField bxx = spectral_derivative(b, 2);
  r.resolved = b.spectral_tail_fraction() <= kSpectralTailThreshold;

  const double hx = grid.spacing();
  const double Wxx = 2.0 * r.alpha / (c.R * c.R);
  const cplx I(0.0, 1.0);
  double sum_g = 0.0;
  double sum_l = 0.0;
  for (std::size_t j = 1; j < c.nt; ++j) {
    const double t = static_cast<double>(j) * dt;
    const double s = std::sin(kPi * t);
    const double e = std::pow(s, 12);
    const double de = 12.0 * kPi * std::pow(s, 11) * std::cos(kPi * t);
    const double dphi = c.phi ? (phi(t + 1e-6) - phi(t - 1e-6)) / 2e-6 : 0.0;
    for (std::size_t i = 0; i < c.nx; ++i) {
      const double x = r.x0 + grid.node(i);
      const double q = x / c.R + phi(t);
      const double Wx = 2.0 * r.alpha * q / c.R;
      const double Wt = 2.0 * r.alpha * q * dphi;
      const cplx term = b[i] * (I * de - r.carrier * e) - I * Wt * b[i] * e +
                        e * (bxx[i] - 2.0 * Wx * bx[i] + (Wx * Wx - Wxx) * b[i]);
      sum_g += std::norm(b[i] * e);
      sum_l += std::norm(term);
    }
  }
  r.weighted_g = std::sqrt(sum_g * hx * dt);
  r.weighted_Lg = std::sqrt(sum_l * hx * dt);
  r.constant = r.scale * r.weighted_g / r.weighted_Lg;
  return r;
}

L110Stability l110_stability(const std::vector<double>& radii, double offset) {
  require(!radii.empty(), "l110_stability: empty radius list");
  L110Stability s{};
  s.radii = radii;
  for (double R : radii) {
    L110Case c;
    c.R = R;
    c.x0 = R + offset;
    s.constants.push_back(schrodinger_carleman_l110(c).constant);
  }
  double sum = 0.0;
  for (double k : s.constants) sum += k;
  s.mean = sum / static_cast<double>(s.constants.size());
  for (double k : s.constants) {
    s.max_relative_deviation = std::max(s.max_relative_deviation, std::abs(k / s.mean - 1.0));
  }
  s.stable = s.max_relative_deviation <= 0.2;
  return s;
}

// ---- annulus ------------------------------------------------------------------------------

namespace {

// Quadrature weights for samples at `t` (Simpson when uniform with an even count of intervals).
std::vector<double> time_weights(const std::vector<double>& t) {
  const std::size_t n = t.size();
  std::vector<double> w(n, 0.0);
  const double h = (t.back() - t.front()) / static_cast<double>(n - 1);
  bool uniform = true;
  for (std::size_t k = 1; k < n; ++k) uniform = uniform && std::abs(t[k] - t[k - 1] - h) <= 1e-9 * h;
  if (uniform && (n - 1) % 2 == 0) {
    for (std::size_t k = 0; k < n; ++k) {
      w[k] = h / 3.0 * ((k == 0 || k == n - 1) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0));
    }
    return w;
  }
  for (std::size_t k = 1; k < n; ++k) {
    const double d = 0.5 * (t[k] - t[k - 1]);
    w[k - 1] += d;
    w[k] += d;
  }
  return w;
}

// Local degree-7 Lagrange interpolation of log rho on the grid (rho > 0).
double interp_log(const std::vector<double>& log_rho, const Grid1D& g, double x) {
  const double s = (x + g.half_width()) / g.spacing();
  const auto n = static_cast<std::ptrdiff_t>(g.size());
  std::ptrdiff_t k0 = static_cast<std::ptrdiff_t>(std::floor(s)) - 3;
  k0 = std::clamp<std::ptrdiff_t>(k0, 0, n - 8);
  double acc = 0.0;
  for (std::ptrdiff_t i = k0; i < k0 + 8; ++i) {
    double w = 1.0;
    for (std::ptrdiff_t j = k0; j < k0 + 8; ++j) {
      if (j != i) w *= (s - static_cast<double>(j)) / static_cast<double>(i - j);
    }
    acc += w * log_rho[static_cast<std::size_t>(i)];
  }
  return acc;
}

double interval_integral(const std::vector<double>& log_rho, const Grid1D& g, double a, double b) {
  double acc = 0.0;
  for (const auto& [x, w] : gauss_panels(a, b, 2)) acc += w * std::exp(interp_log(log_rho, g, x));
  return acc;
}

struct PowerFit {
  double p, c, b, d, e, rms;
};

PowerFit fit_with_p(const std::vector<double>& R, const std::vector<double>& y, double p) {
  const auto n = static_cast<Eigen::Index>(R.size());
  Eigen::MatrixXd A(n, 4);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = R[static_cast<std::size_t>(i)];
    A(i, 0) = std::pow(r, p);
    A(i, 1) = r;
    A(i, 2) = std::log(r);
    A(i, 3) = 1.0;
    rhs(i) = y[static_cast<std::size_t>(i)];
  }
  const Eigen::VectorXd x = A.colPivHouseholderQr().solve(rhs);
  const double rms = std::sqrt((A * x - rhs).squaredNorm() / static_cast<double>(n));
  return {p, x(0), x(1), x(2), x(3), rms};
}

}  // namespace

AnnulusScan annulus_lower_bound_scan(const Trajectory& traj, const std::vector<double>& radii) {
  traj.validate();
  const auto t = traj.times();
  require(t.size() >= 3, "annulus_lower_bound_scan: need at least 3 snapshots");
  require(std::abs(t.front()) <= 1e-12 && std::abs(t.back() - 1.0) <= 1e-12,
          "annulus_lower_bound_scan: trajectory must span [0, 1]");
  const Grid1D& g = traj.grid();
  for (double R : radii) {
    require(R >= 1.0 && R <= 0.9 * g.half_width(),
            "annulus_lower_bound_scan: radii must lie in [1, 0.9 L]");
  }

  const auto w = time_weights(t);
  std::vector<double> rho(g.size(), 0.0);
  std::vector<double> mass(g.size(), 0.0);
  for (std::size_t k = 0; k < t.size(); ++k) {
    const WaveField ux = spectral_derivative(traj.fields[k], 1);
    for (std::size_t j = 0; j < g.size(); ++j) {
      const double m = std::norm(traj.fields[k][j]);
      mass[j] += w[k] * m;
      rho[j] += w[k] * (m + std::norm(ux[j]));
    }
  }

  AnnulusScan s{};
  s.radii = radii;
  for (std::size_t j = 0; j < g.size(); ++j) {
    s.total_energy += rho[j] * g.spacing();
    if (std::abs(g.node(j)) < 1.0) s.central_mass += mass[j] * g.spacing();
  }
  if (!(s.central_mass >= 1e-2)) {
    throw PreconditionError("annulus_lower_bound_scan: central mass int int_{|x|<1} |u|^2 = " +
                            std::to_string(s.central_mass) + " is below 1e-2");
  }

  std::vector<double> log_rho(g.size());
  const double floor = std::numeric_limits<double>::min();
  for (std::size_t j = 0; j < g.size(); ++j) log_rho[j] = std::log(std::max(rho[j], floor));

  std::vector<double> fit_r;
  std::vector<double> fit_y;
  for (double R : radii) {
    const double d2 = interval_integral(log_rho, g, R - 1.0, R) +
                      interval_integral(log_rho, g, -R, -R + 1.0);
    const double ld = 0.5 * std::log(d2);
    s.log_delta.push_back(ld);
    const bool ok = d2 > 0.0 && ld >= std::log(1e-300);
    s.used.push_back(ok);
    if (ok) {
      fit_r.push_back(R);
      fit_y.push_back(-ld);
    }
  }
  require(fit_r.size() >= 5, "annulus_lower_bound_scan: fewer than 5 usable radii");

  PowerFit best{0, 0, 0, 0, 0, std::numeric_limits<double>::infinity()};
  for (int k = 0; k <= 1800; ++k) {
    const PowerFit f = fit_with_p(fit_r, fit_y, 1.2 + 1e-3 * k);
    if (f.rms < best.rms) best = f;
  }
  const auto refined = boost::math::tools::brent_find_minima(
      [&](double p) { return fit_with_p(fit_r, fit_y, p).rms; }, best.p - 1e-3, best.p + 1e-3, 40);
  if (refined.second < best.rms) best = fit_with_p(fit_r, fit_y, refined.first);
  s.p = best.p;
  s.c = best.c;
  s.b = best.b;
  s.d = best.d;
  s.e = best.e;
  s.rms_residual = best.rms;
  return s;
}

// ---- Hardy threshold --------------------------------------------------------------------

double hardy_threshold_exponent(double gamma, double eps, double delta, double C) {
  require(gamma > 0.0 && eps >= 0.0 && delta >= 0.0,
          "hardy_threshold_exponent: need gamma > 0, eps >= 0, delta >= 0");
  return gamma / std::pow(1.0 + eps, 3) - std::pow(1.0 + eps, 4) / (4.0 * gamma) - C * delta;
}

ThresholdScan threshold_scan(const std::vector<double>& gammas, double eps_max) {
  require(eps_max >= 0.0, "threshold_scan: eps_max must be >= 0");
  ThresholdScan s;
  constexpr int kGrid = 500;
  for (double g : gammas) {
    auto E = [&](double e) { return hardy_threshold_exponent(g, e, 0.0); };
    int best = 0;
    double best_v = E(0.0);
    for (int k = 1; k <= kGrid; ++k) {
      const double v = E(eps_max * k / kGrid);
      if (v > best_v) {
        best_v = v;
        best = k;
      }
    }
    double arg = eps_max * best / kGrid;
    if (best > 0 && best < kGrid) {
      const auto m = boost::math::tools::brent_find_minima(
          [&](double e) { return -E(e); }, eps_max * (best - 1) / kGrid,
          eps_max * (best + 1) / kGrid, 50);
      if (-m.second > best_v) {
        best_v = -m.second;
        arg = m.first;
      }
    }
    s.rows.push_back({g, best_v, arg});
  }
  for (std::size_t k = 1; k < s.rows.size(); ++k) {
    if ((s.rows[k - 1].sup_E > 0.0) != (s.rows[k].sup_E > 0.0)) {
      ++s.sign_changes;
      if (!s.sign_change_cell) s.sign_change_cell = {s.rows[k - 1].gamma, s.rows[k].gamma};
    }
  }
  s.change_at_half = s.sign_changes == 1 && s.sign_change_cell->first <= 0.5 &&
                     0.5 <= s.sign_change_cell->second;
  return s;
}

// ---- Hardy cutoff pipeline ------------------------------------------------------------------

SpaceTimeSource gaussian_source(double kappa, const Grid1D& grid) {
  require(kappa > 0.0, "gaussian_source: kappa must be > 0");
  SpaceTimeSource s{grid, {}, zero_potential()};
  s.slice = [kappa, grid](double t) {
    std::pair<std::vector<cplx>, std::vector<cplx>> out;
    out.first.resize(grid.size());
    out.second.resize(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
      out.first[j] = gaussian_value(kappa, t, cplx(0.0, 1.0), grid.node(j));
      out.second[j] = gaussian_dx(kappa, t, cplx(0.0, 1.0), grid.node(j));
    }
    return out;
  };
  return s;
}

SpaceTimeSource counterexample_source(const Grid1D& grid) {
  SpaceTimeSource s{grid, {}, zero_potential()};
  s.slice = [grid](double t) {
    std::pair<std::vector<cplx>, std::vector<cplx>> out;
    out.first.resize(grid.size());
    out.second.resize(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
      out.first[j] = counterexample_value(t, grid.node(j));
      out.second[j] = counterexample_dx(t, grid.node(j));
    }
    return out;
  };
  return s;
}

SpaceTimeSource trajectory_source(const Trajectory& traj) {
  traj.validate();
  require(traj.size() >= 4, "trajectory_source: need at least 4 snapshots");
  require(traj.z == cplx(0.0, 1.0), "trajectory_source: the pipeline needs z = i");
  auto times = std::make_shared<std::vector<double>>(traj.times());
  auto u = std::make_shared<std::vector<WaveField>>(traj.fields);
  auto ux = std::make_shared<std::vector<WaveField>>();
  for (const auto& f : traj.fields) ux->push_back(spectral_derivative(f, 1));
  SpaceTimeSource s{traj.grid(), {}, traj.potential};
  s.slice = [times, u, ux](double t) {
    const auto& tt = *times;
    require(t >= tt.front() - 1e-12 && t <= tt.back() + 1e-12, "trajectory_source: time outside the trajectory");
    auto k = static_cast<std::ptrdiff_t>(std::upper_bound(tt.begin(), tt.end(), t) - tt.begin()) - 2;
    k = std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(tt.size()) - 4);
    const std::size_t n = (*u)[0].size();
    std::pair<std::vector<cplx>, std::vector<cplx>> out{std::vector<cplx>(n), std::vector<cplx>(n)};
    for (std::ptrdiff_t i = k; i < k + 4; ++i) {
      double w = 1.0;
      for (std::ptrdiff_t j = k; j < k + 4; ++j) {
        if (j != i) w *= (t - tt[j]) / (tt[i] - tt[j]);
      }
      if (w == 0.0) continue;
      for (std::size_t m = 0; m < n; ++m) {
        out.first[m] += w * (*u)[i][m];
        out.second[m] += w * (*ux)[i][m];
      }
    }
    return out;
  };
  return s;
}

HardyPipelineReport hardy_cutoff_pipeline(const SpaceTimeSource& src, const HardyPipelineCase& c) {
  require(c.R >= 4.0, "hardy_cutoff_pipeline: R must be >= 4");
  require(c.eps > 0.0 && c.gamma > 0.0, "hardy_cutoff_pipeline: need eps > 0, gamma > 0");
  require(c.M > 0.0 && 2.0 * c.M < 0.95 * src.grid.half_width(),
          "hardy_cutoff_pipeline: the cutoff theta(x/M) needs 2M < 0.95 L");
  require(c.panels >= 1, "hardy_cutoff_pipeline: panels must be >= 1");
  const Grid1D& grid = src.grid;

  HardyPipelineReport r{};
  r.R = c.R;
  r.eps = c.eps;
  r.gamma = c.gamma;
  r.M = c.M;
  r.delta = c.delta;
  r.mu = c.gamma * c.R * c.R / std::pow(1.0 + c.eps, 3);
  r.threshold_E = hardy_threshold_exponent(c.gamma, c.eps, c.delta);

  r.apriori_log_sup = kNegInf;
  for (int k = 0; k <= 16; ++k) {
    const double t = k / 16.0;
    const WaveField f(grid, src.slice(t).first, t);
    const auto wi = weighted_square_integral(f, [&](double x) { return c.gamma * x * x; });
    if (wi.divergent) {
      throw PreconditionError("hardy_cutoff_pipeline: sup_t ||exp(gamma x^2) u(t)|| is not finite on "
                              "the grid at t = " + std::to_string(t));
    }
    r.apriori_log_sup = std::max(r.apriori_log_sup, 0.5 * wi.log_value);
  }

  const double R = c.R;
  const double R4 = std::pow(R, 4);
  const double mu = r.mu;
  const double ta = 0.5 * (1.0 - std::sqrt(1.0 - 2.0 / R));  // R t(1-t) = 1/2
  const double tb = 0.5 * (1.0 - std::sqrt(1.0 - 4.0 / R));  // R t(1-t) = 1
  require(c.delta >= 0.0 && 0.5 - c.delta > tb, "hardy_cutoff_pipeline: delta too large for R");

  std::vector<std::pair<double, double>> nodes;
  auto add = [&](double a, double b) {
    auto p = gauss_panels(a, b, c.panels);
    nodes.insert(nodes.end(), p.begin(), p.end());
  };
  if (c.eta_identically_one) {
    add(0.0, tb);
    add(1.0 - tb, 1.0);
  } else {
    add(ta, tb);
    add(1.0 - tb, 1.0 - ta);
  }
  add(tb, 0.5 - c.delta);
  add(0.5 - c.delta, 0.5 + c.delta);
  add(0.5 + c.delta, 1.0 - tb);

  std::vector<Step> theta(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) theta[j] = cutoff(grid.node(j) / c.M);
  const double hx = grid.spacing();
  const cplx I(0.0, 1.0);
  const double pref = c.eps * R4 / (8.0 * mu);

  LogSum lhs_full, lhs_restricted, s1, s2, s2_major, s3, rhs, central;
  auto add_term = [](LogSum& acc, double log_w, cplx v) {
    const double n = std::norm(v);
    if (n > 0.0) acc.add_log(log_w + std::log(n));
  };
  for (const auto& [t, wt] : nodes) {
    const auto [u, ux] = src.slice(t);
    const double phi = t * (1.0 - t);
    const double psi = -(1.0 + c.eps) * R4 / (16.0 * mu) * phi;
    double eta = 1.0;
    double deta = 0.0;
    if (!c.eta_identically_one) {
      const Step st = smooth_step(2.0 * R * phi - 1.0);
      eta = st.v;
      deta = st.d1 * 2.0 * R * (1.0 - 2.0 * t);
    }
    const bool restricted = phi >= 1.0 / R;
    const bool middle = std::abs(t - 0.5) <= c.delta;
    const double lw = std::log(wt * hx);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double x = grid.node(j);
      const double q = x / R + phi;
      const double wmaj = 2.0 * mu * q * q;
      const double W = 2.0 * psi + wmaj;
      const double th = theta[j].v;
      const double thx = theta[j].d1 / c.M;
      const double thxx = theta[j].d2 / (c.M * c.M);
      const cplx g = eta * th * u[j];
      const cplx t1 = -src.potential(x, t) * g;
      const cplx t2 = I * deta * th * u[j];
      const cplx t3 = eta * (thxx * u[j] + 2.0 * thx * ux[j]);
      add_term(lhs_full, lw + W, g);
      if (restricted) add_term(lhs_restricted, lw + W, g);
      add_term(s1, lw + W, t1);
      add_term(s2, lw + W, t2);
      add_term(s2_major, lw + wmaj, t2);
      add_term(s3, lw + W, t3);
      add_term(rhs, lw + W, t1 + t2 + t3);
      if (middle && std::abs(x) <= c.delta * R) add_term(central, lw, u[j]);
    }
  }
  r.log_lhs_full = std::log(pref) + lhs_full.log();
  r.log_lhs_restricted = std::log(pref) + lhs_restricted.log();
  r.log_I = s1.log();
  r.log_II = s2.log();
  r.log_II_majorant = s2_major.log();
  r.log_III = s3.log();
  r.log_rhs = rhs.log();
  r.carleman_holds = r.log_lhs_full <= r.log_rhs + std::log1p(1e-8);
  r.log_central_mass = central.log();
  return r;
}

double power_law_exponent(const std::vector<double>& x, const std::vector<double>& log_y) {
  require(x.size() == log_y.size() && x.size() >= 2, "power_law_exponent: need >= 2 matching points");
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += log_y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (log_y[i] - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

}  // namespace gclab
