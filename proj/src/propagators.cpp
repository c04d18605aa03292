#include "gclab/propagators.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fft.hpp"
#include "gclab/errors.hpp"

namespace gclab {
namespace {

constexpr cplx kI{0.0, 1.0};

double sech2(double x) {
  const double c = std::cosh(x);
  return 1.0 / (c * c);
}

}  // namespace

// ---- potentials ---------------------------------------------------------------

PotentialSpec zero_potential() {
  PotentialSpec v;
  v.id = "zero";
  v.kind = PotentialKind::kZero;
  v.evaluate = [](double, double) { return cplx{}; };
  v.gradient_bound = 0.0;
  return v;
}

PotentialSpec sech2_potential(double amplitude) {
  PotentialSpec v;
  v.id = "sech2";
  v.kind = PotentialKind::kStaticReal;
  v.amplitude = amplitude;
  v.evaluate = [amplitude](double x, double) { return cplx{amplitude * sech2(x)}; };
  v.sup_bound = std::abs(amplitude);
  v.gradient_bound = std::abs(amplitude) * 4.0 / (3.0 * std::sqrt(3.0));
  return v;
}

PotentialSpec complex_sech2_potential(double amplitude) {
  PotentialSpec v;
  v.id = "complex_sech2";
  v.kind = PotentialKind::kStaticComplex;
  v.amplitude = amplitude;
  v.evaluate = [amplitude](double x, double) { return amplitude * cplx{1.0, 0.5} * sech2(x); };
  v.sup_bound = std::abs(amplitude) * std::abs(cplx{1.0, 0.5});
  return v;
}

PotentialSpec pulsed_sech2_potential(double amplitude) {
  PotentialSpec v;
  v.id = "pulsed_sech2";
  v.kind = PotentialKind::kTimeDependent;
  v.amplitude = amplitude;
  v.evaluate = [amplitude](double x, double t) {
    return cplx{amplitude * sech2(x) * std::cos(std::numbers::pi * t)};
  };
  v.sup_bound = std::abs(amplitude);
  return v;
}

PotentialSpec bump_potential(double amplitude, double radius) {
  require(radius > 0.0, "bump_potential: radius must be > 0");
  PotentialSpec v;
  v.id = "bump";
  v.kind = PotentialKind::kStaticReal;
  v.amplitude = amplitude;
  v.evaluate = [amplitude, radius](double x, double) {
    const double y = x / radius;
    if (std::abs(y) >= 1.0) return cplx{};
    return cplx{amplitude * std::exp(1.0 - 1.0 / (1.0 - y * y))};
  };
  v.sup_bound = std::abs(amplitude);
  return v;
}

PotentialSpec potential_by_id(const std::string& id, double amplitude) {
  if (id == "zero") return zero_potential();
  if (id == "sech2") return sech2_potential(amplitude);
  if (id == "complex_sech2") return complex_sech2_potential(amplitude);
  if (id == "pulsed_sech2") return pulsed_sech2_potential(amplitude);
  if (id == "bump") return bump_potential(amplitude, 4.0);
  throw PreconditionError("unknown potential id '" + id + "'");
}

void check_potential_bound(const PotentialSpec& v, const Grid1D& grid,
                           const std::vector<double>& times) {
  for (double t : times) {
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double m = std::abs(v(grid.node(j), t));
      if (m > v.sup_bound * (1.0 + 1e-12) + 1e-300) {
        throw PreconditionError("potential '" + v.id + "' exceeds its sup bound at x=" +
                                std::to_string(grid.node(j)));
      }
    }
  }
}

double potential_tail_norm(const PotentialSpec& v, const Grid1D& grid, double radius, double t0,
                           double t1, int time_samples) {
  require(time_samples >= 2, "potential_tail_norm: need >= 2 time samples");
  if (v.is_zero()) return 0.0;
  const double dt = (t1 - t0) / (time_samples - 1);
  double acc = 0.0;
  for (int k = 0; k < time_samples; ++k) {
    const double t = t0 + k * dt;
    double sup = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double x = grid.node(j);
      if (std::abs(x) > radius) sup = std::max(sup, std::abs(v(x, t)));
    }
    acc += (k == 0 || k == time_samples - 1 ? 0.5 : 1.0) * sup;
  }
  return acc * dt;
}

// ---- trajectories -------------------------------------------------------------------

std::vector<double> Trajectory::times() const {
  std::vector<double> t;
  t.reserve(fields.size());
  for (const auto& f : fields) t.push_back(f.time());
  return t;
}

void Trajectory::validate() const {
  require(!fields.empty(), "Trajectory: no fields");
  require(z.real() >= 0.0, "Trajectory: Re z must be >= 0");
  for (std::size_t k = 1; k < fields.size(); ++k) {
    require(fields[k].grid() == fields[0].grid(), "Trajectory: fields on different grids");
    require(fields[k].time() > fields[k - 1].time(), "Trajectory: times must increase");
  }
}

double Trajectory::boundary_limit() const {
  // Roundoff from repeated transforms random-walks into the boundary nodes.
  double steps = 1.0;
  if (dt > 0.0 && fields.size() > 1) steps = (fields.back().time() - fields.front().time()) / dt;
  return kBoundaryAmplitudeThreshold * std::sqrt(std::max(1.0, steps));
}

bool Trajectory::is_resolved() const {
  const double boundary_limit = this->boundary_limit();
  return std::all_of(fields.begin(), fields.end(), [&](const WaveField& f) {
    return !f.under_resolved() && f.spectral_tail_fraction() <= kSpectralTailThreshold &&
           f.boundary_ratio() <= boundary_limit;
  });
}

Trajectory sample_trajectory(const std::function<WaveField(double)>& field_at, double t0,
                             double t1, std::size_t samples, cplx z, PotentialSpec potential) {
  require(samples >= 1 && t1 > t0, "sample_trajectory: need t1 > t0 and samples >= 1");
  Trajectory traj;
  traj.z = z;
  traj.potential = std::move(potential);
  traj.dt = (t1 - t0) / static_cast<double>(samples);
  for (std::size_t k = 0; k <= samples; ++k) {
    const double t = k == samples ? t1 : t0 + static_cast<double>(k) * traj.dt;
    traj.fields.push_back(field_at(t).with_time(t));
  }
  traj.validate();
  return traj;
}

// ---- propagators ---------------------------------------------------------------------

WaveField free_propagate(const WaveField& f, double t) {
  if (t == 0.0) return f;
  return apply_multiplier(f, [t](double xi) { return std::exp(-kI * xi * xi * t); })
      .with_time(f.time() + t);
}

WaveField heat_regularize(const WaveField& f, double a) {
  require(a >= 0.0, "heat_regularize: a must be >= 0");
  if (a == 0.0) return f;
  return apply_multiplier(f, [a](double xi) { return cplx{std::exp(-a * xi * xi)}; });
}

WaveField airy_propagate(const WaveField& f, double t) {
  if (t == 0.0) return f;
  return apply_multiplier(f, [t](double xi) { return std::exp(kI * xi * xi * xi * t); })
      .with_time(f.time() + t);
}

Trajectory split_step_evolve(const WaveField& f, const PotentialSpec& v, cplx z, double t_final,
                             double dt, std::size_t sample_every) {
  require(z.real() >= 0.0, "split_step_evolve: Re z must be >= 0");
  require(dt > 0.0 && dt <= 1e-2, "split_step_evolve: dt must be in (0, 1e-2]");
  require(t_final > 0.0, "split_step_evolve: t_final must be > 0");
  require(sample_every >= 1, "split_step_evolve: sample_every must be >= 1");

  const auto steps = static_cast<std::size_t>(std::ceil(t_final / dt - 1e-9));
  const double step = t_final / static_cast<double>(steps);
  const Grid1D& grid = f.grid();
  const std::size_t n = grid.size();

  std::vector<cplx> half_kinetic(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double xi = grid.wavenumber(k);
    half_kinetic[k] = std::exp(-z * xi * xi * (0.5 * step)) / static_cast<double>(n);
  }

  Trajectory traj;
  traj.z = z;
  traj.potential = v;
  traj.dt = step;
  traj.fields.push_back(f);

  const double norm0 = f.l2_norm();
  const double t0 = f.time();
  std::vector<cplx> u(f.values());
  std::vector<cplx> spec(n);
  bool under = f.under_resolved();

  auto kinetic = [&] {
    detail::fft_forward(u, spec);
    for (std::size_t k = 0; k < n; ++k) spec[k] *= half_kinetic[k];
    detail::fft_inverse(spec, u);
  };

  for (std::size_t s = 1; s <= steps; ++s) {
    const double t_mid = t0 + (static_cast<double>(s) - 0.5) * step;
    kinetic();
    if (!v.is_zero()) {
      for (std::size_t j = 0; j < n; ++j) u[j] *= std::exp(z * v(grid.node(j), t_mid) * step);
    }
    kinetic();

    const double t = t0 + static_cast<double>(s) * step;
    if (s % sample_every == 0 || s == steps) {
      WaveField snap(grid, u, t);
      const double growth_cap =
          norm0 * std::exp(2.0 * v.sup_bound * std::abs(z) * (t - t0)) * 10.0;
      if (!(snap.l2_norm() <= growth_cap)) {
        throw NumericalError("split_step_evolve: norm growth beyond the potential bound at t=" +
                             std::to_string(t));
      }
      under = under || snap.spectral_tail_fraction() > kSpectralTailThreshold;
      traj.fields.push_back(snap.flagged(under));
    }
  }
  return traj;
}

ConvergenceStudy strang_convergence_order(const WaveField& f, const PotentialSpec& v, cplx z,
                                          double t_final, double dt) {
  auto final_state = [&](double step) {
    const auto steps = static_cast<std::size_t>(std::llround(t_final / step));
    return split_step_evolve(f, v, z, t_final, step, steps).fields.back();
  };
  const WaveField u1 = final_state(dt);
  const WaveField u2 = final_state(dt / 2);
  const WaveField u4 = final_state(dt / 4);
  const WaveField ref = final_state(dt / 16);
  ConvergenceStudy out{};
  out.dt = dt;
  out.error_coarse = (u1 - u2).l2_norm();
  out.error_fine = (u2 - u4).l2_norm();
  out.richardson_order = std::log2(out.error_coarse / out.error_fine);
  out.reference_order = std::log2((u1 - ref).l2_norm() / (u2 - ref).l2_norm());
  return out;
}

// ---- oracles -----------------------------------------------------------------------------

cplx gaussian_value(cplx kappa, double t, cplx z, double x) {
  const cplx s = 1.0 + 4.0 * kappa * z * t;
  return std::exp(-kappa * x * x / s) / std::sqrt(s);
}

cplx gaussian_dx(cplx kappa, double t, cplx z, double x) {
  const cplx s = 1.0 + 4.0 * kappa * z * t;
  return -2.0 * kappa * x / s * gaussian_value(kappa, t, z, x);
}

WaveField oracle_gaussian(cplx kappa, double t, cplx z, const Grid1D& grid) {
  require(kappa.real() > 0.0, "oracle_gaussian: Re kappa must be > 0");
  return WaveField::from_function(grid, [&](double x) { return gaussian_value(kappa, t, z, x); },
                                  t);
}

cplx counterexample_value(double t, double x) {
  const cplx w{t, -1.0};
  return std::exp(kI * x * x / (4.0 * w)) / std::sqrt(w);
}

cplx counterexample_dx(double t, double x) {
  const cplx w{t, -1.0};
  return kI * x / (2.0 * w) * counterexample_value(t, x);
}

WaveField oracle_counterexample(double t, const Grid1D& grid) {
  return WaveField::from_function(grid, [t](double x) { return counterexample_value(t, x); }, t);
}

double counterexample_residual(const Grid1D& grid, double t, double dt) {
  const WaveField plus = oracle_counterexample(t + dt, grid);
  const WaveField minus = oracle_counterexample(t - dt, grid);
  const WaveField lap = spectral_derivative(oracle_counterexample(t, grid), 2);
  std::vector<cplx> r(grid.size());
  for (std::size_t j = 0; j < r.size(); ++j) {
    r[j] = (plus[j] - minus[j]) / (2.0 * dt) - kI * lap[j];
  }
  return WaveField(grid, std::move(r), t).l2_norm();
}

// ---- energy-method weight loss -----------------------------------------------------------

double gaussian_decay_rate(const WaveField& f) {
  const double peak = f.max_abs();
  require(peak > 0.0, "gaussian_decay_rate: zero field");
  Eigen::MatrixXd a(0, 2);
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double x = f.grid().node(j);
    const double m = std::abs(f[j]);
    if (m > 1e-6 * peak) {
      xs.push_back(x * x);
      ys.push_back(std::log(m));
    }
  }
  require(xs.size() >= 3, "gaussian_decay_rate: not enough resolved nodes");
  Eigen::MatrixXd design(static_cast<Eigen::Index>(xs.size()), 2);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    design(static_cast<Eigen::Index>(i), 0) = 1.0;
    design(static_cast<Eigen::Index>(i), 1) = -xs[i];
    rhs(static_cast<Eigen::Index>(i)) = ys[i];
  }
  const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(rhs);
  return coef(1);
}

HeatWeightLoss heat_weight_loss(double kappa, double a, const Grid1D& grid) {
  require(kappa > 0.0 && a >= 0.0, "heat_weight_loss: kappa > 0, a >= 0 required");
  const WaveField input = oracle_gaussian(kappa, 0.0, 1.0, grid);
  const WaveField output = heat_regularize(input, a);
  HeatWeightLoss out{};
  out.input_rate = gaussian_decay_rate(input);
  out.measured_rate = gaussian_decay_rate(output);
  out.predicted_rate = kappa / (1.0 + 4.0 * kappa * a);
  out.relative_error = std::abs(out.measured_rate - out.predicted_rate) / out.predicted_rate;
  return out;
}

double energy_weight_exponent(double gamma, cplx z, double T) {
  const double a = z.real();
  require(a > 0.0, "energy_weight_exponent: Re z must be > 0");
  return gamma * a / (a + 4.0 * gamma * std::norm(z) * T);
}

EnergyWeightCheck energy_weight_check(double kappa, double gamma, cplx z, double T,
                                      const Grid1D& grid, double slack) {
  require(gamma > 0.0 && gamma < kappa, "energy_weight_check: need 0 < gamma < kappa");
  const WaveField u0 = oracle_gaussian(kappa, 0.0, z, grid);
  const WaveField uT =
      apply_multiplier(u0, [&](double xi) { return std::exp(-z * xi * xi * T); }).with_time(T);
  EnergyWeightCheck out{};
  out.h_T = energy_weight_exponent(gamma, z, T);
  out.initial = weighted_l2_norm(u0, GaussianWeight{gamma});
  out.final = weighted_l2_norm(uT, GaussianWeight{out.h_T});
  out.holds = !out.initial.divergent && !out.final.divergent &&
              out.final.log_norm <= out.initial.log_norm + std::log1p(slack);
  return out;
}

}  // namespace gclab
