#include "gclab/appel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "gclab/errors.hpp"

namespace gclab {

void AppelParams::validate() const {
  require(alpha > 0.0 && beta > 0.0, "AppelParams: alpha, beta must be > 0");
  require(z != cplx{} && z.real() >= 0.0, "AppelParams: z must be nonzero with Re z >= 0");
}

double AppelParams::lambda(double t) const { return std::sqrt(alpha * beta) / D(t); }

double AppelParams::max_lambda(double t0, double t1) const {
  return std::max(lambda(t0), lambda(t1));  // D is affine, so lambda peaks at an endpoint
}

PointSampler interpolating_sampler(std::function<WaveField(double)> field_at) {
  struct Cache {
    double s = std::numeric_limits<double>::quiet_NaN();
    std::unique_ptr<SpectralInterpolant> interp;
  };
  auto cache = std::make_shared<Cache>();
  return [field_at = std::move(field_at), cache](double y, double s) {
    if (!(cache->s == s)) {
      cache->interp = std::make_unique<SpectralInterpolant>(field_at(s));
      cache->s = s;
    }
    return (*cache->interp)(y);
  };
}

PointSampler trajectory_sampler(const Trajectory& traj) {
  traj.validate();
  require(traj.size() >= 4, "trajectory_sampler: need at least 4 snapshots");
  auto times = std::make_shared<std::vector<double>>(traj.times());
  auto interps = std::make_shared<std::vector<SpectralInterpolant>>();
  for (const auto& f : traj.fields) interps->emplace_back(f);
  return [times, interps](double y, double s) {
    const auto& t = *times;
    require(s >= t.front() - 1e-12 && s <= t.back() + 1e-12,
            "trajectory_sampler: time outside the trajectory");
    auto it = std::upper_bound(t.begin(), t.end(), s);
    auto k = static_cast<std::ptrdiff_t>(it - t.begin()) - 2;
    k = std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(t.size()) - 4);
    cplx acc{};
    for (std::ptrdiff_t i = k; i < k + 4; ++i) {
      double w = 1.0;
      for (std::ptrdiff_t j = k; j < k + 4; ++j) {
        if (j != i) w *= (s - t[j]) / (t[i] - t[j]);
      }
      if (w != 0.0) acc += w * (*interps)[i](y);
    }
    return acc;
  };
}

PointSampler appel_sampler(PointSampler u, const AppelParams& p) {
  p.validate();
  return [u = std::move(u), p](double x, double t) {
    const double d = p.D(t);
    const double lam = p.lambda(t);
    return std::sqrt(lam) * u(lam * x, p.s(t)) *
           std::exp((p.alpha - p.beta) * x * x / (4.0 * p.z * d));
  };
}

WaveField appel_transform(const PointSampler& u, const AppelParams& p, double t,
                          const Grid1D& grid) {
  const PointSampler tu = appel_sampler(u, p);
  return WaveField::from_function(grid, [&](double x) { return tu(x, t); }, t);
}

PotentialSpec appel_potential(const PotentialSpec& v, const AppelParams& p) {
  p.validate();
  PotentialSpec out;
  out.id = v.id;
  out.amplitude = v.amplitude;
  out.kind = v.is_zero() ? PotentialKind::kZero
             : p.alpha == p.beta ? v.kind
                                 : PotentialKind::kTimeDependent;
  out.evaluate = [v, p](double x, double t) {
    const double d = p.D(t);
    return p.alpha * p.beta / (d * d) * v(p.lambda(t) * x, p.s(t));
  };
  const double factor = std::max(p.alpha / p.beta, p.beta / p.alpha);
  out.sup_bound = factor * v.sup_bound;

  // alpha beta / D(t)^2 is monotone in t, so the endpoints carry its maximum.
  double worst = 0.0;
  for (int k = 0; k <= 64; ++k) {
    const double t = k / 64.0;
    worst = std::max(worst, p.alpha * p.beta / (p.D(t) * p.D(t)));
  }
  if (worst > factor * (1.0 + 1e-14)) {
    throw NumericalError("appel_potential: scalar factor exceeds max(alpha/beta, beta/alpha)");
  }
  return out;
}

PointSampler appel_source(PointSampler f, const AppelParams& p) {
  p.validate();
  return [f = std::move(f), p](double x, double t) {
    const double d = p.D(t);
    const double lam = p.lambda(t);
    return std::pow(lam, 2.5) * f(lam * x, p.s(t)) *
           std::exp((p.alpha - p.beta) * x * x / (4.0 * p.z * d));
  };
}

namespace {

double residual_impl(const PointSampler& u, const PotentialSpec& v, const AppelParams& p,
                     const Grid1D& grid, const std::vector<double>& probes, double dt,
                     double boundary_limit) {
  const PointSampler tu = appel_sampler(u, p);
  const PotentialSpec tv = appel_potential(v, p);
  double worst = 0.0;
  for (double t : probes) {
    require(t - dt >= 0.0 && t + dt <= 1.0, "appel_residual: probes must be interior");
    const WaveField mid = WaveField::from_function(grid, [&](double x) { return tu(x, t); }, t);
    if (mid.boundary_ratio() > boundary_limit ||
        mid.spectral_tail_fraction() > kSpectralTailThreshold) {
      throw PreconditionError("appel_residual: transformed field is under-resolved at t=" +
                              std::to_string(t));
    }
    const WaveField plus = WaveField::from_function(grid, [&](double x) { return tu(x, t + dt); });
    const WaveField minus = WaveField::from_function(grid, [&](double x) { return tu(x, t - dt); });
    const WaveField lap = spectral_derivative(mid, 2);
    std::vector<cplx> r(grid.size());
    for (std::size_t j = 0; j < r.size(); ++j) {
      const double x = grid.node(j);
      r[j] = (plus[j] - minus[j]) / (2.0 * dt) - p.z * (lap[j] + tv(x, t) * mid[j]);
    }
    worst = std::max(worst, WaveField(grid, std::move(r), t).l2_norm());
  }
  return worst;
}

}  // namespace

double appel_residual(const PointSampler& u, const PotentialSpec& v, const AppelParams& p,
                      const Grid1D& grid, const std::vector<double>& probes, double dt) {
  return residual_impl(u, v, p, grid, probes, dt, kBoundaryAmplitudeThreshold);
}

double appel_residual(const Trajectory& traj, const AppelParams& p,
                      const std::vector<double>& probes, double dt) {
  traj.validate();
  if (!traj.is_resolved()) throw PreconditionError("appel_residual: trajectory is under-resolved");
  const auto t = traj.times();
  for (std::size_t k = 1; k < t.size(); ++k) {
    require(t[k] - t[k - 1] <= 1e-3 + 1e-12, "appel_residual: trajectory spacing must be <= 1e-3");
  }
  require(std::abs(traj.z - p.z) == 0.0, "appel_residual: trajectory z differs from AppelParams z");
  const Grid1D& g = traj.grid();
  double lam = 0.0;
  for (double tp : probes) lam = std::max({lam, p.lambda(tp - dt), p.lambda(tp + dt)});
  const Grid1D out(g.size(), g.half_width() / std::max(lam, 1.0));
  const double steps = (t.back() - t.front()) / traj.dt;
  return residual_impl(trajectory_sampler(traj), traj.potential, p, out, probes, dt,
                       kBoundaryAmplitudeThreshold * std::sqrt(std::max(1.0, steps)));
}

AppelNormIdentity appel_norm_identity(const PointSampler& u, const AppelParams& p, double gamma,
                                      double t, const Grid1D& in_grid, const Grid1D& out_grid) {
  p.validate();
  const double s = p.s(t);
  const double m = p.alpha * s + p.beta * (1.0 - s);
  const double c = gamma * p.alpha * p.beta / (m * m) +
                   (p.alpha - p.beta) * p.z.real() / (4.0 * std::norm(p.z) * m);
  const WaveField lhs_field = appel_transform(u, p, t, out_grid);
  const WaveField rhs_field =
      WaveField::from_function(in_grid, [&](double y) { return u(y, s); }, s);
  const auto lhs = weighted_square_integral(lhs_field, [&](double x) { return gamma * x * x; });
  const auto rhs = weighted_square_integral(rhs_field, [&](double y) { return c * y * y; });
  AppelNormIdentity out{};
  out.lhs_log = 0.5 * lhs.log_value;
  out.rhs_log = 0.5 * rhs.log_value;
  out.divergent = lhs.divergent || rhs.divergent;
  out.relative_error = std::abs(std::expm1(out.lhs_log - out.rhs_log));
  return out;
}

}  // namespace gclab
