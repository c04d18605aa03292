#pragma once

// Conformal (Appel) change of variables for du/ds = z (u_yy + V u + F), 1-D:
//   D(t) = alpha (1 - t) + beta t,  s(t) = beta t / D(t),  lambda(t) = sqrt(alpha beta) / D(t)
//   u~(x, t) = lambda^{1/2} u(lambda x, s) exp((alpha - beta) x^2 / (4 z D)).

#include <functional>

#include "gclab/grid_field.hpp"
#include "gclab/propagators.hpp"

namespace gclab {

struct AppelParams {
  double alpha;
  double beta;
  cplx z{0.0, 1.0};

  void validate() const;
  double D(double t) const { return alpha * (1.0 - t) + beta * t; }
  double s(double t) const { return beta * t / D(t); }
  double lambda(double t) const;
  // Largest lambda over [t0, t1].
  double max_lambda(double t0 = 0.0, double t1 = 1.0) const;
  AppelParams swapped() const { return {beta, alpha, z}; }
};

// u(y, s) evaluated pointwise.
using PointSampler = std::function<cplx(double y, double s)>;

// Band-limited interpolation in y of the field returned by `field_at(s)`.
// Throws PreconditionError outside the field's box.
PointSampler interpolating_sampler(std::function<WaveField(double)> field_at);
// Cubic Lagrange interpolation in time between snapshots, spectral in y.
PointSampler trajectory_sampler(const Trajectory& traj);

// u~ as a sampler in (x, t).
PointSampler appel_sampler(PointSampler u, const AppelParams& p);
// u~(., t) on `grid`. Requires lambda(t) * L_grid to fit inside the source box when
// the sampler interpolates; closed-form samplers accept any grid.
WaveField appel_transform(const PointSampler& u, const AppelParams& p, double t,
                          const Grid1D& grid);

// V~(x, t) = alpha beta / D^2 V(lambda x, s). Throws NumericalError if the
// bound max(alpha/beta, beta/alpha) ||V||_inf is violated on the probe grid.
PotentialSpec appel_potential(const PotentialSpec& v, const AppelParams& p);

// F~(x, t) = lambda^{1/2 + 2} F(lambda x, s) exp((alpha - beta) x^2 / (4 z D)).
PointSampler appel_source(PointSampler f, const AppelParams& p);

// max over interior probe times of || d_t u~ - z (u~_xx + V~ u~) || on `grid`,
// with a centred time difference of step `dt` and spectral x-derivatives.
double appel_residual(const PointSampler& u, const PotentialSpec& v, const AppelParams& p,
                      const Grid1D& grid, const std::vector<double>& probes = {0.25, 0.5, 0.75},
                      double dt = 1e-4);
// Same for a dense trajectory (sample spacing <= 1e-3); the output box is the
// trajectory box shrunk by the largest lambda.
double appel_residual(const Trajectory& traj, const AppelParams& p,
                      const std::vector<double>& probes = {0.25, 0.5, 0.75}, double dt = 1e-4);

struct AppelNormIdentity {
  double lhs_log;  // log || e^{gamma x^2} u~(t) ||
  double rhs_log;  // log || e^{c(s) y^2} u(s) ||
  double relative_error;
  bool divergent;
};
// Both sides by quadrature: the left on `out_grid`, the right on `in_grid`.
AppelNormIdentity appel_norm_identity(const PointSampler& u, const AppelParams& p, double gamma,
                                      double t, const Grid1D& in_grid, const Grid1D& out_grid);

}  // namespace gclab
