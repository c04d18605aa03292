#pragma once

// Evolution operators and closed-form oracle solutions.
//
// Sign convention: du/dt = z (u_xx + V u) with z = a + i b, a >= 0. The
// Schrodinger flow is z = i, the heat flow z = a > 0. All Fourier multipliers
// below follow from it: free flow exp(-i xi^2 t), heat exp(-a xi^2),
// Airy flow (u_t + u_xxx = 0) exp(i xi^3 t).

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gclab/grid_field.hpp"

namespace gclab {

// ---- potentials ---------------------------------------------------------------

enum class PotentialKind { kZero, kStaticReal, kStaticComplex, kTimeDependent };

struct PotentialSpec {
  std::string id = "zero";
  PotentialKind kind = PotentialKind::kZero;
  double amplitude = 0.0;
  std::function<cplx(double x, double t)> evaluate;
  double sup_bound = 0.0;  // ||V||_inf
  std::optional<double> gradient_bound;

  cplx operator()(double x, double t) const { return evaluate ? evaluate(x, t) : cplx{}; }
  bool is_zero() const { return kind == PotentialKind::kZero; }
};

PotentialSpec zero_potential();
// amplitude * sech^2(x)
PotentialSpec sech2_potential(double amplitude);
// amplitude * (1 + i/2) sech^2(x)
PotentialSpec complex_sech2_potential(double amplitude);
// amplitude * sech^2(x) cos(pi t)
PotentialSpec pulsed_sech2_potential(double amplitude);
// amplitude * smooth bump supported in |x| < radius (compact support).
PotentialSpec bump_potential(double amplitude, double radius);
// Registry lookup: zero, sech2, complex_sech2, pulsed_sech2, bump.
PotentialSpec potential_by_id(const std::string& id, double amplitude);

// Checks |V(x_j, t)| <= M1 on the grid at the given times; throws on violation.
void check_potential_bound(const PotentialSpec& v, const Grid1D& grid,
                           const std::vector<double>& times);
// ||V||_{L1_t Linf(|x| > R)} over t in [t0, t1], sampled on the grid nodes.
double potential_tail_norm(const PotentialSpec& v, const Grid1D& grid, double radius,
                           double t0 = 0.0, double t1 = 1.0, int time_samples = 65);

// ---- trajectories -------------------------------------------------------------

struct Trajectory {
  std::vector<WaveField> fields;
  cplx z{0.0, 1.0};
  PotentialSpec potential = zero_potential();
  double dt = 0.0;

  const Grid1D& grid() const { return fields.front().grid(); }
  std::vector<double> times() const;
  std::size_t size() const { return fields.size(); }
  // Times strictly increasing, one grid, Re z >= 0. Throws PreconditionError.
  void validate() const;
  // Boundary allowance grows like sqrt(steps) to absorb accumulated roundoff.
  double boundary_limit() const;
  bool is_resolved() const;
};

// Samples `field_at(t)` at t_k = t0 + k (t1 - t0) / samples, k = 0..samples.
Trajectory sample_trajectory(const std::function<WaveField(double)>& field_at, double t0,
                             double t1, std::size_t samples, cplx z = {0.0, 1.0},
                             PotentialSpec potential = zero_potential());

// Directory layout: metadata.json (schema_version, grid, potential id and
// amplitude, z, dt, times, snapshot file names) + snapshot_XXXXX.bin per field.
void save_trajectory(const Trajectory& traj, const std::string& directory);
Trajectory load_trajectory(const std::string& directory);

// ---- propagators ---------------------------------------------------------------

// Exact free Schrodinger flow by time t (du/dt = i u_xx).
WaveField free_propagate(const WaveField& f, double t);
// exp(a d_xx) applied to f; time stamp unchanged.
WaveField heat_regularize(const WaveField& f, double a);
// Flow of u_t + u_xxx = 0 by time t.
WaveField airy_propagate(const WaveField& f, double t);

// Strang splitting (kinetic half step, potential step at the midpoint time,
// kinetic half step) for du/dt = z (u_xx + V u). Records every
// `sample_every`-th step plus the initial field.
Trajectory split_step_evolve(const WaveField& f, const PotentialSpec& v, cplx z, double t_final,
                             double dt, std::size_t sample_every = 1);

struct ConvergenceStudy {
  double dt;
  double error_coarse;    // |u_dt - u_{dt/2}|
  double error_fine;      // |u_{dt/2} - u_{dt/4}|
  double richardson_order;
  double reference_order; // order of u_dt, u_{dt/2} against u_{dt/16}
};
ConvergenceStudy strang_convergence_order(const WaveField& f, const PotentialSpec& v, cplx z,
                                          double t_final, double dt);

// ---- Airy function ---------------------------------------------------------------

// Ai(x) for x in [-20, 20]: Maclaurin series on [-6, 2], otherwise marching
// Ai'' = x Ai (outward for x < -6 from series data at -6; inward from a far
// point for x > 2, normalised against the series at x = 1.5).
double airy_function(double x);

struct AiryDecayFit {
  double coefficient_x32;  // leading coefficient of x^{3/2} in -log Ai(x)
  double coefficient_log;  // coefficient of log x
  double constant;
  double rms_residual;
};
AiryDecayFit airy_decay_fit(double lo = 5.0, double hi = 15.0, int samples = 101);

// ---- oracles ----------------------------------------------------------------------

// (1 + 4 kappa z t)^{-1/2} exp(-kappa x^2 / (1 + 4 kappa z t)): the flow of
// exp(-kappa x^2) under du/dt = z u_xx.
cplx gaussian_value(cplx kappa, double t, cplx z, double x);
cplx gaussian_dx(cplx kappa, double t, cplx z, double x);
WaveField oracle_gaussian(cplx kappa, double t, cplx z, const Grid1D& grid);

// (t - i)^{-1/2} exp(i x^2 / (4 (t - i))), a free solution for all real t with
// |u|^2 = (1 + t^2)^{-1/2} exp(-x^2 / (2 (1 + t^2))).
cplx counterexample_value(double t, double x);
cplx counterexample_dx(double t, double x);
WaveField oracle_counterexample(double t, const Grid1D& grid);

// L2 norm of d_t u - i u_xx for the counterexample at time t, with a centred
// time difference of step dt and a spectral second derivative.
double counterexample_residual(const Grid1D& grid, double t, double dt);

// ---- energy-method weight loss ---------------------------------------------------------

// Gaussian decay rate c of |f| ~ exp(-c x^2), read from log|f| at nodes where
// |f| is well above roundoff (least squares in x^2).
double gaussian_decay_rate(const WaveField& f);

// exp(a d_xx) applied to exp(-kappa x^2) and the measured output decay rate,
// to compare with the weight-loss map gamma -> gamma / (1 + 4 gamma a).
struct HeatWeightLoss {
  double input_rate;
  double measured_rate;
  double predicted_rate;
  double relative_error;
};
HeatWeightLoss heat_weight_loss(double kappa, double a, const Grid1D& grid);

// h(T) = gamma a / (a + 4 gamma (a^2 + b^2) T)
double energy_weight_exponent(double gamma, cplx z, double T);

// On Gaussian data under the z-flow with V = 0, compares
// ||exp(h(T) x^2) u(T)|| against ||exp(gamma x^2) u(0)||.
struct EnergyWeightCheck {
  double h_T;
  WeightedNorm initial;
  WeightedNorm final;
  bool holds;  // final <= initial * (1 + slack)
};
EnergyWeightCheck energy_weight_check(double kappa, double gamma, cplx z, double T,
                                      const Grid1D& grid, double slack = 1e-6);

}  // namespace gclab
