#pragma once

// Weighted space-time inequalities for i d_t + d_xx in one space dimension and
// the scans built on them. All large integrals are carried as logarithms.

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gclab/grid_field.hpp"
#include "gclab/propagators.hpp"

namespace gclab {

// ---- test-function library ---------------------------------------------------

// g(x, t) = exp(-((x - center) / width)^2 + i wavenumber x) eta(t), eta = 0 off (0, 1).
struct CarlemanTestFunction {
  std::string id;
  double center;
  double width;
  double wavenumber;
  std::function<cplx(double)> envelope;
};

inline constexpr const char* kCarlemanLibraryVersion = "1";
// bump-1 .. bump-5
const std::vector<CarlemanTestFunction>& carleman_test_functions();
// Also accepts "zero". Throws PreconditionError for unknown ids.
std::optional<CarlemanTestFunction> carleman_test_function(const std::string& id);

// ---- convexity Carleman estimate ----------------------------------------------

// Weight exp(2 psi + 2 mu |x/R + phi|^2), phi = t(1-t), psi = -(1+eps) R^4/(16 mu) t(1-t).
struct ConvexityCarlemanCase {
  std::string test_id = "bump-1";
  double R = 8.0;
  double eps = 0.1;
  double gamma = 0.6;   // mu = (1+eps)^-3 gamma R^2 unless mu > 0
  double mu = 0.0;
  std::size_t nt = 800;
  std::size_t nx = 0;   // 0 picks a size from the weight and the test function

  double effective_mu() const;
};

struct CarlemanReport {
  std::string test_id;
  double R, mu, eps;
  double prefactor;       // psi'' - R^4 phi''^2 / (32 mu), evaluated in floating point
  bool prefactor_exact;   // symbolic identity psi'' - R^4 phi''^2/(32 mu) = eps R^4/(8 mu)
  double log_lhs;         // log of prefactor * int int e^{2psi + 2mu q^2} |g|^2
  double log_rhs;         // log of int int e^{2psi + 2mu q^2} |(i d_t + d_xx) g|^2
  double lhs, rhs;        // exp of the logs (may be inf)
  double ratio;           // lhs / rhs
  bool passed;            // lhs <= rhs (1 + 1e-8)
  double half_width;
  std::size_t nx, nt;
  double boundary_ratio;
  double spectral_tail;
  bool resolved;
};

CarlemanReport convexity_carleman(const ConvexityCarlemanCase& c);

// ---- L110 estimate -------------------------------------------------------------

// g = exp(-alpha |x/R + phi|^2) f with f = b(x - x0) eta(t) e^{i Omega t}, b a
// compact bump of the given radius and Omega = W_x(x0, 1/2)^2.
struct L110Case {
  std::string test_id = "bump";  // "bump" or "zero"
  double R = 8.0;
  double alpha = 0.0;            // 0 means 8 R^2
  double x0 = 0.0;               // 0 means R + 1
  double radius = 0.5;
  std::function<double(double)> phi;  // empty means 0
  std::size_t nx = 256;
  std::size_t nt = 400;
};

struct L110Report {
  std::string test_id;
  double R, alpha, x0, carrier;
  double weighted_g;     // || e^{alpha q^2} g ||, space-time
  double weighted_Lg;    // || e^{alpha q^2} (i d_t + d_xx) g ||
  double scale;          // alpha^{3/2} / R^2
  double constant;       // scale * weighted_g / weighted_Lg
  bool trivial;
  bool resolved;
};

// Throws PreconditionError naming a witness (x, t) if |x/R + phi(t)| < 1 on supp g,
// or if alpha < 8 R^2.
L110Report schrodinger_carleman_l110(const L110Case& c);

struct L110Stability {
  std::vector<double> radii;
  std::vector<double> constants;
  double mean;
  double max_relative_deviation;
  bool stable;  // every constant within 20% of the mean
};
L110Stability l110_stability(const std::vector<double>& radii = {8.0, 16.0, 32.0},
                             double offset = 1.0);

// ---- annulus lower bound ----------------------------------------------------------

struct AnnulusScan {
  std::vector<double> radii;
  std::vector<double> log_delta;   // log delta(R)
  std::vector<bool> used;          // false when delta < 1e-300
  double central_mass;             // int_0^1 int_{|x|<1} |u|^2
  double total_energy;             // int_0^1 int |u|^2 + |u_x|^2
  // -log delta ~ c R^p + b R + d log R + e
  double p, c, b, d, e;
  double rms_residual;
};

// Trajectory spanning [0, 1]; every R must satisfy R <= 0.9 L.
AnnulusScan annulus_lower_bound_scan(const Trajectory& traj, const std::vector<double>& radii);

// ---- Hardy threshold ------------------------------------------------------------------

// gamma/(1+eps)^3 - (1+eps)^4/(4 gamma) - C delta
double hardy_threshold_exponent(double gamma, double eps, double delta, double C = 1.0);

struct ThresholdRow {
  double gamma;
  double sup_E;      // sup over eps in [0, eps_max] of E(gamma, eps, 0)
  double argmax_eps;
};
struct ThresholdScan {
  std::vector<ThresholdRow> rows;
  std::optional<std::pair<double, double>> sign_change_cell;  // first (gamma_k, gamma_k+1)
  std::size_t sign_changes = 0;
  bool change_at_half = false;  // exactly one sign change, in a cell containing 1/2
};
ThresholdScan threshold_scan(const std::vector<double>& gammas, double eps_max = 0.5);

// ---- Hardy cutoff pipeline ----------------------------------------------------------------

// u and u_x of a solution of u_t = i (u_xx + V u), evaluated on a grid at time t.
struct SpaceTimeSource {
  Grid1D grid;
  std::function<std::pair<std::vector<cplx>, std::vector<cplx>>(double t)> slice;
  PotentialSpec potential = zero_potential();
};
SpaceTimeSource gaussian_source(double kappa, const Grid1D& grid);
SpaceTimeSource counterexample_source(const Grid1D& grid);
// Cubic Lagrange in time between snapshots; derivatives are spectral.
SpaceTimeSource trajectory_source(const Trajectory& traj);

struct HardyPipelineCase {
  double R = 8.0;
  double eps = 0.1;
  double gamma = 0.1;   // mu = (1+eps)^-3 gamma R^2
  double delta = 0.05;
  double M = 20.0;      // theta(x/M) cutoff, needs 2M < L
  bool eta_identically_one = false;
  int panels = 12;      // Gauss-Legendre panels per time piece
};

struct HardyPipelineReport {
  double R, eps, gamma, mu, M, delta;
  double apriori_log_sup;      // log sup_t ||e^{gamma x^2} u(t)||
  double log_lhs_full;         // log of eps R^4/(8 mu) int int e^W |g|^2
  double log_lhs_restricted;   // same on t(1-t) >= 1/R
  double log_I, log_II, log_III;
  double log_II_majorant;      // II with e^{2 psi} <= 1 applied
  double log_rhs;              // log int int e^W |(i d_t + d_xx) g|^2
  bool carleman_holds;
  double log_central_mass;     // log int_{|t-1/2|<=delta} int_{|x|<=delta R} |u|^2
  double threshold_E;          // hardy_threshold_exponent(gamma, eps, delta)
};

// Throws PreconditionError when sup_t ||e^{gamma x^2} u(t)|| reads as divergent on the
// grid or the cutoff does not fit the box.
HardyPipelineReport hardy_cutoff_pipeline(const SpaceTimeSource& u, const HardyPipelineCase& c);

// Least-squares slope of log y against log x.
double power_law_exponent(const std::vector<double>& x, const std::vector<double>& log_y);

}  // namespace gclab
