#pragma once

// Gaussian means H(t) = ||exp(w) u(t)||^2 along a trajectory, their log-convexity,
// the two-endpoint interpolation inequality, smoothing and persistence
// functionals, and the misleading-convexity ODE with its refuting solution.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gclab/grid_field.hpp"
#include "gclab/propagators.hpp"

namespace gclab {

struct ConvexityTrace {
  std::vector<double> times;
  std::vector<double> log_H;       // -inf for a vanishing field
  std::vector<bool> divergent;
  std::vector<double> frequency;   // N(t_k) = (log H)'(t_k) / 2
  std::vector<double> second_diff; // log H_{k+1} - 2 log H_k + log H_{k-1}; NaN at the ends
  double dt = 0.0;
  bool trivial = false;            // H == 0 at every sample
  std::string weight;

  std::size_t size() const { return times.size(); }
  double curvature(std::size_t k) const { return second_diff[k] / (dt * dt); }
  // Largest index range [first, last] without divergent entries.
  std::pair<std::size_t, std::size_t> finite_window() const;
  bool all_finite() const;
};

// Requires a Gaussian or Mixed weight, uniform sample times and K >= 16.
ConvexityTrace trace_H(const Trajectory& traj, const WeightSpec& w);

struct ConvexityCheck {
  bool passed;
  double min_curvature;             // min_k Delta^2 log H / dt^2
  double min_curvature_time;
  double max_interpolation_excess;  // max_k log H_k - ((1-s) log H_0 + s log H_K) - budget s(1-s)/2
  double max_excess_time;
  std::string failure;
};

// budget = M0 + M1^2 + M2^2 (zero for free flows).
ConvexityCheck check_log_convexity(const ConvexityTrace& trace, double slack, double budget = 0.0);

struct InterpolationReport {
  double s, alpha, beta;
  WeightedNorm norm_0, norm_s, norm_1;
  double exponent_0;  // beta (1-s) / (alpha s + (1-s) beta)
  double exponent_1;  // alpha s / (alpha s + (1-s) beta)
  bool exponents_sum_exactly_one;
  double log_excess;  // log norm_s - exponent_0 log norm_0 - exponent_1 log norm_1
  bool finite;
};

// Trajectory must span [0, 1] and contain t = s as a sample time.
InterpolationReport theorem1_interpolation(const Trajectory& traj, double alpha, double beta,
                                           double s);

struct SmoothingResult {
  double value;         // || sqrt(t(1-t)) exp(w) u_x ||_{L2(dx dt)}
  double endpoint_sum;  // ||exp(w) u(0)|| + ||exp(w) u(1)||
  double ratio;
  bool divergent;
};
SmoothingResult smoothing_functional(const Trajectory& traj, const WeightSpec& w);

struct LinearWeightBound {
  double constant;  // sup_t ||e^{lambda x} u(t)|| / (||e^{lambda x} u(0)|| + ||e^{lambda x} u(1)||)
  double sup_time;
  double potential_norm;  // ||V||_{L1_t Linf_x}
  bool divergent;
};
LinearWeightBound linear_weight_interior_bound(const Trajectory& traj, double lambda);

struct PersistenceResult {
  double b;       // a / 4
  double cutoff;  // C = 4
  double sup_value;
  double sup_time;
  bool endpoint_divergent;
  bool divergent;
};
// sup over interior samples of int_{|x|>C} exp(b |x|^alpha_exp) |u|^2.
PersistenceResult subexponential_persistence(const Trajectory& traj, double a, double alpha_exp);

// ---- misleading convexity argument -------------------------------------------------

// kEvenAtOrigin: a(0) = 1, a'(0) = 0 (the even, positive solution).
// kSlopeAtOne:  a(0) = 1, a'(1) = 0 (shooting on a'(0)).
enum class OdeBoundary { kEvenAtOrigin, kSlopeAtOne };

struct ScaledResidual {
  double R;
  double residual;
};

struct MisleadingOdeResult {
  OdeBoundary boundary;
  double slope_at_origin;  // a'(0)
  std::vector<double> t;   // samples on [-1, 1]
  std::vector<double> a;
  double residual_max;     // max |32 a^3 + a'' - 2 a'^2 / a| by finite differences
  double min_a;
  double evenness_deviation;
  double slope_at_one;     // a'(1)
  std::vector<std::pair<double, double>> family;  // (R', R' a(R'))
  std::vector<ScaledResidual> scaled;
};

MisleadingOdeResult misleading_ode_solve(double R, OdeBoundary boundary = OdeBoundary::kEvenAtOrigin,
                                         const std::vector<double>& scales = {2.0, 4.0});

struct CounterexampleReport {
  double R;
  double rho;
  std::vector<double> L;
  std::vector<double> left_log_norm;     // log ||e^{R x^2} u(0)|| on [-L, L]
  std::vector<double> left_growth;       // successive differences of left_log_norm
  std::vector<double> predicted_growth;  // (2R - 1/2)(L_{k+1}^2 - L_k^2) / 2
  std::vector<double> right_log_norm;    // log ||e^{rho x^2} u(1)|| (= u(-1) in modulus)
  double right_relative_change;          // between the two largest boxes
  double right_limit_log_norm;           // closed form on the whole line
  double right_limit_error;              // relative, largest box vs closed form
  double modulus_deviation;              // max | |u(x,0)|^2 - e^{-x^2/2} |
  bool left_increasing;
  bool growth_matches;
  bool right_converged;                  // right_limit_error <= 1e-8
  bool violated;                         // formal inequality refuted on these boxes
};

CounterexampleReport counterexample_demo(double R, const std::vector<double>& L_list,
                                         std::optional<double> rho = std::nullopt);

}  // namespace gclab
