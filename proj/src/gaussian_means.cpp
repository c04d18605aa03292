#include "gclab/gaussian_means.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/multiprecision/cpp_int.hpp>

#include "gclab/errors.hpp"
#include "gclab/log_sum.hpp"

namespace gclab {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_uniform(const std::vector<double>& t) {
  const double dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  for (std::size_t k = 1; k < t.size(); ++k) {
    if (std::abs(t[k] - t[k - 1] - dt) > 1e-9 * std::max(1.0, std::abs(dt))) {
      throw PreconditionError("trajectory sample times are not uniform");
    }
  }
}

// Normalised position of t_k in [t_0, t_K].
double unit_time(const std::vector<double>& t, std::size_t k) {
  return (t[k] - t.front()) / (t.back() - t.front());
}

std::size_t index_of_time(const Trajectory& traj, double s) {
  const auto t = traj.times();
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (std::abs(t[k] - s) <= 1e-12) return k;
  }
  throw PreconditionError("trajectory has no sample at t=" + std::to_string(s));
}


// log of int_{|x| > C} exp(2 w(x)) |f|^2 dx: trapezoid on the nodes outside,
// plus the partial cells [C, x_a] with log-linear interpolation of the integrand.
WeightedIntegral outer_integral(const WaveField& f, const std::function<double(double)>& w, double C) {
  const Grid1D& g = f.grid();
  const double h = g.spacing();
  const std::size_t n = f.size();
  std::vector<double> l(n, kNegInf);
  for (std::size_t j = 0; j < n; ++j) {
    const double a = std::abs(f[j]);
    if (a > 0.0) l[j] = 2.0 * (w(g.node(j)) + std::log(a));
  }
  LogSum sum;
  for (std::size_t j = 0; j < n; ++j) {
    if (std::abs(g.node(j)) > C) sum.add_log(l[j] + std::log(h));
  }
  auto partial = [&](std::size_t in, std::size_t out) {
    const double d = std::abs(g.node(out)) - C;
    // node `out` carries h in the sum; the trapezoid wants h/2 + d/2 there.
    const double th = (C - std::abs(g.node(in))) / h;
    const double lc = (l[in] == kNegInf || l[out] == kNegInf) ? kNegInf : (1.0 - th) * l[in] + th * l[out];
    return std::pair{d, lc};
  };
  LogSum add;
  LogSum sub;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const bool a = std::abs(g.node(j)) > C;
    const bool b = std::abs(g.node(j + 1)) > C;
    if (a == b) continue;
    const std::size_t in = a ? j + 1 : j;
    const std::size_t out = a ? j : j + 1;
    const auto [d, lc] = partial(in, out);
    sub.add_log(l[out] + std::log(0.5 * (h - d)));
    add.add_log(lc + std::log(0.5 * d));
  }
  sum.add_log(add.log());
  double lv = sum.log();
  if (!sub.empty() && lv != kNegInf) lv += std::log1p(-std::exp(sub.log() - lv));
  WeightedIntegral out{lv, false};
  if (!sum.empty()) {
    const double edge = std::max(l.front(), l.back()) + std::log(h);
    out.divergent = edge - sum.max_log() > std::log(kDivergenceThreshold);
  }
  return out;
}
}  // namespace

// ---- traces -------------------------------------------------------------------------

std::pair<std::size_t, std::size_t> ConvexityTrace::finite_window() const {
  std::pair<std::size_t, std::size_t> best{0, 0};
  std::size_t best_len = 0;
  std::size_t start = 0;
  for (std::size_t k = 0; k <= size(); ++k) {
    if (k == size() || divergent[k]) {
      if (k > start && k - start > best_len) {
        best_len = k - start;
        best = {start, k - 1};
      }
      start = k + 1;
    }
  }
  return best;
}

bool ConvexityTrace::all_finite() const {
  return std::none_of(divergent.begin(), divergent.end(), [](bool d) { return d; });
}

ConvexityTrace trace_H(const Trajectory& traj, const WeightSpec& w) {
  traj.validate();
  require(std::holds_alternative<GaussianWeight>(w) || std::holds_alternative<MixedWeight>(w),
          "trace_H: weight must be Gaussian or Mixed");
  require(traj.size() >= 17, "trace_H: need K >= 16");
  ConvexityTrace tr;
  tr.times = traj.times();
  require_uniform(tr.times);
  tr.dt = (tr.times.back() - tr.times.front()) / static_cast<double>(tr.size() - 1);
  tr.weight = weight_name(w);
  for (const auto& f : traj.fields) {
    const WeightedNorm n = weighted_l2_norm(f, w);
    tr.log_H.push_back(n.log_squared());
    tr.divergent.push_back(n.divergent);
  }
  tr.trivial = std::all_of(tr.log_H.begin(), tr.log_H.end(), [](double l) { return l == kNegInf; });
  if (!tr.trivial && !std::any_of(tr.divergent.begin(), tr.divergent.end(), [](bool d) { return !d; })) {
    throw PreconditionError("trace_H: every sample is divergent for weight " + tr.weight);
  }

  const std::size_t K = tr.size();
  tr.frequency.assign(K, kNaN);
  tr.second_diff.assign(K, kNaN);
  if (tr.trivial) {
    std::fill(tr.frequency.begin(), tr.frequency.end(), 0.0);
    std::fill(tr.second_diff.begin() + 1, tr.second_diff.end() - 1, 0.0);
    return tr;
  }
  auto usable = [&](std::size_t k) { return !tr.divergent[k] && std::isfinite(tr.log_H[k]); };
  const auto& l = tr.log_H;
  for (std::size_t k = 0; k < K; ++k) {
    if (k > 0 && k + 1 < K && usable(k - 1) && usable(k) && usable(k + 1)) {
      tr.frequency[k] = (l[k + 1] - l[k - 1]) / (4.0 * tr.dt);
      tr.second_diff[k] = l[k + 1] - 2.0 * l[k] + l[k - 1];
    } else if (k == 0 && usable(0) && usable(1) && usable(2)) {
      tr.frequency[k] = (-3.0 * l[0] + 4.0 * l[1] - l[2]) / (4.0 * tr.dt);
    } else if (k + 1 == K && usable(K - 1) && usable(K - 2) && usable(K - 3)) {
      tr.frequency[k] = (3.0 * l[K - 1] - 4.0 * l[K - 2] + l[K - 3]) / (4.0 * tr.dt);
    }
  }
  return tr;
}

ConvexityCheck check_log_convexity(const ConvexityTrace& trace, double slack, double budget) {
  ConvexityCheck out{true, 0.0, kNaN, kNegInf, kNaN, {}};
  if (trace.trivial) return out;
  if (!trace.all_finite()) {
    const auto [first, last] = trace.finite_window();
    out.passed = false;
    out.failure = "divergent entries; maximal finite window t in [" +
                  std::to_string(trace.times[first]) + ", " + std::to_string(trace.times[last]) + "]";
    return out;
  }
  out.min_curvature = std::numeric_limits<double>::infinity();
  const std::size_t K = trace.size();
  for (std::size_t k = 1; k + 1 < K; ++k) {
    const double c = trace.curvature(k);
    if (c < out.min_curvature) {
      out.min_curvature = c;
      out.min_curvature_time = trace.times[k];
    }
  }
  const double l0 = trace.log_H.front();
  const double l1 = trace.log_H.back();
  for (std::size_t k = 0; k < K; ++k) {
    const double s = unit_time(trace.times, k);
    const double excess =
        trace.log_H[k] - ((1.0 - s) * l0 + s * l1) - budget * s * (1.0 - s) / 2.0;
    if (excess > out.max_interpolation_excess) {
      out.max_interpolation_excess = excess;
      out.max_excess_time = trace.times[k];
    }
  }
  if (out.min_curvature < -budget - slack) {
    out.passed = false;
    out.failure = "second difference below budget at t=" + std::to_string(out.min_curvature_time);
  } else if (out.max_interpolation_excess > slack) {
    out.passed = false;
    out.failure = "endpoint interpolation exceeded at t=" + std::to_string(out.max_excess_time);
  }
  return out;
}

// ---- two-endpoint interpolation ----------------------------------------------------------

InterpolationReport theorem1_interpolation(const Trajectory& traj, double alpha, double beta,
                                           double s) {
  require(alpha > 0.0 && beta > 0.0, "theorem1_interpolation: alpha, beta must be > 0");
  require(s > 0.0 && s < 1.0, "theorem1_interpolation: s must lie in (0, 1)");
  traj.validate();
  require(std::abs(traj.fields.front().time()) <= 1e-12 &&
              std::abs(traj.fields.back().time() - 1.0) <= 1e-12,
          "theorem1_interpolation: trajectory must span [0, 1]");

  using boost::multiprecision::cpp_rational;
  const cpp_rational a(alpha), b(beta), sr(s);
  const cpp_rational denom = a * sr + (1 - sr) * b;
  const cpp_rational e0 = b * (1 - sr) / denom;
  const cpp_rational e1 = a * sr / denom;

  const MixedWeight w{alpha, beta};
  InterpolationReport r{};
  r.s = s;
  r.alpha = alpha;
  r.beta = beta;
  r.norm_0 = weighted_l2_norm(traj.fields.front(), w);
  r.norm_s = weighted_l2_norm(traj.fields[index_of_time(traj, s)], w);
  r.norm_1 = weighted_l2_norm(traj.fields.back(), w);
  r.exponent_0 = static_cast<double>(e0);
  r.exponent_1 = static_cast<double>(e1);
  r.exponents_sum_exactly_one = (e0 + e1 == 1);
  r.finite = !r.norm_0.divergent && !r.norm_s.divergent && !r.norm_1.divergent;
  r.log_excess = r.finite ? r.norm_s.log_norm - r.exponent_0 * r.norm_0.log_norm -
                                r.exponent_1 * r.norm_1.log_norm
                          : std::numeric_limits<double>::infinity();
  return r;
}

// ---- smoothing, linear weights, persistence ------------------------------------------------

SmoothingResult smoothing_functional(const Trajectory& traj, const WeightSpec& w) {
  traj.validate();
  require(traj.size() >= 65, "smoothing_functional: need K >= 64 time samples");
  const auto t = traj.times();
  require_uniform(t);
  const double dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);

  SmoothingResult out{0.0, 0.0, 0.0, false};
  LogSum acc;
  const std::size_t last = traj.size() - 1;
  const bool simpson = last % 2 == 0;
  const Grid1D& g = traj.grid();
  for (std::size_t k = 1; k < last; ++k) {
    const double s = unit_time(t, k);
    const WaveField ux = spectral_derivative(traj.fields[k], 1);
    // FFT roundoff sits near 1e-16 max|u_x| at every node; the weight would
    // amplify it far out in the box.
    const double floor = 1e-12 * ux.max_abs();
    std::vector<bool> keep(ux.size());
    for (std::size_t j = 0; j < ux.size(); ++j) keep[j] = std::abs(ux[j]) > floor;
    auto mask = [&](double x) {
      return keep[static_cast<std::size_t>(std::llround((x + g.half_width()) / g.spacing()))];
    };
    const double tk = t[k];
    const auto I = weighted_square_integral(ux, [&](double x) { return weight_exponent(w, x, tk); }, mask);
    out.divergent = out.divergent || (I.divergent && !weight_is_trivial(w));
    const double q = simpson ? (k % 2 ? 4.0 : 2.0) / 3.0 : 1.0;
    acc.add_log(I.log_value + std::log(s * (1.0 - s)) + std::log(q * dt));
  }
  const WeightedNorm n0 = weighted_l2_norm(traj.fields.front(), w);
  const WeightedNorm n1 = weighted_l2_norm(traj.fields.back(), w);
  out.divergent = out.divergent || n0.divergent || n1.divergent;
  out.value = acc.empty() ? 0.0 : std::exp(0.5 * acc.log());
  out.endpoint_sum = n0.value() + n1.value();
  out.ratio = out.endpoint_sum > 0.0 ? out.value / out.endpoint_sum : 0.0;
  return out;
}

LinearWeightBound linear_weight_interior_bound(const Trajectory& traj, double lambda) {
  traj.validate();
  LinearWeightBound out{0.0, 0.0, 0.0, false};
  const auto t = traj.times();
  out.potential_norm =
      potential_tail_norm(traj.potential, traj.grid(), -1.0, t.front(), t.back());
  require(out.potential_norm <= 0.1,
          "linear_weight_interior_bound: ||V||_{L1 Linf} must be <= 0.1");
  const LinearWeight w{lambda};
  const WeightedNorm n0 = weighted_l2_norm(traj.fields.front(), w);
  const WeightedNorm n1 = weighted_l2_norm(traj.fields.back(), w);
  out.divergent = n0.divergent || n1.divergent;
  const double denom = n0.value() + n1.value();
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const WeightedNorm nk = weighted_l2_norm(traj.fields[k], w);
    out.divergent = out.divergent || nk.divergent;
    const double c = denom > 0.0 ? nk.value() / denom : 0.0;
    if (c > out.constant) {
      out.constant = c;
      out.sup_time = t[k];
    }
  }
  return out;
}

PersistenceResult subexponential_persistence(const Trajectory& traj, double a, double alpha_exp) {
  require(a > 0.0, "subexponential_persistence: a must be > 0");
  require(alpha_exp > 1.0 && alpha_exp <= 2.0,
          "subexponential_persistence: alpha_exp must lie in (1, 2]");
  traj.validate();
  PersistenceResult out{a / 4.0, 4.0, 0.0, kNaN, false, false};
  const auto t = traj.times();
  auto endpoint = [&](const WaveField& f) {
    return weighted_square_integral(
        f, [&](double x) { return 0.5 * a * std::pow(std::abs(x), alpha_exp); });
  };
  for (const WaveField* f : {&traj.fields.front(), &traj.fields.back()}) {
    if (!f->is_zero() && endpoint(*f).divergent) out.endpoint_divergent = true;
  }
  out.divergent = out.endpoint_divergent;
  double best_log = kNegInf;
  for (std::size_t k = 1; k + 1 < traj.size(); ++k) {
    const auto I = outer_integral(
        traj.fields[k], [&](double x) { return 0.5 * out.b * std::pow(std::abs(x), alpha_exp); }, out.cutoff);
    if (I.log_value == kNegInf) continue;
    out.divergent = out.divergent || I.divergent;
    if (I.log_value > best_log) {
      best_log = I.log_value;
      out.sup_time = t[k];
    }
  }
  out.sup_value = best_log == kNegInf ? 0.0 : std::exp(best_log);
  return out;
}

// ---- counterexample ----------------------------------------------------------------------

CounterexampleReport counterexample_demo(double R, const std::vector<double>& L_list,
                                         std::optional<double> rho) {
  require(R >= 1.0, "counterexample_demo: R must be >= 1");
  require(L_list.size() >= 2, "counterexample_demo: need at least two box sizes");
  for (std::size_t k = 1; k < L_list.size(); ++k) {
    require(L_list[k] > L_list[k - 1], "counterexample_demo: L_list must increase strictly");
  }
  CounterexampleReport r{};
  r.R = R;
  if (rho) {
    r.rho = *rho;
  } else {
    const auto ode = misleading_ode_solve(R, OdeBoundary::kEvenAtOrigin, {});
    r.rho = std::min(ode.family.back().second, 1.0 / 9.0);
  }
  require(r.rho >= 0.0, "counterexample_demo: rho must be >= 0");
  if (r.rho >= 0.125) {
    throw PreconditionError("counterexample_demo: rho >= 1/8 makes the right side diverge too");
  }
  r.L = L_list;

  for (double L : L_list) {
    // u(x, +-1) carries the chirp e^{i x^2 / 8}; 16 nodes per unit length resolve it.
    const auto n = std::bit_ceil(static_cast<std::size_t>(std::ceil(32.0 * L)));
    const Grid1D grid(std::max<std::size_t>(n, 16), L);
    const WaveField u0 = oracle_counterexample(0.0, grid);
    const WaveField u1 = oracle_counterexample(1.0, grid);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double x = grid.node(j);
      r.modulus_deviation =
          std::max(r.modulus_deviation, std::abs(std::norm(u0[j]) - std::exp(-x * x / 2.0)));
    }
    r.left_log_norm.push_back(weighted_l2_norm(u0, GaussianWeight{R}).log_norm);
    const double plus = weighted_l2_norm(u1, GaussianWeight{r.rho}).log_norm;
    const double minus =
        weighted_l2_norm(oracle_counterexample(-1.0, grid), GaussianWeight{r.rho}).log_norm;
    r.right_log_norm.push_back(std::max(plus, minus));
  }

  r.left_increasing = true;
  r.growth_matches = true;
  for (std::size_t k = 1; k < L_list.size(); ++k) {
    const double g = r.left_log_norm[k] - r.left_log_norm[k - 1];
    const double p =
        (2.0 * R - 0.5) * (L_list[k] * L_list[k] - L_list[k - 1] * L_list[k - 1]) / 2.0;
    r.left_growth.push_back(g);
    r.predicted_growth.push_back(p);
    r.left_increasing = r.left_increasing && g > 0.0;
    r.growth_matches = r.growth_matches && g >= 0.95 * p;
  }
  const std::size_t m = L_list.size();
  r.right_relative_change = std::abs(std::expm1(r.right_log_norm[m - 1] - r.right_log_norm[m - 2]));
  // |u(x, +-1)|^2 = 2^{-1/2} e^{-x^2/4}
  r.right_limit_log_norm = 0.5 * (-0.5 * std::log(2.0) +
                                  0.5 * std::log(std::numbers::pi / (0.25 - 2.0 * r.rho)));
  r.right_limit_error = std::abs(std::expm1(r.right_log_norm[m - 1] - r.right_limit_log_norm));
  r.right_converged = r.right_limit_error <= 1e-8;
  // ||e^{R x^2} u(0)||^2 <= ||e^{rho x^2} u(-1)|| ||e^{rho x^2} u(1)|| fails once the
  // left side outgrows the bounded right side.
  r.violated = r.left_increasing && r.growth_matches && r.right_converged &&
               2.0 * r.left_log_norm.back() > 2.0 * r.right_log_norm.back();
  return r;
}

}  // namespace gclab
