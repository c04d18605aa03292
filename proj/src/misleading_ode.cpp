#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include <boost/numeric/odeint.hpp>

#include "gclab/errors.hpp"
#include "gclab/gaussian_means.hpp"

// 32 a^3 + a'' - 2 a'^2 / a = 0 becomes w w'' = 32 for w = 1/a, which is what
// gets integrated. Derivatives for the residual come from finite differences
// of the sampled a, so the residual does not reuse the transformed equation.

namespace gclab {
namespace {

namespace odeint = boost::numeric::odeint;
// Extended precision keeps finite-difference roundoff well below the residual tolerance.
using Real = long double;
using State = std::array<Real, 2>;  // (w, w')

constexpr double kLattice = 1.0 / 1024.0;
constexpr double kFdStep = 2.0 * kLattice;
constexpr int kTableMargin = 64;

void rhs(const State& y, State& dy, Real) {
  dy[0] = y[1];
  dy[1] = 32.0L / y[0];
}

auto make_stepper() {
  return odeint::make_controlled(Real{1e-18L}, Real{1e-18L},
                                 odeint::runge_kutta_fehlberg78<State, Real, State, Real>());
}

struct BadState : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// w on the lattice tau = +-i h for i = 0..n, from w(0) = 1, w'(0) = -slope.
class Solution {
 public:
  Solution(double slope, double extent) {
    const auto n = static_cast<std::size_t>(std::ceil(extent / kLattice)) + kTableMargin;
    pos_ = sweep(slope, n, +1.0);
    neg_ = sweep(slope, n, -1.0);
  }

  Real a(Real tau) const { return 1.0L / w(tau); }

 private:
  static std::vector<State> sweep(double slope, std::size_t n, double dir) {
    std::vector<Real> times(n + 1);
    for (std::size_t i = 0; i <= n; ++i) times[i] = dir * static_cast<Real>(i) * kLattice;
    std::vector<State> out;
    out.reserve(n + 1);
    State y{1.0L, -static_cast<Real>(slope)};
    odeint::integrate_times(make_stepper(), rhs, y, times.begin(), times.end(),
                            static_cast<Real>(dir * kLattice),
                            [&](const State& s, Real) { out.push_back(s); });
    return out;
  }

  Real w(Real tau) const {
    const Real idx = std::round(tau / kLattice);
    const auto i = static_cast<std::size_t>(std::abs(idx));
    const auto& table = idx >= 0 ? pos_ : neg_;
    require(i < table.size(), "misleading_ode_solve: evaluation outside the computed range");
    State y = table[i];
    const Real start = idx * kLattice;
    if (std::abs(tau - start) > 1e-14) {
      odeint::integrate_adaptive(make_stepper(), rhs, y, start, tau,
                                 (tau > start ? 1.0L : -1.0L) * kLattice / 8.0L);
    }
    return y[0];
  }

  std::vector<State> pos_;
  std::vector<State> neg_;
};

// max over t in samples of |32 g^3 + g'' - 2 g'^2 / g|, 8th-order central differences.
template <class F>
double residual(const F& g, const std::vector<double>& samples, Real h) {
  static constexpr std::array<Real, 5> d1{0.0L, 4.0L / 5, -1.0L / 5, 4.0L / 105, -1.0L / 280};
  static constexpr std::array<Real, 5> d2{-205.0L / 72, 8.0L / 5, -1.0L / 5, 8.0L / 315,
                                          -1.0L / 560};
  double worst = 0.0;
  for (double t : samples) {
    const Real g0 = g(t);
    Real first = 0.0;
    Real second = d2[0] * g0;
    for (int k = 1; k <= 4; ++k) {
      const Real gp = g(t + k * h);
      const Real gm = g(t - k * h);
      first += d1[k] * (gp - gm);
      second += d2[k] * (gp + gm);
    }
    first /= h;
    second /= h * h;
    worst = std::max(worst, static_cast<double>(std::abs(32 * g0 * g0 * g0 + second -
                                                       2 * first * first / g0)));
  }
  return worst;
}

// w'(1) for the initial slope a'(0) = slope, or nothing when w reaches 0 first.
std::optional<double> shoot(double slope) {
  State y{1.0L, -static_cast<Real>(slope)};
  try {
    odeint::integrate_adaptive(make_stepper(), rhs, y, Real{0}, Real{1}, Real{kLattice},
                               [](const State& s, Real) {
                                 if (!(s[0] > 1e-6)) throw BadState("w reached zero");
                               });
  } catch (const std::exception&) {
    return std::nullopt;
  }
  return static_cast<double>(y[1]);
}

double shooting_slope() {
  // Bracket a sign change of w'(1) over reachable slopes, then bisect.
  std::optional<std::pair<double, double>> bracket;
  double last_reachable = 0.0;
  double first_unreachable = std::numeric_limits<double>::quiet_NaN();
  bool has_prev = false;
  double prev = 0.0;
  double prev_slope = 0.0;
  for (double s = -40.0; s <= 40.0; s += 0.25) {
    const auto g = shoot(s);
    if (!g) {
      if (std::isnan(first_unreachable)) first_unreachable = s;
      has_prev = false;
      continue;
    }
    if (std::isnan(first_unreachable)) last_reachable = s;
    if (has_prev && prev * (*g) <= 0.0) {
      bracket = std::make_pair(prev_slope, s);
      break;
    }
    prev = *g;
    has_prev = true;
    prev_slope = s;
  }

  double lo = bracket ? bracket->first : last_reachable;
  double hi = bracket ? bracket->second : first_unreachable;
  if (std::isnan(hi)) hi = lo + 1.0;
  double best = std::numeric_limits<double>::infinity();
  for (int step = 0; step < 100; ++step) {
    const double mid = 0.5 * (lo + hi);
    const auto g = shoot(mid);
    if (g) best = std::min(best, std::abs(*g));
    if (g && std::abs(*g) <= 1e-12) return mid;
    if (bracket) {
      const auto glo = shoot(lo);
      ((glo && g && (*glo) * (*g) <= 0.0) ? hi : lo) = mid;
    } else {
      (g ? lo : hi) = mid;
    }
  }
  throw NumericalError(
      "misleading_ode_solve: shooting on a'(0) did not converge after 100 bisection steps "
      "(no positive solution with a(0)=1, a'(1)=0 was bracketed; smallest |w'(1)| = " +
      std::to_string(best) + ")");
}

}  // namespace

MisleadingOdeResult misleading_ode_solve(double R, OdeBoundary boundary,
                                         const std::vector<double>& scales) {
  require(R >= 1.0, "misleading_ode_solve: R must be >= 1");
  for (double s : scales) require(s >= 1.0, "misleading_ode_solve: scales must be >= 1");

  MisleadingOdeResult out{};
  out.boundary = boundary;
  out.slope_at_origin = boundary == OdeBoundary::kEvenAtOrigin ? 0.0 : shooting_slope();

  double extent = R;
  for (double s : scales) extent = std::max(extent, s);
  const Solution sol(out.slope_at_origin, extent + 1.0);

  std::vector<double> samples;
  for (int j = -512; j <= 512; ++j) samples.push_back(j / 512.0);
  out.t = samples;
  out.min_a = std::numeric_limits<double>::infinity();
  for (double t : samples) {
    const auto v = static_cast<double>(sol.a(t));
    out.a.push_back(v);
    out.min_a = std::min(out.min_a, v);
    out.evenness_deviation = std::max(out.evenness_deviation, std::abs(v - static_cast<double>(sol.a(-t))));
  }
  auto a = [&](Real t) { return sol.a(t); };
  out.residual_max = residual(a, samples, kFdStep);

  const Real h = kFdStep;
  out.slope_at_one = static_cast<double>(
      (4.0L / 5 * (a(1 + h) - a(1 - h)) - 1.0L / 5 * (a(1 + 2 * h) - a(1 - 2 * h)) +
       4.0L / 105 * (a(1 + 3 * h) - a(1 - 3 * h)) - 1.0L / 280 * (a(1 + 4 * h) - a(1 - 4 * h))) /
      h);

  for (double r = 1.0; r < R; r += 1.0) {
    out.family.emplace_back(r, r * static_cast<double>(sol.a(r)));
  }
  out.family.emplace_back(R, R * static_cast<double>(sol.a(R)));

  for (double s : scales) {
    auto scaled = [&](Real t) { return s * sol.a(s * t); };
    out.scaled.push_back({s, residual(scaled, samples, Real{kFdStep} / s)});
  }
  return out;
}

}  // namespace gclab
