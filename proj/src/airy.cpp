#include <array>
#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

#include "gclab/errors.hpp"
#include "gclab/propagators.hpp"

namespace gclab {
namespace {

namespace odeint = boost::numeric::odeint;
using State = std::array<double, 2>;

constexpr double kAi0 = 0.355028053887817239260;   // 3^{-2/3} / Gamma(2/3)
constexpr double kAiP0 = 0.258819403792806798405;  // 3^{-1/3} / Gamma(1/3)
constexpr double kSeriesEdge = 6.0;
// Ai decays for x > 0 and the series loses digits to cancellation well before 6.
constexpr double kPositiveSeriesEdge = 2.0;

State airy_series(double x) {
  const double x3 = x * x * x;
  double f = 1.0, fp = 0.0;   // sum x^{3k} / ..., derivative
  double g = x, gp = 1.0;
  double af = 1.0, ag = 1.0;  // coefficients of x^{3k}, x^{3k+1}
  double pw = 1.0;            // x^{3k}
  for (int k = 1; k < 200; ++k) {
    af /= (3.0 * k - 1.0) * (3.0 * k);
    ag /= (3.0 * k) * (3.0 * k + 1.0);
    const double pw_prev = pw;
    pw *= x3;
    const double tf = af * pw;
    const double tg = ag * pw * x;
    f += tf;
    g += tg;
    fp += af * 3.0 * k * pw_prev * x * x;
    gp += ag * (3.0 * k + 1.0) * pw;
    if (k > 4 && std::abs(tf) < 1e-18 * std::abs(f) && std::abs(tg) < 1e-18 * std::abs(g) + 1e-300) {
      break;
    }
  }
  return {kAi0 * f - kAiP0 * g, kAi0 * fp - kAiP0 * gp};
}

void airy_rhs(const State& y, State& dy, double x) {
  dy[0] = y[1];
  dy[1] = x * y[0];
}

// Integrates from x0 (state y) and records the state at each of `stops`.
std::vector<State> march(State y, double x0, const std::vector<double>& stops) {
  std::vector<double> times{x0};
  times.insert(times.end(), stops.begin(), stops.end());
  std::vector<State> out;
  const double dx = times.back() < x0 ? -1e-3 : 1e-3;
  auto stepper = odeint::make_dense_output(1e-15, 1e-14, odeint::runge_kutta_dopri5<State>());
  odeint::integrate_times(stepper, airy_rhs, y, times.begin(), times.end(), dx,
                          [&](const State& s, double) { out.push_back(s); });
  out.erase(out.begin());
  return out;
}

}  // namespace

double airy_function(double x) {
  require(std::isfinite(x) && x >= -20.0 && x <= 20.0, "airy_function: x must lie in [-20, 20]");
  if (x <= kPositiveSeriesEdge && x >= -kSeriesEdge) return airy_series(x)[0];
  if (x < 0.0) return march(airy_series(-kSeriesEdge), -kSeriesEdge, {x}).front()[0];

  // Inward from a far point: the recessive solution dominates backward marching.
  const double anchor = 1.5;
  const double far = x + 12.0;
  const State start{1.0, -std::sqrt(far) - 1.0 / (4.0 * far)};
  const auto states = march(start, far, {x, anchor});
  return states[0][0] * airy_series(anchor)[0] / states[1][0];
}

AiryDecayFit airy_decay_fit(double lo, double hi, int samples) {
  require(lo > 0.0 && hi > lo && samples >= 4, "airy_decay_fit: need 0 < lo < hi, samples >= 4");
  Eigen::MatrixXd design(samples, 3);
  Eigen::VectorXd rhs(samples);
  for (int k = 0; k < samples; ++k) {
    const double x = lo + (hi - lo) * k / (samples - 1);
    design(k, 0) = std::pow(x, 1.5);
    design(k, 1) = std::log(x);
    design(k, 2) = 1.0;
    rhs(k) = -std::log(std::abs(airy_function(x)));
  }
  const Eigen::VectorXd c = design.colPivHouseholderQr().solve(rhs);
  const Eigen::VectorXd r = design * c - rhs;
  return {c(0), c(1), c(2), std::sqrt(r.squaredNorm() / samples)};
}

}  // namespace gclab
