#include "gclab/grid_field.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>

#include "fft.hpp"
#include "gclab/errors.hpp"
#include "gclab/log_sum.hpp"

namespace gclab {

// ---- Grid1D ----------------------------------------------------------------

Grid1D::Grid1D(std::size_t n_points, double half_width)
    : n_(n_points), half_width_(half_width), h_(2.0 * half_width / static_cast<double>(n_points)) {
  require(n_points >= 16, "Grid1D: n_points must be >= 16");
  require(std::has_single_bit(n_points), "Grid1D: n_points must be a power of two");
  require(std::isfinite(half_width) && half_width > 0.0, "Grid1D: half_width must be positive");
}

std::vector<double> Grid1D::nodes() const {
  std::vector<double> x(n_);
  for (std::size_t j = 0; j < n_; ++j) x[j] = node(j);
  return x;
}

double Grid1D::wavenumber(std::size_t k) const {
  const auto n = static_cast<std::ptrdiff_t>(n_);
  auto kk = static_cast<std::ptrdiff_t>(k);
  if (kk >= n / 2) kk -= n;
  return std::numbers::pi * static_cast<double>(kk) / half_width_;
}

double Grid1D::max_wavenumber() const {
  return std::numbers::pi * static_cast<double>(n_ / 2) / half_width_;
}

// ---- WaveField ---------------------------------------------------------------

WaveField::WaveField(Grid1D grid, std::vector<cplx> samples, double time)
    : grid_(grid), samples_(std::move(samples)), time_(time) {
  require(samples_.size() == grid_.size(), "WaveField: sample count does not match grid");
  for (const cplx& v : samples_) {
    require(std::isfinite(v.real()) && std::isfinite(v.imag()),
            "WaveField: samples must be finite");
  }
}

WaveField WaveField::from_function(const Grid1D& grid, const std::function<cplx(double)>& fn,
                                   double time) {
  std::vector<cplx> s(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) s[j] = fn(grid.node(j));
  return WaveField(grid, std::move(s), time);
}

WaveField WaveField::zeros(const Grid1D& grid, double time) {
  return WaveField(grid, std::vector<cplx>(grid.size()), time);
}

WaveField WaveField::with_time(double t) const {
  WaveField out = *this;
  out.time_ = t;
  return out;
}

WaveField WaveField::with_samples(std::vector<cplx> samples) const {
  WaveField out(grid_, std::move(samples), time_);
  out.under_resolved_ = under_resolved_;
  return out;
}

WaveField WaveField::flagged(bool under_resolved) const {
  WaveField out = *this;
  out.under_resolved_ = out.under_resolved_ || under_resolved;
  return out;
}

double WaveField::l2_norm() const {
  double s = 0.0;
  for (const cplx& v : samples_) s += std::norm(v);
  return std::sqrt(s * grid_.spacing());
}

double WaveField::max_abs() const {
  double m = 0.0;
  for (const cplx& v : samples_) m = std::max(m, std::abs(v));
  return m;
}

double WaveField::spectral_tail_fraction() const {
  std::vector<cplx> spec(samples_.size());
  detail::fft_forward(samples_, spec);
  const auto n = static_cast<double>(samples_.size());
  const double cutoff = 0.9 * (n / 2.0);
  double total = 0.0;
  double tail = 0.0;
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const double e = std::norm(spec[k]);
    total += e;
    const double kk = k < spec.size() / 2 ? static_cast<double>(k) : static_cast<double>(k) - n;
    if (std::abs(kk) > cutoff) tail += e;
  }
  return total > 0.0 ? tail / total : 0.0;
}

double WaveField::boundary_ratio() const {
  const double m = max_abs();
  if (m == 0.0) return 0.0;
  return std::max(std::abs(samples_.front()), std::abs(samples_.back())) / m;
}

bool WaveField::is_resolved() const {
  return boundary_ratio() <= kBoundaryAmplitudeThreshold &&
         spectral_tail_fraction() <= kSpectralTailThreshold;
}

bool WaveField::is_zero() const {
  return std::all_of(samples_.begin(), samples_.end(), [](cplx v) { return v == cplx{}; });
}

WaveField operator+(const WaveField& a, const WaveField& b) {
  require(a.grid() == b.grid(), "WaveField +: grids differ");
  std::vector<cplx> s(a.size());
  for (std::size_t j = 0; j < s.size(); ++j) s[j] = a[j] + b[j];
  return a.with_samples(std::move(s)).flagged(b.under_resolved());
}

WaveField operator-(const WaveField& a, const WaveField& b) {
  require(a.grid() == b.grid(), "WaveField -: grids differ");
  std::vector<cplx> s(a.size());
  for (std::size_t j = 0; j < s.size(); ++j) s[j] = a[j] - b[j];
  return a.with_samples(std::move(s)).flagged(b.under_resolved());
}

WaveField operator*(cplx c, const WaveField& a) {
  std::vector<cplx> s(a.size());
  for (std::size_t j = 0; j < s.size(); ++j) s[j] = c * a[j];
  return a.with_samples(std::move(s));
}

double relative_l2_error(const WaveField& value, const WaveField& reference) {
  const double ref = reference.l2_norm();
  const double diff = (value - reference).l2_norm();
  return ref > 0.0 ? diff / ref : diff;
}

double max_abs_difference(const WaveField& a, const WaveField& b) {
  require(a.grid() == b.grid(), "max_abs_difference: grids differ");
  double m = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
  return m;
}

// ---- weights -------------------------------------------------------------------

namespace {

constexpr int kMollifierNodes = 96;

// Normalised smooth bump on (-1, 1), sampled at midpoints.
const std::vector<std::pair<double, double>>& mollifier_rule() {
  static const auto rule = [] {
    std::vector<std::pair<double, double>> r;
    double total = 0.0;
    for (int i = 0; i < kMollifierNodes; ++i) {
      const double y = -1.0 + (i + 0.5) * 2.0 / kMollifierNodes;
      const double wgt = std::exp(-1.0 / (1.0 - y * y));
      r.emplace_back(y, wgt);
      total += wgt;
    }
    for (auto& [y, wgt] : r) wgt /= total;
    return r;
  }();
  return rule;
}

double mollified_power(double x, double epsilon, double rho) {
  double acc = 0.0;
  for (const auto& [y, wgt] : mollifier_rule()) {
    acc += wgt * std::pow(std::abs(x - rho * y), 2.0 - epsilon);
  }
  return acc;
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

void validate_weight(const WeightSpec& w) {
  std::visit(
      Overloaded{
          [](const GaussianWeight& g) {
            require(std::isfinite(g.gamma) && g.gamma >= 0.0, "GaussianWeight: gamma must be >= 0");
          },
          [](const LinearWeight& l) {
            require(std::isfinite(l.lambda), "LinearWeight: lambda must be finite");
          },
          [](const MixedWeight& m) {
            require(m.alpha > 0.0 && m.beta > 0.0, "MixedWeight: alpha, beta must be > 0");
          },
          [](const MovingWeight& m) {
            require(m.mu > 0.0 && m.radius > 0.0 && static_cast<bool>(m.phi),
                    "MovingWeight: mu, R must be > 0 and phi set");
          },
          [](const TruncatedWeight& t) {
            require(t.gamma >= 0.0 && t.radius > 0.0, "TruncatedWeight: gamma >= 0, R > 0");
          },
          [](const SubquadraticWeight& s) {
            require(s.gamma >= 0.0, "SubquadraticWeight: gamma must be >= 0");
            require(s.epsilon > 0.0 && s.epsilon < 1.0, "SubquadraticWeight: eps in (0,1)");
            require(s.rho > 0.0, "SubquadraticWeight: rho must be > 0");
          },
      },
      w);
}

double weight_exponent(const WeightSpec& w, double x, double t) {
  return std::visit(
      Overloaded{
          [&](const GaussianWeight& g) { return g.gamma * x * x; },
          [&](const LinearWeight& l) { return l.lambda * x; },
          [&](const MixedWeight& m) {
            const double d = m.alpha * t + (1.0 - t) * m.beta;
            return x * x / (d * d);
          },
          [&](const MovingWeight& m) {
            const double q = x / m.radius + m.phi(t);
            return m.mu * q * q;
          },
          [&](const TruncatedWeight& tw) {
            return tw.gamma * std::min(x * x, tw.radius * tw.radius);
          },
          [&](const SubquadraticWeight& s) {
            return s.gamma * mollified_power(x, s.epsilon, s.rho);
          },
      },
      w);
}

bool weight_is_trivial(const WeightSpec& w) {
  return std::visit(Overloaded{
                        [](const GaussianWeight& g) { return g.gamma == 0.0; },
                        [](const LinearWeight& l) { return l.lambda == 0.0; },
                        [](const TruncatedWeight& t) { return t.gamma == 0.0; },
                        [](const SubquadraticWeight& s) { return s.gamma == 0.0; },
                        [](const auto&) { return false; },
                    },
                    w);
}

std::string weight_name(const WeightSpec& w) {
  return std::visit(Overloaded{
                        [](const GaussianWeight&) { return std::string("gaussian"); },
                        [](const LinearWeight&) { return std::string("linear"); },
                        [](const MixedWeight&) { return std::string("mixed"); },
                        [](const MovingWeight&) { return std::string("moving"); },
                        [](const TruncatedWeight&) { return std::string("truncated"); },
                        [](const SubquadraticWeight&) { return std::string("subquadratic"); },
                    },
                    w);
}

// ---- spectral calculus -------------------------------------------------------------

std::vector<cplx> fourier_transform(const WaveField& f) {
  const Grid1D& g = f.grid();
  std::vector<cplx> spec(f.size());
  detail::fft_forward(f.samples(), spec);
  // exp(-i xi_k x_j) = exp(i xi_k L) exp(-2 pi i j k / N), and exp(i xi_k L) = (-1)^k.
  const auto n = static_cast<std::ptrdiff_t>(f.size());
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const std::ptrdiff_t kk = k < n / 2 ? k : k - n;
    const double sign = (kk % 2 == 0) ? 1.0 : -1.0;
    spec[static_cast<std::size_t>(k)] *= sign * g.spacing();
  }
  return spec;
}

double spectral_energy(const WaveField& f) {
  double s = 0.0;
  for (const cplx& c : fourier_transform(f)) s += std::norm(c);
  return s / (2.0 * f.grid().half_width());
}

WaveField apply_multiplier(const WaveField& f, const std::function<cplx(double)>& m,
                           bool zero_nyquist) {
  const Grid1D& g = f.grid();
  const std::size_t n = f.size();
  std::vector<cplx> spec(n);
  detail::fft_forward(f.samples(), spec);

  double total = 0.0;
  double tail = 0.0;
  const double cutoff = 0.9 * static_cast<double>(n / 2);
  for (std::size_t k = 0; k < n; ++k) {
    const double e = std::norm(spec[k]);
    total += e;
    const double kk = k < n / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(n);
    if (std::abs(kk) > cutoff) tail += e;
    spec[k] *= m(g.wavenumber(k));
  }
  if (zero_nyquist) spec[n / 2] = 0.0;
  detail::fft_inverse(spec, spec);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (auto& v : spec) v *= inv_n;
  const bool under = total > 0.0 && tail / total > kSpectralTailThreshold;
  return f.with_samples(std::move(spec)).flagged(under);
}

WaveField spectral_derivative(const WaveField& f, int order) {
  require(order >= 1 && order <= 3, "spectral_derivative: order must be 1, 2 or 3");
  const cplx i{0.0, 1.0};
  return apply_multiplier(
      f, [&](double xi) { return std::pow(i * xi, order); }, order % 2 == 1);
}

SpectralInterpolant::SpectralInterpolant(const WaveField& f) : grid_(f.grid()), coeffs_(f.size()) {
  detail::fft_forward(f.samples(), coeffs_);
  const double inv_n = 1.0 / static_cast<double>(f.size());
  for (auto& c : coeffs_) c *= inv_n;
  // Split the Nyquist coefficient symmetrically so the interpolant of real data is real.
  coeffs_[f.size() / 2] *= 0.5;
}

cplx SpectralInterpolant::operator()(double x) const {
  const double L = grid_.half_width();
  require(x >= -L - 1e-12 && x <= L + 1e-12, "SpectralInterpolant: point outside the box");
  const std::size_t n = coeffs_.size();
  const double theta = std::numbers::pi * (x + L) / L;
  // sum_k c_k exp(i k theta), k in [-N/2, N/2], Nyquist counted at both ends.
  cplx acc = coeffs_[0];
  const cplx step = std::polar(1.0, theta);
  cplx rot = step;
  for (std::size_t k = 1; k < n / 2; ++k) {
    acc += coeffs_[k] * rot + coeffs_[n - k] * std::conj(rot);
    rot *= step;
  }
  acc += coeffs_[n / 2] * (rot + std::conj(rot));
  return acc;
}

// ---- weighted norms -------------------------------------------------------------------

double WeightedNorm::value() const { return std::exp(log_norm); }

WeightedIntegral weighted_square_integral(const WaveField& f,
                                          const std::function<double(double)>& exponent,
                                          const std::function<bool(double)>& mask) {
  const Grid1D& g = f.grid();
  const double log_h = std::log(g.spacing());
  LogSum sum;
  const std::size_t n = f.size();
  std::vector<double> terms(n, -std::numeric_limits<double>::infinity());
  for (std::size_t j = 0; j < n; ++j) {
    const double x = g.node(j);
    if (mask && !mask(x)) continue;
    // |f|^2 underflows long before |f| does on wide boxes.
    const double a = std::abs(f[j]);
    if (a == 0.0) continue;
    terms[j] = 2.0 * (exponent(x) + std::log(a)) + log_h;
    sum.add_log(terms[j]);
  }
  WeightedIntegral out{sum.log(), false};
  if (!sum.empty()) {
    const double edge = std::max(terms.front(), terms.back());
    out.divergent = edge - sum.max_log() > std::log(kDivergenceThreshold);
  }
  return out;
}

WeightedNorm weighted_l2_norm(const WaveField& f, const WeightSpec& w) {
  validate_weight(w);
  const double t = f.time();
  auto integral =
      weighted_square_integral(f, [&](double x) { return weight_exponent(w, x, t); });
  WeightedNorm out{0.5 * integral.log_value, integral.divergent};
  if (weight_is_trivial(w)) out.divergent = false;
  return out;
}

// ---- Gaussian averaging identity ----------------------------------------------------------

namespace {

// Trapezoid rule of exp(l(lambda)) over [a, b] in the log domain.
double log_trapezoid(const std::function<double(double)>& log_integrand, double a, double b,
                     double h) {
  const auto n = static_cast<std::size_t>(std::ceil((b - a) / h));
  const double step = (b - a) / static_cast<double>(n);
  LogSum s;
  for (std::size_t i = 0; i <= n; ++i) {
    const double lam = a + static_cast<double>(i) * step;
    const double endpoint = (i == 0 || i == n) ? std::log(0.5) : 0.0;
    s.add_log(log_integrand(lam) + endpoint);
  }
  return s.log() + std::log(step);
}

}  // namespace

LambdaAverageResult lambda_average_identity_check(double gamma, std::span<const double> probes) {
  require(gamma > 0.0, "lambda_average_identity_check: gamma must be > 0");
  LambdaAverageResult out{{probes.begin(), probes.end()}, {}, 0.0, true};
  const double root = std::sqrt(gamma);
  for (double x : probes) {
    auto log_integrand = [&](double lam) { return 2.0 * root * lam * x - 0.5 * lam * lam; };
    // Bracket the mass: walk outward from 0 until the integrand is e^-60 below
    // the largest value seen.
    double peak = log_integrand(0.0);
    double lo = 0.0;
    double hi = 0.0;
    for (int guard = 0; guard < 100000; ++guard) {
      const double v = log_integrand(hi);
      peak = std::max(peak, v);
      if (v < peak - 60.0 && hi > 0.0) break;
      hi += 1.0;
    }
    for (int guard = 0; guard < 100000; ++guard) {
      const double v = log_integrand(lo);
      peak = std::max(peak, v);
      if (v < peak - 60.0 && lo < 0.0) break;
      lo -= 1.0;
    }
    const double coarse = log_trapezoid(log_integrand, lo, hi, 0.25);
    const double fine = log_trapezoid(log_integrand, lo, hi, 0.125);
    if (std::abs(std::expm1(coarse - fine)) > 1e-13) out.converged = false;
    const double exact = 0.5 * std::log(2.0 * std::numbers::pi) + 2.0 * gamma * x * x;
    const double rel = std::abs(std::expm1(fine - exact));
    out.relative_errors.push_back(rel);
    out.max_relative_error = std::max(out.max_relative_error, rel);
  }
  if (!out.converged) {
    throw NumericalError("lambda_average_identity_check: quadrature did not converge");
  }
  return out;
}

}  // namespace gclab
