#pragma once

// Periodic 1-D grid, complex wave fields, spectral calculus and weighted
// L2 functionals.
//
// Conventions used everywhere in the library:
//   * nodes x_j = -L + j h, j = 0..N-1, h = 2L/N. The node set contains -L
//     but not +L, so it is symmetric about 0 up to a one-node offset.
//   * wavenumbers xi_k = pi k / L with k in [-N/2, N/2), stored in FFT order.
//   * Fourier transform  u^(xi_k) = sum_j u_j exp(-i xi_k x_j) h.
//     Parseval then reads  sum_j |u_j|^2 h = (2L)^-1 sum_k |u^(xi_k)|^2.

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace gclab {

using cplx = std::complex<double>;

class Grid1D {
 public:
  Grid1D(std::size_t n_points, double half_width);

  std::size_t size() const { return n_; }
  double half_width() const { return half_width_; }
  double spacing() const { return h_; }
  double node(std::size_t j) const { return -half_width_ + static_cast<double>(j) * h_; }
  std::vector<double> nodes() const;

  // Wavenumber of FFT slot k (0 <= k < N).
  double wavenumber(std::size_t k) const;
  double max_wavenumber() const;

  bool operator==(const Grid1D& other) const = default;

 private:
  std::size_t n_;
  double half_width_;
  double h_;
};

// Samples of u(., t) on a Grid1D. Immutable after construction.
class WaveField {
 public:
  WaveField(Grid1D grid, std::vector<cplx> samples, double time = 0.0);

  static WaveField from_function(const Grid1D& grid, const std::function<cplx(double)>& fn,
                                 double time = 0.0);
  static WaveField zeros(const Grid1D& grid, double time = 0.0);

  const Grid1D& grid() const { return grid_; }
  std::span<const cplx> samples() const { return samples_; }
  const std::vector<cplx>& values() const { return samples_; }
  cplx operator[](std::size_t j) const { return samples_[j]; }
  std::size_t size() const { return samples_.size(); }
  double time() const { return time_; }

  // Set when an operation that produced this field saw a spectral tail above
  // the resolution threshold. Propagates through later operations.
  bool under_resolved() const { return under_resolved_; }

  WaveField with_time(double t) const;
  WaveField with_samples(std::vector<cplx> samples) const;
  WaveField flagged(bool under_resolved) const;

  double l2_norm() const;
  double max_abs() const;
  // Fraction of spectral energy in the top 10% of |k|.
  double spectral_tail_fraction() const;
  // max(|f_0|, |f_{N-1}|) / max_j |f_j|; 0 for the zero field.
  double boundary_ratio() const;
  bool is_resolved() const;
  bool is_zero() const;

 private:
  Grid1D grid_;
  std::vector<cplx> samples_;
  double time_;
  bool under_resolved_ = false;
};

inline constexpr double kSpectralTailThreshold = 1e-10;
inline constexpr double kBoundaryAmplitudeThreshold = 1e-14;
inline constexpr double kDivergenceThreshold = 1e-8;

WaveField operator+(const WaveField& a, const WaveField& b);
WaveField operator-(const WaveField& a, const WaveField& b);
WaveField operator*(cplx s, const WaveField& a);
// L2 norm of the difference divided by the L2 norm of `reference`.
double relative_l2_error(const WaveField& value, const WaveField& reference);
double max_abs_difference(const WaveField& a, const WaveField& b);

// ---- weights ---------------------------------------------------------------

// exp(gamma x^2)
struct GaussianWeight { double gamma; };
// exp(lambda x)
struct LinearWeight { double lambda; };
// exp(x^2 / (alpha t + (1-t) beta)^2), t taken from the field time.
struct MixedWeight { double alpha; double beta; };
// exp(mu (x/R + phi(t))^2)
struct MovingWeight {
  double mu;
  double radius;
  std::function<double(double)> phi;
};
// exp(gamma phi_R(x)), phi_R(x) = min(x^2, R^2): quadratic inside, constant outside.
struct TruncatedWeight { double gamma; double radius; };
// exp(gamma (theta_rho * |.|^(2-eps))(x)): subquadratic growth, mollified at scale rho.
struct SubquadraticWeight { double gamma; double epsilon; double rho; };

using WeightSpec = std::variant<GaussianWeight, LinearWeight, MixedWeight, MovingWeight,
                                TruncatedWeight, SubquadraticWeight>;

void validate_weight(const WeightSpec& w);
// Exponent w(x, t) such that the weight is exp(w).
double weight_exponent(const WeightSpec& w, double x, double t);
bool weight_is_trivial(const WeightSpec& w);
std::string weight_name(const WeightSpec& w);

// ---- spectral calculus -------------------------------------------------------

// u^(xi_k) in FFT order, with the documented phase and h normalisation.
std::vector<cplx> fourier_transform(const WaveField& f);
// (2L)^-1 sum_k |u^(xi_k)|^2
double spectral_energy(const WaveField& f);

// Applies the Fourier multiplier m(xi). The Nyquist slot is zeroed when
// `zero_nyquist` is set (needed for odd symbols acting on real data).
WaveField apply_multiplier(const WaveField& f, const std::function<cplx(double)>& m,
                           bool zero_nyquist = false);

// order-th derivative by the multiplier (i xi)^order, order in {1, 2, 3}.
WaveField spectral_derivative(const WaveField& f, int order);

// Band-limited (trigonometric) interpolant of f at an arbitrary x inside the box.
class SpectralInterpolant {
 public:
  explicit SpectralInterpolant(const WaveField& f);
  cplx operator()(double x) const;
  double half_width() const { return grid_.half_width(); }

 private:
  Grid1D grid_;
  std::vector<cplx> coeffs_;
};

// ---- weighted norms ------------------------------------------------------------

// Extended-real result of a weighted L2 norm. `log_norm` is -inf for the zero
// field and may exceed the double range of exp().
struct WeightedNorm {
  double log_norm;
  bool divergent;
  double value() const;
  double log_squared() const { return 2.0 * log_norm; }
};

// (sum_j exp(2 w(x_j)) |f_j|^2 h)^(1/2) with running exponent shift. The
// divergent flag is raised for non-trivial weights when the integrand at a
// boundary node exceeds 1e-8 times the largest term.
WeightedNorm weighted_l2_norm(const WaveField& f, const WeightSpec& w);

// General log-domain quadrature of exp(2 w(x)) |f|^2 restricted to nodes where
// `mask(x)` holds. Returns log of the integral (not its square root).
struct WeightedIntegral {
  double log_value;
  bool divergent;
};
WeightedIntegral weighted_square_integral(const WaveField& f,
                                          const std::function<double(double)>& exponent,
                                          const std::function<bool(double)>& mask = {});

// ---- Gaussian averaging identity ------------------------------------------------

struct LambdaAverageResult {
  std::vector<double> probes;
  std::vector<double> relative_errors;
  double max_relative_error;
  bool converged;
};

// Integrates  int exp(2 sqrt(gamma) lambda x) exp(-lambda^2/2) d lambda  by
// trapezoid quadrature in the log domain and compares with
// sqrt(2 pi) exp(2 gamma x^2) at each probe.
LambdaAverageResult lambda_average_identity_check(double gamma, std::span<const double> probes);

// ---- serialization -----------------------------------------------------------------

// CSV with header "x,re,im", 17 significant digits.
void write_field_csv(const WaveField& f, const std::string& path);
// Binary run artifact, little-endian:
//   bytes 0..7   magic "GCLABFLD"
//   bytes 8..15  uint64 n_points
//   bytes 16..23 float64 half_width L
//   bytes 24..31 float64 time t
//   then n_points pairs of float64 (re, im)
void write_field_binary(const WaveField& f, const std::string& path);
WaveField read_field_binary(const std::string& path);

}  // namespace gclab
