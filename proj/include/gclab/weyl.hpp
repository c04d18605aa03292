#pragma once

// Exact differential operators sum_k c_k d^k in one space variable, with
// coefficients in a Laurent polynomial ring over Q(i).

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace gclab::weyl {

using Q = boost::multiprecision::cpp_rational;

struct QI {
  Q re{0};
  Q im{0};

  QI() = default;
  QI(Q r) : re(std::move(r)) {}  // NOLINT
  QI(Q r, Q i) : re(std::move(r)), im(std::move(i)) {}
  QI(long long n) : re(n) {}  // NOLINT
  static QI i() { return {Q{0}, Q{1}}; }

  bool is_zero() const { return re == 0 && im == 0; }
  QI conj() const { return {re, -im}; }
  QI operator-() const { return {-re, -im}; }
  QI& operator+=(const QI& o);
  QI& operator-=(const QI& o);
  QI& operator*=(const QI& o);
  friend QI operator+(QI a, const QI& b) { return a += b; }
  friend QI operator-(QI a, const QI& b) { return a -= b; }
  friend QI operator*(QI a, const QI& b) { return a *= b; }
  friend bool operator==(const QI& a, const QI& b) { return a.re == b.re && a.im == b.im; }
  std::string str() const;
};

enum class Family : std::uint8_t {
  kX,  // space variable
  kT,  // time variable
  kGamma,
  kMu,
  kR,
  kA,
  kB,
  kAlpha,
  kBeta,
  kEps,
  kLambda,
  kPhi,    // phi(t)
  kPsi,    // psi(t)
  kAt,     // a(t)
  kH,      // h(t)
  kPhiX,   // Phi(x)
  kW,      // w(x, t)
  kVre,    // Re V(x, t)
  kVim,    // Im V(x, t)
};

bool depends_on_x(Family f);
bool depends_on_t(Family f);

struct Symbol {
  Family family;
  std::uint8_t dx = 0;
  std::uint8_t dt = 0;
  auto operator<=>(const Symbol&) const = default;
  std::string str() const;
};

// Sorted by symbol, exponents nonzero (negative allowed).
using Monomial = std::vector<std::pair<Symbol, int>>;

class Poly {
 public:
  Poly() = default;
  Poly(QI c);  // NOLINT
  Poly(long long n) : Poly(QI(n)) {}  // NOLINT
  static Poly sym(Family f, int dx = 0, int dt = 0);
  static Poly i() { return Poly(QI::i()); }
  static Poly rational(long long num, long long den);

  bool is_zero() const { return terms_.empty(); }
  bool is_monomial() const { return terms_.size() == 1; }
  const std::map<Monomial, QI>& terms() const { return terms_; }

  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly operator-() const;
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(const Poly& a, const Poly& b);
  friend bool operator==(const Poly& a, const Poly& b) { return a.terms_ == b.terms_; }

  // Integer power; negative powers only for monomials.
  Poly pow(int e) const;
  Poly conj() const;
  Poly dx() const;
  Poly dt() const;
  std::size_t size() const { return terms_.size(); }
  std::string str() const;

  void add_term(const Monomial& m, const QI& c);

 private:
  std::map<Monomial, QI> terms_;
};

std::string monomial_str(const Monomial& m);

// Replace every symbol of `family` (with its derivative orders) by the matching
// derivative of `value`. Negative exponents need a monomial replacement.
Poly substitute(const Poly& p, Family family, const Poly& value);

constexpr int kMaxOrder = 6;

class DiffOp {
 public:
  DiffOp() = default;
  DiffOp(Poly c);  // NOLINT
  DiffOp(long long n) : DiffOp(Poly(n)) {}  // NOLINT
  static DiffOp d(int k = 1);

  int order() const;
  bool is_zero() const { return coeffs_.empty(); }
  const std::map<int, Poly>& coeffs() const { return coeffs_; }
  Poly coeff(int k) const;

  DiffOp& operator+=(const DiffOp& o);
  DiffOp& operator-=(const DiffOp& o);
  DiffOp operator-() const;
  friend DiffOp operator+(DiffOp a, const DiffOp& b) { return a += b; }
  friend DiffOp operator-(DiffOp a, const DiffOp& b) { return a -= b; }
  friend bool operator==(const DiffOp& a, const DiffOp& b) { return a.coeffs_ == b.coeffs_; }

  std::size_t monomial_count() const;
  std::string str() const;

  void add(int k, const Poly& c);

 private:
  std::map<int, Poly> coeffs_;
};

// Composition P o Q in normal order. Throws PreconditionError past kMaxOrder.
DiffOp op_multiply(const DiffOp& p, const DiffOp& q);
inline DiffOp operator*(const DiffOp& p, const DiffOp& q) { return op_multiply(p, q); }
DiffOp commutator(const DiffOp& p, const DiffOp& q);
DiffOp t_derivative(const DiffOp& p);
// L^2(dx) adjoint; conjugates the imaginary unit, symbols are real.
DiffOp formal_adjoint(const DiffOp& p);
DiffOp substitute(const DiffOp& p, Family family, const Poly& value);

struct Split {
  DiffOp sym;
  DiffOp antisym;
};
Split sym_antisym_split(const DiffOp& p);

// z ((d - w_x)^2 + V) + w_t: the equation for f = e^w u when u_t = z (u_xx + V u).
DiffOp conjugated_generator(const Poly& z, const Poly& w, const Poly& v);

// First monomial where the two differ, as "d^k: monomial (lhs vs rhs)", or "".
std::string first_difference(const DiffOp& lhs, const DiffOp& rhs);

}  // namespace gclab::weyl
