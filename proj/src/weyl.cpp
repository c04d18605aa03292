#include "gclab/weyl.hpp"

#include <sstream>

#include "gclab/errors.hpp"

namespace gclab::weyl {

QI& QI::operator+=(const QI& o) {
  re += o.re;
  im += o.im;
  return *this;
}

QI& QI::operator-=(const QI& o) {
  re -= o.re;
  im -= o.im;
  return *this;
}

QI& QI::operator*=(const QI& o) {
  Q r = re * o.re - im * o.im;
  im = re * o.im + im * o.re;
  re = std::move(r);
  return *this;
}

std::string QI::str() const {
  std::ostringstream os;
  if (im == 0) {
    os << re;
  } else if (re == 0) {
    if (im == 1) os << "i";
    else if (im == -1) os << "-i";
    else os << im << "i";
  } else {
    os << "(" << re << (im > 0 ? "+" : "-");
    if (abs(im) != 1) os << abs(im);
    os << "i)";
  }
  return os.str();
}

bool depends_on_x(Family f) {
  switch (f) {
    case Family::kX:
    case Family::kPhiX:
    case Family::kW:
    case Family::kVre:
    case Family::kVim:
      return true;
    default:
      return false;
  }
}

bool depends_on_t(Family f) {
  switch (f) {
    case Family::kT:
    case Family::kPhi:
    case Family::kPsi:
    case Family::kAt:
    case Family::kH:
    case Family::kW:
    case Family::kVre:
    case Family::kVim:
      return true;
    default:
      return false;
  }
}

namespace {

const char* base_name(Family f) {
  switch (f) {
    case Family::kX: return "x";
    case Family::kT: return "t";
    case Family::kGamma: return "gamma";
    case Family::kMu: return "mu";
    case Family::kR: return "R";
    case Family::kA: return "a";
    case Family::kB: return "b";
    case Family::kAlpha: return "alpha";
    case Family::kBeta: return "beta";
    case Family::kEps: return "eps";
    case Family::kLambda: return "lambda";
    case Family::kPhi: return "phi";
    case Family::kPsi: return "psi";
    case Family::kAt: return "a(t)";
    case Family::kH: return "h";
    case Family::kPhiX: return "Phi";
    case Family::kW: return "w";
    case Family::kVre: return "ReV";
    case Family::kVim: return "ImV";
  }
  return "?";
}

bool single_variable(Family f) { return depends_on_x(f) != depends_on_t(f); }

// D(s) for the x- or t-derivation, as a polynomial.
Poly derive_symbol(const Symbol& s, bool in_x) {
  if (in_x) {
    if (s.family == Family::kX) return Poly(1);
    if (!depends_on_x(s.family)) return {};
    return Poly::sym(s.family, s.dx + 1, s.dt);
  }
  if (s.family == Family::kT) return Poly(1);
  if (!depends_on_t(s.family)) return {};
  return Poly::sym(s.family, s.dx, s.dt + 1);
}

Monomial mono_mul(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.reserve(a.size() + b.size());
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() || j != b.end()) {
    if (j == b.end() || (i != a.end() && i->first < j->first)) {
      out.push_back(*i++);
    } else if (i == a.end() || j->first < i->first) {
      out.push_back(*j++);
    } else {
      const int e = i->second + j->second;
      if (e != 0) out.emplace_back(i->first, e);
      ++i;
      ++j;
    }
  }
  return out;
}

Poly derive(const Poly& p, bool in_x) {
  Poly out;
  for (const auto& [m, c] : p.terms()) {
    for (std::size_t k = 0; k < m.size(); ++k) {
      const Poly ds = derive_symbol(m[k].first, in_x);
      if (ds.is_zero()) continue;
      Monomial rest = m;
      if (rest[k].second == 1) rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(k));
      else rest[k].second -= 1;
      Poly term;
      term.add_term(rest, c * QI(m[k].second));
      out += term * ds;
    }
  }
  return out;
}

Q binomial(int n, int k) {
  Q r{1};
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

}  // namespace

std::string Symbol::str() const {
  std::string out = base_name(family);
  if (dx == 0 && dt == 0) return out;
  if (single_variable(family)) return out + std::string(dx + dt, '\'');
  return out + "_" + std::string(dx, 'x') + std::string(dt, 't');
}

std::string monomial_str(const Monomial& m) {
  if (m.empty()) return "1";
  std::string out;
  for (const auto& [s, e] : m) {
    if (!out.empty()) out += "*";
    out += s.str();
    if (e != 1) out += "^" + std::to_string(e);
  }
  return out;
}

Poly::Poly(QI c) {
  if (!c.is_zero()) terms_.emplace(Monomial{}, std::move(c));
}

Poly Poly::sym(Family f, int dx, int dt) {
  require(dx >= 0 && dt >= 0 && dx < 64 && dt < 64, "Poly::sym: derivative order out of range");
  require(dx == 0 || depends_on_x(f), std::string("Poly::sym: ") + base_name(f) + " does not depend on x");
  require(dt == 0 || depends_on_t(f), std::string("Poly::sym: ") + base_name(f) + " does not depend on t");
  if (f == Family::kX && dx > 0) return dx == 1 ? Poly(1) : Poly();
  if (f == Family::kT && dt > 0) return dt == 1 ? Poly(1) : Poly();
  Poly p;
  p.terms_.emplace(Monomial{{Symbol{f, static_cast<std::uint8_t>(dx), static_cast<std::uint8_t>(dt)}, 1}},
                   QI(1));
  return p;
}

Poly Poly::rational(long long num, long long den) {
  require(den != 0, "Poly::rational: zero denominator");
  return Poly(QI(Q(num, den)));
}

void Poly::add_term(const Monomial& m, const QI& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

Poly& Poly::operator+=(const Poly& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

Poly Poly::operator-() const {
  Poly out;
  for (const auto& [m, c] : terms_) out.terms_.emplace(m, -c);
  return out;
}

Poly operator*(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) out.add_term(mono_mul(ma, mb), ca * cb);
  }
  return out;
}

Poly Poly::pow(int e) const {
  if (e < 0) {
    require(is_monomial(), "Poly::pow: negative power of a non-monomial");
    const auto& [m, c] = *terms_.begin();
    require(!c.is_zero(), "Poly::pow: zero base");
    const Q n = c.re * c.re + c.im * c.im;
    QI inv(c.re / n, -c.im / n);
    Monomial mi = m;
    for (auto& [s, k] : mi) k = -k;
    Poly base;
    base.add_term(mi, inv);
    return base.pow(-e);
  }
  Poly out(1);
  for (int k = 0; k < e; ++k) out = out * *this;
  return out;
}

Poly Poly::conj() const {
  Poly out;
  for (const auto& [m, c] : terms_) out.terms_.emplace(m, c.conj());
  return out;
}

Poly Poly::dx() const { return derive(*this, true); }
Poly Poly::dt() const { return derive(*this, false); }

std::string Poly::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& [m, c] : terms_) {
    std::string coef = c.str();
    std::string sign = " + ";
    if (c.im == 0 && c.re < 0) {
      sign = " - ";
      coef = (-c).str();
    } else if (c.re == 0 && c.im < 0) {
      sign = " - ";
      coef = (-c).str();
    }
    if (out.empty()) out = sign == " - " ? "-" : "";
    else out += sign;
    if (m.empty()) out += coef;
    else if (coef == "1") out += monomial_str(m);
    else out += coef + "*" + monomial_str(m);
  }
  return out;
}

Poly substitute(const Poly& p, Family family, const Poly& value) {
  Poly out;
  for (const auto& [m, c] : p.terms()) {
    Poly term(c);
    Monomial rest;
    for (const auto& [s, e] : m) {
      if (s.family != family) {
        rest.emplace_back(s, e);
        continue;
      }
      Poly v = value;
      for (int k = 0; k < s.dx; ++k) v = v.dx();
      for (int k = 0; k < s.dt; ++k) v = v.dt();
      term = term * v.pow(e);
    }
    Poly r;
    r.add_term(rest, QI(1));
    out += term * r;
  }
  return out;
}

DiffOp::DiffOp(Poly c) {
  if (!c.is_zero()) coeffs_.emplace(0, std::move(c));
}

DiffOp DiffOp::d(int k) {
  require(k >= 0 && k <= kMaxOrder, "DiffOp::d: order exceeds the degree bound");
  DiffOp out;
  out.coeffs_.emplace(k, Poly(1));
  return out;
}

int DiffOp::order() const { return coeffs_.empty() ? -1 : coeffs_.rbegin()->first; }

Poly DiffOp::coeff(int k) const {
  auto it = coeffs_.find(k);
  return it == coeffs_.end() ? Poly{} : it->second;
}

void DiffOp::add(int k, const Poly& c) {
  require(k >= 0 && k <= kMaxOrder, "DiffOp: order exceeds the degree bound");
  if (c.is_zero()) return;
  auto [it, inserted] = coeffs_.try_emplace(k, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) coeffs_.erase(it);
  }
}

DiffOp& DiffOp::operator+=(const DiffOp& o) {
  for (const auto& [k, c] : o.coeffs_) add(k, c);
  return *this;
}

DiffOp& DiffOp::operator-=(const DiffOp& o) {
  for (const auto& [k, c] : o.coeffs_) add(k, -c);
  return *this;
}

DiffOp DiffOp::operator-() const {
  DiffOp out;
  for (const auto& [k, c] : coeffs_) out.coeffs_.emplace(k, -c);
  return out;
}

std::size_t DiffOp::monomial_count() const {
  std::size_t n = 0;
  for (const auto& [k, c] : coeffs_) n += c.size();
  return n;
}

std::string DiffOp::str() const {
  if (coeffs_.empty()) return "0";
  std::string out;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    if (!out.empty()) out += " + ";
    const std::string d = it->first == 0   ? ""
                          : it->first == 1 ? "d"
                                           : "d^" + std::to_string(it->first);
    if (d.empty()) out += "(" + it->second.str() + ")";
    else if (it->second == Poly(1)) out += d;
    else out += "(" + it->second.str() + ")*" + d;
  }
  return out;
}

DiffOp op_multiply(const DiffOp& p, const DiffOp& q) {
  if (p.is_zero() || q.is_zero()) return {};
  if (p.order() + q.order() > kMaxOrder) {
    throw PreconditionError("op_multiply: product order " + std::to_string(p.order() + q.order()) +
                            " exceeds the bound " + std::to_string(kMaxOrder));
  }
  DiffOp out;
  for (const auto& [k, c] : p.coeffs()) {
    for (const auto& [m, e] : q.coeffs()) {
      // d^k e = sum_j C(k, j) e^{(j)} d^{k-j}
      Poly ej = e;
      for (int j = 0; j <= k && !ej.is_zero(); ++j) {
        out.add(k - j + m, c * ej * Poly(QI(binomial(k, j))));
        ej = ej.dx();
      }
    }
  }
  return out;
}

DiffOp commutator(const DiffOp& p, const DiffOp& q) { return p * q - q * p; }

DiffOp t_derivative(const DiffOp& p) {
  DiffOp out;
  for (const auto& [k, c] : p.coeffs()) out.add(k, c.dt());
  return out;
}

DiffOp formal_adjoint(const DiffOp& p) {
  DiffOp out;
  for (const auto& [k, c] : p.coeffs()) {
    const Poly sign(k % 2 == 0 ? 1 : -1);
    Poly cj = c.conj();
    for (int j = 0; j <= k && !cj.is_zero(); ++j) {
      out.add(k - j, sign * Poly(QI(binomial(k, j))) * cj);
      cj = cj.dx();
    }
  }
  return out;
}

DiffOp substitute(const DiffOp& p, Family family, const Poly& value) {
  DiffOp out;
  for (const auto& [k, c] : p.coeffs()) out.add(k, substitute(c, family, value));
  return out;
}

Split sym_antisym_split(const DiffOp& p) {
  const DiffOp adj = formal_adjoint(p);
  const Poly half = Poly::rational(1, 2);
  Split s{DiffOp(half) * (p + adj), DiffOp(half) * (p - adj)};
  if (!(formal_adjoint(s.sym) == s.sym) || !(formal_adjoint(s.antisym) == -s.antisym)) {
    throw NumericalError("sym_antisym_split: split parts fail the symmetry check");
  }
  return s;
}

DiffOp conjugated_generator(const Poly& z, const Poly& w, const Poly& v) {
  const DiffOp shifted = DiffOp::d(1) - DiffOp(w.dx());
  return DiffOp(z) * (shifted * shifted + DiffOp(v)) + DiffOp(w.dt());
}

std::string first_difference(const DiffOp& lhs, const DiffOp& rhs) {
  const DiffOp r = lhs - rhs;
  if (r.is_zero()) return "";
  const auto& [k, c] = *r.coeffs().begin();
  const Monomial& m = c.terms().begin()->first;
  auto find = [&](const DiffOp& op) {
    const Poly ck = op.coeff(k);
    auto it = ck.terms().find(m);
    return it == ck.terms().end() ? QI{} : it->second;
  };
  return "d^" + std::to_string(k) + ": " + monomial_str(m) + " (" + find(lhs).str() + " vs " +
         find(rhs).str() + ")";
}

}  // namespace gclab::weyl
