#include "gclab/identities.hpp"

#include <functional>
#include <map>

#include "gclab/errors.hpp"
#include "gclab/reports.hpp"

namespace gclab::weyl {
namespace {

Poly sym(Family f, int dx = 0, int dt = 0) { return Poly::sym(f, dx, dt); }
Poly q(long long n, long long d = 1) { return Poly::rational(n, d); }
DiffOp op(const Poly& c) { return DiffOp(c); }
DiffOp d(int k) { return DiffOp::d(k); }

const Poly X = sym(Family::kX);

IdentityReport make_report(std::string name, std::string description) {
  IdentityReport r;
  r.name = std::move(name);
  r.description = std::move(description);
  return r;
}
const Poly I = Poly::i();

// z = a + i b with constant a, b.
Poly z_ab() { return sym(Family::kA) + I * sym(Family::kB); }
Poly a2b2() { return sym(Family::kA).pow(2) + sym(Family::kB).pow(2); }

IdentityReport i1() {
  const Poly g = sym(Family::kGamma);
  const Split s = sym_antisym_split(conjugated_generator(z_ab(), g * X.pow(2), {}));
  IdentityReport r = make_report("I1", "S_t + [S, A] for the weight gamma x^2, free flow with z = a + ib");
  r.checks.push_back({"S_t + [S,A]", t_derivative(s.sym) + commutator(s.sym, s.antisym),
                      op(-g * a2b2()) * (op(q(8)) * d(2) - op(q(32) * g.pow(2) * X.pow(2)))});
  return r;
}

IdentityReport i2() {
  const Poly g = sym(Family::kGamma);
  auto phi = [](int k) { return sym(Family::kPhiX, k); };
  const Split s = sym_antisym_split(conjugated_generator(z_ab(), g * phi(0), {}));
  IdentityReport r = make_report("I2", "S_t + [S, A] for a time-independent weight gamma Phi(x)");
  const DiffOp bracket = op(q(4)) * d(1) * op(phi(2)) * d(1) -
                         op(q(4) * g.pow(2) * phi(2) * phi(1).pow(2)) + op(phi(4));
  r.checks.push_back({"S_t + [S,A]", t_derivative(s.sym) + commutator(s.sym, s.antisym),
                      op(-g * a2b2()) * bracket});
  return r;
}

IdentityReport i3() {
  auto a = [](int k) { return sym(Family::kAt, 0, k); };
  const Split s = sym_antisym_split(conjugated_generator(I, a(0) * X.pow(2), {}));
  const DiffOp s_disp = op(-q(4) * I * a(0)) * (op(X) * d(1) + op(q(1, 2))) + op(a(1) * X.pow(2));
  const DiffOp a_disp = op(I) * (d(2) + op(q(4) * a(0).pow(2) * X.pow(2)));
  IdentityReport r = make_report("I3", "time-dependent weight a(t) x^2 for the free Schrodinger flow, a-cleared");
  r.checks.push_back({"S", s.sym, s_disp});
  r.checks.push_back({"A", s.antisym, a_disp});
  const DiffOp lhs = op(a(0)) * (t_derivative(s_disp) + commutator(s_disp, a_disp));
  const DiffOp rhs = op(q(2) * a(1)) * s_disp - op(q(8) * a(0).pow(2)) * d(2) +
                     op((q(32) * a(0).pow(4) + a(0) * a(2) - q(2) * a(1).pow(2)) * X.pow(2));
  r.checks.push_back({"a (S_t + [S,A])", lhs, rhs});
  return r;
}

IdentityReport i4() {
  const Poly mu = sym(Family::kMu);
  const Poly rinv = sym(Family::kR).pow(-1);
  auto phi = [](int k) { return sym(Family::kPhi, 0, k); };
  auto psi = [](int k) { return sym(Family::kPsi, 0, k); };
  const Poly qq = X * rinv + phi(0);
  const Poly w = mu * qq.pow(2) + psi(0);

  // e^w (i d_t + d^2) e^{-w} = i d_t + (d - w_x)^2 - i w_t; i d_t is kept in S.
  const DiffOp shifted = d(1) - op(w.dx());
  const Split s = sym_antisym_split(shifted * shifted - op(I * w.dt()));
  const DiffOp s_disp = d(2) + op(q(4) * mu.pow(2) * rinv.pow(2) * qq.pow(2));
  const DiffOp a_disp = op(-q(4) * mu * rinv * qq) * d(1) - op(q(2) * mu * rinv.pow(2)) -
                        op(q(2) * I * mu * phi(1) * qq) - op(I * psi(1));

  IdentityReport r = make_report("I4", "[S_mu, A_mu] for the Carleman weight mu |x/R + phi|^2 + psi");
  r.checks.push_back({"S_mu - i d_t", s.sym, s_disp});
  r.checks.push_back({"A_mu", s.antisym, a_disp});
  // [i d_t, A] = i A_t
  const DiffOp lhs = commutator(s_disp, a_disp) + op(I) * t_derivative(a_disp);
  const Poly mult = q(32) * mu.pow(3) * rinv.pow(4) * qq.pow(2) + q(2) * mu * qq * phi(2) +
                    q(2) * mu * phi(1).pow(2) + psi(2);
  const DiffOp rhs = op(-q(8) * mu * rinv.pow(2)) * d(2) + op(mult) -
                     op(q(8) * I * mu * phi(1) * rinv) * d(1);
  r.checks.push_back({"[S_mu, A_mu]", lhs, rhs});

  const Poly shift = sym(Family::kR).pow(4) * phi(2) * (q(32) * mu.pow(2)).pow(-1);
  const Poly completed = q(32) * mu.pow(3) * rinv.pow(4) * (qq + shift).pow(2) -
                         sym(Family::kR).pow(4) * phi(2).pow(2) * (q(32) * mu).pow(-1) + psi(2);
  r.checks.push_back({"completed square",
                      op(q(32) * mu.pow(3) * rinv.pow(4) * qq.pow(2) + q(2) * mu * qq * phi(2) + psi(2)),
                      op(completed)});
  return r;
}

IdentityReport energy_split() {
  const Poly g = sym(Family::kGamma);
  const Poly a = sym(Family::kA);
  const Poly b = sym(Family::kB);
  auto w = [](int dx, int dt) { return sym(Family::kW, dx, dt); };
  const Poly vre = sym(Family::kVre);
  const Poly vim = sym(Family::kVim);
  const Split s = sym_antisym_split(conjugated_generator(z_ab(), g * w(0, 0), vre + I * vim));
  const DiffOp grad = op(q(2) * w(1, 0)) * d(1) + op(w(2, 0));
  const DiffOp s_disp = op(a) * (d(2) + op(g.pow(2) * w(1, 0).pow(2))) - op(I * b * g) * grad +
                        op(g * w(0, 1) + a * vre - b * vim);
  const DiffOp a_disp = op(I * b) * (d(2) + op(g.pow(2) * w(1, 0).pow(2))) - op(a * g) * grad +
                        op(I * (b * vre + a * vim));
  IdentityReport r = make_report("energy-split", "symmetric / antisymmetric parts of the conjugated generator with V");
  r.checks.push_back({"S", s.sym, s_disp});
  r.checks.push_back({"A", s.antisym, a_disp});
  r.checks.push_back({"S + A", s.sym + s.antisym,
                      conjugated_generator(z_ab(), g * w(0, 0), vre + I * vim)});
  return r;
}

IdentityReport specialization() {
  const IdentityReport r1 = i1();
  const IdentityReport r2 = i2();
  const Poly x2 = X.pow(2);
  IdentityReport r = make_report("I2-specializes-I1", "Phi = x^2 maps both sides of I2 onto I1");
  r.checks.push_back({"lhs", substitute(r2.checks[0].lhs, Family::kPhiX, x2), r1.checks[0].lhs});
  r.checks.push_back({"rhs", substitute(r2.checks[0].rhs, Family::kPhiX, x2), r1.checks[0].rhs});
  return r;
}

IdentityReport carleman_prefactor() {
  const Poly mu = sym(Family::kMu);
  const Poly r4 = sym(Family::kR).pow(4);
  const Poly eps = sym(Family::kEps);
  const Poly t = sym(Family::kT);
  const Poly expr = sym(Family::kPsi, 0, 2) - r4 * (q(32) * mu).pow(-1) * sym(Family::kPhi, 0, 2).pow(2);
  const Poly phi = t * (q(1) - t);
  const Poly psi = -(q(1) + eps) * r4 * (q(16) * mu).pow(-1) * phi;
  const Poly value = substitute(substitute(expr, Family::kPhi, phi), Family::kPsi, psi);
  IdentityReport r = make_report("carleman-prefactor", "psi'' - R^4 phi''^2 / (32 mu) for phi = t(1-t)");
  r.checks.push_back({"prefactor", op(value), op(eps * r4 * (q(8) * mu).pow(-1))});
  return r;
}

const std::map<std::string, std::function<IdentityReport()>>& registry() {
  static const std::map<std::string, std::function<IdentityReport()>> reg{
      {"I1", i1},
      {"I2", i2},
      {"I3", i3},
      {"I4", i4},
      {"energy-split", energy_split},
      {"I2-specializes-I1", specialization},
      {"carleman-prefactor", carleman_prefactor},
  };
  return reg;
}

}  // namespace

const std::vector<std::string>& identity_names() {
  static const std::vector<std::string> names{"I1", "I2", "I3", "I4", "energy-split",
                                              "I2-specializes-I1", "carleman-prefactor"};
  return names;
}

IdentityReport verify_identity(const std::string& name) {
  const auto& reg = registry();
  auto it = reg.find(name);
  if (it == reg.end()) throw PreconditionError("verify_identity: unknown identity '" + name + "'");
  IdentityReport r = it->second();
  r.passed = true;
  for (const auto& c : r.checks) {
    if (c.passed()) continue;
    r.passed = false;
    r.residual = c.lhs - c.rhs;
    r.first_difference = c.label + ": " + weyl::first_difference(c.lhs, c.rhs);
    break;
  }
  return r;
}

std::string IdentityReport::text() const {
  std::string out = name + ": " + (passed ? "PASS" : "FAIL") + "  (" + description + ")\n";
  for (const auto& c : checks) {
    out += "  " + c.label + (c.passed() ? "  ok\n" : "  MISMATCH\n");
    out += "    lhs = " + c.lhs.str() + "\n";
    out += "    rhs = " + c.rhs.str() + "\n";
  }
  out += "  residual = " + residual.str() + "\n";
  if (!passed) out += "  first difference: " + first_difference + "\n";
  return out;
}

nlohmann::json IdentityReport::json() const {
  nlohmann::json checks_json = nlohmann::json::array();
  for (const auto& c : checks) {
    checks_json.push_back({{"label", c.label},
                           {"passed", c.passed()},
                           {"lhs", c.lhs.str()},
                           {"rhs", c.rhs.str()},
                           {"residual_monomials", (c.lhs - c.rhs).monomial_count()}});
  }
  return {{"schema_version", kSchemaVersion},
          {"identity", name},
          {"description", description},
          {"passed", passed},
          {"residual", residual.str()},
          {"residual_monomials", residual.monomial_count()},
          {"first_difference", first_difference},
          {"checks", checks_json}};
}

}  // namespace gclab::weyl
