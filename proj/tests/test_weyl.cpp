#include <doctest.h>

#include <random>

#include "gclab/errors.hpp"
#include "gclab/identities.hpp"
#include "gclab/weyl.hpp"

using namespace gclab::weyl;

namespace {

Poly random_poly(std::mt19937& rng) {
  static const Family fams[] = {Family::kX, Family::kW, Family::kVre, Family::kPhi, Family::kMu};
  std::uniform_int_distribution<int> terms(1, 3), num(-5, 5), den(1, 4), fam(0, 4), der(0, 2), ex(1, 2), coin(0, 1);
  Poly p;
  const int n = terms(rng);
  for (int k = 0; k < n; ++k) {
    Poly c = Poly::rational(num(rng), den(rng));
    if (coin(rng)) c = c * Poly::i();
    const Family f = fams[fam(rng)];
    const int dx = depends_on_x(f) ? der(rng) : 0;
    const int dt = depends_on_t(f) ? der(rng) % 2 : 0;
    p += c * Poly::sym(f, dx, dt).pow(ex(rng));
  }
  return p;
}

DiffOp random_op(std::mt19937& rng, int max_order) {
  std::uniform_int_distribution<int> ord(0, max_order);
  DiffOp d;
  const int top = ord(rng);
  for (int k = 0; k <= top; ++k) d += DiffOp(random_poly(rng)) * DiffOp::d(k);
  return d;
}

}  // namespace

TEST_CASE("d x - x d = 1") {
  const DiffOp x(Poly::sym(Family::kX));
  CHECK(commutator(DiffOp::d(), x) == DiffOp(1));
  CHECK(commutator(DiffOp::d(2), x) == DiffOp(2) * DiffOp::d());
}

TEST_CASE("coefficient arithmetic is exact") {
  const Poly third = Poly::rational(1, 3);
  CHECK(third + third + third == Poly(1));
  CHECK(Poly::i() * Poly::i() == Poly(-1));
  const Poly x = Poly::sym(Family::kX);
  CHECK(x.pow(-1) * x == Poly(1));
  CHECK(x.pow(3).dx() == Poly(3) * x.pow(2));
  CHECK(Poly::sym(Family::kPhi).dx().is_zero());
  CHECK(Poly::sym(Family::kW).dt() == Poly::sym(Family::kW, 0, 1));
}

TEST_CASE("order bound") {
  CHECK_THROWS_AS(DiffOp::d(4) * DiffOp::d(3), gclab::PreconditionError);
}

TEST_CASE("adjoint is an involution") {
  std::mt19937 rng(11);
  for (int k = 0; k < 50; ++k) {
    const DiffOp p = random_op(rng, 4);
    CHECK(formal_adjoint(formal_adjoint(p)) == p);
  }
}

TEST_CASE("adjoint reverses products") {
  std::mt19937 rng(12);
  for (int k = 0; k < 20; ++k) {
    const DiffOp p = random_op(rng, 3), q = random_op(rng, 3);
    CHECK(formal_adjoint(p * q) == formal_adjoint(q) * formal_adjoint(p));
  }
}

TEST_CASE("time derivative and commutator act as derivations") {
  std::mt19937 rng(13);
  for (int k = 0; k < 20; ++k) {
    const DiffOp p = random_op(rng, 3), q = random_op(rng, 3);
    CHECK(t_derivative(p * q) == t_derivative(p) * q + p * t_derivative(q));
  }
  for (int k = 0; k < 20; ++k) {
    const DiffOp p = random_op(rng, 2), q = random_op(rng, 2), r = random_op(rng, 2);
    CHECK(commutator(p, q * r) == commutator(p, q) * r + q * commutator(p, r));
  }
}

TEST_CASE("Jacobi identity") {
  std::mt19937 rng(14);
  for (int k = 0; k < 20; ++k) {
    const DiffOp a = random_op(rng, 2), b = random_op(rng, 2), c = random_op(rng, 2);
    const DiffOp j = commutator(a, commutator(b, c)) + commutator(b, commutator(c, a)) + commutator(c, commutator(a, b));
    CHECK(j.is_zero());
  }
}

TEST_CASE("symmetric and antisymmetric split") {
  std::mt19937 rng(15);
  for (int k = 0; k < 30; ++k) {
    const DiffOp p = random_op(rng, 4);
    const Split s = sym_antisym_split(p);
    CHECK(s.sym + s.antisym == p);
    CHECK(formal_adjoint(s.sym) == s.sym);
    CHECK(formal_adjoint(s.antisym) == -s.antisym);
  }
}

TEST_CASE("substitution") {
  const Poly phi = Poly::sym(Family::kPhiX);
  const Poly x = Poly::sym(Family::kX);
  const Poly p = phi.dx().dx() + phi.dx() * x;
  CHECK(substitute(p, Family::kPhiX, x.pow(2)) == Poly(2) + Poly(2) * x.pow(2));
}

TEST_CASE("registered identities hold") {
  for (const auto& name : identity_names()) {
    const IdentityReport r = verify_identity(name);
    CHECK_MESSAGE(r.passed, name << ": " << r.first_difference);
    CHECK(r.residual.is_zero());
  }
  CHECK_THROWS_AS(verify_identity("I9"), gclab::PreconditionError);
}

TEST_CASE("a wrong right-hand side is reported") {
  const DiffOp lhs = commutator(DiffOp::d(2), DiffOp(Poly::sym(Family::kX)));
  const DiffOp rhs = DiffOp(3) * DiffOp::d();
  CHECK_FALSE(first_difference(lhs, rhs).empty());
  CHECK(first_difference(lhs, DiffOp(2) * DiffOp::d()).empty());
}
