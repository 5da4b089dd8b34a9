#include "doctest.h"

#include "qflag/linalg.hpp"
#include "qflag/repmod.hpp"
#include "qflag/uqalg.hpp"

#include <cmath>

using namespace qflag;
using Eigen::MatrixXcd;

namespace {

MatrixXcd eval_tensor(const std::vector<TensorTerm>& terms, const std::vector<ModulePtr>& mods) {
  Eigen::Index d = 1;
  for (const auto& m : mods) d *= m->dim();
  MatrixXcd out = MatrixXcd::Zero(d, d);
  for (const auto& t : terms) {
    MatrixXcd acc = MatrixXcd::Identity(1, 1);
    for (std::size_t k = 0; k < mods.size(); ++k) acc = linalg::kron(acc, evaluate_in_module(*mods[k], WordSum(t.legs[k])));
    out += t.scalar * acc;
  }
  return out;
}

std::vector<WordSum> generators(const RootDatum& dt) {
  std::vector<WordSum> g;
  for (int r = 0; r < dt.rank; ++r) {
    g.push_back(WordSum::E(r));
    g.push_back(WordSum::F(r));
    g.push_back(WordSum::L(Weight::fundamental(dt.rank, r)));
  }
  return g;
}

}  // namespace

TEST_CASE("q-binomial values") {
  auto dt = build_root_datum(LieType::A, 1, 0.5);
  const double q = 0.5;
  CHECK(qbinom(dt, 4, 0, 0) == doctest::Approx(1.0));
  CHECK(qbinom(dt, 2, 1, 0) == doctest::Approx(q + 1 / q));
  CHECK(qbinom(dt, 3, 1, 0) == doctest::Approx(1 / (q * q) + 1 + q * q));
  for (int m = 0; m <= 5; ++m)
    for (int n = 0; n <= m; ++n) {
      CHECK(qbinom(dt, m, n, 0) > 0);
      CHECK(qbinom(dt, m, n, 0) == doctest::Approx(qbinom(dt, m, m - n, 0)));
    }
  CHECK_THROWS_AS(qbinom(dt, 1, 2, 0), DomainError);
  auto b2 = build_root_datum(LieType::B, 2, 0.5);
  const double q0 = b2.q_node[0];
  CHECK(qbinom(b2, 2, 1, 0) == doctest::Approx(q0 + 1 / q0));
}

TEST_CASE("Serre relation shape") {
  auto a2 = build_root_datum(LieType::A, 2, 0.5);
  auto s = serre_relation(a2, 0, 1);
  CHECK(s.terms().size() == 3);
  for (const auto& t : s.terms()) {
    if (t.factors == std::vector<Symbol>{Symbol::E(0), Symbol::E(1), Symbol::E(0)})
      CHECK(t.scalar.real() == doctest::Approx(-(0.5 + 2.0)));
    else
      CHECK(t.scalar.real() == doctest::Approx(1.0));
  }
  auto b2 = build_root_datum(LieType::B, 2, 0.5);
  for (int r = 0; r < 2; ++r) CHECK(serre_relation(b2, r, 1 - r).terms().size() == std::size_t(2 - b2.cartan[r][1 - r]));
  auto g2 = build_root_datum(LieType::G, 2, 0.5);
  CHECK(serre_relation(g2, 1, 0, true).terms().size() == std::size_t(2 - g2.cartan[1][0]));
  CHECK_THROWS_AS(serre_relation(a2, 1, 1), DomainError);
}

TEST_CASE("words: normalization, antipode, star") {
  auto a2 = build_root_datum(LieType::A, 2, 0.5);
  Weight w{1, 0};
  auto x = WordSum::L(w) * WordSum::L(-w);
  REQUIRE(x.terms().size() == 1);
  CHECK(x.terms()[0].factors.empty());
  auto sl = antipode(a2, WordSum::L(w));
  CHECK(sl.terms()[0].factors[0].weight == -w);
  auto sf = antipode(a2, WordSum::F(1));
  CHECK(sf.terms()[0].scalar.real() == doctest::Approx(-1.0 / 0.5));
  auto se = antipode(a2, WordSum::E(0));
  CHECK(se.terms()[0].scalar.real() == doctest::Approx(-0.5));
  auto ss = star(star(cplx(2.0, 3.0) * WordSum::E(0) * WordSum::F(1)));
  auto orig = cplx(2.0, 3.0) * WordSum::E(0) * WordSum::F(1);
  REQUIRE(ss.terms().size() == 1);
  CHECK(ss.terms()[0].factors == orig.terms()[0].factors);
  CHECK(std::abs(ss.terms()[0].scalar - orig.terms()[0].scalar) < 1e-15);
  CHECK(counit(WordSum::unit() + WordSum::E(0)) == cplx(1.0));
  CHECK(counit(WordSum::L(w)) == cplx(1.0));
}

TEST_CASE("Hopf axioms after evaluation") {
  for (auto dt : {build_root_datum(LieType::A, 1, 0.5), build_root_datum(LieType::A, 2, 0.3),
                  build_root_datum(LieType::B, 2, 0.6)}) {
    CAPTURE(dt.name());
    auto V = build_irrep(dt, Weight::fundamental(dt.rank, 0));
    auto W = build_irrep(dt, Weight::fundamental(dt.rank, dt.rank - 1));
    auto VW = tensor(V, W);
    for (const auto& g : generators(dt)) {
      // Δ agrees with the tensor module
      CHECK(linalg::max_abs(eval_tensor(coproduct(dt, g), {V, W}) - evaluate_in_module(*VW, g)) < 1e-10);
      // (Δ⊗id)Δ = (id⊗Δ)Δ
      std::vector<TensorTerm> left;
      for (const auto& t : coproduct(dt, g))
        for (const auto& u : coproduct(dt, WordSum(t.legs[0])))
          left.push_back(TensorTerm{t.scalar * u.scalar, {u.legs[0], u.legs[1], t.legs[1]}});
      auto right = iterated_coproduct(dt, g, 3);
      CHECK(linalg::max_abs(eval_tensor(left, {V, W, V}) - eval_tensor(right, {V, W, V})) < 1e-10);
      // m(S⊗id)Δ = ε 1
      MatrixXcd acc = MatrixXcd::Zero(V->dim(), V->dim());
      for (const auto& t : coproduct(dt, g))
        acc += t.scalar * evaluate_in_module(*V, antipode(dt, WordSum(t.legs[0])) * WordSum(t.legs[1]));
      CHECK(linalg::max_abs(acc - counit(g) * MatrixXcd::Identity(V->dim(), V->dim())) < 1e-10);
      // S² = conjugation by L_{−4ρ}
      auto s2 = antipode(dt, antipode(dt, g));
      auto conj = WordSum::L(4 * dt.rho) * g * WordSum::L(-4 * dt.rho);
      CHECK(linalg::max_abs(evaluate_in_module(*V, s2) - evaluate_in_module(*V, conj)) < 1e-10);
      // R is an antiautomorphism consistent with R(x*) on generators: R(x)^† in V equals R(x*) in V
      auto rg = unitary_antipode(dt, g);
      CHECK(linalg::max_abs(evaluate_in_module(*V, rg).adjoint() - evaluate_in_module(*V, unitary_antipode(dt, star(g)))) < 1e-10);
    }
  }
}

TEST_CASE("adjoint action laws") {
  auto dt = build_root_datum(LieType::A, 2, 0.5);
  auto V = build_irrep(dt, Weight{1, 1});
  auto ev = [&](const WordSum& x) { return evaluate_in_module(*V, x); };
  auto gens = generators(dt);
  const WordSum x = WordSum::E(0) * WordSum::F(1) + cplx(0.3, 0.1) * WordSum::L(Weight{1, -1});
  const WordSum b = WordSum::F(0) + WordSum::E(1);
  for (const auto& y : gens) {
    CHECK(linalg::max_abs(ev(adjoint_action(dt, x, WordSum::unit())) - ev(x)) < 1e-12);
    for (const auto& y2 : gens) {
      auto lhs = adjoint_action(dt, adjoint_action(dt, x, y), y2);
      auto rhs = adjoint_action(dt, x, y * y2);
      CHECK(linalg::max_abs(ev(lhs) - ev(rhs)) < 1e-9);
    }
    // (x b) ⊲ y = (x ⊲ y_(1)) (b ⊲ y_(2))
    MatrixXcd split = MatrixXcd::Zero(V->dim(), V->dim());
    for (const auto& t : coproduct(dt, y))
      split += t.scalar * ev(adjoint_action(dt, x, WordSum(t.legs[0]))) * ev(adjoint_action(dt, b, WordSum(t.legs[1])));
    CHECK(linalg::max_abs(ev(adjoint_action(dt, x * b, y)) - split) < 1e-9);
  }
  // weight vectors are rescaled by L_ω: E_0 F_1 has weight α_1 − α_2
  const Weight om{1, 0};
  const Weight mu = dt.simple_root(0) - dt.simple_root(1);
  const WordSum xe = WordSum::E(0) * WordSum::F(1);
  const double f = dt.qpow(-dt.pairing(om, mu) / Rational(2));
  CHECK(linalg::max_abs(ev(adjoint_action(dt, xe, WordSum::L(om))) - f * ev(xe)) < 1e-12);
}

TEST_CASE("Serre relations vanish in irreducible modules") {
  for (auto dt : {build_root_datum(LieType::A, 2, 0.5), build_root_datum(LieType::B, 2, 0.5),
                  build_root_datum(LieType::G, 2, 0.7)}) {
    auto V = build_irrep(dt, dt.rho);
    for (int r = 0; r < dt.rank; ++r)
      for (int s = 0; s < dt.rank; ++s)
        if (r != s)
          for (bool low : {false, true})
            CHECK(linalg::max_abs(evaluate_in_module(*V, serre_relation(dt, r, s, low))) < 1e-9);
  }
}

TEST_CASE("rescaled commutator defect") {
  auto dt = build_root_datum(LieType::A, 2, 0.5);
  auto V = build_irrep(dt, Weight{1, 0});
  auto d1 = rescaled_commutator_defect(dt, *V, {1.0, 1.0});
  for (const auto& d : d1) CHECK(d.presentation_residual < 1e-12);
  double prev = 1e300;
  for (double b : {1.0, 0.5, 0.1, 0.01}) {
    auto res = rescaled_commutator_defect(dt, *V, {b, b});
    CHECK(res[0].presentation_residual < 1e-10);
    CHECK(res[0].degenerate_defect < prev);
    prev = res[0].degenerate_defect;
    // bound b⁴‖L²‖ / |q − q⁻¹| with ‖L_{α}²‖ = max q^{(α,μ)}
    double lmax = 0;
    for (const auto& mu : V->weights) lmax = std::max(lmax, dt.qpow(dt.pairing(dt.simple_root(0), mu)));
    CHECK(res[0].degenerate_defect == doctest::Approx(std::pow(b, 4) * lmax / (1 / 0.5 - 0.5)));
  }
  CHECK_THROWS_AS(rescaled_commutator_defect(dt, *V, {1.0}), DomainError);
  CHECK_THROWS_AS(rescaled_commutator_defect(dt, *V, {0.0, 1.0}), DomainError);
}
