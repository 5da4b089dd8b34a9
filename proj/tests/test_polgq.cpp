#include "doctest.h"

#include "qflag/linalg.hpp"
#include "qflag/polgq.hpp"
#include "qflag/rmatrix.hpp"

#include <random>

using namespace qflag;
using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

namespace {

VectorXcd random_vector(std::mt19937& rng, Index n) {
  std::normal_distribution<double> g;
  VectorXcd v(n);
  for (Index i = 0; i < n; ++i) v(i) = cplx(g(rng), g(rng));
  return v;
}

PolElement random_coefficient(std::mt19937& rng, const ModulePtr& V) {
  return PolElement::coefficient(V, random_vector(rng, V->dim()), random_vector(rng, V->dim()));
}

// Monomials in E_r, F_r, L_{±ω_s} of length ≤ depth.
std::vector<WordSum> monomials(const RootDatum& dt, int depth) {
  std::vector<WordSum> letters;
  for (int r = 0; r < dt.rank; ++r) {
    letters.push_back(WordSum::E(r));
    letters.push_back(WordSum::F(r));
    letters.push_back(WordSum::L(Weight::fundamental(dt.rank, r)));
    letters.push_back(WordSum::L(-Weight::fundamental(dt.rank, r)));
  }
  std::vector<WordSum> out{WordSum::unit()};
  std::size_t begin = 0;
  for (int k = 0; k < depth; ++k) {
    const std::size_t end = out.size();
    for (std::size_t i = begin; i < end; ++i)
      for (const auto& l : letters) out.push_back(out[i] * l);
    begin = end;
  }
  return out;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

}  // namespace

TEST_CASE("unit and evaluation values") {
  auto a2 = build_root_datum(LieType::A, 2, 0.5);
  const Weight lam{2, 1};
  auto V = build_irrep(a2, lam);
  const VectorXcd h = V->basis_vector(*V->highest);
  const auto p = PolElement::coefficient(V, h, h);

  CHECK(std::abs(evaluate(p, WordSum::unit()) - 1.0) < 1e-14);
  for (int s = 0; s < 2; ++s) {
    const Weight om = Weight::fundamental(2, s);
    CHECK(std::abs(evaluate(p, WordSum::L(om)) - a2.qpow(a2.pairing(om, lam) / 2)) < 1e-14);
  }
  CHECK(oracle_distance(pol_product(p, PolElement::unit(a2)), p) < 1e-14);
  CHECK(oracle_distance(pol_product(PolElement::unit(a2), p), p) < 1e-14);
  CHECK(oracle_distance(pol_star(PolElement::unit(a2)), PolElement::unit(a2)) < 1e-14);

  // E_r F_r h_λ = [(λ,α_r^∨)]_{q_r} h_λ, so the unit vector along F_r h_λ pairs with E_r to sqrt of that.
  for (int r = 0; r < 2; ++r) {
    VectorXcd f = V->F[r] * h;
    f.normalize();
    const auto pf = PolElement::coefficient(V, h, f);
    CHECK(std::abs(evaluate(pf, WordSum::E(r))) == doctest::Approx(std::sqrt(qint(a2.q_node[r], lam[static_cast<std::size_t>(r)]))));
  }
  CHECK(oracle_distance(p - p, PolElement{}) == 0.0);
}

TEST_CASE("product is dual to the coproduct and associative") {
  std::mt19937 rng(11);
  auto a2 = build_root_datum(LieType::A, 2, 0.6);
  auto V = build_irrep(a2, Weight{1, 0});
  auto W = build_irrep(a2, Weight{0, 1});
  auto U = build_irrep(a2, Weight{1, 1});
  const auto p = random_coefficient(rng, V) + random_coefficient(rng, U);
  const auto q = random_coefficient(rng, W);
  const auto r = random_coefficient(rng, V);
  const auto pq = pol_product(p, q);

  double worst = 0.0;
  for (const auto& x : monomials(a2, 2)) {
    cplx expect = 0.0;
    for (const auto& t : coproduct(a2, x))
      expect += t.scalar * evaluate(p, WordSum(t.legs[0])) * evaluate(q, WordSum(t.legs[1]));
    worst = std::max(worst, rel(evaluate(pq, x), expect));
  }
  CHECK(worst < 1e-12);
  CHECK(oracle_distance(pol_product(pq, r), pol_product(p, pol_product(q, r)), 3) < 1e-10);
}

TEST_CASE("star is an antilinear anti-multiplicative involution") {
  std::mt19937 rng(5);
  for (auto dt : {build_root_datum(LieType::A, 1, 0.5), build_root_datum(LieType::B, 2, 0.7)}) {
    CAPTURE(dt.name());
    auto V = build_irrep(dt, dt.rho);
    auto W = build_irrep(dt, Weight::fundamental(dt.rank, 0));
    const auto p = random_coefficient(rng, V);
    const auto q = random_coefficient(rng, W);

    // p*(x) = conj(p(S(x)*)) straight from the Hopf *-structure
    const auto ps = pol_star(p);
    double worst = 0.0;
    for (const auto& x : monomials(dt, 3))
      worst = std::max(worst, rel(evaluate(ps, x), std::conj(evaluate(p, star(antipode(dt, x))))));
    CHECK(worst < 1e-12);

    CHECK(oracle_distance(pol_star(ps), p) < 1e-10);
    CHECK(oracle_distance(pol_star(cplx(0.3, 2.0) * p), cplx(0.3, -2.0) * ps) < 1e-12);
    CHECK(oracle_distance(pol_star(pol_product(p, q)), pol_product(pol_star(q), ps), 3) < 1e-10);

    const VectorXcd h = V->basis_vector(*V->highest);
    const auto hh = PolElement::coefficient(V, h, h);
    const auto Vb = conjugate_module(V);
    CHECK(oracle_distance(pol_star(hh), PolElement::coefficient(Vb, h.conjugate(), h.conjugate())) < 1e-13);
  }
}

TEST_CASE("product flip through the R-matrix") {
  std::mt19937 rng(3);
  auto a1 = build_root_datum(LieType::A, 1, 0.5);
  auto a2 = build_root_datum(LieType::A, 2, 0.5);
  const std::vector<std::pair<ModulePtr, ModulePtr>> cases{
      {build_irrep(a1, Weight{1}), build_irrep(a1, Weight{1})},
      {build_irrep(a2, Weight{1, 0}), build_irrep(a2, Weight{0, 1})},
      {build_irrep(a2, Weight{0, 1}), build_irrep(a2, Weight{1, 0})}};
  for (const auto& [V1, V2] : cases) {
    CAPTURE(V1->label);
    CAPTURE(V2->label);
    for (int trial = 0; trial < 3; ++trial) {
      const VectorXcd x1 = random_vector(rng, V1->dim()), y1 = random_vector(rng, V1->dim());
      const VectorXcd x2 = random_vector(rng, V2->dim()), y2 = random_vector(rng, V2->dim());
      const auto lhs = pol_product(PolElement::coefficient(V1, x1, y1), PolElement::coefficient(V2, x2, y2));

      auto ra = r_action(V2, V1);
      const auto fl = r_flip_variants(*ra);
      const auto host = tensor(V2, V1);
      const VectorXcd xs = linalg::kron(x2, x1), ys = linalg::kron(y2, y1);
      const auto first = PolElement::coefficient(host, fl.R21 * xs, fl.Rinv * ys);
      const auto second = PolElement::coefficient(host, fl.Rinv * xs, fl.R21 * ys);
      CHECK(oracle_distance(lhs, first, 4) < 1e-8);
      CHECK(oracle_distance(lhs, second, 4) < 1e-8);
    }
    auto ra = r_action(V2, V1);
    CHECK(linalg::relative_residual(ra->R.adjoint(), r_flip_variants(*ra).R21) < 1e-10);
  }
}

TEST_CASE("bimodule laws") {
  std::mt19937 rng(17);
  auto b2 = build_root_datum(LieType::B, 2, 0.6);
  auto V = build_irrep(b2, Weight{1, 0});
  auto W = build_irrep(b2, Weight{0, 1});
  const auto p = random_coefficient(rng, V) + random_coefficient(rng, W);
  const auto q = random_coefficient(rng, W);
  const Weight om = Weight::fundamental(2, 1);
  const std::vector<WordSum> gens{WordSum::E(0), WordSum::F(1), WordSum::E(1) * WordSum::F(0),
                                  WordSum::L(om) + cplx(0.5) * WordSum::F(0)};

  CHECK(oracle_distance(act_left(WordSum::unit(), p), p) < 1e-15);
  CHECK(oracle_distance(act_right(p, WordSum::unit()), p) < 1e-15);
  for (const auto& x : gens)
    for (const auto& y : gens) {
      CHECK(oracle_distance(act_left(x * y, p), act_left(x, act_left(y, p)), 3) < 1e-11);
      CHECK(oracle_distance(act_right(p, x * y), act_right(act_right(p, x), y), 3) < 1e-11);
      CHECK(oracle_distance(act_right(act_left(x, p), y), act_left(x, act_right(p, y)), 3) < 1e-11);
    }

  // (x ⊳ p)(z) = p(z x) and (p ⊲ y)(z) = p(y z)
  for (const auto& z : monomials(b2, 2))
    for (const auto& x : gens) {
      CHECK(rel(evaluate(act_left(x, p), z), evaluate(p, z * x)) < 1e-12);
      CHECK(rel(evaluate(act_right(p, x), z), evaluate(p, x * z)) < 1e-12);
    }

  // module algebra: x ⊳ (pq) = (x_(1) ⊳ p)(x_(2) ⊳ q), and likewise on the right
  for (const auto& x : gens) {
    PolElement left, right;
    for (const auto& t : coproduct(b2, x)) {
      left += t.scalar * pol_product(act_left(WordSum(t.legs[0]), p), act_left(WordSum(t.legs[1]), q));
      right += t.scalar * pol_product(act_right(p, WordSum(t.legs[0])), act_right(q, WordSum(t.legs[1])));
    }
    CHECK(oracle_distance(act_left(x, pol_product(p, q)), left, 3) < 1e-10);
    CHECK(oracle_distance(act_right(pol_product(p, q), x), right, 3) < 1e-10);
  }

  // (p ⊲ y)* = p* ⊲ S(y)*
  for (const auto& y : gens)
    CHECK(oracle_distance(pol_star(act_right(p, y)), act_right(pol_star(p), star(antipode(b2, y))), 3) < 1e-10);

  // right action of L_ω scales weight vectors
  for (Index i = 0; i < V->dim(); ++i) {
    const VectorXcd xi = V->basis_vector(i);
    const VectorXcd eta = random_vector(rng, V->dim());
    const auto c = PolElement::coefficient(V, xi, eta);
    const double f = b2.qpow(b2.pairing(om, V->weights[static_cast<std::size_t>(i)]) / 2);
    CHECK(oracle_distance(act_right(c, WordSum::L(om)), cplx(f) * c) < 1e-12);
  }
}

TEST_CASE("coinvariance") {
  std::mt19937 rng(23);
  auto a2 = build_root_datum(LieType::A, 2, 0.5);
  CHECK(coinvariance_test(PolElement::unit(a2), {0}));

  const Weight lam{0, 1};
  const auto iv = invariant_vector(a2, lam, {0});
  const auto p = PolElement::coefficient(iv.host, random_vector(rng, iv.host->dim()), iv.coords);
  CHECK(coinvariance_test(p, {0}));
  CHECK_FALSE(coinvariance_test(p, {0, 1}));

  auto V = build_irrep(a2, Weight{1, 0});
  const VectorXcd h = V->basis_vector(*V->highest);
  CHECK_FALSE(coinvariance_test(PolElement::coefficient(V, h, h), {0}));
  CHECK_FALSE(coinvariance_test(PolElement::coefficient(V, h, h), {}));  // not weight zero

  // coinvariant elements are fixed by the left action of E_s, F_s up to the counit
  for (const auto& x : {WordSum::E(0), WordSum::F(0)})
    CHECK(oracle_distance(act_left(x, p), PolElement{}) < 1e-10);
}

TEST_CASE("size cap") {
  auto a3 = build_root_datum(LieType::A, 3, 0.5);
  auto V = build_irrep(a3, a3.rho);  // dim 64
  const VectorXcd v = VectorXcd::Ones(V->dim());
  const auto p = PolElement::coefficient(V, v, v);
  auto W = build_irrep(a3, Weight{1, 0, 0});
  const auto pw = pol_product(p, PolElement::coefficient(W, VectorXcd::Ones(4), VectorXcd::Ones(4)));
  CHECK_THROWS_AS(pol_product(pw, p), DomainError);
  CHECK_THROWS_AS(PolElement::coefficient(V, VectorXcd::Ones(2), v), DomainError);
}
