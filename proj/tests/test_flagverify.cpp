#include "qflag/flagverify.hpp"

#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

using namespace qflag;

namespace {

std::string failures(const CaseReport& rep) {
  std::ostringstream os;
  for (const auto& c : rep.checks)
    if (!c.pass) os << c.name << " " << c.residual << " " << c.note << "\n";
  return os.str();
}

void expect_eps(const CaseReport& rep, const std::vector<int>& target) {
  REQUIRE(rep.eps.size() == target.size());
  CHECK(rep.eps_target == target);
  for (std::size_t r = 0; r < target.size(); ++r) CHECK(std::abs(rep.eps[r] - target[r]) < 1e-6);
}

}  // namespace

TEST_CASE("A1 full flag: every check passes with eps = 0") {
  const auto ctx = make_flag_context(build_root_datum(LieType::A, 1, 0.5), {});
  const auto rep = run_suite(ctx);
  INFO(failures(rep));
  CHECK(rep.pass());
  expect_eps(rep, {0});
}

TEST_CASE("A2 with S = {node 1}: every check passes with eps = (0, 1)") {
  const auto ctx = make_flag_context(build_root_datum(LieType::A, 2, 0.5), {0});
  const auto rep = run_suite(ctx);
  INFO(failures(rep));
  CHECK(rep.pass());
  expect_eps(rep, {0, 1});
}

TEST_CASE("B2 full flag: every check passes") {
  const auto ctx = make_flag_context(build_root_datum(LieType::B, 2, 0.5), {});
  const auto rep = run_suite(ctx);
  INFO(failures(rep));
  CHECK(rep.pass());
  expect_eps(rep, {0, 0});
}

TEST_CASE("check names are unique within a report") {
  const auto rep = run_suite(make_flag_context(build_root_datum(LieType::A, 2, 0.5), {}));
  std::set<std::string> names;
  for (const auto& c : rep.checks) CHECK(names.insert(c.name).second);
  CHECK(names.count("eps_fit[1]") == 1);
  CHECK(names.count("action_formulas") == 1);
}

TEST_CASE("A1: k_{-4 omega} is diag(q^{2n}) from the Fock generator b") {
  const double q = 0.6;
  const auto ctx = make_flag_context(build_root_datum(LieType::A, 1, q), {});
  const SpMat K = block_of(ctx, k4_minus(ctx, Weight::fundamental(1, 0)).op);
  REQUIRE(K.rows() == ctx.N);
  REQUIRE(K.cols() == ctx.M);
  for (int n = 0; n < ctx.M; ++n) CHECK(std::abs(K.coeff(n, n) - std::pow(q, 2 * n)) < 1e-14);
  CHECK(max_abs(K) <= 1.0 + 1e-14);
}

TEST_CASE("k_0 and the unit word act as the identity on the block") {
  const auto ctx = make_flag_context(build_root_datum(LieType::A, 2, 0.5), {});
  const SpMat I = block_identity(ctx.legs(), ctx.N, ctx.M);
  CHECK(relative_difference(block_of(ctx, k_general(ctx, Weight(2)).op), I) < 1e-14);
  CHECK(relative_difference(psi_block(ctx, WordSum::unit()), I) < 1e-14);
}

TEST_CASE("k_omega is multiplicative on the block") {
  const auto ctx = make_flag_context(build_root_datum(LieType::B, 2, 0.5), {0});
  const Weight a = ctx.datum.simple_root(0), b = ctx.datum.simple_root(1);
  const SpMat lhs = psi_block(ctx, WordSum::L(a) * WordSum::L(b));
  const SpMat rhs = block_of(ctx, k_general(ctx, a + b).op);
  CHECK(relative_difference(lhs, rhs) < 1e-12);
}

TEST_CASE("S = all nodes: no Fock legs, x^+ vanishes, eps = 1") {
  const auto ctx = make_flag_context(build_root_datum(LieType::A, 2, 0.5), {0, 1});
  CHECK(ctx.legs() == 0);
  CHECK(ctx.eps_target == std::vector<int>{1, 1});
  for (int r = 0; r < 2; ++r) CHECK(max_abs(block_of(ctx, x_plus(ctx, r).plus)) < 1e-14);
  const auto rep = run_suite(ctx);
  INFO(failures(rep));
  CHECK(rep.pass());
  expect_eps(rep, {1, 1});
}

TEST_CASE("eps target follows the involution -w_0") {
  // A2: bar swaps the two nodes; B2: bar is trivial
  CHECK(make_flag_context(build_root_datum(LieType::A, 2, 0.5), {1}).eps_target == std::vector<int>{1, 0});
  CHECK(make_flag_context(build_root_datum(LieType::B, 2, 0.5), {1}).eps_target == std::vector<int>{0, 1});
  CHECK(make_flag_context(build_root_datum(LieType::A, 3, 0.5), {0}).eps_target == std::vector<int>{0, 0, 1});
}

TEST_CASE("fitted eps does not depend on q") {
  SuiteOptions opt;
  opt.relations_only = true;
  for (double q : {0.3, 0.7}) {
    CAPTURE(q);
    const auto rep = run_suite(make_flag_context(build_root_datum(LieType::B, 2, q), {0}), opt);
    INFO(failures(rep));
    CHECK(rep.pass());
    expect_eps(rep, {1, 0});
  }
}

TEST_CASE("invalid contexts are rejected") {
  const auto dt = build_root_datum(LieType::A, 2, 0.5);
  CHECK_THROWS_AS(make_flag_context(dt, {2}), DomainError);
  CHECK_THROWS_AS(make_flag_context(dt, {-1}), DomainError);
  CHECK_THROWS_AS(make_flag_context(dt, {}, 8, 9), DomainError);
  CHECK_THROWS_AS(make_flag_context(dt, {}, 8, 0), DomainError);
}

TEST_CASE("operator words that leave the truncation raise instead of returning garbage") {
  const auto ctx = make_flag_context(build_root_datum(LieType::A, 1, 0.5), {}, 6, 6);
  CHECK_THROWS_AS(psi_block(ctx, WordSum::E(0) * WordSum::F(0)), NumericalError);
}

TEST_CASE("default catalog") {
  CHECK(default_catalog().size() == 8);
  CHECK(default_catalog(true).size() == 9);
}
