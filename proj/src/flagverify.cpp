#include "qflag/flagverify.hpp"

#include "qflag/linalg.hpp"
#include "qflag/rmatrix.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <sstream>

namespace qflag {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

struct FlagCache {
  std::recursive_mutex m;
  SpMat block;
  std::map<Weight, KOperator> k4, kgen;
  std::map<int, XOperator> x;
};

namespace {

std::vector<int> reversed(const std::vector<int>& w) { return {w.rbegin(), w.rend()}; }

Weight fundamental(const FlagContext& ctx, int r) { return Weight::fundamental(static_cast<std::size_t>(ctx.datum.rank), r); }

double qr_minus_inv(const FlagContext& ctx, int r) {
  const double qr = ctx.datum.q_node[static_cast<std::size_t>(r)];
  return qr - 1.0 / qr;
}

SpMat apply_chain(const SpMat& start, std::initializer_list<const TensorOp*> right_to_left) {
  SpMat X = start;
  for (const TensorOp* op : right_to_left) X = apply_exact(*op, X);
  return X;
}

int max_up(const TensorOp& t) {
  int u = 0;
  for (int v : t.up()) u = std::max(u, v);
  return u;
}

}  // namespace

std::string FlagContext::label() const {
  std::ostringstream os;
  os << datum.name() << " S={";
  for (std::size_t i = 0; i < S.size(); ++i) os << (i ? "," : "") << S[i] + 1;
  os << "} q=" << datum.q;
  return os.str();
}

FlagContext make_flag_context(const RootDatum& datum, std::vector<int> S, int N, int M) {
  for (int s : S) datum.check_node(s);
  std::sort(S.begin(), S.end());
  S.erase(std::unique(S.begin(), S.end()), S.end());
  if (N < 2 || M < 1 || M > N) throw DomainError("need N ≥ 2 and 1 ≤ M ≤ N");
  FlagContext ctx;
  ctx.datum = datum;
  ctx.S = std::move(S);
  ctx.w = shortest_coset_rep(datum, ctx.S);
  ctx.N = N;
  ctx.M = M;
  for (int r = 0; r < datum.rank; ++r) {
    const int br = bar_node(datum, r);
    ctx.eps_target.push_back(std::find(ctx.S.begin(), ctx.S.end(), br) != ctx.S.end() ? 1 : 0);
  }
  ctx.cache = std::make_shared<FlagCache>();
  ctx.cache->block = block_identity(ctx.legs(), N, M);
  return ctx;
}

PolElement extremal_coefficient(const FlagContext& ctx, const Weight& lambda) {
  auto V = build_irrep(ctx.datum, lambda);
  return PolElement::coefficient(V, V->basis_vector(*V->highest), extremal_vector(*V, reversed(ctx.w.word)));
}

PolElement k4_pol(const FlagContext& ctx, const Weight& lambda) {
  const auto inv = invariant_vector(ctx.datum, lambda, ctx.S, ctx.w);
  const VectorXcd h = inv.base->basis_vector(*inv.base->highest);
  const RootDatum& dt = ctx.datum;
  const double c = dt.qpow(-dt.pairing(dt.rho - ctx.w.apply(dt.rho), lambda));
  return PolElement::coefficient(inv.host, linalg::kron(VectorXcd(h.conjugate()), h), inv.coords, c);
}

const KOperator& k4_minus(const FlagContext& ctx, const Weight& lambda) {
  std::lock_guard lock(ctx.cache->m);
  auto it = ctx.cache->k4.find(lambda);
  if (it != ctx.cache->k4.end()) return it->second;
  KOperator k{lambda, TensorOp::identity(ctx.legs(), ctx.N)};
  if (!lambda.is_zero()) {
    const TensorOp X = theta_w(ctx.datum, ctx.w.word, extremal_coefficient(ctx, lambda), ctx.N);
    k.op = X.adjoint() * X;
  }
  return ctx.cache->k4.emplace(lambda, std::move(k)).first->second;
}

TensorOp k4_minus_invariant(const FlagContext& ctx, const Weight& lambda) {
  return theta_w(ctx.datum, ctx.w.word, k4_pol(ctx, lambda), ctx.N);
}

const KOperator& k_general(const FlagContext& ctx, const Weight& omega) {
  std::lock_guard lock(ctx.cache->m);
  auto it = ctx.cache->kgen.find(omega);
  if (it != ctx.cache->kgen.end()) return it->second;
  const Index dim = TensorOp(ctx.legs(), ctx.N).dim();
  Eigen::VectorXd d = Eigen::VectorXd::Ones(dim);
  for (int r = 0; r < ctx.datum.rank; ++r) {
    const int e = omega[static_cast<std::size_t>(r)];
    if (e == 0) continue;
    const VectorXcd base = k4_minus(ctx, fundamental(ctx, r)).op.diagonal_values();
    for (Index i = 0; i < dim; ++i) {
      const double v = base(i).real();
      if (!(v > 0.0) || std::abs(base(i).imag()) > 1e-12 * v)
        throw NumericalError("k_{-4ω} has a nonpositive diagonal entry");
      d(i) *= std::pow(v, -e / 4.0);
    }
  }
  KOperator k{omega, TensorOp::diagonal(ctx.legs(), ctx.N, d.cast<cplx>(), std::vector<int>(static_cast<std::size_t>(ctx.legs()), ctx.N))};
  return ctx.cache->kgen.emplace(omega, std::move(k)).first->second;
}

const XOperator& x_plus(const FlagContext& ctx, int r) {
  ctx.datum.check_node(r);
  std::lock_guard lock(ctx.cache->m);
  auto it = ctx.cache->x.find(r);
  if (it != ctx.cache->x.end()) return it->second;
  const double qr = ctx.datum.q_node[static_cast<std::size_t>(r)];
  const PolElement a = act_right(k4_pol(ctx, fundamental(ctx, r)), WordSum::E(r));
  const TensorOp T = theta_w(ctx.datum, ctx.w.word, a, ctx.N);
  const Weight kw = 4 * fundamental(ctx, r) - ctx.datum.simple_root(r);
  XOperator x;
  x.r = r;
  x.plus = cplx(1.0 / (1.0 / qr - qr)) * (T * k_general(ctx, kw).op);
  x.minus = x.plus.adjoint();
  return ctx.cache->x.emplace(r, std::move(x)).first->second;
}

TensorOp x_plus_explicit(const FlagContext& ctx, int r) {
  ctx.datum.check_node(r);
  const double qr = ctx.datum.q_node[static_cast<std::size_t>(r)];
  const PolElement U = extremal_coefficient(ctx, fundamental(ctx, r));
  const auto& V = U.terms[0].module;
  const PolElement U2 = PolElement::coefficient(V, V->F[static_cast<std::size_t>(r)] * U.terms[0].bra, U.terms[0].ket);
  const TensorOp T = theta_w(ctx.datum, ctx.w.word, pol_product(pol_star(U), U2), ctx.N);
  const Weight kw = 4 * fundamental(ctx, r) - ctx.datum.simple_root(r);
  return cplx(std::sqrt(qr) / (1.0 / qr - qr)) * (T * k_general(ctx, kw).op);
}

SpMat psi_block(const FlagContext& ctx, const WordSum& x, double* scale) {
  const SpMat& B0 = ctx.cache->block;
  SpMat acc(B0.rows(), B0.cols());
  double sc = 0.0;
  for (const auto& w : x.terms()) {
    SpMat X = B0;
    for (auto f = w.factors.rbegin(); f != w.factors.rend(); ++f) {
      switch (f->kind) {
        case Symbol::Kind::E: X = apply_exact(x_plus(ctx, f->node).plus, X); break;
        case Symbol::Kind::F: X = apply_exact(x_plus(ctx, f->node).minus, X); break;
        case Symbol::Kind::L: X = apply_exact(k_general(ctx, f->weight).op, X); break;
      }
    }
    X *= w.scalar;
    sc = std::max(sc, max_abs(X));
    acc += X;
  }
  if (scale) *scale = sc;
  return acc;
}

SpMat block_of(const FlagContext& ctx, const TensorOp& op) { return apply_exact(op, ctx.cache->block); }

MatrixXcd principal_block(const FlagContext& ctx, const TensorOp& op) {
  const SpMat& B0 = ctx.cache->block;
  std::vector<Index> pos(static_cast<std::size_t>(B0.rows()), -1);
  for (int j = 0; j < B0.outerSize(); ++j)
    for (SpMat::InnerIterator it(B0, j); it; ++it) pos[static_cast<std::size_t>(it.row())] = j;
  const SpMat X = block_of(ctx, op);
  MatrixXcd out = MatrixXcd::Zero(B0.cols(), B0.cols());
  for (int j = 0; j < X.outerSize(); ++j)
    for (SpMat::InnerIterator it(X, j); it; ++it)
      if (const Index i = pos[static_cast<std::size_t>(it.row())]; i >= 0) out(i, j) = it.value();
  return out;
}

SpMat theta_block(const FlagContext& ctx, const PolElement& p) {
  return block_of(ctx, theta_w(ctx.datum, ctx.w.word, p, ctx.N, ctx.M));
}

double relative_difference(const SpMat& a, const SpMat& b, double scale) {
  const SpMat d = a - b;
  return max_abs(d) / std::max({1.0, max_abs(a), max_abs(b), scale});
}

double relation_residual(const FlagContext& ctx, const WordSum& x) {
  double scale = 0.0;
  const SpMat v = psi_block(ctx, x, &scale);
  return max_abs(v) / std::max(1.0, scale);
}

EpsilonFit epsilon_fit(const FlagContext& ctx, int r) {
  const Weight a = ctx.datum.simple_root(r);
  const double c = qr_minus_inv(ctx, r);
  const SpMat EF = psi_block(ctx, WordSum::E(r) * WordSum::F(r));
  const SpMat FE = psi_block(ctx, WordSum::F(r) * WordSum::E(r));
  const SpMat C = EF - FE;
  const SpMat D1 = block_of(ctx, k_general(ctx, 2 * a).op) * cplx(1.0 / c);
  const SpMat D0 = block_of(ctx, k_general(ctx, -2 * a).op) * cplx(-1.0 / c);
  const SpMat& B0 = ctx.cache->block;
  // each diagonal equation is scaled by its own term size, so entries where EF and FE nearly
  // cancel at huge magnitude do not swamp the fit
  double num = 0.0, den = 0.0;
  for (int j = 0; j < B0.outerSize(); ++j)
    for (SpMat::InnerIterator it(B0, j); it; ++it) {
      const Index i = it.row();
      const cplx d1 = D1.coeff(i, j), d0 = D0.coeff(i, j), cj = C.coeff(i, j);
      const double s = std::max({1.0, std::abs(EF.coeff(i, j)), std::abs(FE.coeff(i, j)), std::abs(d0)});
      num += std::real(std::conj(d1) * (cj - d0)) / (s * s);
      den += std::norm(d1) / (s * s);
    }
  EpsilonFit fit;
  fit.eps = den > 0.0 ? num / den : 0.0;
  const SpMat model = D0 + D1 * cplx(fit.eps);
  fit.residual = relative_difference(C, model, std::max(max_abs(EF), max_abs(FE)));
  return fit;
}

double action_extension_check(const FlagContext& ctx, const PolElement& a, const Symbol& y) {
  const SpMat& B0 = ctx.cache->block;
  const SpMat lhs = theta_block(ctx, act_right(a, WordSum(GenWord{{y}, 1.0})));
  if (y.kind == Symbol::Kind::L) {
    const TensorOp A = theta_w(ctx.datum, ctx.w.word, a, ctx.N, ctx.M);
    const SpMat rhs = apply_chain(B0, {&k_general(ctx, y.weight).op, &A, &k_general(ctx, -y.weight).op});
    return relative_difference(lhs, rhs);
  }
  const int r = y.node;
  const double qr = ctx.datum.q_node[static_cast<std::size_t>(r)];
  const XOperator& x = x_plus(ctx, r);
  const TensorOp& xs = y.kind == Symbol::Kind::E ? x.plus : x.minus;
  const double c = y.kind == Symbol::Kind::E ? -qr : -1.0 / qr;
  const TensorOp& ka = k_general(ctx, ctx.datum.simple_root(r)).op;
  const TensorOp A = theta_w(ctx.datum, ctx.w.word, a, ctx.N, std::min(ctx.N, ctx.M + max_up(xs)));
  const SpMat t1 = apply_chain(B0, {&ka, &A, &xs}) * cplx(c);
  const SpMat t2 = apply_chain(B0, {&xs, &A, &ka});
  return relative_difference(lhs, t1 + t2, std::max(max_abs(t1), max_abs(t2)));
}

double fin_part_check(const FlagContext& ctx, const Weight& lambda, const WordSum& y) {
  double scale = 0.0;
  const SpMat lhs = psi_block(ctx, adjoint_action(ctx.datum, WordSum::L(-4 * lambda), y), &scale);
  const SpMat rhs = theta_block(ctx, act_right(k4_pol(ctx, lambda), y));
  return relative_difference(lhs, rhs, scale);
}

double eps_identity_residual(const FlagContext& ctx, int r) {
  const RootDatum& dt = ctx.datum;
  const Weight om = fundamental(ctx, r);
  const auto inv = invariant_vector(dt, om, ctx.S, ctx.w);
  const Module& V = *inv.base;
  const auto ra = r_action(conjugate_module(inv.base), inv.base);
  const VectorXcd v0 = linalg::kron(VectorXcd(inv.h_winv.conjugate()), inv.h_winv);
  const VectorXcd ket = ra->Rtilde.partialPivLu().solve(v0) - v0;
  const VectorXcd Fh = V.F[static_cast<std::size_t>(r)] * V.basis_vector(*V.highest);
  const Weight winv_om = weyl_inverse(dt, ctx.w).apply(om);
  const double c = dt.qpow(-dt.pairing(dt.rho, om - winv_om)) / qr_minus_inv(ctx, r);
  const SpMat lhs =
      theta_block(ctx, PolElement::coefficient(inv.host, linalg::kron(VectorXcd(Fh.conjugate()), Fh), ket, c));
  const Weight kw = 4 * dt.simple_root(r) - 4 * om;
  const SpMat rhs = block_of(ctx, k_general(ctx, kw).op) * cplx(ctx.eps_target[static_cast<std::size_t>(r)]);
  return relative_difference(lhs, rhs);
}

bool CaseReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

namespace {

VectorXcd random_weight_vector(std::mt19937& rng, const Module& V, const Weight& mu) {
  std::normal_distribution<double> g;
  VectorXcd v = VectorXcd::Zero(V.dim());
  for (Index i : V.weight_indices(mu)) v(i) = cplx(g(rng), g(rng));
  return v;
}

VectorXcd random_vector(std::mt19937& rng, Index n) {
  std::normal_distribution<double> g;
  VectorXcd v(n);
  for (Index i = 0; i < n; ++i) v(i) = cplx(g(rng), g(rng));
  return v;
}

std::vector<Weight> distinct_weights(const Module& V) {
  std::set<Weight> s(V.weights.begin(), V.weights.end());
  return {s.begin(), s.end()};
}

template <class T>
const T& pick(std::mt19937& rng, const std::vector<T>& v) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

std::string weight_tag(const Weight& w) {
  std::ostringstream os;
  os << w;
  return os.str();
}

/// Words of length ≤ depth over the given symbols.
std::vector<WordSum> battery(const std::vector<Symbol>& syms, int depth) {
  std::vector<std::vector<Symbol>> level{{}};
  std::vector<WordSum> out{WordSum::unit()};
  for (int d = 1; d <= depth; ++d) {
    std::vector<std::vector<Symbol>> next;
    for (const auto& w : level)
      for (const auto& s : syms) {
        auto nw = w;
        nw.push_back(s);
        out.emplace_back(GenWord{nw, 1.0});
        next.push_back(std::move(nw));
      }
    level = std::move(next);
  }
  return out;
}

}  // namespace

CaseReport run_suite(const FlagContext& ctx, const SuiteOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  const RootDatum& dt = ctx.datum;
  const Gates& g = opt.gates;
  const int rank = dt.rank;
  std::mt19937 rng(opt.seed);

  CaseReport rep;
  rep.label = ctx.label();
  rep.lie_type = lie_type_char(dt.type);
  rep.rank = rank;
  rep.q = dt.q;
  rep.S = ctx.S;
  rep.N = ctx.N;
  rep.M = ctx.M;
  rep.eps_target = ctx.eps_target;
  rep.eps.assign(static_cast<std::size_t>(rank), std::numeric_limits<double>::quiet_NaN());

  std::string info;  // set by a check body to annotate its result
  auto check = [&](const std::string& name, double gate, auto&& fn) {
    CheckResult c{name, 0.0, gate, false, {}};
    info.clear();
    try {
      c.residual = fn();
      c.note = info;
    } catch (const std::exception& e) {
      c.residual = std::numeric_limits<double>::infinity();
      c.note = e.what();
    }
    c.pass = std::isfinite(c.residual) && c.residual < gate;
    rep.checks.push_back(std::move(c));
  };
  auto node = [](int r) { return std::to_string(r + 1); };
  const cplx one(1.0);

  // U_q(g;S) relations and ε
  for (int r = 0; r < rank; ++r)
    for (int s = 0; s < rank; ++s) {
      const Weight ws = fundamental(ctx, s);
      const double f = dt.qpow(dt.pairing(ws, dt.simple_root(r)) / 2);
      check("weight[E" + node(r) + ",L" + node(s) + "]", g.weight, [&] {
        return relation_residual(ctx, WordSum::L(ws) * WordSum::E(r) * WordSum::L(-ws) - cplx(f) * WordSum::E(r));
      });
      check("weight[F" + node(r) + ",L" + node(s) + "]", g.weight, [&] {
        return relation_residual(ctx, WordSum::L(ws) * WordSum::F(r) * WordSum::L(-ws) - cplx(1.0 / f) * WordSum::F(r));
      });
    }
  for (int r = 0; r < rank; ++r)
    for (int s = 0; s < rank; ++s) {
      if (r == s) continue;
      check("serre+[" + node(r) + "," + node(s) + "]", g.relation,
            [&] { return relation_residual(ctx, serre_relation(dt, r, s, false)); });
      check("serre-[" + node(r) + "," + node(s) + "]", g.relation,
            [&] { return relation_residual(ctx, serre_relation(dt, r, s, true)); });
    }
  for (int r = 0; r < rank; ++r)
    for (int s = 0; s < rank; ++s) {
      check("commutator[" + node(r) + "," + node(s) + "]", g.relation, [&] {
        WordSum rel = WordSum::E(r) * WordSum::F(s) - WordSum::F(s) * WordSum::E(r);
        if (r == s) {
          const double c = qr_minus_inv(ctx, r);
          const Weight a = dt.simple_root(r);
          rel -= cplx(ctx.eps_target[static_cast<std::size_t>(r)] / c) * WordSum::L(2 * a);
          rel += cplx(1.0 / c) * WordSum::L(-2 * a);
        }
        return relation_residual(ctx, rel);
      });
    }
  for (int r = 0; r < rank; ++r) {
    EpsilonFit fit{std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::infinity()};
    check("eps_fit[" + node(r) + "]", g.eps_fit, [&] {
      fit = epsilon_fit(ctx, r);
      return fit.residual;
    });
    rep.eps[static_cast<std::size_t>(r)] = fit.eps;
    check("eps_target[" + node(r) + "]", g.eps_target,
          [&] { return std::abs(fit.eps - ctx.eps_target[static_cast<std::size_t>(r)]); });
  }

  if (!opt.relations_only) {
    // k operators
    for (int r = 0; r < rank; ++r) {
      const Weight om = fundamental(ctx, r);
      check("k4_routes[" + node(r) + "]", g.k_routes, [&] {
        return relative_difference(block_of(ctx, k4_minus(ctx, om).op),
                                   theta_block(ctx, k4_pol(ctx, om)));
      });
      check("k4_shape[" + node(r) + "]", g.k_shape, [&] {
        const SpMat K = block_of(ctx, k4_minus(ctx, om).op);
        const SpMat& B0 = ctx.cache->block;
        double off = 0.0, dev = 0.0;
        for (int j = 0; j < K.outerSize(); ++j) {
          const Index diag_row = SpMat::InnerIterator(B0, j).row();
          for (SpMat::InnerIterator it(K, j); it; ++it) {
            if (it.row() != diag_row) {
              off = std::max(off, std::abs(it.value()));
              continue;
            }
            const cplx d = it.value();
            if (!(d.real() > 0.0)) return std::numeric_limits<double>::infinity();
            dev = std::max({dev, d.real() - 1.0, std::abs(d.imag())});
          }
        }
        return std::max({off, dev, std::abs(K.coeff(0, 0) - one)});
      });
    }
    for (int r = 0; r < rank; ++r)
      for (int s = r; s < rank; ++s) {
        const Weight a = fundamental(ctx, r), b = fundamental(ctx, s);
        check("k_product[" + node(r) + "," + node(s) + "]", g.k_algebra, [&] {
          return relative_difference(apply_chain(ctx.cache->block, {&k4_minus(ctx, b).op, &k4_minus(ctx, a).op}),
                                     block_of(ctx, k4_minus(ctx, a + b).op));
        });
      }
    check("k_general", g.k_algebra, [&] {
      double worst = 0.0;
      for (int r = 0; r < rank; ++r) {
        const Weight om = fundamental(ctx, r);
        worst = std::max(worst, relative_difference(block_of(ctx, k_general(ctx, -4 * om).op),
                                                    block_of(ctx, k4_minus(ctx, om).op)));
      }
      worst = std::max(worst, relative_difference(apply_chain(ctx.cache->block, {&k_general(ctx, -1 * dt.rho).op,
                                                                                  &k_general(ctx, dt.rho).op}),
                                                  ctx.cache->block));
      return worst;
    });
    check("k_commutation", g.k_algebra, [&] {
      double worst = 0.0;
      for (int m = 0; m < rank; ++m) {
        const auto inv = invariant_vector(dt, fundamental(ctx, m), ctx.S, ctx.w);
        const auto wts = distinct_weights(*inv.host);
        for (int r = 0; r < rank; ++r)
          for (int trial = 0; trial < 2; ++trial) {
            const Weight mu = pick(rng, wts);
            const Weight lam = fundamental(ctx, r);
            const TensorOp T = theta_w(dt, ctx.w.word,
                                       PolElement::coefficient(inv.host, random_weight_vector(rng, *inv.host, mu),
                                                               inv.coords),
                                       ctx.N, ctx.M);
            const TensorOp& K = k4_minus(ctx, lam).op;
            const double f = dt.qpow(2 * dt.pairing(lam, mu));
            worst = std::max(worst, relative_difference(apply_chain(ctx.cache->block, {&T, &K}),
                                                        apply_chain(ctx.cache->block, {&K, &T}) * cplx(f)));
          }
      }
      return worst;
    });

    // x operators
    for (int r = 0; r < rank; ++r) {
      check("x_routes[" + node(r) + "]", g.x_routes, [&] {
        return relative_difference(block_of(ctx, x_plus(ctx, r).plus), block_of(ctx, x_plus_explicit(ctx, r)));
      });
      check("x_vacuum[" + node(r) + "]", g.x_routes, [&] {
        const SpMat X = block_of(ctx, x_plus(ctx, r).plus);
        return max_abs(SpMat(X.col(0))) / std::max(1.0, max_abs(X));
      });
      check("eps_identity[" + node(r) + "]", g.eps_identity, [&] { return eps_identity_residual(ctx, r); });
      check("central[" + node(r) + "]", g.central, [&] {
        const Weight a = dt.simple_root(r);
        const WordSum Z = WordSum::L(-2 * a) * (WordSum::E(r) * WordSum::F(r) - WordSum::F(r) * WordSum::E(r)) +
                          cplx(1.0 / qr_minus_inv(ctx, r)) * WordSum::L(-4 * a);
        double worst = 0.0;
        for (int s = 0; s < rank; ++s)
          for (const WordSum& y : {WordSum::E(s), WordSum::F(s), WordSum::L(fundamental(ctx, s))})
            worst = std::max(worst, relation_residual(ctx, Z * y - y * Z));
        return worst;
      });
    }

    // Soibelman representation
    check("theta_hom", g.representation, [&] {
      double worst = 0.0;
      for (int r = 0; r < rank; ++r) {
        auto V = build_irrep(dt, fundamental(ctx, r));
        auto W = build_irrep(dt, fundamental(ctx, rank - 1 - r));
        const auto p = PolElement::coefficient(V, random_vector(rng, V->dim()), random_vector(rng, V->dim()));
        const auto s = PolElement::coefficient(W, random_vector(rng, W->dim()), random_vector(rng, W->dim()));
        const TensorOp ts = theta_w(dt, ctx.w.word, s, ctx.N, ctx.M);
        const TensorOp tp = theta_w(dt, ctx.w.word, p, ctx.N, std::min(ctx.N, ctx.M + max_up(ts)));
        worst = std::max(worst, relative_difference(theta_block(ctx, pol_product(p, s)),
                                                    apply_chain(ctx.cache->block, {&ts, &tp})));
      }
      return worst;
    });
    check("theta_star", g.representation, [&] {
      double worst = 0.0;
      for (int r = 0; r < rank; ++r) {
        auto V = build_irrep(dt, fundamental(ctx, r));
        const auto p = PolElement::coefficient(V, random_vector(rng, V->dim()), random_vector(rng, V->dim()));
        const TensorOp tp = theta_w(dt, ctx.w.word, p, ctx.N);
        worst = std::max(worst, relative_difference(theta_block(ctx, pol_star(p)), block_of(ctx, tp.adjoint())));
      }
      return worst;
    });
    std::vector<Weight> lams;
    for (int r = 0; r < rank; ++r) lams.push_back(fundamental(ctx, r));
    lams.push_back(dt.rho);
    for (const Weight& lam : lams) {
      auto V = build_irrep(dt, lam);
      const VectorXcd h = V->basis_vector(*V->highest);
      check("vanishing[" + weight_tag(lam) + "]", g.vanishing, [&] {
        const MatrixXcd D = demazure_span(*V, ctx.w);
        double worst = 0.0;
        for (int trial = 0; trial < 2; ++trial) {
          VectorXcd eta = random_vector(rng, V->dim());
          eta -= D * (D.adjoint() * eta);
          if (eta.norm() < 1e-8) continue;
          eta.normalize();
          worst = std::max(worst, max_abs(theta_block(ctx, PolElement::coefficient(V, h, eta))));
        }
        return worst;
      });
      check("diagonality[" + weight_tag(lam) + "]", g.representation, [&] {
        const SpMat X = theta_block(ctx, extremal_coefficient(ctx, lam));
        const SpMat& B0 = ctx.cache->block;
        double off = 0.0, over = 0.0;
        for (int j = 0; j < X.outerSize(); ++j) {
          const Index diag_row = SpMat::InnerIterator(B0, j).row();
          for (SpMat::InnerIterator it(X, j); it; ++it)
            if (it.row() != diag_row)
              off = std::max(off, std::abs(it.value()));
            else
              over = std::max(over, std::abs(it.value()) - 1.0);
        }
        return std::max({off, over, std::abs(std::abs(X.coeff(0, 0)) - 1.0)});
      });
    }
    check("extremal_commutation", g.extremal_commutation, [&] {
      double worst = 0.0;
      for (int i = 0; i < opt.commutation_samples; ++i) {
        const Weight lam = pick(rng, std::vector<Weight>(lams.begin(), lams.end() - 1));
        const Weight nu = pick(rng, std::vector<Weight>(lams.begin(), lams.end() - 1));
        auto V = build_irrep(dt, nu);
        const auto wts = distinct_weights(*V);
        const Weight a = pick(rng, wts), b = pick(rng, wts);
        const auto U = PolElement::coefficient(V, random_weight_vector(rng, *V, a), random_weight_vector(rng, *V, b));
        const TensorOp X = theta_w(dt, ctx.w.word, extremal_coefficient(ctx, lam), ctx.N);
        const double f = dt.qpow(-dt.pairing(lam, a - ctx.w.apply(b)));
        const TensorOp T = theta_w(dt, ctx.w.word, U, ctx.N, ctx.M);
        const TensorOp Ts = theta_w(dt, ctx.w.word, pol_star(U), ctx.N, ctx.M);
        const SpMat& B0 = ctx.cache->block;
        worst = std::max(worst, relative_difference(apply_chain(B0, {&X, &T}), apply_chain(B0, {&T, &X}) * cplx(f)));
        worst = std::max(worst,
                         relative_difference(apply_chain(B0, {&X, &Ts}), apply_chain(B0, {&Ts, &X}) * cplx(1.0 / f)));
      }
      info = "instances=" + std::to_string(opt.commutation_samples);
      return worst;
    });

    // right action on the flag manifold algebra
    std::vector<Symbol> gens;
    for (int r = 0; r < rank; ++r) {
      gens.push_back(Symbol::E(r));
      gens.push_back(Symbol::F(r));
      gens.push_back(Symbol::L(fundamental(ctx, r)));
    }
    check("action_formulas", g.action_formulas, [&] {
      double worst = 0.0;
      for (int i = 0; i < opt.action_samples; ++i) {
        const auto inv = invariant_vector(dt, fundamental(ctx, i % rank), ctx.S, ctx.w);
        const auto wts = distinct_weights(*inv.host);
        const auto a = PolElement::coefficient(inv.host, random_weight_vector(rng, *inv.host, pick(rng, wts)),
                                               inv.coords);
        if (!coinvariance_test(a, ctx.S)) throw NumericalError("sampled element is not coinvariant");
        for (const Symbol& y : gens) worst = std::max(worst, action_extension_check(ctx, a, y));
      }
      info = "instances=" + std::to_string(opt.action_samples);
      return worst;
    });
    check("fin_part", g.fin_part, [&] {
      double worst = 0.0;
      const auto words = battery(gens, opt.battery_depth);
      for (int r = 0; r < rank; ++r) {
        if (ctx.eps_target[static_cast<std::size_t>(r)] == 1) continue;  // bar(ω_r) must avoid S
        for (const auto& y : words) worst = std::max(worst, fin_part_check(ctx, fundamental(ctx, r), y));
      }
      info = "words=" + std::to_string(words.size());
      return worst;
    });
  }

  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

std::vector<CatalogCase> default_catalog(bool include_optional) {
  std::vector<CatalogCase> c{{LieType::A, 1, {}},     {LieType::A, 1, {0}}, {LieType::A, 2, {}},
                             {LieType::A, 2, {0}},    {LieType::A, 2, {0, 1}}, {LieType::B, 2, {}},
                             {LieType::B, 2, {0}},    {LieType::B, 2, {1}}};
  if (include_optional) c.push_back({LieType::A, 3, {0, 2}});
  return c;
}

}  // namespace qflag
