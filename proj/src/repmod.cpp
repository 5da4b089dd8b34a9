#include "qflag/repmod.hpp"

#include "qflag/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <tuple>

namespace qflag {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;

Eigen::VectorXd Module::l_diag(const Weight& omega) const {
  Eigen::VectorXd out(dim());
  for (Index i = 0; i < dim(); ++i) out(i) = datum.qpow(datum.pairing(omega, weights[i]) / Rational(2));
  return out;
}

MatrixXcd Module::symbol_matrix(const Symbol& s) const {
  switch (s.kind) {
    case Symbol::Kind::E: datum.check_node(s.node); return E[s.node];
    case Symbol::Kind::F: datum.check_node(s.node); return F[s.node];
    case Symbol::Kind::L: return l_diag(s.weight).cast<cplx>().asDiagonal();
  }
  return {};
}

std::vector<Index> Module::weight_indices(const Weight& mu) const {
  std::vector<Index> out;
  for (Index i = 0; i < dim(); ++i)
    if (weights[i] == mu) out.push_back(i);
  return out;
}

VectorXcd Module::basis_vector(Index i) const {
  VectorXcd v = VectorXcd::Zero(dim());
  v(i) = 1.0;
  return v;
}

Weight Module::weight_of(const VectorXcd& v, double tol) const {
  std::optional<Weight> found;
  const double scale = std::max(v.cwiseAbs().maxCoeff(), 1e-300);
  for (Index i = 0; i < dim(); ++i) {
    if (std::abs(v(i)) <= tol * scale) continue;
    if (found && !(*found == weights[i])) throw NumericalError("vector is not a weight vector");
    found = weights[i];
  }
  if (!found) throw NumericalError("zero vector has no weight");
  return *found;
}

namespace {

std::string weight_label(const Weight& w) {
  std::ostringstream os;
  os << w;
  return os.str();
}

ModulePtr build_irrep_uncached(const RootDatum& datum, const Weight& lambda, IrrepDiagnostics& diag) {
  const int n = datum.rank;
  std::vector<Weight> alpha;
  for (int r = 0; r < n; ++r) alpha.push_back(datum.simple_root(r));

  auto mod = std::make_shared<Module>();
  mod->datum = datum;
  mod->weights.push_back(lambda);

  std::map<Weight, std::vector<Index>> spaces;
  std::map<std::pair<int, Weight>, MatrixXd> fblk;  // F_r restricted to V(src), into V(src − α_r)
  spaces[lambda] = {0};
  double min_eig = std::numeric_limits<double>::infinity();

  struct Slice {
    int r;
    Weight src;
    Index off, len;
  };

  std::vector<Weight> level{lambda};
  while (!level.empty()) {
    std::set<Weight> cand;
    for (const auto& mu : level)
      for (int r = 0; r < n; ++r) cand.insert(mu - alpha[r]);
    std::vector<Weight> next;
    for (const auto& nu : cand) {
      std::vector<Slice> slices;
      Index tot = 0;
      for (int r = 0; r < n; ++r) {
        Weight src = nu + alpha[r];
        auto it = spaces.find(src);
        if (it == spaces.end()) continue;
        const Index len = static_cast<Index>(it->second.size());
        slices.push_back({r, std::move(src), tot, len});
        tot += len;
      }
      if (tot == 0) continue;

      MatrixXd G = MatrixXd::Zero(tot, tot);
      for (const auto& a : slices)
        for (const auto& b : slices) {
          auto blk = G.block(a.off, b.off, a.len, b.len);
          if (a.r == b.r) blk += qint(datum.q_node[a.r], a.src[a.r]) * MatrixXd::Identity(a.len, b.len);
          const Weight top = nu + alpha[a.r] + alpha[b.r];
          if (!spaces.count(top)) continue;
          const MatrixXd& fs = fblk.at({b.r, top});
          const MatrixXd& fr = fblk.at({a.r, top});
          blk += fs * fr.transpose();
        }

      Eigen::SelfAdjointEigenSolver<MatrixXd> eig(G);
      const auto& sig = eig.eigenvalues();
      min_eig = std::min(min_eig, sig(0));
      const double tol = 1e-8 * std::max(sig(tot - 1), 1.0);
      std::vector<Index> kept;
      for (Index c = tot - 1; c >= 0; --c)
        if (sig(c) > tol) kept.push_back(c);
      if (kept.empty()) continue;

      MatrixXd U = eig.eigenvectors();
      for (Index c : kept) {
        Index arg = 0;
        U.col(c).cwiseAbs().maxCoeff(&arg);
        if (U(arg, c) < 0) U.col(c) *= -1.0;
      }

      std::vector<Index> idx;
      for (std::size_t k = 0; k < kept.size(); ++k) {
        idx.push_back(mod->dim());
        mod->weights.push_back(nu);
      }
      spaces[nu] = idx;
      for (const auto& a : slices) {
        MatrixXd blk(static_cast<Index>(kept.size()), a.len);
        for (std::size_t k = 0; k < kept.size(); ++k) {
          const Index c = kept[k];
          for (Index j = 0; j < a.len; ++j) blk(static_cast<Index>(k), j) = std::sqrt(sig(c)) * U(a.off + j, c);
        }
        fblk[{a.r, a.src}] = std::move(blk);
      }
      next.push_back(nu);
    }
    level = std::move(next);
  }

  const Index d = mod->dim();
  mod->E.assign(n, MatrixXcd::Zero(d, d));
  mod->F.assign(n, MatrixXcd::Zero(d, d));
  for (const auto& [key, blk] : fblk) {
    const auto& [r, src] = key;
    const auto& cols = spaces.at(src);
    const auto& rows = spaces.at(src - alpha[r]);
    for (Index i = 0; i < blk.rows(); ++i)
      for (Index j = 0; j < blk.cols(); ++j) mod->F[r](rows[i], cols[j]) = blk(i, j);
  }
  for (int r = 0; r < n; ++r) mod->E[r] = mod->F[r].adjoint();

  diag.min_form_eigenvalue = std::isfinite(min_eig) ? min_eig : 0.0;
  diag.weyl_dim = weyl_dimension(datum, lambda);
  if (diag.weyl_dim != d) {
    std::ostringstream os;
    os << "irrep " << lambda << " has dimension " << d << ", expected " << diag.weyl_dim;
    throw NumericalError(os.str());
  }
  mod->highest_weight = lambda;
  mod->highest = 0;
  mod->label = "V" + weight_label(lambda);
  return mod;
}

struct CacheEntry {
  ModulePtr module;
  IrrepDiagnostics diag;
};

std::mutex& cache_mutex() {
  static std::mutex m;
  return m;
}

std::map<std::tuple<char, int, double, std::vector<int>>, CacheEntry>& irrep_cache() {
  static std::map<std::tuple<char, int, double, std::vector<int>>, CacheEntry> c;
  return c;
}

}  // namespace

ModulePtr build_irrep(const RootDatum& datum, const Weight& lambda, IrrepDiagnostics* diag) {
  if (static_cast<int>(lambda.size()) != datum.rank) throw DomainError("weight has wrong rank");
  if (!lambda.is_dominant()) throw DomainError("highest weight must be dominant");
  auto key = std::make_tuple(lie_type_char(datum.type), datum.rank, datum.q, lambda.coords());
  {
    std::lock_guard lock(cache_mutex());
    auto it = irrep_cache().find(key);
    if (it != irrep_cache().end()) {
      if (diag) *diag = it->second.diag;
      return it->second.module;
    }
  }
  IrrepDiagnostics local;
  ModulePtr m = build_irrep_uncached(datum, lambda, local);
  std::lock_guard lock(cache_mutex());
  auto [it, inserted] = irrep_cache().emplace(key, CacheEntry{m, local});
  if (diag) *diag = it->second.diag;
  return it->second.module;
}

ModulePtr trivial_module(const RootDatum& datum) { return build_irrep(datum, Weight(datum.rank)); }

namespace {

ModulePtr conjugate_uncached(const ModulePtr& V) {
  auto m = std::make_shared<Module>();
  m->datum = V->datum;
  for (const auto& w : V->weights) m->weights.push_back(-w);
  for (int r = 0; r < V->datum.rank; ++r) {
    m->E.push_back(-V->F[r].conjugate());
    m->F.push_back(-V->E[r].conjugate());
  }
  if (V->highest_weight) {
    const Weight lowest = -bar_involution(V->datum, *V->highest_weight);
    auto idx = V->weight_indices(lowest);
    if (idx.size() != 1) throw NumericalError("lowest weight space is not one-dimensional");
    m->highest_weight = -lowest;
    m->highest = idx.front();
  }
  m->label = "conj(" + V->label + ")";
  return m;
}

ModulePtr tensor_uncached(const ModulePtr& V, const ModulePtr& W) {
  if (!(V->datum == W->datum)) throw DomainError("tensor factors over different root data");
  auto m = std::make_shared<Module>();
  m->datum = V->datum;
  for (const auto& a : V->weights)
    for (const auto& b : W->weights) m->weights.push_back(a + b);
  for (int r = 0; r < V->datum.rank; ++r) {
    const Weight a = V->datum.simple_root(r);
    const MatrixXcd lvi = V->symbol_matrix(Symbol::L(-a));
    const MatrixXcd lw = W->symbol_matrix(Symbol::L(a));
    m->E.push_back(linalg::kron(V->E[r], lw) + linalg::kron(lvi, W->E[r]));
    m->F.push_back(linalg::kron(V->F[r], lw) + linalg::kron(lvi, W->F[r]));
  }
  m->label = V->label + "⊗" + W->label;
  m->factors = {V, W};
  return m;
}


// Derived modules are cached per parent object; entries keep their parents alive so the keys stay unique.
struct DerivedCache {
  std::mutex m;
  std::map<const Module*, std::pair<ModulePtr, ModulePtr>> conj;
  std::map<std::pair<const Module*, const Module*>, std::tuple<ModulePtr, ModulePtr, ModulePtr>> tens;
};

DerivedCache& derived_cache() {
  static DerivedCache c;
  return c;
}

}  // namespace

ModulePtr conjugate_module(const ModulePtr& V) {
  auto& c = derived_cache();
  {
    std::lock_guard lock(c.m);
    auto it = c.conj.find(V.get());
    if (it != c.conj.end()) return it->second.second;
  }
  ModulePtr m = conjugate_uncached(V);
  std::lock_guard lock(c.m);
  return c.conj.emplace(V.get(), std::make_pair(V, m)).first->second.second;
}

ModulePtr tensor(const ModulePtr& V, const ModulePtr& W) {
  auto& c = derived_cache();
  const auto key = std::make_pair(V.get(), W.get());
  {
    std::lock_guard lock(c.m);
    auto it = c.tens.find(key);
    if (it != c.tens.end()) return std::get<2>(it->second);
  }
  ModulePtr m = tensor_uncached(V, W);
  std::lock_guard lock(c.m);
  return std::get<2>(c.tens.emplace(key, std::make_tuple(V, W, m)).first->second);
}

double RelationResiduals::max() const { return std::max({commutator, serre, weight_shift, star}); }

RelationResiduals relation_residuals(const Module& V) {
  const auto& datum = V.datum;
  RelationResiduals res;
  for (int r = 0; r < datum.rank; ++r) {
    const Weight a = datum.simple_root(r);
    const double qr = datum.q_node[r];
    const MatrixXcd l2 = V.symbol_matrix(Symbol::L(2 * a));
    const MatrixXcd lm2 = V.symbol_matrix(Symbol::L(-2 * a));
    for (int s = 0; s < datum.rank; ++s) {
      MatrixXcd c = V.E[r] * V.F[s] - V.F[s] * V.E[r];
      if (r == s) c -= (l2 - lm2) / (qr - 1.0 / qr);
      res.commutator = std::max(res.commutator, linalg::max_abs(c));
      if (r != s)
        for (bool low : {false, true})
          res.serre = std::max(res.serre, linalg::max_abs(evaluate_in_module(V, serre_relation(datum, r, s, low))));
      const Weight om = Weight::fundamental(datum.rank, s);
      const MatrixXcd lo = V.symbol_matrix(Symbol::L(om)), loi = V.symbol_matrix(Symbol::L(-om));
      const double f = datum.qpow(datum.pairing(om, a) / Rational(2));
      res.weight_shift = std::max(res.weight_shift, linalg::max_abs(lo * V.E[r] * loi - f * V.E[r]));
      res.weight_shift = std::max(res.weight_shift, linalg::max_abs(lo * V.F[r] * loi - V.F[r] / f));
    }
    res.star = std::max(res.star, linalg::max_abs(V.F[r] - V.E[r].adjoint()));
  }
  return res;
}

VectorXcd extremal_vector(const Module& V, const std::vector<int>& word) {
  if (!V.highest) throw DomainError("extremal vectors need an irreducible module");
  VectorXcd v = V.basis_vector(*V.highest);
  Weight mu = *V.highest_weight;
  for (auto it = word.rbegin(); it != word.rend(); ++it) {
    const int i = *it;
    V.datum.check_node(i);
    const int k = mu[static_cast<std::size_t>(i)];
    if (k < 0) throw DomainError("word is not reduced for this weight");
    for (int t = 0; t < k; ++t) v = V.F[i] * v;
    const double nv = v.norm();
    if (nv < 1e-12) throw NumericalError("extremal vector vanished");
    v /= nv;
    mu -= k * V.datum.simple_root(i);
  }
  if (V.weight_indices(mu).size() != 1) throw NumericalError("extremal weight space is not one-dimensional");
  return v;
}

VectorXcd extremal_vector(const Module& V, const WeylElt& u) { return extremal_vector(V, u.word); }

GradedBasis closure_under(const Module& V, const MatrixXcd& start, const std::vector<int>& nodes, bool raising,
                          bool lowering) {
  std::map<Weight, MatrixXcd> spaces;
  std::vector<std::pair<Weight, VectorXcd>> queue;
  GradedBasis out;
  out.basis.resize(V.dim(), 0);

  auto offer = [&](VectorXcd v) {
    const double n0 = v.norm();
    if (n0 < 1e-12) return;
    const Weight mu = V.weight_of(v, 1e-10);
    auto& sp = spaces[mu];
    if (sp.cols() > 0) v -= sp * (sp.adjoint() * v);
    if (sp.cols() > 0) v -= sp * (sp.adjoint() * v);
    const double n1 = v.norm();
    if (n1 <= 1e-9 * n0) return;
    v /= n1;
    sp.conservativeResize(V.dim(), sp.cols() + 1);
    sp.col(sp.cols() - 1) = v;
    queue.emplace_back(mu, v);
    out.basis.conservativeResize(V.dim(), out.basis.cols() + 1);
    out.basis.col(out.basis.cols() - 1) = v;
    out.weights.push_back(mu);
  };

  for (Index c = 0; c < start.cols(); ++c) {
    // split into weight components
    std::map<Weight, VectorXcd> parts;
    for (Index i = 0; i < V.dim(); ++i) {
      if (std::abs(start(i, c)) == 0.0) continue;
      auto [it, ins] = parts.try_emplace(V.weights[i], VectorXcd::Zero(V.dim()));
      it->second(i) = start(i, c);
    }
    for (auto& [w, p] : parts) offer(p);
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const VectorXcd v = queue[head].second;
    for (int s : nodes) {
      if (raising) offer(V.E[s] * v);
      if (lowering) offer(V.F[s] * v);
    }
  }
  return out;
}

MatrixXcd demazure_span(const Module& V, const WeylElt& w) {
  std::vector<int> winv(w.word.rbegin(), w.word.rend());
  const VectorXcd h = extremal_vector(V, winv);
  std::vector<int> all(static_cast<std::size_t>(V.datum.rank));
  for (int r = 0; r < V.datum.rank; ++r) all[static_cast<std::size_t>(r)] = r;
  return closure_under(V, h, all, true, false).basis;
}

MatrixXcd invariant_subspace(const Module& V, const std::vector<int>& subset) {
  const auto zero = V.weight_indices(Weight(static_cast<std::size_t>(V.datum.rank)));
  const Index k = static_cast<Index>(zero.size());
  MatrixXcd emb = MatrixXcd::Zero(V.dim(), k);
  for (Index j = 0; j < k; ++j) emb(zero[j], j) = 1.0;
  MatrixXcd cons(0, k);
  for (int s : subset) {
    V.datum.check_node(s);
    for (const MatrixXcd* g : {&V.E[s], &V.F[s]}) {
      MatrixXcd blk = *g * emb;
      MatrixXcd grown(cons.rows() + blk.rows(), k);
      grown << cons, blk;
      cons = std::move(grown);
    }
  }
  return emb * linalg::null_space(cons);
}

MatrixXcd invariant_projector(const Module& V, const std::vector<int>& subset) {
  const MatrixXcd b = invariant_subspace(V, subset);
  return b * b.adjoint();
}

InvariantVector invariant_vector(const RootDatum& datum, const Weight& lambda, const std::vector<int>& subset,
                                 const WeylElt& w) {
  InvariantVector out;
  out.base = build_irrep(datum, lambda);
  const Module& V = *out.base;
  out.host = tensor(conjugate_module(out.base), out.base);
  const Module& H = *out.host;

  const VectorXcd h0 = extremal_vector(V, longest_element(datum));
  const GradedBasis sub = closure_under(V, h0, subset);
  std::vector<int> winv(w.word.rbegin(), w.word.rend());
  out.h_winv = extremal_vector(V, winv);

  std::vector<VectorXcd> cols;
  for (std::size_t i = 0; i < sub.weights.size(); ++i)
    for (std::size_t j = 0; j < sub.weights.size(); ++j)
      if (sub.weights[i] == sub.weights[j])
        cols.push_back(linalg::kron(sub.basis.col(static_cast<Index>(i)).conjugate(),
                                    sub.basis.col(static_cast<Index>(j))));
  MatrixXcd emb(H.dim(), static_cast<Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) emb.col(static_cast<Index>(c)) = cols[c];

  MatrixXcd cons(0, emb.cols());
  for (int s : subset) {
    for (const MatrixXcd* g : {&H.E[s], &H.F[s]}) {
      MatrixXcd blk = *g * emb;
      MatrixXcd grown(cons.rows() + blk.rows(), emb.cols());
      grown << cons, blk;
      cons = std::move(grown);
    }
  }
  const MatrixXcd ns = linalg::null_space(cons);
  if (ns.cols() != 1) {
    std::ostringstream os;
    os << "invariant space for " << lambda << " has dimension " << ns.cols();
    throw NumericalError(os.str());
  }
  VectorXcd v = emb * ns.col(0);
  v /= v.norm();
  const VectorXcd target = linalg::kron(out.h_winv.conjugate(), out.h_winv);
  const cplx c = v.dot(target);
  if (std::abs(c) < 1e-12) throw NumericalError("invariant vector is orthogonal to the extremal tensor");
  out.normalization = 1.0 / std::conj(c);
  out.coords = v * out.normalization;
  return out;
}

InvariantVector invariant_vector(const RootDatum& datum, const Weight& lambda, const std::vector<int>& subset) {
  return invariant_vector(datum, lambda, subset, shortest_coset_rep(datum, subset));
}

Index commutant_dimension(const Module& V) {
  const Index d = V.dim();
  const MatrixXcd id = MatrixXcd::Identity(d, d);
  std::vector<MatrixXcd> gens;
  for (int r = 0; r < V.datum.rank; ++r) {
    gens.push_back(V.E[r]);
    gens.push_back(V.F[r]);
    gens.push_back(V.symbol_matrix(Symbol::L(Weight::fundamental(V.datum.rank, r))));
  }
  MatrixXcd cons(0, d * d);
  for (const auto& g : gens) {
    // vec(gX − Xg) = (I⊗g − gᵀ⊗I) vec(X), column-major vec.
    MatrixXcd blk = linalg::kron(id, g) - linalg::kron(g.transpose(), id);
    MatrixXcd grown(cons.rows() + blk.rows(), d * d);
    grown << cons, blk;
    cons = std::move(grown);
  }
  return linalg::null_space(cons).cols();
}

std::vector<std::pair<Weight, Index>> highest_weight_multiplicities(const Module& V) {
  std::set<Weight> ws(V.weights.begin(), V.weights.end());
  std::vector<std::pair<Weight, Index>> out;
  for (const auto& mu : ws) {
    const auto idx = V.weight_indices(mu);
    const Index k = static_cast<Index>(idx.size());
    MatrixXcd cons(0, k);
    for (int r = 0; r < V.datum.rank; ++r) {
      MatrixXcd blk(V.dim(), k);
      for (Index j = 0; j < k; ++j) blk.col(j) = V.E[r].col(idx[j]);
      MatrixXcd grown(cons.rows() + blk.rows(), k);
      grown << cons, blk;
      cons = std::move(grown);
    }
    const Index m = linalg::null_space(cons).cols();
    if (m > 0) out.emplace_back(mu, m);
  }
  return out;
}

}  // namespace qflag
