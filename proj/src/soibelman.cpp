#include "qflag/soibelman.hpp"

#include "qflag/linalg.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <unordered_map>

namespace qflag {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Trip = Eigen::Triplet<cplx, int>;

FockGenerators fock_generators(double q, int N) {
  if (N < 2) throw DomainError("Fock truncation must be at least 2");
  if (!(q > 0.0 && q < 1.0)) throw DomainError("q must lie in (0,1)");
  FockGenerators g{MatrixXcd::Zero(N, N), MatrixXcd::Zero(N, N)};
  for (int n = 0; n < N; ++n) {
    g.b(n, n) = std::pow(q, n);
    if (n > 0) g.a(n - 1, n) = std::sqrt(1.0 - std::pow(q, 2 * n));
  }
  return g;
}

namespace {

Index index_of_weight(const Module& V, int coord) {
  const auto idx = V.weight_indices(Weight{coord});
  if (idx.size() != 1) throw NumericalError("spin module weight space is not one-dimensional");
  return idx.front();
}

// Column of the spin module basis reached from h by k lowering steps, and the factor
// (F^k h)[that index].
std::pair<Index, cplx> lowering_factor(const Module& S, int twoj, int k) {
  VectorXcd v = S.basis_vector(*S.highest);
  for (int i = 0; i < k; ++i) v = S.F[0] * v;
  const Index at = index_of_weight(S, twoj - 2 * k);
  if ((v - v(at) * S.basis_vector(at)).norm() > 1e-10 * std::max(1.0, v.norm()))
    throw NumericalError("lowered highest vector left its weight line");
  return {at, v(at)};
}

std::vector<ShiftDiag> compute_su2(double q, int twoj, int N) {
  const int P = N + twoj + 1;
  const RootDatum dt = build_root_datum(LieType::A, 1, q);
  const auto half = build_irrep(dt, Weight{1});
  const Index ip = index_of_weight(*half, 1), im = index_of_weight(*half, -1);
  const cplx sigma = half->F[0](im, ip);  // F h_{1/2} = σ e_−

  const FockGenerators g = fock_generators(q, P);
  const MatrixXcd c = -q * g.b.adjoint();
  const MatrixXcd d = g.a.adjoint();
  std::vector<std::vector<MatrixXcd>> th(2, std::vector<MatrixXcd>(2));
  th[ip][ip] = d;
  th[ip][im] = std::conj(sigma) * g.b;
  th[im][ip] = sigma * c;
  th[im][im] = g.a;

  std::vector<std::vector<MatrixXcd>> cur;
  if (twoj == 0) {
    cur = {{MatrixXcd::Identity(P, P)}};
  } else {
    cur = th;
    for (int tj = 2; tj <= twoj; ++tj) {
      const auto prev = build_irrep(dt, Weight{tj - 1});
      const auto S = build_irrep(dt, Weight{tj});
      const auto T = tensor(prev, half);
      const VectorXcd hh = linalg::kron(prev->basis_vector(*prev->highest), half->basis_vector(*half->highest));
      std::vector<VectorXcd> iota(static_cast<std::size_t>(S->dim()));
      for (int k = 0; k <= tj; ++k) {
        auto [at, f] = lowering_factor(*S, tj, k);
        VectorXcd x = hh;
        for (int i = 0; i < k; ++i) x = T->F[0] * x;
        iota[static_cast<std::size_t>(at)] = x / f;
      }
      std::vector<std::vector<MatrixXcd>> next(static_cast<std::size_t>(S->dim()),
                                               std::vector<MatrixXcd>(static_cast<std::size_t>(S->dim())));
      for (Index k = 0; k < S->dim(); ++k)
        for (Index kp = 0; kp < S->dim(); ++kp) {
          MatrixXcd acc = MatrixXcd::Zero(P, P);
          const VectorXcd& u = iota[static_cast<std::size_t>(k)];
          const VectorXcd& v = iota[static_cast<std::size_t>(kp)];
          for (Index a = 0; a < T->dim(); ++a) {
            if (u(a) == 0.0) continue;
            for (Index b = 0; b < T->dim(); ++b) {
              const cplx w = std::conj(u(a)) * v(b);
              if (std::abs(w) < 1e-15) continue;
              acc += w * cur[static_cast<std::size_t>(a / 2)][static_cast<std::size_t>(b / 2)] *
                     th[static_cast<std::size_t>(a % 2)][static_cast<std::size_t>(b % 2)];
            }
          }
          next[static_cast<std::size_t>(k)][static_cast<std::size_t>(kp)] = std::move(acc);
        }
      cur = std::move(next);
    }
  }

  const auto S = build_irrep(dt, Weight{twoj});
  const Index ds = S->dim();
  std::vector<ShiftDiag> out(static_cast<std::size_t>(ds * ds));
  for (Index k = 0; k < ds; ++k)
    for (Index kp = 0; kp < ds; ++kp) {
      const int wk = S->weights[static_cast<std::size_t>(k)][0];
      const int wkp = S->weights[static_cast<std::size_t>(kp)][0];
      ShiftDiag sd;
      sd.shift = (wk + wkp) / 2;
      sd.coeff = VectorXcd::Zero(N);
      const MatrixXcd& m = cur[static_cast<std::size_t>(k)][static_cast<std::size_t>(kp)];
      double stray = 0.0;
      for (int n = 0; n < N; ++n)
        for (int o = 0; o < P; ++o) {
          if (o == n + sd.shift)
            sd.coeff(n) = m(o, n);
          else
            stray = std::max(stray, std::abs(m(o, n)));
        }
      if (stray > 1e-12) throw NumericalError("spin matrix coefficient is not a weighted shift");
      out[static_cast<std::size_t>(k * ds + kp)] = std::move(sd);
    }
  return out;
}

struct Su2Cache {
  std::mutex m;
  std::map<std::tuple<double, int, int>, std::vector<ShiftDiag>> entries;
};

Su2Cache& su2_cache() {
  static Su2Cache c;
  return c;
}

const std::vector<ShiftDiag>& su2_table(double q, int twoj, int N) {
  if (twoj < 0) throw DomainError("spin must be nonnegative");
  if (N < 2) throw DomainError("Fock truncation must be at least 2");
  const auto key = std::make_tuple(q, twoj, N);
  {
    std::lock_guard lock(su2_cache().m);
    auto it = su2_cache().entries.find(key);
    if (it != su2_cache().entries.end()) return it->second;
  }
  auto tab = compute_su2(q, twoj, N);
  std::lock_guard lock(su2_cache().m);
  return su2_cache().entries.emplace(key, std::move(tab)).first->second;
}

}  // namespace

const ShiftDiag& su2_coefficient(double q, int twoj, Index k, Index kp, int N) {
  const auto& tab = su2_table(q, twoj, N);
  const Index ds = twoj + 1;
  if (k < 0 || kp < 0 || k >= ds || kp >= ds) throw DomainError("spin basis index out of range");
  return tab[static_cast<std::size_t>(k * ds + kp)];
}

MatrixXcd su2_matrix_coeff(double q, int twoj, int twom, int twomp, int N) {
  if (twoj < 0 || std::abs(twom) > twoj || std::abs(twomp) > twoj || (twoj - twom) % 2 != 0 ||
      (twoj - twomp) % 2 != 0)
    throw DomainError("invalid spin labels");
  const auto S = build_irrep(build_root_datum(LieType::A, 1, q), Weight{twoj});
  return su2_coefficient(q, twoj, index_of_weight(*S, twom), index_of_weight(*S, twomp), N).dense(N);
}

std::vector<SpinCopy> node_decomposition(const Module& V, int r) {
  const RootDatum& dt = V.datum;
  dt.check_node(r);
  const Weight a = dt.simple_root(r);
  const RootDatum sub = build_root_datum(LieType::A, 1, dt.q_node[r]);
  std::vector<Weight> distinct(V.weights.begin(), V.weights.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  std::vector<SpinCopy> out;
  Index total = 0;
  for (const Weight& mu : distinct) {
    const int twoj = mu[static_cast<std::size_t>(r)];
    if (twoj < 0) continue;
    const auto idx = V.weight_indices(mu);
    const auto above = V.weight_indices(mu + a);
    MatrixXcd K;
    if (above.empty()) {
      K = MatrixXcd::Identity(static_cast<Index>(idx.size()), static_cast<Index>(idx.size()));
    } else {
      MatrixXcd e(static_cast<Index>(above.size()), static_cast<Index>(idx.size()));
      for (std::size_t i = 0; i < above.size(); ++i)
        for (std::size_t j = 0; j < idx.size(); ++j)
          e(static_cast<Index>(i), static_cast<Index>(j)) = V.E[r](above[i], idx[j]);
      K = linalg::null_space(e);
    }
    if (K.cols() == 0) continue;
    const auto S = build_irrep(sub, Weight{twoj});
    for (Index c = 0; c < K.cols(); ++c) {
      VectorXcd u = VectorXcd::Zero(V.dim());
      for (std::size_t j = 0; j < idx.size(); ++j) u(idx[j]) = K(static_cast<Index>(j), c);
      SpinCopy copy;
      copy.twoj = twoj;
      copy.basis = MatrixXcd::Zero(V.dim(), S->dim());
      copy.weights.resize(static_cast<std::size_t>(S->dim()));
      VectorXcd x = u;
      for (int k = 0; k <= twoj; ++k) {
        auto [at, f] = lowering_factor(*S, twoj, k);
        copy.basis.col(at) = x / f;
        copy.weights[static_cast<std::size_t>(at)] = mu - k * a;
        x = V.F[r] * x;
      }
      total += S->dim();
      out.push_back(std::move(copy));
    }
  }
  if (total != V.dim()) {
    std::ostringstream os;
    os << "node " << r << " decomposition covers " << total << " of " << V.dim() << " dimensions";
    throw NumericalError(os.str());
  }
  MatrixXcd all(V.dim(), total);
  Index col = 0;
  for (const auto& c : out) {
    all.middleCols(col, c.basis.cols()) = c.basis;
    col += c.basis.cols();
  }
  const double defect = (all.adjoint() * all - MatrixXcd::Identity(total, total)).cwiseAbs().maxCoeff();
  if (defect > 1e-9) {
    std::ostringstream os;
    os << "node " << r << " spin copies are not orthonormal (defect " << defect << ")";
    throw NumericalError(os.str());
  }
  return out;
}

namespace {

// θ_r(U(e_i, e_j)) for basis vectors of V, grouped by i.
struct NodeTable {
  ModulePtr V;  // keeps the cache key alive
  std::vector<std::vector<std::pair<Index, ShiftDiag>>> rows;
};

std::shared_ptr<const NodeTable> node_table(const ModulePtr& V, int r, int N);

// θ_r(U(ξ⊗ξ', η⊗η')) = θ_r(U(ξ,η)) θ_r(U(ξ',η')): products of weighted shifts keep the
// relative accuracy of tiny entries, which a spin decomposition of V⊗W would not.
std::shared_ptr<const NodeTable> tensor_node_table(const ModulePtr& Vp, int r, int N) {
  const ModulePtr& A = Vp->factors[0];
  const ModulePtr& B = Vp->factors[1];
  const auto tb = node_table(B, r, N);
  int sb = 0;
  for (const auto& row : tb->rows)
    for (const auto& e : row) sb = std::max(sb, e.second.shift);
  const auto ta = node_table(A, r, N + sb);
  const Index dB = B->dim();
  auto tab = std::make_shared<NodeTable>();
  tab->V = Vp;
  tab->rows.resize(static_cast<std::size_t>(Vp->dim()));
  for (Index i = 0; i < A->dim(); ++i)
    for (Index ib = 0; ib < dB; ++ib) {
      auto& out = tab->rows[static_cast<std::size_t>(i * dB + ib)];
      for (const auto& [j, sa] : ta->rows[static_cast<std::size_t>(i)])
        for (const auto& [jb, sbd] : tb->rows[static_cast<std::size_t>(ib)]) {
          ShiftDiag sd;
          sd.shift = sa.shift + sbd.shift;
          sd.coeff = VectorXcd::Zero(N);
          for (int n = 0; n < N; ++n) {
            const int m = n + sbd.shift;
            if (m >= 0 && sbd.coeff(n) != 0.0) sd.coeff(n) = sa.coeff(m) * sbd.coeff(n);
          }
          if (sd.coeff.cwiseAbs().maxCoeff() > 0.0) out.emplace_back(j * dB + jb, std::move(sd));
        }
    }
  return tab;
}

std::shared_ptr<const NodeTable> compute_node_table(const ModulePtr& Vp, int r, int N) {
  if (Vp->factors.size() == 2) return tensor_node_table(Vp, r, N);
  const Module& V = *Vp;
  const double qr = V.datum.q_node[r];
  auto tab = std::make_shared<NodeTable>();
  tab->V = Vp;
  std::vector<std::map<Index, ShiftDiag>> acc(static_cast<std::size_t>(V.dim()));
  for (const auto& copy : node_decomposition(V, r)) {
    const Index ds = copy.basis.cols();
    for (Index k = 0; k < ds; ++k)
      for (Index kp = 0; kp < ds; ++kp) {
        const ShiftDiag& t = su2_coefficient(qr, copy.twoj, k, kp, N);
        for (Index i = 0; i < V.dim(); ++i) {
          const cplx fi = copy.basis(i, k);
          if (std::abs(fi) < 1e-15) continue;
          for (Index j = 0; j < V.dim(); ++j) {
            const cplx w = std::conj(fi) * copy.basis(j, kp);
            if (std::abs(w) < 1e-15) continue;
            auto [it, fresh] = acc[static_cast<std::size_t>(i)].try_emplace(j);
            if (fresh) {
              it->second.shift = t.shift;
              it->second.coeff = VectorXcd::Zero(N);
            } else if (it->second.shift != t.shift) {
              throw NumericalError("inconsistent Fock shift in node table");
            }
            it->second.coeff += w * t.coeff;
          }
        }
      }
  }
  tab->rows.resize(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i)
    for (auto& [j, sd] : acc[i]) tab->rows[i].emplace_back(j, std::move(sd));
  return tab;
}

struct NodeCache {
  std::mutex m;
  std::map<std::tuple<const Module*, int, int>, std::shared_ptr<const NodeTable>> entries;
};

NodeCache& node_cache() {
  static NodeCache c;
  return c;
}

std::shared_ptr<const NodeTable> node_table(const ModulePtr& V, int r, int N) {
  const auto key = std::make_tuple(V.get(), r, N);
  {
    std::lock_guard lock(node_cache().m);
    auto it = node_cache().entries.find(key);
    if (it != node_cache().entries.end()) return it->second;
  }
  auto tab = compute_node_table(V, r, N);
  std::lock_guard lock(node_cache().m);
  return node_cache().entries.emplace(key, tab).first->second;
}

// Appends c·(P ⊗ sd) restricted to last-leg inputs n < ext_last; P is square of side dp.
void append_kron(const SpMat& P, const ShiftDiag& sd, cplx c, int N, int ext_last, std::vector<Trip>& out) {
  for (int col = 0; col < P.outerSize(); ++col)
    for (SpMat::InnerIterator it(P, col); it; ++it) {
      const cplx v = c * it.value();
      for (int n = 0; n < ext_last; ++n) {
        const int o = n + sd.shift;
        if (o < 0 || o >= N || sd.coeff(n) == 0.0) continue;
        out.emplace_back(static_cast<int>(it.row()) * N + o, col * N + n, v * sd.coeff(n));
      }
    }
}

TensorOp theta_w_term(const std::vector<int>& word, const PolTerm& t, int N, int col_limit) {
  const int l = static_cast<int>(word.size());
  if (l == 0) {
    TensorOp id = TensorOp::identity(0, N);
    return (t.coeff * t.bra.dot(t.ket)) * id;
  }
  const Index d = t.module->dim();
  std::vector<std::shared_ptr<const NodeTable>> tabs;
  for (int r : word) tabs.push_back(node_table(t.module, r, N));

  // per-leg shift bounds over the entries lying on some path from the bra to the ket
  const auto uz = [](int k) { return static_cast<std::size_t>(k); };
  std::vector<std::vector<char>> fwd(uz(l + 1), std::vector<char>(uz(static_cast<int>(d)), 0)), bwd = fwd;
  for (Index z = 0; z < d; ++z) {
    fwd[0][uz(static_cast<int>(z))] = t.bra(z) != 0.0;
    bwd[uz(l)][uz(static_cast<int>(z))] = t.ket(z) != 0.0;
  }
  for (int k = 0; k < l; ++k)
    for (Index z = 0; z < d; ++z)
      if (fwd[uz(k)][uz(static_cast<int>(z))])
        for (const auto& e : tabs[uz(k)]->rows[uz(static_cast<int>(z))]) fwd[uz(k + 1)][uz(static_cast<int>(e.first))] = 1;
  for (int k = l - 1; k >= 0; --k)
    for (Index z = 0; z < d; ++z)
      for (const auto& e : tabs[uz(k)]->rows[uz(static_cast<int>(z))])
        if (bwd[uz(k + 1)][uz(static_cast<int>(e.first))]) bwd[uz(k)][uz(static_cast<int>(z))] = 1;
  std::vector<int> up(uz(l), 0), down(uz(l), 0), ext(uz(l));
  for (int k = 0; k < l; ++k) {
    for (Index z = 0; z < d; ++z) {
      if (!fwd[uz(k)][uz(static_cast<int>(z))]) continue;
      for (const auto& [j, sd] : tabs[uz(k)]->rows[uz(static_cast<int>(z))]) {
        if (!bwd[uz(k + 1)][uz(static_cast<int>(j))]) continue;
        up[uz(k)] = std::max(up[uz(k)], sd.shift);
        down[uz(k)] = std::min(down[uz(k)], sd.shift);
      }
    }
    ext[static_cast<std::size_t>(k)] = N - up[static_cast<std::size_t>(k)];
    if (col_limit > 0) ext[static_cast<std::size_t>(k)] = std::min(ext[static_cast<std::size_t>(k)], col_limit);
  }

  std::map<Index, SpMat> state;
  for (Index z = 0; z < d; ++z)
    if (t.bra(z) != 0.0) {
      SpMat one(1, 1);
      one.insert(0, 0) = std::conj(t.bra(z));
      state.emplace(z, std::move(one));
    }
  int side = 1;
  for (int k = 0; k < l; ++k) {
    const bool last = k == l - 1;
    const auto& rows = tabs[static_cast<std::size_t>(k)]->rows;
    const int el = ext[static_cast<std::size_t>(k)];
    if (last) {
      std::vector<Trip> trip;
      for (const auto& [z, P] : state)
        for (const auto& [j, sd] : rows[static_cast<std::size_t>(z)])
          if (t.ket(j) != 0.0) append_kron(P, sd, t.ket(j), N, el, trip);
      return t.coeff * TensorOp::from_triplets(l, N, trip, ext, up, down);
    }
    std::map<Index, std::vector<Trip>> next;
    for (const auto& [z, P] : state)
      for (const auto& [j, sd] : rows[static_cast<std::size_t>(z)])
        if (bwd[uz(k + 1)][uz(static_cast<int>(j))]) append_kron(P, sd, 1.0, N, el, next[j]);
    state.clear();
    side *= N;
    for (auto& [z, trip] : next) {
      SpMat m(side, side);
      m.setFromTriplets(trip.begin(), trip.end());
      if (m.nonZeros() > 0) state.emplace(z, std::move(m));
    }
  }
  return TensorOp(l, N);
}

}  // namespace

MatrixXcd theta_node(int r, const ModulePtr& V, const VectorXcd& xi, const VectorXcd& eta, int N) {
  if (xi.size() != V->dim() || eta.size() != V->dim()) throw DomainError("vector size does not match module");
  V->datum.check_node(r);
  const auto tab = node_table(V, r, N);
  MatrixXcd out = MatrixXcd::Zero(N, N);
  for (Index i = 0; i < V->dim(); ++i) {
    if (xi(i) == 0.0) continue;
    for (const auto& [j, sd] : tab->rows[static_cast<std::size_t>(i)])
      if (eta(j) != 0.0) out += std::conj(xi(i)) * eta(j) * sd.dense(N);
  }
  return out;
}

TensorOp theta_w(const RootDatum& datum, const std::vector<int>& word, const PolElement& p, int N,
                 int col_limit) {
  if (N < 2) throw DomainError("Fock truncation must be at least 2");
  for (int r : word) datum.check_node(r);
  if (weyl_from_word(datum, word).length != static_cast<int>(word.size()))
    throw DomainError("word is not reduced");
  TensorOp acc(static_cast<int>(word.size()), N);
  for (const auto& t : p.terms) {
    if (!(t.module->datum == datum)) throw DomainError("element lives over a different root datum");
    acc += theta_w_term(word, t, N, col_limit);
  }
  return acc;
}

cplx theta_z(const std::vector<cplx>& z, const PolElement& p) {
  cplx acc = 0.0;
  for (const auto& t : p.terms) {
    if (static_cast<int>(z.size()) != t.module->datum.rank) throw DomainError("one phase per node");
    for (const auto& [wt, part] : split_by_weight(*t.module, t.ket)) {
      cplx f = 1.0;
      for (std::size_t k = 0; k < z.size(); ++k) f *= std::pow(z[k], wt[k]);
      acc += t.coeff * t.bra.dot(part) * f;
    }
  }
  return acc;
}

}  // namespace qflag
