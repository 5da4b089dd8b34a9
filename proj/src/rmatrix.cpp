#include "qflag/rmatrix.hpp"

#include "qflag/linalg.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseQR>

#include <map>
#include <mutex>
#include <sstream>

namespace qflag {

using Eigen::Index;
using Eigen::MatrixXcd;
using SpMat = Eigen::SparseMatrix<cplx>;

MatrixXcd opposite_coproduct_matrix(const Module& V, const Module& W, const Symbol& s) {
  switch (s.kind) {
    case Symbol::Kind::L: return linalg::kron(V.symbol_matrix(s), W.symbol_matrix(s));
    case Symbol::Kind::E:
    case Symbol::Kind::F: {
      const Weight a = V.datum.simple_root(s.node);
      return linalg::kron(V.symbol_matrix(Symbol::L(a)), W.symbol_matrix(s)) +
             linalg::kron(V.symbol_matrix(s), W.symbol_matrix(Symbol::L(-a)));
    }
  }
  return {};
}

namespace {

SpMat to_sparse(const MatrixXcd& m) {
  SpMat s = m.sparseView(1.0, 1e-300);
  s.makeCompressed();
  return s;
}

std::shared_ptr<const RAction> compute_r_action(const ModulePtr& Vp, const ModulePtr& Wp) {
  const Module& V = *Vp;
  const Module& W = *Wp;
  const RootDatum& dt = V.datum;
  if (!(dt == W.datum)) throw DomainError("R-matrix for modules over different root data");
  const Index dv = V.dim(), dw = W.dim(), d = dv * dw;

  auto ra = std::make_shared<RAction>();
  ra->V = Vp;
  ra->W = Wp;
  Eigen::VectorXcd qd(d);
  for (Index a = 0; a < dv; ++a)
    for (Index b = 0; b < dw; ++b) qd(a * dw + b) = dt.qpow(dt.pairing(V.weights[a], W.weights[b]));
  ra->Q = qd.asDiagonal();

  // Unknown entries of R̃ − 1: row (c,d) ← column (a,b) with wt c − wt a ∈ Q⁺\{0}, wt d = wt b − (wt c − wt a).
  std::vector<std::pair<Index, Index>> unk;
  for (Index a = 0; a < dv; ++a)
    for (Index c = 0; c < dv; ++c) {
      const Weight shift = V.weights[c] - V.weights[a];
      if (shift.is_zero() || !dt.in_positive_root_cone(shift)) continue;
      for (Index b = 0; b < dw; ++b)
        for (Index e = 0; e < dw; ++e)
          if (W.weights[e] == W.weights[b] - shift) unk.emplace_back(c * dw + e, a * dw + b);
    }
  ra->unknowns = static_cast<Index>(unk.size());

  MatrixXcd rt = MatrixXcd::Identity(d, d);
  if (!unk.empty()) {
    std::vector<Symbol> gens;
    for (int r = 0; r < dt.rank; ++r) {
      gens.push_back(Symbol::E(r));
      gens.push_back(Symbol::F(r));
    }
    const Index rows = static_cast<Index>(gens.size()) * d * d;
    std::vector<Eigen::Triplet<cplx>> trip;
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(rows);
    for (std::size_t g = 0; g < gens.size(); ++g) {
      const Index base = static_cast<Index>(g) * d * d;
      const MatrixXcd D = linalg::kron(V.symbol_matrix(gens[g]), W.symbol_matrix(Symbol::L(dt.simple_root(gens[g].node)))) +
                          linalg::kron(V.symbol_matrix(Symbol::L(-dt.simple_root(gens[g].node))), W.symbol_matrix(gens[g]));
      const MatrixXcd O = opposite_coproduct_matrix(V, W, gens[g]);
      const SpMat Os = to_sparse(O);
      const SpMat Dt = to_sparse(D.transpose());  // row access of D via columns of Dᵀ
      // Q X D − O Q X = O Q − Q D
      const MatrixXcd b = O * ra->Q - ra->Q * D;
      for (Index p = 0; p < d; ++p)
        for (Index j = 0; j < d; ++j)
          if (b(p, j) != 0.0) rhs(base + p * d + j) = b(p, j);
      for (std::size_t u = 0; u < unk.size(); ++u) {
        const auto [i0, k0] = unk[u];
        for (SpMat::InnerIterator it(Dt, k0); it; ++it)  // D(k0, j)
          trip.emplace_back(base + i0 * d + it.row(), static_cast<Index>(u), qd(i0) * it.value());
        for (SpMat::InnerIterator it(Os, i0); it; ++it)  // O(p, i0)
          trip.emplace_back(base + it.row() * d + k0, static_cast<Index>(u), -it.value() * qd(i0));
      }
    }
    SpMat A(rows, static_cast<Index>(unk.size()));
    A.setFromTriplets(trip.begin(), trip.end());
    A.makeCompressed();
    Eigen::SparseQR<SpMat, Eigen::COLAMDOrdering<int>> qr;
    qr.compute(A);
    if (qr.info() != Eigen::Success) throw NumericalError("R-matrix factorization failed");
    if (qr.rank() < static_cast<Index>(unk.size())) {
      std::ostringstream os;
      os << "R-matrix system is rank deficient (" << qr.rank() << " of " << unk.size() << ")";
      throw NumericalError(os.str());
    }
    const Eigen::VectorXcd x = qr.solve(rhs);
    const double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
    ra->solve_residual = (A * x - rhs).cwiseAbs().maxCoeff() / scale;
    if (ra->solve_residual > 1e-9) {
      std::ostringstream os;
      os << "R-matrix system inconsistent, residual " << ra->solve_residual;
      throw NumericalError(os.str());
    }
    for (std::size_t u = 0; u < unk.size(); ++u) rt(unk[u].first, unk[u].second) += x(static_cast<Index>(u));
  }
  ra->Rtilde = rt;
  ra->R = ra->Q * rt;

  double res = 0.0;
  for (int r = 0; r < dt.rank; ++r) {
    const Weight a = dt.simple_root(r);
    for (const Symbol& s : {Symbol::E(r), Symbol::F(r), Symbol::L(Weight::fundamental(dt.rank, r))}) {
      MatrixXcd D;
      if (s.kind == Symbol::Kind::L)
        D = linalg::kron(V.symbol_matrix(s), W.symbol_matrix(s));
      else
        D = linalg::kron(V.symbol_matrix(s), W.symbol_matrix(Symbol::L(a))) +
            linalg::kron(V.symbol_matrix(Symbol::L(-a)), W.symbol_matrix(s));
      const MatrixXcd O = opposite_coproduct_matrix(V, W, s);
      res = std::max(res, linalg::relative_residual(ra->R * D, O * ra->R));
    }
  }
  ra->intertwining_residual = res;
  return ra;
}

struct RCache {
  std::mutex m;
  std::map<std::pair<const Module*, const Module*>, std::shared_ptr<const RAction>> entries;
};

RCache& r_cache() {
  static RCache c;
  return c;
}

}  // namespace

std::shared_ptr<const RAction> r_action(const ModulePtr& V, const ModulePtr& W) {
  auto key = std::make_pair(V.get(), W.get());
  {
    std::lock_guard lock(r_cache().m);
    auto it = r_cache().entries.find(key);
    if (it != r_cache().entries.end()) return it->second;
  }
  auto ra = compute_r_action(V, W);
  std::lock_guard lock(r_cache().m);
  // the cached RAction holds V and W, so the pointer key stays unique
  return r_cache().entries.emplace(key, ra).first->second;
}

RFlips r_flip_variants(const RAction& ra) {
  RFlips out;
  const Index dv = ra.V->dim(), dw = ra.W->dim();
  const MatrixXcd P = linalg::flip(dv, dw);   // V⊗W → W⊗V
  const MatrixXcd Pb = linalg::flip(dw, dv);  // W⊗V → V⊗W
  const auto rwv = (ra.V == ra.W) ? nullptr : r_action(ra.W, ra.V);
  const MatrixXcd& Rwv = rwv ? rwv->R : ra.R;
  out.R21 = Pb * Rwv * P;
  out.Rinv = ra.R.inverse();
  out.R21inv = out.R21.inverse();
  return out;
}

}  // namespace qflag
