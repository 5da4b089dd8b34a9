#include "qflag/polgq.hpp"

#include "qflag/linalg.hpp"

#include <algorithm>
#include <map>

namespace qflag {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

PolElement PolElement::unit(const RootDatum& datum) {
  auto T = trivial_module(datum);
  return coefficient(T, VectorXcd::Ones(1), VectorXcd::Ones(1));
}

PolElement PolElement::coefficient(ModulePtr V, VectorXcd bra, VectorXcd ket, cplx c) {
  if (bra.size() != V->dim() || ket.size() != V->dim()) throw DomainError("vector size does not match module");
  PolElement p;
  p.terms.push_back({std::move(V), std::move(bra), std::move(ket), c});
  return p;
}

PolElement& PolElement::operator+=(const PolElement& o) {
  terms.insert(terms.end(), o.terms.begin(), o.terms.end());
  return *this;
}

PolElement operator-(PolElement a, const PolElement& b) { return a += cplx(-1.0) * b; }

PolElement operator*(cplx c, PolElement a) {
  for (auto& t : a.terms) t.coeff *= c;
  return a;
}

PolElement pol_product(const PolElement& a, const PolElement& b) {
  PolElement out;
  for (const auto& x : a.terms)
    for (const auto& y : b.terms) {
      if (x.module->dim() * y.module->dim() > kMaxProductDim)
        throw DomainError("product module too large; use smaller modules");
      out.terms.push_back({tensor(x.module, y.module), linalg::kron(x.bra, y.bra), linalg::kron(x.ket, y.ket),
                           x.coeff * y.coeff});
    }
  return out;
}

std::vector<std::pair<Weight, VectorXcd>> split_by_weight(const Module& V, const VectorXcd& v) {
  std::map<Weight, VectorXcd> parts;
  for (Index i = 0; i < V.dim(); ++i) {
    if (v(i) == 0.0) continue;
    auto [it, ins] = parts.try_emplace(V.weights[i], VectorXcd::Zero(V.dim()));
    it->second(i) = v(i);
  }
  return {parts.begin(), parts.end()};
}

PolElement pol_star(const PolElement& p) {
  // q^{−(ρ, wt ξ − wt η)} factorizes over the weight components of bra and ket
  PolElement out;
  for (const auto& t : p.terms) {
    const Module& V = *t.module;
    const RootDatum& dt = V.datum;
    VectorXcd bra = t.bra.conjugate(), ket = t.ket.conjugate();
    for (Index i = 0; i < V.dim(); ++i) {
      const double f = dt.qpow(dt.pairing(dt.rho, V.weights[static_cast<std::size_t>(i)]));
      bra(i) /= f;
      ket(i) *= f;
    }
    out.terms.push_back({conjugate_module(t.module), std::move(bra), std::move(ket), std::conj(t.coeff)});
  }
  return out;
}

PolElement act_left(const WordSum& x, const PolElement& p) {
  PolElement out = p;
  for (auto& t : out.terms) t.ket = evaluate_in_module(*t.module, x) * t.ket;
  return out;
}

PolElement act_right(const PolElement& p, const WordSum& y) {
  PolElement out = p;
  const WordSum ys = star(y);
  for (auto& t : out.terms) t.bra = evaluate_in_module(*t.module, ys) * t.bra;
  return out;
}

cplx evaluate(const PolElement& p, const WordSum& x) {
  cplx acc = 0.0;
  for (const auto& t : p.terms) acc += t.coeff * t.bra.dot(evaluate_in_module(*t.module, x) * t.ket);
  return acc;
}

namespace {

void battery_dfs(const std::vector<MatrixXcd>& letters, const VectorXcd& bra, const VectorXcd& v, int depth,
                 cplx coeff, std::vector<cplx>& out, std::size_t& pos) {
  // x = ℓ·x' with x'η already applied: value ⟨ξ, ℓ x' η⟩; words are enumerated by their suffix tree.
  if (pos >= out.size()) out.resize(pos + 1, 0.0);
  out[pos++] += coeff * bra.dot(v);
  if (depth == 0) return;
  for (const auto& l : letters) battery_dfs(letters, bra, l * v, depth - 1, coeff, out, pos);
}

}  // namespace

std::vector<cplx> battery_values(const PolElement& p, int depth) {
  if (depth < 0) throw DomainError("battery depth must be nonnegative");
  std::vector<cplx> out;
  for (const auto& t : p.terms) {
    const Module& V = *t.module;
    std::vector<MatrixXcd> letters;
    for (int r = 0; r < V.datum.rank; ++r) {
      letters.push_back(V.E[r]);
      letters.push_back(V.F[r]);
    }
    for (int s = 0; s < V.datum.rank; ++s) {
      const Weight om = Weight::fundamental(V.datum.rank, s);
      letters.push_back(V.symbol_matrix(Symbol::L(om)));
      letters.push_back(V.symbol_matrix(Symbol::L(-om)));
    }
    std::size_t pos = 0;
    battery_dfs(letters, t.bra, t.ket, depth, t.coeff, out, pos);
  }
  return out;
}

double oracle_distance(const PolElement& a, const PolElement& b, int depth) {
  auto va = battery_values(a, depth);
  auto vb = battery_values(b, depth);
  const std::size_t n = std::max(va.size(), vb.size());
  va.resize(n, 0.0);
  vb.resize(n, 0.0);
  double diff = 0.0, scale = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    diff = std::max(diff, std::abs(va[i] - vb[i]));
    scale = std::max({scale, std::abs(va[i]), std::abs(vb[i])});
  }
  return diff / scale;
}

bool coinvariance_test(const PolElement& p, const std::vector<int>& subset, double tol) {
  for (const auto& t : p.terms) {
    const MatrixXcd P = invariant_projector(*t.module, subset);
    if ((t.ket - P * t.ket).norm() > tol * std::max(1.0, t.ket.norm())) return false;
  }
  return true;
}

}  // namespace qflag
