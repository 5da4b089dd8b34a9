#include "qflag/uqalg.hpp"

#include "qflag/repmod.hpp"

#include <cmath>
#include <map>

namespace qflag {

void GenWord::normalize() {
  std::vector<Symbol> out;
  out.reserve(factors.size());
  for (auto& s : factors) {
    if (s.kind == Symbol::Kind::L) {
      if (!out.empty() && out.back().kind == Symbol::Kind::L) {
        out.back().weight += s.weight;
        if (out.back().weight.is_zero()) out.pop_back();
        continue;
      }
      if (s.weight.is_zero()) continue;
    }
    out.push_back(std::move(s));
  }
  factors = std::move(out);
}

WordSum WordSum::unit() { return WordSum(GenWord{}); }
WordSum WordSum::E(int r) { return WordSum(GenWord{{Symbol::E(r)}, 1.0}); }
WordSum WordSum::F(int r) { return WordSum(GenWord{{Symbol::F(r)}, 1.0}); }
WordSum WordSum::L(const Weight& w) {
  GenWord g{{Symbol::L(w)}, 1.0};
  g.normalize();
  return WordSum(std::move(g));
}

namespace {

std::vector<int> word_key(const GenWord& w) {
  std::vector<int> key;
  for (const auto& s : w.factors) {
    key.push_back(static_cast<int>(s.kind));
    key.push_back(s.node);
    key.push_back(static_cast<int>(s.weight.size()));
    for (std::size_t i = 0; i < s.weight.size(); ++i) key.push_back(s.weight[i]);
  }
  return key;
}

GenWord concat(const GenWord& a, const GenWord& b) {
  GenWord w;
  w.factors = a.factors;
  w.factors.insert(w.factors.end(), b.factors.begin(), b.factors.end());
  w.scalar = a.scalar * b.scalar;
  w.normalize();
  return w;
}

}  // namespace

WordSum& WordSum::canonicalize() {
  std::map<std::vector<int>, GenWord> grouped;
  for (auto& t : terms_) {
    t.normalize();
    auto key = word_key(t);
    auto it = grouped.find(key);
    if (it == grouped.end())
      grouped.emplace(std::move(key), t);
    else
      it->second.scalar += t.scalar;
  }
  terms_.clear();
  for (auto& [k, t] : grouped)
    if (std::abs(t.scalar) > 1e-300) terms_.push_back(std::move(t));
  return *this;
}

WordSum& WordSum::operator+=(const WordSum& o) {
  terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
  return canonicalize();
}

WordSum& WordSum::operator-=(const WordSum& o) { return *this += cplx(-1.0) * o; }

WordSum operator*(const WordSum& a, const WordSum& b) {
  WordSum out;
  for (const auto& x : a.terms_)
    for (const auto& y : b.terms_) out.terms_.push_back(concat(x, y));
  out.canonicalize();
  return out;
}

WordSum operator*(cplx c, WordSum a) {
  for (auto& t : a.terms_) t.scalar *= c;
  return a.canonicalize();
}

double qint(double x, int m) { return (std::pow(x, m) - std::pow(x, -m)) / (x - 1.0 / x); }

double qbinom(const RootDatum& datum, int m, int n, int r) {
  datum.check_node(r);
  if (n < 0 || m < n) throw DomainError("qbinom requires m >= n >= 0");
  const double x = datum.q_node[r];
  double v = std::pow(x, n * (n - m));
  for (int k = 1; k <= n; ++k) v *= (1.0 - std::pow(x, 2 * m - 2 * k + 2)) / (1.0 - std::pow(x, 2 * k));
  return v;
}

WordSum serre_relation(const RootDatum& datum, int r, int s, bool lowering) {
  datum.check_node(r);
  datum.check_node(s);
  if (r == s) throw DomainError("Serre relation needs distinct nodes");
  const int n = 1 - datum.cartan[r][s];
  auto gen = [&](int node) { return lowering ? Symbol::F(node) : Symbol::E(node); };
  WordSum out;
  for (int k = 0; k <= n; ++k) {
    GenWord w;
    w.scalar = ((k % 2) ? -1.0 : 1.0) * qbinom(datum, n, k, r);
    for (int i = 0; i < k; ++i) w.factors.push_back(gen(r));
    w.factors.push_back(gen(s));
    for (int i = 0; i < n - k; ++i) w.factors.push_back(gen(r));
    out += WordSum(w);
  }
  return out;
}

namespace {

std::vector<TensorTerm> symbol_coproduct(const RootDatum& datum, const Symbol& s) {
  auto word = [](Symbol x) { return GenWord{{std::move(x)}, 1.0}; };
  if (s.kind == Symbol::Kind::L) return {TensorTerm{1.0, {word(s), word(s)}}};
  const Weight a = datum.simple_root(s.node);
  GenWord la = word(Symbol::L(a));
  GenWord lainv = word(Symbol::L(-a));
  return {TensorTerm{1.0, {word(s), la}}, TensorTerm{1.0, {lainv, word(s)}}};
}

std::vector<TensorTerm> compose(const std::vector<TensorTerm>& a, const std::vector<TensorTerm>& b) {
  std::vector<TensorTerm> out;
  out.reserve(a.size() * b.size());
  for (const auto& x : a)
    for (const auto& y : b) {
      TensorTerm t;
      t.scalar = x.scalar * y.scalar;
      for (std::size_t k = 0; k < x.legs.size(); ++k) t.legs.push_back(concat(x.legs[k], y.legs[k]));
      out.push_back(std::move(t));
    }
  return out;
}

std::vector<TensorTerm> word_coproduct(const RootDatum& datum, const GenWord& w) {
  std::vector<TensorTerm> acc{TensorTerm{w.scalar, {GenWord{}, GenWord{}}}};
  for (const auto& s : w.factors) acc = compose(acc, symbol_coproduct(datum, s));
  return acc;
}

}  // namespace

std::vector<TensorTerm> coproduct(const RootDatum& datum, const WordSum& x) {
  std::vector<TensorTerm> out;
  for (const auto& w : x.terms()) {
    auto part = word_coproduct(datum, w);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

std::vector<TensorTerm> iterated_coproduct(const RootDatum& datum, const WordSum& x, int n) {
  if (n < 1) throw DomainError("iterated coproduct needs n >= 1");
  std::vector<TensorTerm> acc;
  for (const auto& w : x.terms()) {
    GenWord unit_scalar = w;
    unit_scalar.scalar = 1.0;
    acc.push_back(TensorTerm{w.scalar, {unit_scalar}});
  }
  // (Δ ⊗ id ⊗ ... ) applied to the last leg, n−1 times.
  for (int k = 1; k < n; ++k) {
    std::vector<TensorTerm> next;
    for (const auto& t : acc) {
      for (auto& split : word_coproduct(datum, t.legs.back())) {
        TensorTerm u;
        u.scalar = t.scalar * split.scalar;
        u.legs.assign(t.legs.begin(), t.legs.end() - 1);
        u.legs.push_back(split.legs[0]);
        u.legs.push_back(split.legs[1]);
        next.push_back(std::move(u));
      }
    }
    acc = std::move(next);
  }
  return acc;
}

namespace {

template <class SymbolMap>
WordSum anti_map(const WordSum& x, SymbolMap&& f, bool conjugate_scalars) {
  WordSum out;
  for (const auto& w : x.terms()) {
    GenWord g;
    g.scalar = conjugate_scalars ? std::conj(w.scalar) : w.scalar;
    for (auto it = w.factors.rbegin(); it != w.factors.rend(); ++it) {
      auto [c, s] = f(*it);
      g.scalar *= c;
      g.factors.push_back(std::move(s));
    }
    out += WordSum(std::move(g));
  }
  return out;
}

}  // namespace

WordSum antipode(const RootDatum& datum, const WordSum& x) {
  return anti_map(
      x,
      [&](const Symbol& s) -> std::pair<cplx, Symbol> {
        switch (s.kind) {
          case Symbol::Kind::E: return {-datum.q_node[s.node], s};
          case Symbol::Kind::F: return {-1.0 / datum.q_node[s.node], s};
          case Symbol::Kind::L: return {1.0, Symbol::L(-s.weight)};
        }
        return {1.0, s};
      },
      false);
}

WordSum unitary_antipode(const RootDatum&, const WordSum& x) {
  return anti_map(
      x,
      [](const Symbol& s) -> std::pair<cplx, Symbol> {
        if (s.kind == Symbol::Kind::L) return {1.0, Symbol::L(-s.weight)};
        return {-1.0, s};
      },
      false);
}

WordSum star(const WordSum& x) {
  return anti_map(
      x,
      [](const Symbol& s) -> std::pair<cplx, Symbol> {
        switch (s.kind) {
          case Symbol::Kind::E: return {1.0, Symbol::F(s.node)};
          case Symbol::Kind::F: return {1.0, Symbol::E(s.node)};
          case Symbol::Kind::L: return {1.0, s};
        }
        return {1.0, s};
      },
      true);
}

cplx counit(const WordSum& x) {
  cplx acc = 0.0;
  for (const auto& w : x.terms()) {
    bool killed = false;
    for (const auto& s : w.factors) killed = killed || s.kind != Symbol::Kind::L;
    if (!killed) acc += w.scalar;
  }
  return acc;
}

WordSum adjoint_action(const RootDatum& datum, const WordSum& x, const WordSum& y) {
  WordSum out;
  for (const auto& t : coproduct(datum, y)) {
    WordSum left = antipode(datum, WordSum(t.legs[0]));
    out += t.scalar * (left * x * WordSum(t.legs[1]));
  }
  return out;
}

Eigen::MatrixXcd evaluate_in_module(const Module& V, const WordSum& x) {
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(V.dim(), V.dim());
  return evaluate_words<Eigen::MatrixXcd>(
      x, [&](const Symbol& s) -> Eigen::MatrixXcd { return V.symbol_matrix(s); }, id);
}

std::vector<RescaleDefect> rescaled_commutator_defect(const RootDatum& datum, const Module& V,
                                                      const std::vector<double>& b) {
  if (static_cast<int>(b.size()) != datum.rank) throw DomainError("one rescaling factor per node");
  std::vector<RescaleDefect> out;
  for (int r = 0; r < datum.rank; ++r) {
    if (!(b[r] > 0.0)) throw DomainError("rescaling factors must be positive");
    const double qr = datum.q_node[r];
    const double br = b[r];
    const Weight a = datum.simple_root(r);
    const Eigen::MatrixXcd e = br * V.E[r];
    const Eigen::MatrixXcd f = br * V.F[r];
    const Eigen::MatrixXcd lp = V.symbol_matrix(Symbol::L(a)) / br;
    const Eigen::MatrixXcd lp2 = lp * lp;
    const Eigen::MatrixXcd lpm2 = lp2.inverse();
    const Eigen::MatrixXcd rel = e * f - f * e - (std::pow(br, 4) * lp2 - lpm2) / (qr - 1.0 / qr);

    // The degenerate comparison holds the L' matrix fixed at the module's L_{α_r}.
    const Eigen::MatrixXcd fixed = V.symbol_matrix(Symbol::L(a));
    const double defect =
        std::pow(br, 4) * (fixed * fixed).cwiseAbs().maxCoeff() / std::abs(qr - 1.0 / qr);
    out.push_back({r, br, rel.cwiseAbs().maxCoeff(), defect});
  }
  return out;
}

}  // namespace qflag
