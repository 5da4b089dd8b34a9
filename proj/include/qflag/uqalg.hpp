#pragma once

#include "qflag/rootdata.hpp"

#include <complex>
#include <vector>

namespace qflag {

using cplx = std::complex<double>;

struct Module;

/// One generator of U_q(g) (or of the degenerate algebra, which has the same symbols).
struct Symbol {
  enum class Kind { E, F, L };
  Kind kind = Kind::L;
  int node = -1;   ///< for E and F
  Weight weight;   ///< for L

  static Symbol E(int r) { return {Kind::E, r, {}}; }
  static Symbol F(int r) { return {Kind::F, r, {}}; }
  static Symbol L(Weight w) { return {Kind::L, -1, std::move(w)}; }

  friend bool operator==(const Symbol&, const Symbol&) = default;
};

/// Scalar times an ordered product of generators; the empty product is the unit.
struct GenWord {
  std::vector<Symbol> factors;
  cplx scalar{1.0, 0.0};

  /// Merges adjacent Cartan factors and drops L_0.
  void normalize();
};

class WordSum {
public:
  WordSum() = default;
  explicit WordSum(GenWord w) { terms_.push_back(std::move(w)); }

  static WordSum unit();
  static WordSum E(int r);
  static WordSum F(int r);
  static WordSum L(const Weight& w);

  const std::vector<GenWord>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  /// Groups identical factor lists and drops zero coefficients.
  WordSum& canonicalize();

  WordSum& operator+=(const WordSum& o);
  WordSum& operator-=(const WordSum& o);
  friend WordSum operator+(WordSum a, const WordSum& b) { return a += b; }
  friend WordSum operator-(WordSum a, const WordSum& b) { return a -= b; }
  friend WordSum operator*(const WordSum& a, const WordSum& b);
  friend WordSum operator*(cplx c, WordSum a);

private:
  std::vector<GenWord> terms_;
};

/// Sum of elementary tensors of words; every leg carries a unit scalar.
struct TensorTerm {
  cplx scalar{1.0, 0.0};
  std::vector<GenWord> legs;
};

/// q-binomial [m choose n]_{q_r} in the product form.
double qbinom(const RootDatum& datum, int m, int n, int r);
/// Symmetric q-integer [m]_x = (x^m − x^{−m}) / (x − x^{−1}).
double qint(double x, int m);

/// Σ_k (−1)^k [1−a_rs, k]_r X_r^k X_s X_r^{1−a_rs−k} with X = E (or F when lowering).
WordSum serre_relation(const RootDatum& datum, int r, int s, bool lowering = false);

std::vector<TensorTerm> coproduct(const RootDatum& datum, const WordSum& x);
/// Δ^{(n)} into n tensor legs (n ≥ 1; n = 1 is the identity).
std::vector<TensorTerm> iterated_coproduct(const RootDatum& datum, const WordSum& x, int n);
WordSum antipode(const RootDatum& datum, const WordSum& x);
WordSum unitary_antipode(const RootDatum& datum, const WordSum& x);
WordSum star(const WordSum& x);
cplx counit(const WordSum& x);

/// Right adjoint action x ⊲ y = S(y_(1)) x y_(2).
WordSum adjoint_action(const RootDatum& datum, const WordSum& x, const WordSum& y);

/// Evaluates a word sum in a representation given per symbol. Op needs +, * and scalar *.
template <class Op, class SymbolFn>
Op evaluate_words(const WordSum& x, SymbolFn&& symbol_op, const Op& identity) {
  Op acc = cplx(0.0) * identity;
  for (const auto& w : x.terms()) {
    Op prod = identity;
    for (const auto& s : w.factors) prod = prod * symbol_op(s);
    acc = acc + w.scalar * prod;
  }
  return acc;
}

/// Evaluates a word sum as a matrix in a module.
Eigen::MatrixXcd evaluate_in_module(const Module& V, const WordSum& x);

/// Per-node report for the rescaled presentation E' = bE, F' = bF, L'_{α_r} = b^{−1}L_{α_r}.
struct RescaleDefect {
  int node = 0;
  double b = 1.0;
  /// ‖[E',F'] − (b⁴L'² − L'^{−2})/(q_r − q_r^{−1})‖ for the rescaled module matrices.
  double presentation_residual = 0.0;
  /// Distance between the rescaled relation and the degenerate one with ε = 0, both taken
  /// on the same fixed matrix for L': b⁴‖L'²‖/|q_r − q_r^{−1}|.
  double degenerate_defect = 0.0;
};

std::vector<RescaleDefect> rescaled_commutator_defect(const RootDatum& datum, const Module& V,
                                                      const std::vector<double>& b);

}  // namespace qflag
