#pragma once

#include "qflag/repmod.hpp"
#include "qflag/uqalg.hpp"

#include <Eigen/Dense>

#include <vector>

namespace qflag {

/// coeff · U(bra, ket) on a module, where U(ξ,η): x ↦ ⟨ξ, xη⟩.
struct PolTerm {
  ModulePtr module;
  Eigen::VectorXcd bra, ket;
  cplx coeff{1.0, 0.0};
};

/// Finite sum of matrix coefficients, kept unreduced.
struct PolElement {
  std::vector<PolTerm> terms;

  static PolElement unit(const RootDatum& datum);
  static PolElement coefficient(ModulePtr V, Eigen::VectorXcd bra, Eigen::VectorXcd ket, cplx c = 1.0);

  PolElement& operator+=(const PolElement& o);
  friend PolElement operator+(PolElement a, const PolElement& b) { return a += b; }
  friend PolElement operator-(PolElement a, const PolElement& b);
  friend PolElement operator*(cplx c, PolElement a);
};

/// Largest tensor module the product will build.
inline constexpr Eigen::Index kMaxProductDim = 4096;

PolElement pol_product(const PolElement& a, const PolElement& b);
/// U(ξ,η)* = q^{−(ρ, wt ξ − wt η)} U(ξ̄, η̄), extended over weight components.
PolElement pol_star(const PolElement& p);
/// x ⊳ U(ξ,η) = U(ξ, xη).
PolElement act_left(const WordSum& x, const PolElement& p);
/// U(ξ,η) ⊲ y = U(y*ξ, η).
PolElement act_right(const PolElement& p, const WordSum& y);

cplx evaluate(const PolElement& p, const WordSum& x);

/// Values of p on every monomial in {E_r, F_r, L_{±ω_s}} of length ≤ depth, in a fixed order.
std::vector<cplx> battery_values(const PolElement& p, int depth);
/// max |a(x) − b(x)| / max(1, max |a|, max |b|) over the battery.
double oracle_distance(const PolElement& a, const PolElement& b, int depth = 4);

/// Every ket lies in the weight-zero common kernel of E_s, F_s (s ∈ S).
bool coinvariance_test(const PolElement& p, const std::vector<int>& subset, double tol = 1e-9);

/// Splits a vector of V into weight components (nonzero ones only).
std::vector<std::pair<Weight, Eigen::VectorXcd>> split_by_weight(const Module& V, const Eigen::VectorXcd& v);

}  // namespace qflag
