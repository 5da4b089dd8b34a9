#pragma once

#include "qflag/rootdata.hpp"
#include "qflag/uqalg.hpp"

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace qflag {

struct Module;
using ModulePtr = std::shared_ptr<const Module>;

/// Finite-dimensional type I module in an orthonormal weight basis.
struct Module {
  RootDatum datum;
  std::vector<Weight> weights;          ///< weight of each basis vector
  std::vector<Eigen::MatrixXcd> E, F;   ///< per node, F[r] = E[r]^†
  std::optional<Weight> highest_weight; ///< set for irreducible modules
  std::optional<Eigen::Index> highest;  ///< basis index of h_λ
  std::string label;
  std::vector<ModulePtr> factors;       ///< (V, W) when built by tensor(V, W)

  Eigen::Index dim() const { return static_cast<Eigen::Index>(weights.size()); }
  /// Diagonal of L_ω: q^{(ω, wt)/2}.
  Eigen::VectorXd l_diag(const Weight& omega) const;
  Eigen::MatrixXcd symbol_matrix(const Symbol& s) const;
  std::vector<Eigen::Index> weight_indices(const Weight& mu) const;
  Eigen::VectorXcd basis_vector(Eigen::Index i) const;
  /// Weight of a vector supported in one weight space; throws otherwise.
  Weight weight_of(const Eigen::VectorXcd& v, double tol = 1e-12) const;
};

/// Diagnostics collected while building an irreducible module.
struct IrrepDiagnostics {
  double min_form_eigenvalue = 0.0;  ///< smallest eigenvalue of any Gram block before the quotient
  long long weyl_dim = 0;
};

/// Irreducible module V_λ (cached per datum and λ).
ModulePtr build_irrep(const RootDatum& datum, const Weight& lambda, IrrepDiagnostics* diag = nullptr);
ModulePtr conjugate_module(const ModulePtr& V);
ModulePtr tensor(const ModulePtr& V, const ModulePtr& W);
ModulePtr trivial_module(const RootDatum& datum);

/// Residuals of the defining relations evaluated in V.
struct RelationResiduals {
  double commutator = 0.0;   ///< [E_r,F_s] = δ_rs (L²−L⁻²)/(q_r−q_r⁻¹)
  double serre = 0.0;        ///< both E and F Serre relations
  double weight_shift = 0.0; ///< L_ω E_r L_ω⁻¹ = q^{(ω,α_r)/2} E_r and likewise for F
  double star = 0.0;         ///< F_r − E_r^†
  double max() const;
};
RelationResiduals relation_residuals(const Module& V);

/// h_{uλ} obtained from h_λ by applying normalized divided powers of F along the word of u,
/// rightmost letter first.
Eigen::VectorXcd extremal_vector(const Module& V, const std::vector<int>& word);
Eigen::VectorXcd extremal_vector(const Module& V, const WeylElt& u);

/// Orthonormal basis of U_q(b^+) h_{w^{-1}λ}; the word of w^{-1} is the reverse of w's word.
Eigen::MatrixXcd demazure_span(const Module& V, const WeylElt& w);

/// Orthonormal weight-vector basis of the smallest subspace containing the columns of start
/// (each a weight vector) and closed under E_s, F_s for s in nodes.
struct GradedBasis {
  Eigen::MatrixXcd basis;
  std::vector<Weight> weights;
};
GradedBasis closure_under(const Module& V, const Eigen::MatrixXcd& start, const std::vector<int>& nodes,
                          bool raising = true, bool lowering = true);

/// Weight-zero vectors annihilated by E_s, F_s for s ∈ S (orthonormal columns).
Eigen::MatrixXcd invariant_subspace(const Module& V, const std::vector<int>& subset);
Eigen::MatrixXcd invariant_projector(const Module& V, const std::vector<int>& subset);

/// v_λ ∈ V̄_λ ⊗ V_λ, invariant under U_q(k_S), taken inside V̄ ⊗ V with V = U_q(k_S) h_{w_0λ}
/// and normalized by ⟨v_λ, h̄_{w⁻¹λ} ⊗ h_{w⁻¹λ}⟩ = 1.
struct InvariantVector {
  ModulePtr host;   ///< V̄_λ ⊗ V_λ
  ModulePtr base;   ///< V_λ
  Eigen::VectorXcd coords;
  cplx normalization{1.0, 0.0};  ///< factor applied to the unit-norm null vector
  Eigen::VectorXcd h_winv;       ///< h_{w⁻¹λ} in V_λ
};
InvariantVector invariant_vector(const RootDatum& datum, const Weight& lambda, const std::vector<int>& subset,
                                 const WeylElt& w);
InvariantVector invariant_vector(const RootDatum& datum, const Weight& lambda, const std::vector<int>& subset);

/// Vector ξ̄ of the conjugate module as a coordinate vector.
inline Eigen::VectorXcd conjugate_coords(const Eigen::VectorXcd& v) { return v.conjugate(); }

/// Dimension of {X : X commutes with every E_r, F_r, L_ω} by a brute-force null space.
Eigen::Index commutant_dimension(const Module& V);
/// Highest weight vectors of V: for each weight, the common kernel of all E_r.
std::vector<std::pair<Weight, Eigen::Index>> highest_weight_multiplicities(const Module& V);

}  // namespace qflag
