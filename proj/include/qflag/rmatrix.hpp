#pragma once

#include "qflag/repmod.hpp"

#include <Eigen/Dense>

namespace qflag {

/// Action of the universal R-matrix on V ⊗ W, factored as R = Q·R̃.
struct RAction {
  ModulePtr V, W;
  Eigen::MatrixXcd R;
  Eigen::MatrixXcd Q;       ///< diagonal q^{(wt ξ, wt η)}
  Eigen::MatrixXcd Rtilde;  ///< identity plus strictly triangular part
  Eigen::Index unknowns = 0;
  double solve_residual = 0.0;
  double intertwining_residual = 0.0;  ///< max over generators of |RΔ(x) − Δ^op(x)R|
};

/// Solves R Δ(x) = Δ^op(x) R for the triangular factor. Cached per module pair.
/// Throws NumericalError when the constrained system is rank deficient or inconsistent.
std::shared_ptr<const RAction> r_action(const ModulePtr& V, const ModulePtr& W);

struct RFlips {
  Eigen::MatrixXcd R21;     ///< flip ∘ R_{W⊗V} ∘ flip, acting on V ⊗ W
  Eigen::MatrixXcd Rinv;
  Eigen::MatrixXcd R21inv;
};
RFlips r_flip_variants(const RAction& ra);

/// Matrix of Δ^op(x) on V ⊗ W for a generator symbol.
Eigen::MatrixXcd opposite_coproduct_matrix(const Module& V, const Module& W, const Symbol& s);

}  // namespace qflag
