#pragma once

#include "qflag/polgq.hpp"
#include "qflag/repmod.hpp"
#include "qflag/tensorop.hpp"

#include <Eigen/Dense>

#include <vector>

namespace qflag {

/// θ(a), θ(b) on C^N: a e_n = (1 − q^{2n})^{1/2} e_{n−1}, b e_n = q^n e_n.
struct FockGenerators {
  Eigen::MatrixXcd a, b;
};
FockGenerators fock_generators(double q, int N);

/// θ(U(e_k, e_k')) for basis vectors of the spin-(twoj/2) module of U_{q}(sl2), as a weighted
/// shift by (wt e_k + wt e_k')/2. Exact on n < N. Cached per (q, twoj, N).
const ShiftDiag& su2_coefficient(double q, int twoj, Eigen::Index k, Eigen::Index kp, int N);
/// Dense image θ(t^j_{m,m'}), weights given as 2m, 2m'.
Eigen::MatrixXcd su2_matrix_coeff(double q, int twoj, int twom, int twomp, int N);

/// θ_r(U(ξ,η)) on one Fock leg (dense N×N).
Eigen::MatrixXcd theta_node(int r, const ModulePtr& V, const Eigen::VectorXcd& xi, const Eigen::VectorXcd& eta,
                            int N);

/// θ_w for the given reduced word of w (legs in word order); throws on a non-reduced word.
/// col_limit > 0 keeps only columns with every n_k < col_limit.
TensorOp theta_w(const RootDatum& datum, const std::vector<int>& word, const PolElement& p, int N,
                 int col_limit = 0);

/// θ_z(U(ξ,η)) = ⟨ξ,η⟩ Π_k z_k^{(α_k^∨, wt η)}, summed over the weight components of η.
cplx theta_z(const std::vector<cplx>& z, const PolElement& p);

/// Spin decomposition of V under the node-r copy of U_{q_r}(sl2): orthonormal vectors f_{c,k}
/// with f_{c,k} = ι_c(e_k) for isometric intertwiners ι_c from the standard spin modules.
struct SpinCopy {
  int twoj = 0;
  Eigen::MatrixXcd basis;            ///< columns f_{c,k}, in the order of the spin module basis
  std::vector<Weight> weights;
};
std::vector<SpinCopy> node_decomposition(const Module& V, int r);

}  // namespace qflag
