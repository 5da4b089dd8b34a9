#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <complex>
#include <stdexcept>
#include <vector>

namespace qflag {

using cplx = std::complex<double>;
using SpMat = Eigen::SparseMatrix<cplx, Eigen::ColMajor, int>;

/// Weighted shift on one Fock leg: e_n ↦ coeff(n) e_{n+shift}, stored for n < N.
/// Entries are exact values of the untruncated operator.
struct ShiftDiag {
  int shift = 0;
  Eigen::VectorXcd coeff;

  Eigen::MatrixXcd dense(int N) const;
};

/// Operator on the truncated space (C^N)^{⊗legs}, basis index Σ n_k N^{legs−1−k}.
///
/// Only columns with n_k < ext[k] for every leg are stored, and each stored column equals
/// the corresponding column of the untruncated operator (no output index reaches N).
/// up/down bound the per-leg index shift of every matrix entry; they drive the extent
/// bookkeeping of products and adjoints.
class TensorOp {
public:
  TensorOp() = default;
  /// Zero operator, exact everywhere.
  TensorOp(int legs, int N);

  static TensorOp identity(int legs, int N);
  /// Diagonal operator; entries outside the given extent are dropped.
  static TensorOp diagonal(int legs, int N, const Eigen::VectorXcd& diag, std::vector<int> ext);
  /// Assembles from triplets with the given bounds; columns outside ext are dropped.
  static TensorOp from_triplets(int legs, int N, const std::vector<Eigen::Triplet<cplx, int>>& trip,
                                std::vector<int> ext, std::vector<int> up, std::vector<int> down);

  int legs() const { return legs_; }
  int N() const { return N_; }
  Eigen::Index dim() const { return dim_; }
  const SpMat& matrix() const { return mat_; }
  const std::vector<int>& ext() const { return ext_; }
  const std::vector<int>& up() const { return up_; }
  const std::vector<int>& down() const { return down_; }
  int min_ext() const;

  TensorOp adjoint() const;
  Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const;
  /// Dense principal block on indices < M per leg; throws if some leg extent is below M.
  Eigen::MatrixXcd safe_block(int M) const;
  /// Dense columns with all n_k < M (every row); same extent requirement.
  Eigen::MatrixXcd block_columns(int M) const;
  Eigen::VectorXcd diagonal_values() const;
  /// Entry-wise map of a diagonal operator; throws if the operator has off-diagonal entries.
  template <class F>
  TensorOp map_diagonal(F&& f) const;

  TensorOp& operator+=(const TensorOp& o);
  TensorOp& operator-=(const TensorOp& o);
  friend TensorOp operator+(TensorOp a, const TensorOp& b) { return a += b; }
  friend TensorOp operator-(TensorOp a, const TensorOp& b) { return a -= b; }
  friend TensorOp operator*(const TensorOp& a, const TensorOp& b);
  friend TensorOp operator*(cplx c, TensorOp a);

  /// Multi-index of a basis index.
  std::vector<int> decode(Eigen::Index i) const;
  bool in_block(Eigen::Index i, const std::vector<int>& lim) const;

private:
  void check_compatible(const TensorOp& o) const;
  void prune_to_ext();

  int legs_ = 0;
  int N_ = 1;
  Eigen::Index dim_ = 1;
  SpMat mat_;
  std::vector<int> ext_, up_, down_;
};

/// max|A − B| over the columns with all n_k < M, divided by max(1, max|A|, max|B|) there.
double block_residual(const TensorOp& a, const TensorOp& b, int M);
/// Same with the zero operator.
double block_norm(const TensorOp& a, int M);

/// Columns of the identity with all n_k < M, as a dim × M^legs sparse matrix.
SpMat block_identity(int legs, int N, int M);
/// op·X where every nonzero row of X must be an exactly stored column of op; throws
/// NumericalError otherwise. Used to push block columns through operator words.
SpMat apply_exact(const TensorOp& op, const SpMat& X);
/// Entrywise maximum modulus.
double max_abs(const SpMat& X);

/// Basis index of e_{n_0} ⊗ ... ⊗ e_{n_{l−1}}.
Eigen::Index tensor_index(const std::vector<int>& n, int N);

template <class F>
TensorOp TensorOp::map_diagonal(F&& f) const {
  Eigen::VectorXcd d = Eigen::VectorXcd::Zero(dim_);
  for (int c = 0; c < mat_.outerSize(); ++c)
    for (SpMat::InnerIterator it(mat_, c); it; ++it) {
      if (it.row() != it.col()) {
        if (it.value() != cplx(0.0)) throw std::logic_error("map_diagonal on a non-diagonal operator");
        continue;
      }
      d(c) = it.value();
    }
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dim_);
  const std::vector<int> lim = ext_;
  for (Eigen::Index i = 0; i < dim_; ++i)
    if (in_block(i, lim)) out(i) = f(d(i));
  return diagonal(legs_, N_, out, ext_);
}

}  // namespace qflag
