#pragma once

#include <Eigen/Dense>

#include <complex>

namespace qflag::linalg {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

/// Orthonormal basis (columns) of the null space of a. Singular values at or below
/// rel_tol·max(σ_max, 1) count as zero.
Mat null_space(const Mat& a, double rel_tol = 1e-9);

/// Orthonormal basis of the column span of a, same threshold rule.
Mat orthonormal_span(const Mat& a, double rel_tol = 1e-9);

double max_abs(const Mat& a);

/// max|a − b| / max(1, max|a|, max|b|).
double relative_residual(const Mat& a, const Mat& b);

/// Kronecker product of dense matrices.
Mat kron(const Mat& a, const Mat& b);

/// Permutation taking V⊗W (index i·dw + j) to W⊗V (index j·dv + i).
Mat flip(Eigen::Index dv, Eigen::Index dw);

}  // namespace qflag::linalg
