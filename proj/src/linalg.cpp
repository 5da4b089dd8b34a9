#include "qflag/linalg.hpp"

#include <algorithm>

namespace qflag::linalg {

Mat null_space(const Mat& a, double rel_tol) {
  const Eigen::Index n = a.cols();
  if (a.rows() == 0 || n == 0) return Mat::Identity(n, n);
  Eigen::BDCSVD<Mat> svd(a, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double smax = s.size() ? s(0) : 0.0;
  const double tol = rel_tol * std::max(smax, 1.0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

Mat orthonormal_span(const Mat& a, double rel_tol) {
  if (a.cols() == 0 || a.rows() == 0) return Mat(a.rows(), 0);
  Eigen::BDCSVD<Mat> svd(a, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  const double tol = rel_tol * std::max(s.size() ? s(0) : 0.0, 1.0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol) ++rank;
  return svd.matrixU().leftCols(rank);
}

double max_abs(const Mat& a) { return a.size() ? a.cwiseAbs().maxCoeff() : 0.0; }

double relative_residual(const Mat& a, const Mat& b) {
  const double scale = std::max({1.0, max_abs(a), max_abs(b)});
  return max_abs(a - b) / scale;
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Mat flip(Eigen::Index dv, Eigen::Index dw) {
  Mat p = Mat::Zero(dv * dw, dv * dw);
  for (Eigen::Index i = 0; i < dv; ++i)
    for (Eigen::Index j = 0; j < dw; ++j) p(j * dv + i, i * dw + j) = 1.0;
  return p;
}

}  // namespace qflag::linalg
