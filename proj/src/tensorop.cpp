#include "qflag/tensorop.hpp"

#include "qflag/rootdata.hpp"

#include <algorithm>

namespace qflag {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

Eigen::MatrixXcd ShiftDiag::dense(int N) const {
  MatrixXcd m = MatrixXcd::Zero(N, N);
  for (int n = 0; n < N && n < coeff.size(); ++n) {
    const int out = n + shift;
    if (out >= 0 && out < N) m(out, n) = coeff(n);
  }
  return m;
}

namespace {

Index ipow(int N, int legs) {
  Index d = 1;
  for (int k = 0; k < legs; ++k) d *= N;
  return d;
}

}  // namespace

Index tensor_index(const std::vector<int>& n, int N) {
  Index i = 0;
  for (int v : n) i = i * N + v;
  return i;
}

TensorOp::TensorOp(int legs, int N)
    : legs_(legs), N_(N), dim_(ipow(N, legs)), mat_(dim_, dim_), ext_(legs, N), up_(legs, 0), down_(legs, 0) {
  if (legs < 0 || N < 1) throw DomainError("invalid tensor operator shape");
}

TensorOp TensorOp::identity(int legs, int N) {
  TensorOp t(legs, N);
  t.mat_.setIdentity();
  return t;
}

TensorOp TensorOp::diagonal(int legs, int N, const VectorXcd& diag, std::vector<int> ext) {
  TensorOp t(legs, N);
  if (diag.size() != t.dim_ || static_cast<int>(ext.size()) != legs) throw DomainError("diagonal size mismatch");
  t.ext_ = std::move(ext);
  std::vector<Eigen::Triplet<cplx, int>> trip;
  for (Index i = 0; i < t.dim_; ++i)
    if (diag(i) != cplx(0.0) && t.in_block(i, t.ext_))
      trip.emplace_back(static_cast<int>(i), static_cast<int>(i), diag(i));
  t.mat_.setFromTriplets(trip.begin(), trip.end());
  return t;
}

TensorOp TensorOp::from_triplets(int legs, int N, const std::vector<Eigen::Triplet<cplx, int>>& trip,
                                 std::vector<int> ext, std::vector<int> up, std::vector<int> down) {
  TensorOp t(legs, N);
  if (static_cast<int>(ext.size()) != legs || static_cast<int>(up.size()) != legs ||
      static_cast<int>(down.size()) != legs)
    throw DomainError("per-leg bounds have the wrong length");
  t.ext_ = std::move(ext);
  t.up_ = std::move(up);
  t.down_ = std::move(down);
  t.mat_.setFromTriplets(trip.begin(), trip.end());
  t.prune_to_ext();
  return t;
}

int TensorOp::min_ext() const { return ext_.empty() ? N_ : *std::min_element(ext_.begin(), ext_.end()); }

std::vector<int> TensorOp::decode(Index i) const {
  std::vector<int> n(legs_);
  for (int k = legs_ - 1; k >= 0; --k) {
    n[k] = static_cast<int>(i % N_);
    i /= N_;
  }
  return n;
}

bool TensorOp::in_block(Index i, const std::vector<int>& lim) const {
  for (int k = legs_ - 1; k >= 0; --k) {
    if (i % N_ >= lim[k]) return false;
    i /= N_;
  }
  return true;
}

void TensorOp::prune_to_ext() {
  for (int k = 0; k < legs_; ++k) ext_[k] = std::clamp(ext_[k], 0, N_);
  std::vector<char> keep(static_cast<std::size_t>(dim_));
  for (Index c = 0; c < dim_; ++c) keep[static_cast<std::size_t>(c)] = in_block(c, ext_);
  mat_.prune([&](const Index&, const Index& col, const cplx&) { return keep[static_cast<std::size_t>(col)] != 0; });
}

void TensorOp::check_compatible(const TensorOp& o) const {
  if (legs_ != o.legs_ || N_ != o.N_) throw DomainError("tensor operators on different spaces");
}

TensorOp& TensorOp::operator+=(const TensorOp& o) {
  check_compatible(o);
  mat_ += o.mat_;
  for (int k = 0; k < legs_; ++k) {
    ext_[k] = std::min(ext_[k], o.ext_[k]);
    up_[k] = std::max(up_[k], o.up_[k]);
    down_[k] = std::min(down_[k], o.down_[k]);
  }
  prune_to_ext();
  return *this;
}

TensorOp& TensorOp::operator-=(const TensorOp& o) { return *this += cplx(-1.0) * o; }

TensorOp operator*(cplx c, TensorOp a) {
  a.mat_ *= c;
  return a;
}

TensorOp operator*(const TensorOp& a, const TensorOp& b) {
  a.check_compatible(b);
  TensorOp t(a.legs_, a.N_);
  for (int k = 0; k < a.legs_; ++k) {
    t.ext_[k] = std::min(b.ext_[k], a.ext_[k] - std::max(0, b.up_[k]));
    t.up_[k] = a.up_[k] + b.up_[k];
    t.down_[k] = a.down_[k] + b.down_[k];
  }
  t.mat_ = a.mat_ * b.mat_;
  t.prune_to_ext();
  return t;
}

TensorOp TensorOp::adjoint() const {
  TensorOp t(legs_, N_);
  for (int k = 0; k < legs_; ++k) {
    // column m of the adjoint reads row m, fed by columns m − s with down ≤ s ≤ up
    t.ext_[k] = std::min(N_, ext_[k] + down_[k]);
    t.up_[k] = -down_[k];
    t.down_[k] = -up_[k];
  }
  t.mat_ = mat_.adjoint();
  t.prune_to_ext();
  return t;
}

VectorXcd TensorOp::apply(const VectorXcd& v) const {
  if (v.size() != dim_) throw DomainError("vector size does not match tensor operator");
  return mat_ * v;
}

MatrixXcd TensorOp::block_columns(int M) const {
  for (int k = 0; k < legs_; ++k)
    if (ext_[k] < M) throw NumericalError("truncation too small for the requested block");
  const std::vector<int> lim(static_cast<std::size_t>(legs_), M);
  std::vector<Index> cols;
  for (Index c = 0; c < dim_; ++c)
    if (in_block(c, lim)) cols.push_back(c);
  MatrixXcd out = MatrixXcd::Zero(dim_, static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (SpMat::InnerIterator it(mat_, cols[j]); it; ++it) out(it.row(), static_cast<Index>(j)) = it.value();
  return out;
}

MatrixXcd TensorOp::safe_block(int M) const {
  const MatrixXcd cols = block_columns(M);
  const std::vector<int> lim(static_cast<std::size_t>(legs_), M);
  std::vector<Index> rows;
  for (Index r = 0; r < dim_; ++r)
    if (in_block(r, lim)) rows.push_back(r);
  MatrixXcd out(static_cast<Index>(rows.size()), cols.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = cols.row(rows[i]);
  return out;
}

VectorXcd TensorOp::diagonal_values() const { return mat_.diagonal(); }

namespace {

double max_over_block(const SpMat& m, const TensorOp& shape, int M) {
  const std::vector<int> lim(static_cast<std::size_t>(shape.legs()), M);
  double v = 0.0;
  for (int c = 0; c < m.outerSize(); ++c) {
    if (!shape.in_block(c, lim)) continue;
    for (SpMat::InnerIterator it(m, c); it; ++it) v = std::max(v, std::abs(it.value()));
  }
  return v;
}

void require_block(const TensorOp& a, int M) {
  for (int e : a.ext())
    if (e < M) throw NumericalError("truncation too small for the requested block");
}

}  // namespace

double block_residual(const TensorOp& a, const TensorOp& b, int M) {
  if (a.legs() != b.legs() || a.N() != b.N()) throw DomainError("tensor operators on different spaces");
  require_block(a, M);
  require_block(b, M);
  const SpMat diff = a.matrix() - b.matrix();
  const double scale = std::max({1.0, max_over_block(a.matrix(), a, M), max_over_block(b.matrix(), b, M)});
  return max_over_block(diff, a, M) / scale;
}

SpMat block_identity(int legs, int N, int M) {
  const TensorOp shape(legs, N);
  const std::vector<int> lim(static_cast<std::size_t>(legs), M);
  std::vector<Eigen::Triplet<cplx, int>> trip;
  int j = 0;
  for (Index c = 0; c < shape.dim(); ++c)
    if (shape.in_block(c, lim)) trip.emplace_back(static_cast<int>(c), j++, 1.0);
  SpMat out(shape.dim(), j);
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

SpMat apply_exact(const TensorOp& op, const SpMat& X) {
  if (X.rows() != op.dim()) throw DomainError("block columns do not match the operator");
  for (int c = 0; c < X.outerSize(); ++c)
    for (SpMat::InnerIterator it(X, c); it; ++it)
      if (it.value() != cplx(0.0) && !op.in_block(it.row(), op.ext())) throw NumericalError("truncation too small for the operator word");
  return op.matrix() * X;
}

double max_abs(const SpMat& X) {
  double v = 0.0;
  for (int c = 0; c < X.outerSize(); ++c)
    for (SpMat::InnerIterator it(X, c); it; ++it) v = std::max(v, std::abs(it.value()));
  return v;
}

double block_norm(const TensorOp& a, int M) {
  require_block(a, M);
  return max_over_block(a.matrix(), a, M);
}

}  // namespace qflag
