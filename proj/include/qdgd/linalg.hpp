#pragma once

#include <Eigen/Dense>

namespace qdgd {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

template <typename Scalar>
using RowBlocks = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Views a stacked vector [x_1; ...; x_n] of length n*p as an n-by-p row-major
/// matrix whose row i is node i's block.
template <typename Derived>
auto as_blocks(Eigen::PlainObjectBase<Derived>& stacked, Index p) {
  using Scalar = typename Derived::Scalar;
  return Eigen::Map<RowBlocks<Scalar>>(stacked.data(), stacked.size() / p, p);
}

template <typename Derived>
auto as_blocks(const Eigen::PlainObjectBase<Derived>& stacked, Index p) {
  using Scalar = typename Derived::Scalar;
  return Eigen::Map<const RowBlocks<Scalar>>(stacked.data(), stacked.size() / p, p);
}

/// Kronecker lift W ⊗ I_p of an n-by-n matrix.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> kron_identity(
    const Eigen::MatrixBase<Derived>& w, Index p) {
  using Scalar = typename Derived::Scalar;
  const Index n = w.rows();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n * p, w.cols() * p);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < w.cols(); ++j) {
      if (w(i, j) != Scalar(0)) {
        out.block(i * p, j * p, p, p).diagonal().setConstant(w(i, j));
      }
    }
  }
  return out;
}

/// Spectral norm of a symmetric matrix (largest eigenvalue magnitude).
template <typename Derived>
typename Derived::Scalar symmetric_spectral_norm(const Eigen::MatrixBase<Derived>& a) {
  using Plain = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Eigen::SelfAdjointEigenSolver<Plain> es(Plain(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Extreme eigenvalues (min, max) of a symmetric matrix.
template <typename Derived>
std::pair<typename Derived::Scalar, typename Derived::Scalar> symmetric_extremes(
    const Eigen::MatrixBase<Derived>& a) {
  using Plain = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Eigen::SelfAdjointEigenSolver<Plain> es(Plain(a), Eigen::EigenvaluesOnly);
  return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

}  // namespace qdgd
