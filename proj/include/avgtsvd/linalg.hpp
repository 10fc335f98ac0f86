#ifndef AVGTSVD_LINALG_HPP
#define AVGTSVD_LINALG_HPP

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

#ifdef AVGTSVD_HAVE_LAPACKE
#include <lapacke.h>
#else
#include <Eigen/SVD>
#endif

namespace avgtsvd {

/// Full SVD A = U diag(sigma) V^T with sigma nonincreasing.
struct SvdResult {
  Eigen::VectorXd sigma;
  Eigen::MatrixXd U;
  Eigen::MatrixXd V;
};

#ifdef AVGTSVD_HAVE_LAPACKE

inline SvdResult dense_svd_general(Eigen::MatrixXd A) {
  const int n = static_cast<int>(A.rows());
  if (A.cols() != n) throw std::invalid_argument("dense_svd: square matrices only");
  SvdResult r;
  r.sigma.resize(n);
  r.U.resize(n, n);
  Eigen::MatrixXd VT(n, n);
  const int info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'S', n, n, A.data(), n, r.sigma.data(),
                                  r.U.data(), n, VT.data(), n);
  if (info != 0) throw std::runtime_error("dense_svd: dgesdd failed, info=" + std::to_string(info));
  r.V = VT.transpose();
  return r;
}

inline Eigen::VectorXd symmetric_eigenvalues(Eigen::MatrixXd A) {
  const int n = static_cast<int>(A.rows());
  Eigen::VectorXd w(n);
  const int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', n, A.data(), n, w.data());
  if (info != 0) throw std::runtime_error("symmetric_eigenvalues: dsyevd failed");
  return w;  // ascending
}

inline void symmetric_eig(Eigen::MatrixXd A, Eigen::VectorXd& w, Eigen::MatrixXd& Q) {
  const int n = static_cast<int>(A.rows());
  w.resize(n);
  const int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, A.data(), n, w.data());
  if (info != 0) throw std::runtime_error("symmetric_eig: dsyevd failed");
  Q = std::move(A);  // eigenvectors in columns, eigenvalues ascending
}

#else

inline SvdResult dense_svd_general(const Eigen::MatrixXd& A) {
  if (A.cols() != A.rows()) throw std::invalid_argument("dense_svd: square matrices only");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return SvdResult{svd.singularValues(), svd.matrixU(), svd.matrixV()};
}

inline Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& A) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
  return es.eigenvalues();  // ascending
}

inline void symmetric_eig(const Eigen::MatrixXd& A, Eigen::VectorXd& w, Eigen::MatrixXd& Q) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  w = es.eigenvalues();
  Q = es.eigenvectors();
}

#endif

/// SVD of a symmetric matrix from its eigendecomposition: cheaper than dgesdd
/// and exact up to sign bookkeeping (sigma = |lambda|, U_j = sign(lambda_j) Q_j).
inline SvdResult dense_svd_symmetric(const Eigen::MatrixXd& A) {
  const int n = static_cast<int>(A.rows());
  Eigen::VectorXd w;
  Eigen::MatrixXd Q;
  symmetric_eig(A, w, Q);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return std::abs(w[a]) > std::abs(w[b]); });
  SvdResult r;
  r.sigma.resize(n);
  r.U.resize(n, n);
  r.V.resize(n, n);
  for (int j = 0; j < n; ++j) {
    const int src = order[j];
    r.sigma[j] = std::abs(w[src]);
    r.V.col(j) = Q.col(src);
    r.U.col(j) = (w[src] < 0.0 ? -1.0 : 1.0) * Q.col(src);
  }
  return r;
}

inline SvdResult dense_svd(const Eigen::MatrixXd& A, bool symmetric = false) {
  return symmetric ? dense_svd_symmetric(A) : dense_svd_general(A);
}

/// Eigenvalues of a symmetric matrix, descending.
inline Eigen::VectorXd symmetric_eigenvalues_desc(const Eigen::MatrixXd& A) {
  Eigen::VectorXd w = symmetric_eigenvalues(A);
  return w.reverse();
}

}  // namespace avgtsvd

#endif
