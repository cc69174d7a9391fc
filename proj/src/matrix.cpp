#include "opspace/matrix.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace opspace {

Complex hs_inner(const CMat& a, const CMat& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "hs_inner: shape mismatch");
  return (a.conjugate().cwiseProduct(b)).sum();
}

double hs_norm(const CMat& a) { return a.norm(); }

double spectral_norm(const CMat& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMat> svd(a);
  return svd.singularValues()(0);
}

double trace_norm(const CMat& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMat> svd(a);
  return svd.singularValues().sum();
}

CMat hermitian_part(const CMat& a) { return (a + a.adjoint()) / 2.0; }

double min_eigenvalue(const CMat& a) {
  require(a.rows() == a.cols(), "min_eigenvalue: matrix must be square");
  if (a.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double max_eigenvalue(const CMat& a) {
  require(a.rows() == a.cols(), "max_eigenvalue: matrix must be square");
  if (a.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(a.rows() - 1);
}

double hermitian_defect(const CMat& a) { return (a - a.adjoint()).norm() / 2.0; }

bool all_finite(const CMat& a) {
  return a.real().allFinite() && a.imag().allFinite();
}

CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CMat matrix_unit(Index rows, Index cols, Index p, Index q) {
  CMat e = CMat::Zero(rows, cols);
  e(p, q) = 1.0;
  return e;
}

RMat realify(const CMat& h, double hermitian_tol) {
  require(h.rows() == h.cols(), "realify: matrix must be square");
  if (hermitian_defect(h) > hermitian_tol)
    throw Error("realify: input is not Hermitian");
  const Index m = h.rows();
  RMat out(2 * m, 2 * m);
  out.topLeftCorner(m, m) = h.real();
  out.topRightCorner(m, m) = -h.imag();
  out.bottomLeftCorner(m, m) = h.imag();
  out.bottomRightCorner(m, m) = h.real();
  return out;
}

void require(bool condition, const std::string& message) {
  if (!condition) throw Error(message);
}

}  // namespace opspace
