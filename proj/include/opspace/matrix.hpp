// Dense complex matrix helpers shared by every module.
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace opspace {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;
using Index = Eigen::Index;

/// Raised for violated preconditions (shape mismatches, bad input files, caps).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr Complex kI{0.0, 1.0};

/// Hilbert-Schmidt inner product <A, B> = Tr(A* B), conjugate-linear in A.
Complex hs_inner(const CMat& a, const CMat& b);

double hs_norm(const CMat& a);

/// Largest singular value.
double spectral_norm(const CMat& a);

/// Sum of singular values.
double trace_norm(const CMat& a);

/// Smallest eigenvalue of the Hermitian part (A + A*)/2.
double min_eigenvalue(const CMat& a);
double max_eigenvalue(const CMat& a);

/// ||A - A*||_HS / 2, zero exactly for Hermitian matrices.
double hermitian_defect(const CMat& a);

CMat hermitian_part(const CMat& a);

bool all_finite(const CMat& a);

/// Kronecker product A (x) B.
CMat kron(const CMat& a, const CMat& b);

/// Matrix unit E_pq of size rows x cols.
CMat matrix_unit(Index rows, Index cols, Index p, Index q);

/// Real symmetric embedding [[A, -B], [B, A]] of H = A + iB.
RMat realify(const CMat& h, double hermitian_tol = 1e-10);

void require(bool condition, const std::string& message);

}  // namespace opspace
