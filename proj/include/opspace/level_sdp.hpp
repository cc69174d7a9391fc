// Glue between M_n(V) and conic programs: Hermitian level elements as SDP
// variables, and Hermitian orthonormal bases of M_n(V)_sa and of V's complement.
#pragma once

#include "opspace/conic.hpp"
#include "opspace/matspace.hpp"

#include <string>
#include <vector>

namespace opspace {

/// Real-orthonormal Hermitian basis of M_n(V)_sa:
/// E_pp ⊗ b_i, (E_pq + E_qp) ⊗ b_i / √2, i(E_pq − E_qp) ⊗ b_i / √2 for p < q.
std::vector<CMat> hermitian_level_basis(const MatrixSpace& space, Index level);

/// Hermitian HS-orthonormal basis of V^⊥ ⊆ M_k (V^⊥ is adjoint-closed too).
std::vector<CMat> complement_basis(const MatrixSpace& space);

struct LevelVar {
  SpacePtr space;
  Index level = 0;
  Index first = 0;  // n^2 d consecutive scalars
  conic::AffineMatrix expr;

  LevelElement value(const conic::ConicSolution& s) const;
};

/// A Hermitian element of M_n(V) with n^2 d real coordinates. No cone.
LevelVar add_level_hermitian(conic::ConicProgram& p, const SpacePtr& space, Index level,
                             const std::string& label);

/// Settings derived from a user tolerance.
conic::Settings settings_for(double tol, int max_iter = 200);

}  // namespace opspace
