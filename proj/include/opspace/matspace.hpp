// Involutive subspaces V of M_k, their matrix levels M_n(V) inside M_{nk},
// and the inherited cones M_n(V)^+ = M_n(V) ∩ PSD.
#pragma once

#include "opspace/matrix.hpp"

#include <memory>
#include <string>
#include <vector>

namespace opspace {

/// Size caps keeping concrete matrices at desk scale.
struct Caps {
  Index max_level = 6;
  Index max_ambient = 8;
};

inline constexpr double kDefaultTol = 1e-8;

/// A subspace V of M_k closed under the adjoint. The stored basis is
/// Hilbert-Schmidt orthonormal and every basis element is Hermitian, so the
/// adjoint acts on coefficients by complex conjugation.
class MatrixSpace {
 public:
  MatrixSpace(std::string name, Index ambient_dim, std::vector<CMat> basis);

  const std::string& name() const { return name_; }
  Index ambient_dim() const { return k_; }
  Index dim() const { return static_cast<Index>(basis_.size()); }
  const std::vector<CMat>& basis() const { return basis_; }
  const CMat& basis(Index i) const { return basis_[static_cast<std::size_t>(i)]; }

  /// Coefficients c_i = <b_i, m> of the HS projection of a k x k matrix.
  CVec coefficients(const CMat& m) const;
  CMat from_coefficients(const CVec& c) const;

  /// HS distance from m to V.
  double distance(const CMat& m) const;

  /// max |Tr(b_i* b_j) - δ_ij|.
  double gram_defect() const;
  /// max over i of the HS distance from b_i* to V.
  double adjoint_closure_defect() const;

  bool contains_identity(double tol = 1e-10) const;

 private:
  std::string name_;
  Index k_;
  std::vector<CMat> basis_;
};

using SpacePtr = std::shared_ptr<const MatrixSpace>;

/// Span of generators ∪ generators*, orthonormalised by modified Gram-Schmidt
/// (two passes) over Hermitian real and imaginary parts. Directions whose
/// residual falls below tol times the largest generator norm are dropped.
SpacePtr build_space(const std::vector<CMat>& generators, double tol = 1e-10,
                     std::string name = "user");

/// An element of M_n(V): the concrete nk x nk matrix together with its
/// coefficients. coeff(p, q, i) multiplies E_pq (x) b_i.
class LevelElement {
 public:
  LevelElement(SpacePtr space, Index level, CVec coeffs);

  static LevelElement zero(SpacePtr space, Index level);
  /// E_pq (x) m for every block, m given per block in a n x n grid.
  static LevelElement from_blocks(SpacePtr space, const std::vector<std::vector<CMat>>& blocks);

  const SpacePtr& space() const { return space_; }
  Index level() const { return n_; }
  Index ambient_dim() const { return space_->ambient_dim(); }
  const CMat& concrete() const { return concrete_; }
  const CVec& coeffs() const { return coeffs_; }

  Complex coeff(Index p, Index q, Index i) const {
    return coeffs_((p * n_ + q) * space_->dim() + i);
  }
  /// The k x k block at (p, q).
  CMat block(Index p, Index q) const;

  /// ||concrete - Σ coeff (E_pq ⊗ b_i)||_HS.
  double reconstruction_residual() const;

  LevelElement operator+(const LevelElement& other) const;
  LevelElement operator-(const LevelElement& other) const;
  LevelElement operator-() const;
  LevelElement operator*(Complex s) const;

 private:
  SpacePtr space_;
  Index n_;
  CVec coeffs_;
  CMat concrete_;
};

inline LevelElement operator*(Complex s, const LevelElement& x) { return x * s; }

CMat concrete_from_coeffs(const MatrixSpace& space, Index level, const CVec& coeffs);

struct Projection {
  LevelElement element;
  double residual;
};

/// HS-nearest element of M_n(V) to an nk x nk matrix.
Projection project(const SpacePtr& space, const CMat& m, Index level);

LevelElement involution(const LevelElement& x);

double level_norm(const LevelElement& x);

enum class Membership { yes, no, marginal };
const char* to_string(Membership m);

struct ConeMembershipResult {
  Membership member;
  double min_eigenvalue;
  double subspace_residual;
  double tol;
};

/// Hermitian PSD test for M_n(V)^+. The subspace residual combines the
/// Hermitian defect with the coefficient reconstruction residual.
ConeMembershipResult cone_member(const LevelElement& x, double tol = kDefaultTol);

/// (α ⊗ I_k) x (β ⊗ I_k) for α n x m, β m x n.
LevelElement compress(const LevelElement& x, const CMat& alpha, const CMat& beta);

LevelElement direct_sum(const LevelElement& x, const LevelElement& y);

void check_caps(const MatrixSpace& space, Index level, const Caps& caps = {});

}  // namespace opspace
