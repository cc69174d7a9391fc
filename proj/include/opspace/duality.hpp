// The dual side: matrix functionals F = [f_ij] ∈ M_n(V*), their cb-norms, the
// cone CB ∩ CP, the modified numerical radius ν, Choi-matrix extensions, the
// φ_{x,ξ} witness and bidual checks.
//
// Conventions
//   f(v) = Tr(R* v) for a representative R ∈ V (conjugate-linear in R).
//   apply(F, v) for v at level m is the mn x mn matrix whose entry
//   (p·n + i, q·n + j) is f_ij(v_pq): level index outside, functional inside.
//   Choi matrices of maps M_p → M_n are indexed (a·n + i, b·n + j) and
//   Φ(s)_ij = Σ_ab s_ab J_(a,i),(b,j).
#pragma once

#include "opspace/conic.hpp"
#include "opspace/matspace.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace opspace {

class MatrixFunctional {
 public:
  /// reps[i * n + j] represents f_ij; each is projected into V.
  MatrixFunctional(SpacePtr space, Index n, std::vector<CMat> reps);

  static MatrixFunctional zero(SpacePtr space, Index n);

  const SpacePtr& space() const { return space_; }
  Index size() const { return n_; }
  const CMat& rep(Index i, Index j) const { return reps_[static_cast<std::size_t>(i * n_ + j)]; }
  const std::vector<CMat>& reps() const { return reps_; }
  /// Largest HS distance removed when the input representatives were projected.
  double projection_residual() const { return projection_residual_; }

  Complex evaluate(Index i, Index j, const CMat& v) const;
  /// F(v) = [f_ij(v)] for v ∈ V.
  CMat evaluate(const CMat& v) const;

  /// F* = [f_ji^*] with f^*(v) = conj(f(v*)); representatives R_ji^*.
  MatrixFunctional adjoint() const;
  bool is_self_adjoint(double tol = 1e-9) const;

  MatrixFunctional operator*(double s) const;
  MatrixFunctional operator+(const MatrixFunctional& o) const;

 private:
  SpacePtr space_;
  Index n_;
  std::vector<CMat> reps_;
  double projection_residual_ = 0.0;
};

CMat apply(const MatrixFunctional& f, const LevelElement& v);

/// Σ_ij f_ij(w_ij) for w at level n (the pairing of M_n(V*) with M_n(V)).
Complex pairing(const MatrixFunctional& f, const LevelElement& w);

/// [[0, F], [F*, 0]] ∈ M_2n(V*).
MatrixFunctional offdiag(const MatrixFunctional& f);

/// Restriction to V of the map z ↦ Σ_l K_l z K_l* (K_l n x k).
MatrixFunctional kraus_functional(const SpacePtr& space, const std::vector<CMat>& kraus);

struct DualNormResult {
  double value = 0.0;          // SDP value of ||F||_{M_n(V*)}
  double sampled_lower = 0.0;  // sup ||F_n(x)|| over sampled unit x at level n
  double lower = 0.0;          // best certified lower bound
  double upper = 0.0;          // best certified upper bound
  bool undecided = false;
  conic::Status status = conic::Status::Optimal;
  double max_residual = 0.0;
  int samples = 0;
};

/// Minimal cb-norm over extensions M_k → M_n, via the two-block Choi SDP.
DualNormResult dual_cb_norm(const MatrixFunctional& f, int samples = 64, std::uint64_t seed = 0,
                            double tol = kDefaultTol);

enum class CpVerdict { certified_yes, certified_no, undecided };
const char* to_string(CpVerdict v);

struct CpResult {
  CpVerdict verdict = CpVerdict::undecided;
  /// certified_yes: W ⪰ 0 on M_nk with Tr(W v) = s_F(v) on M_n(V).
  std::optional<CMat> choi_witness;
  double choi_min_eigenvalue = 0.0;
  double choi_residual = 0.0;
  /// certified_no: cone element v with λ_min(F_m(v)) < −10 tol.
  std::optional<LevelElement> violation;
  double violation_eigenvalue = 0.0;
  /// Set when the cone is trivial and positivity is vacuous.
  bool trivial_cone = false;
  std::string note;
};

CpResult cp_membership(const MatrixFunctional& f, double tol = kDefaultTol, int samples = 64,
                       std::uint64_t seed = 0);

struct NuResult {
  double lower = 0.0;
  double upper = 0.0;
  int grid = 64;
  double theta = 0.0;  // phase of the maximizing functional
  /// Maximizing functional: T1 (trace norm ≤ 1) and its PSD representative T2.
  CMat t1, t2;
  bool undecided = false;
  conic::Status status = conic::Status::Optimal;
};

/// Werner's modified numerical radius of x ∈ M_n(V).
NuResult nu(const LevelElement& x, int grid = 64, double tol = kDefaultTol);

/// ν of F viewed as an element of the dual space V*, over the positive
/// contractive functionals of M_2n(V*) given by w ∈ M_2n(V)^+ with
/// w ⪯ P ⊗ I_k for some P ⪰ 0, Tr P ≤ 1.
NuResult nu_dual(const MatrixFunctional& f, int grid = 64, double tol = kDefaultTol);

struct PhiReport {
  double value = 0.0;              // φ_{x,ξ}([[0, F], [F*, 0]])
  double identity_rhs = 0.0;       // ½ <[[0, F_n(x)], [F_n(x)*, 0]] ξ, ξ>
  double identity_residual = 0.0;
  double min_on_positive = 0.0;    // min φ(G) over sampled G ∈ M_2n(V*)^+
  double max_contractivity = 0.0;  // max |φ(G)| / ||G|| over sampled G
  int positive_samples = 0;
  int contractive_samples = 0;
};

/// Builds φ_{x,ξ}(G) = ½ <S G_2n(X) S^T ξ, ξ> with X = [[a, x], [x*, d]] and
/// checks positivity, contractivity and the corner identity.
PhiReport phi_witness(const LevelElement& x, const LevelElement& a, const LevelElement& d,
                      const CVec& xi, const MatrixFunctional& f, int samples = 8,
                      std::uint64_t seed = 0, double tol = kDefaultTol);

/// {[[λI, x], [y, μI]] : x, y ∈ V} ⊆ M_2k.
SpacePtr corner_unitization(const SpacePtr& space);

enum class ExtendMode { cp, ucp };
const char* to_string(ExtendMode m);

struct ExtendResult {
  bool feasible = false;
  bool undecided = false;
  CMat choi;                        // p·n x p·n
  double choi_min_eigenvalue = 0.0;
  double restriction_residual = 0.0;  // max_l ||Φ(b_l) − f(b_l)||_HS
  double unital_residual = 0.0;
  double certificate_margin = 0.0;
  conic::Status status = conic::Status::Optimal;
};

/// Searches a (unital) CP map M_p → M_n agreeing with f on S = f.space().
ExtendResult arveson_extend(const MatrixFunctional& f, ExtendMode mode, double tol = kDefaultTol);

/// Representatives on V of the map x ↦ Ψ(A x B) for a map Ψ: M_p → M_n with Choi J.
MatrixFunctional choi_pullback(const CMat& choi, Index p, Index n, const SpacePtr& space,
                               const CMat& left, const CMat& right);

struct PipelineReport {
  double f_norm = 0.0;           // dual_cb_norm(F) after scaling
  bool extended = false;
  double corner_residual = 0.0;  // ψ∘θ corner vs F
  double phi1_norm = 0.0;
  double phi2_norm = 0.0;
  double positivity = 0.0;       // λ_min of the Choi matrix of ψ
};

/// The unitization route to positive completions of F: scale F to cb-norm
/// `target`, extend the corner map UCP and read off φ1, φ2.
PipelineReport corner_pipeline(const MatrixFunctional& f, double target = 0.9,
                               double tol = kDefaultTol);

struct BidualReport {
  std::string space;
  std::vector<Index> levels;
  int isometry_samples = 0;
  double max_isometry_residual = 0.0;
  int order_cone_samples = 0;
  int order_cone_failures = 0;
  int separation_samples = 0;
  int separation_successes = 0;
  int undecided = 0;
};

BidualReport bidual_check(const SpacePtr& space, const std::vector<Index>& levels, int samples,
                          std::uint64_t seed, double tol = kDefaultTol);

}  // namespace opspace
