// Semidefinite programs with complex Hermitian data and a dense
// homogeneous self-dual interior-point solver.
//
// Program form (all variables real scalars):
//
//   minimize    c^T y + c0
//   subject to  E y = f
//               F_l(y) = F_l0 + Σ_i y_i F_li  ⪰ 0      (F_li complex Hermitian)
//
// Hermitian matrix variables are sugar: add_hermitian() allocates one real
// scalar per real degree of freedom and (optionally) the constraint X ⪰ 0.
//
// Dual (reported back in complex terms):
//
//   maximize    f^T ν − Σ_l Re<F_l0, Z_l> + c0
//   subject to  c_i = (E^T ν)_i + Σ_l Re<F_li, Z_l>,   Z_l ⪰ 0
//
// Complex blocks are handed to the real solver through realify(); the factor
// two that realification puts on inner products never leaves this module.
#pragma once

#include "opspace/matrix.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace opspace::conic {

/// Σ coef_i y_i + constant.
struct AffineScalar {
  std::map<Index, double> terms;
  double constant = 0.0;

  static AffineScalar variable(Index v, double coef = 1.0);
  static AffineScalar constant_value(double c);

  AffineScalar& operator+=(const AffineScalar& o);
  AffineScalar& operator-=(const AffineScalar& o);
  AffineScalar& operator*=(double s);
  /// Value at a point.
  double evaluate(const RVec& y) const;
};

AffineScalar operator+(AffineScalar a, const AffineScalar& b);
AffineScalar operator-(AffineScalar a, const AffineScalar& b);
AffineScalar operator*(double s, AffineScalar a);

/// Complex matrix-valued affine expression: constant + Σ y_i M_i.
struct AffineMatrix {
  Index rows = 0;
  Index cols = 0;
  CMat constant;
  std::map<Index, CMat> terms;

  AffineMatrix() = default;
  AffineMatrix(Index r, Index c) : rows(r), cols(c), constant(CMat::Zero(r, c)) {}
  static AffineMatrix constant_matrix(const CMat& m);

  AffineMatrix& operator+=(const AffineMatrix& o);
  AffineMatrix& operator-=(const AffineMatrix& o);
  AffineMatrix& operator*=(double s);
  void add_term(Index var, const CMat& m);

  AffineMatrix adjoint() const;
  /// Left and right multiplication by constant matrices: L · E · R.
  AffineMatrix sandwich(const CMat& left, const CMat& right) const;
  AffineMatrix block(Index r0, Index c0, Index nr, Index nc) const;
  /// Applies a real-linear map to the constant and to every term.
  template <class Map>
  AffineMatrix map(Map&& f) const {
    AffineMatrix out;
    out.constant = f(constant);
    out.rows = out.constant.rows();
    out.cols = out.constant.cols();
    for (const auto& [v, m] : terms) out.terms.emplace(v, f(m));
    return out;
  }
  CMat evaluate(const RVec& y) const;
};

AffineMatrix operator+(AffineMatrix a, const AffineMatrix& b);
AffineMatrix operator-(AffineMatrix a, const AffineMatrix& b);
AffineMatrix operator*(double s, AffineMatrix a);

/// [[a, b], [c, d]] assembled from four expressions.
AffineMatrix block2x2(const AffineMatrix& a, const AffineMatrix& b, const AffineMatrix& c,
                      const AffineMatrix& d);
/// Re Tr(C* E).
AffineScalar trace_inner(const CMat& c, const AffineMatrix& e);
AffineScalar real_trace(const AffineMatrix& e);

struct MatrixVariable {
  std::string label;
  Index dim = 0;
  Index first_var = 0;  // dim^2 consecutive scalars
  AffineMatrix expr;
  int psd_constraint = -1;  // index into psd_constraints(), -1 if unconstrained
};

struct PsdConstraint {
  std::string label;
  AffineMatrix expr;
};

struct Equality {
  std::string label;
  AffineScalar expr;  // expr == 0
};

class ConicProgram {
 public:
  Index add_scalar(std::string label);
  /// Hermitian dim x dim variable, parametrised by dim^2 real scalars.
  const MatrixVariable& add_hermitian(std::string label, Index dim, bool psd = true);
  /// General complex rows x cols variable (2·rows·cols real scalars), no cone.
  AffineMatrix add_general(std::string label, Index rows, Index cols);

  /// Requires expr to be square and Hermitian in every term.
  void add_psd(std::string label, AffineMatrix expr);
  void add_equality(std::string label, AffineScalar lhs, double rhs);
  /// Entrywise real and imaginary equalities lhs == rhs.
  void add_equality(std::string label, const AffineMatrix& lhs, const CMat& rhs);
  void minimize(AffineScalar objective);

  Index num_scalars() const { return static_cast<Index>(labels_.size()); }
  const std::vector<std::string>& scalar_labels() const { return labels_; }
  const std::vector<MatrixVariable>& matrix_variables() const { return matrix_vars_; }
  const std::vector<PsdConstraint>& psd_constraints() const { return psd_; }
  const std::vector<Equality>& equalities() const { return eqs_; }
  const AffineScalar& objective() const { return objective_; }

  /// Throws Error when dimensions are inconsistent or data is non-Hermitian.
  void validate() const;

 private:
  std::vector<std::string> labels_;
  std::vector<MatrixVariable> matrix_vars_;
  std::vector<PsdConstraint> psd_;
  std::vector<Equality> eqs_;
  AffineScalar objective_;
};

enum class Status { Optimal, Infeasible, Unbounded, NumericalLimit };
const char* to_string(Status s);

struct Settings {
  double feas_tol = 1e-8;
  double gap_tol = 1e-8;
  int max_iter = 200;
};

struct ConicSolution {
  Status status = Status::NumericalLimit;
  /// Primal values (Optimal / NumericalLimit) or the improving ray (Unbounded).
  RVec primal;
  /// Dual matrices Z_l (Optimal) or the Farkas ray (Infeasible).
  std::vector<CMat> psd_duals;
  RVec eq_duals;
  double objective = 0.0;
  double dual_objective = 0.0;
  /// Duality gap relative to max(1, |objective|).
  double gap = 0.0;
  /// Largest relative residual from the post-hoc check.
  double max_residual = 0.0;
  /// For Infeasible / Unbounded: how far the ray certificate separates.
  double certificate_margin = 0.0;
  int iterations = 0;

  /// Evaluates a matrix expression at the primal point.
  CMat value(const AffineMatrix& e) const { return e.evaluate(primal); }
  double value(const AffineScalar& e) const { return e.evaluate(primal); }
};

/// Replaceable solver backend.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual ConicSolution solve(const ConicProgram& p, const Settings& s) const = 0;
};

/// Homogeneous self-dual embedding, Nesterov-Todd scaling, Mehrotra
/// predictor-corrector, dense normal equations.
class InteriorPointBackend : public Backend {
 public:
  ConicSolution solve(const ConicProgram& p, const Settings& s) const override;
};

const Backend& default_backend();

ConicSolution solve(const ConicProgram& p, const Settings& s = {},
                    const Backend& backend = default_backend());

/// Decides whether the constraint set is non-empty by solving the auxiliary
/// program  min t  s.t.  F_l(y) + t I ⪰ 0, E y = f, t ≥ −1.  Optimal means a
/// witness within feas_tol; Infeasible carries the auxiliary dual as a
/// Farkas certificate with certificate_margin = t*.
ConicSolution feasibility(const ConicProgram& p, const Settings& s = {},
                          const Backend& backend = default_backend());

struct Verification {
  double primal_equality = 0.0;   // max |E y − f| / max(1, |f|)
  double primal_cone = 0.0;       // max(0, −λ_min(F_l(y))) / max(1, ||F_l0||)
  double dual_equality = 0.0;     // ||c − E^T ν − Σ Re<F_i, Z>|| / max(1, ||c||)
  double dual_cone = 0.0;         // max(0, −λ_min(Z_l)) / max(1, max ||Z_l||)
  double gap = 0.0;               // |primal − dual| / max(1, |primal|)
  double max_residual() const;
};

/// Recomputes residuals of an Optimal solution straight from the complex
/// program data, without touching solver internals.
Verification verify(const ConicProgram& p, const ConicSolution& s);

/// Farkas residual of an Infeasible certificate (should be ~0 with margin > 0).
double farkas_residual(const ConicProgram& p, const ConicSolution& s);

/// Self-describing JSON dump for cross-checking against other solvers.
std::string dump_json(const ConicProgram& p);

}  // namespace opspace::conic
