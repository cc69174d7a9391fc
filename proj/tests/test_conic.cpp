#include "doctest.h"

#include "opspace/conic.hpp"
#include "opspace/sampling.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

using namespace opspace;
using namespace opspace::conic;

namespace {

// λ_max(A) = min t  s.t.  t I − A ⪰ 0
ConicSolution lambda_max_program(const CMat& a, ConicProgram& p) {
  const Index t = p.add_scalar("t");
  AffineMatrix e = AffineMatrix::constant_matrix(-a);
  e.add_term(t, CMat::Identity(a.rows(), a.cols()));
  p.add_psd("tI-A", e);
  p.minimize(AffineScalar::variable(t));
  return solve(p);
}

}  // namespace

TEST_CASE("largest eigenvalue matches the eigensolver") {
  Sampler rng(7);
  for (int trial = 0; trial < 4; ++trial) {
    const CMat a = rng.hermitian(5);
    ConicProgram p;
    const auto sol = lambda_max_program(a, p);
    REQUIRE(sol.status == Status::Optimal);
    CHECK(std::abs(sol.objective - max_eigenvalue(a)) <= 1e-7);
    // The dual is the top eigenprojection: trace one, positive.
    CHECK(std::abs(sol.psd_duals[0].trace().real() - 1.0) <= 1e-7);
    CHECK(verify(p, sol).max_residual() <= 1e-7);
  }
}

TEST_CASE("real data stays in a real block") {
  RMat a(3, 3);
  a << 2, 1, 0, 1, 3, 1, 0, 1, 4;
  ConicProgram p;
  const auto sol = lambda_max_program(a.cast<Complex>(), p);
  REQUIRE(sol.status == Status::Optimal);
  Eigen::SelfAdjointEigenSolver<RMat> es(a);
  CHECK(std::abs(sol.objective - es.eigenvalues().maxCoeff()) <= 1e-7);
}

TEST_CASE("trace norm via the standard SDP") {
  Sampler rng(11);
  const CMat x = rng.gaussian(3, 4);
  ConicProgram p;
  const auto& w1 = p.add_hermitian("W1", 3, false);
  const AffineMatrix e1 = w1.expr;
  const auto& w2 = p.add_hermitian("W2", 4, false);
  const AffineMatrix e2 = w2.expr;
  const AffineMatrix xc = AffineMatrix::constant_matrix(x);
  p.add_psd("block", block2x2(e1, xc, xc.adjoint(), e2));
  p.minimize(0.5 * (real_trace(e1) + real_trace(e2)));
  const auto sol = solve(p);
  REQUIRE(sol.status == Status::Optimal);
  CHECK(std::abs(sol.objective - trace_norm(x)) <= 1e-6);
  CHECK(sol.gap <= 1e-7);
}

TEST_CASE("negative trace on the PSD cone is infeasible") {
  ConicProgram p;
  const auto& xv = p.add_hermitian("X", 3, true);
  p.add_equality("trace", real_trace(xv.expr), -1.0);
  p.minimize(AffineScalar::constant_value(0.0));
  const auto sol = solve(p);
  CHECK(sol.status == Status::Infeasible);
  CHECK(sol.certificate_margin > 1e-8);
  CHECK(farkas_residual(p, sol) <= 1e-7);

  const auto f = feasibility(p);
  CHECK(f.status == Status::Infeasible);
  CHECK(f.certificate_margin > 1e-8);
}

TEST_CASE("feasibility returns a witness") {
  ConicProgram p;
  const auto& xv = p.add_hermitian("X", 3, true);
  const AffineMatrix xe = xv.expr;
  p.add_equality("trace", real_trace(xe), 1.0);
  const auto sol = feasibility(p);
  REQUIRE(sol.status == Status::Optimal);
  const CMat xval = sol.value(xe);
  CHECK(min_eigenvalue(xval) >= -1e-8);
  CHECK(std::abs(xval.trace().real() - 1.0) <= 1e-8);
}

TEST_CASE("unbounded objective is reported") {
  ConicProgram p;
  const auto& xv = p.add_hermitian("X", 2, true);
  p.minimize(-1.0 * real_trace(xv.expr));
  CHECK(solve(p).status == Status::Unbounded);

  ConicProgram q;
  const auto& yv = q.add_hermitian("Y", 2, true);
  q.add_equality("trace", real_trace(yv.expr), 1.0);
  const Index t = q.add_scalar("t");  // free and untouched by constraints
  q.minimize(AffineScalar::variable(t));
  CHECK(solve(q).status == Status::Unbounded);
}

TEST_CASE("realification doubles eigenvalues and inner products") {
  Sampler rng(3);
  const CMat a = rng.hermitian(3);
  const CMat b = rng.hermitian(3);
  const RMat ra = realify(a);
  Eigen::SelfAdjointEigenSolver<CMat> ec(a);
  Eigen::SelfAdjointEigenSolver<RMat> er(ra);
  for (Index i = 0; i < 3; ++i) {
    CHECK(std::abs(er.eigenvalues()(2 * i) - ec.eigenvalues()(i)) <= 1e-10);
    CHECK(std::abs(er.eigenvalues()(2 * i + 1) - ec.eigenvalues()(i)) <= 1e-10);
  }
  const double real_inner = ra.cwiseProduct(realify(b)).sum();
  CHECK(std::abs(real_inner - 2.0 * hs_inner(a, b).real()) <= 1e-10);
  CHECK_THROWS_AS(realify(rng.gaussian(3, 3)), Error);
}

TEST_CASE("equality constraints with redundant rows") {
  // min <C, X> s.t. Tr X = 1 (stated twice), X ⪰ 0  →  λ_min(C)
  Sampler rng(5);
  const CMat c = rng.hermitian(4);
  ConicProgram p;
  const auto& xv = p.add_hermitian("X", 4, true);
  const AffineMatrix xe = xv.expr;
  p.add_equality("trace", real_trace(xe), 1.0);
  p.add_equality("trace again", 2.0 * real_trace(xe), 2.0);
  p.minimize(trace_inner(c, xe));
  const auto sol = solve(p);
  REQUIRE(sol.status == Status::Optimal);
  CHECK(std::abs(sol.objective - min_eigenvalue(c)) <= 1e-7);
  CHECK(verify(p, sol).max_residual() <= 1e-7);

  ConicProgram q;
  const auto& yv = q.add_hermitian("Y", 2, true);
  const AffineMatrix ye = yv.expr;
  q.add_equality("a", real_trace(ye), 1.0);
  q.add_equality("b", real_trace(ye), 2.0);
  const auto inf = solve(q);
  CHECK(inf.status == Status::Infeasible);
  CHECK(farkas_residual(q, inf) <= 1e-8);
}
