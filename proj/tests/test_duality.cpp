#include "doctest.h"

#include "opspace/atlas.hpp"
#include "opspace/duality.hpp"
#include "opspace/norms.hpp"
#include "opspace/sampling.hpp"

#include <cmath>
#include <numbers>

using namespace opspace;

namespace {

struct WData {
  CMat g1 = CMat::Zero(3, 3), g2 = CMat::Zero(3, 3), g3 = CMat::Zero(3, 3);
  SpacePtr space;
  WData() {
    g1.diagonal() << 1, 2, 3;
    g2(0, 1) = g2(1, 0) = g2(1, 2) = g2(2, 1) = 1;
    g3(0, 2) = kI;
    space = build_space({g1, g2, g3}, 1e-10, "W");
  }
  MatrixFunctional f1() const { return MatrixFunctional(space, 1, {g1 + kI * g2 + 2.0 * g3}); }
  MatrixFunctional f2() const {
    return MatrixFunctional(space, 2, {g2, g3, kI * g1, CMat(g3.adjoint() - g2)});
  }
};

std::vector<CMat> units(Index k, bool transposed) {
  std::vector<CMat> r;
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < k; ++j) r.push_back(transposed ? matrix_unit(k, k, j, i) : matrix_unit(k, k, i, j));
  return r;
}

MatrixFunctional random_functional(Sampler& rng, const SpacePtr& s, Index n) {
  std::vector<CMat> reps;
  for (Index i = 0; i < n * n; ++i) reps.push_back(rng.gaussian(s->ambient_dim(), s->ambient_dim()));
  return MatrixFunctional(s, n, std::move(reps));
}

}  // namespace

TEST_CASE("applying matrix functionals") {
  const SpacePtr m2 = full_space(2);
  const LevelElement e11 = project(m2, matrix_unit(2, 2, 0, 0), 1).element;
  CHECK(apply(MatrixFunctional::zero(m2, 2), e11).norm() == 0.0);
  const MatrixFunctional tr(m2, 1, {CMat::Identity(2, 2)});
  CHECK(std::abs(apply(tr, e11)(0, 0) - 1.0) <= 1e-14);

  Sampler rng(51);
  const MatrixFunctional f = random_functional(rng, m2, 2);
  for (int t = 0; t < 10; ++t) {
    const LevelElement v = rng.element(m2, 2), w = rng.element(m2, 2);
    const Complex alpha = rng.complex_normal();
    const CMat lhs = apply(f, v * alpha + w);
    const CMat rhs = alpha * apply(f, v) + apply(f, w);
    CHECK((lhs - rhs).norm() <= 1e-12 * (1 + rhs.norm()));
  }
  // Level index outside, functional index inside.
  const LevelElement v = rng.element(m2, 2);
  const CMat out = apply(f, v);
  for (Index p = 0; p < 2; ++p)
    for (Index q = 0; q < 2; ++q)
      for (Index i = 0; i < 2; ++i)
        for (Index j = 0; j < 2; ++j)
          CHECK(std::abs(out(p * 2 + i, q * 2 + j) - f.evaluate(i, j, v.block(p, q))) <= 1e-12);
  // Pairing is the sum of the diagonal-pattern entries.
  Complex s = 0;
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 2; ++j) s += f.evaluate(i, j, v.block(i, j));
  CHECK(std::abs(pairing(f, v) - s) <= 1e-12);
}

TEST_CASE("functional representatives and adjoints") {
  Sampler rng(52);
  const SpacePtr c = corner_space(1);
  const MatrixFunctional f = random_functional(rng, c, 2);
  CHECK(f.projection_residual() > 0.1);  // diagonal parts were removed
  for (const CMat& r : f.reps()) CHECK(c->distance(r) <= 1e-12);
  const MatrixFunctional fa = f.adjoint();
  const LevelElement v = rng.element(c, 1);
  // f*(v) = conj(f(v*)), entrywise transposed.
  const CMat lhs = fa.evaluate(v.concrete());
  const CMat rhs = f.evaluate(v.concrete().adjoint()).adjoint();
  CHECK((lhs - rhs).norm() <= 1e-12);
  CHECK((f + fa).is_self_adjoint());
  CHECK_FALSE(f.is_self_adjoint());
}

TEST_CASE("dual cb-norms of simple functionals") {
  const DualNormResult one = dual_cb_norm(MatrixFunctional(full_space(1), 1, {CMat::Identity(1, 1)}));
  CHECK(one.value == doctest::Approx(1.0).epsilon(1e-7));

  const DualNormResult tr = dual_cb_norm(MatrixFunctional(full_space(2), 1, {CMat::Identity(2, 2)}));
  CHECK(tr.value == doctest::Approx(trace_norm(CMat::Identity(2, 2))).epsilon(1e-7));

  const DualNormResult coord =
      dual_cb_norm(MatrixFunctional(corner_space(1), 1, {matrix_unit(2, 2, 0, 1)}));
  CHECK(coord.value == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(coord.sampled_lower == doctest::Approx(1.0).epsilon(1e-6));

  // Identity map of M_2 has cb-norm one; the transpose has cb-norm two.
  CHECK(dual_cb_norm(MatrixFunctional(full_space(2), 2, units(2, false))).value ==
        doctest::Approx(1.0).epsilon(1e-7));
  CHECK(dual_cb_norm(MatrixFunctional(full_space(2), 2, units(2, true))).value ==
        doctest::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("dual cb-norm matches the reference SDP on a proper subspace") {
  const WData w;
  CHECK(std::abs(dual_cb_norm(w.f1()).value - 6.2406325) <= 1e-6);
  CHECK(std::abs(dual_cb_norm(w.f2()).value - 4.8852838) <= 1e-6);
}

TEST_CASE("sampled lower bound never exceeds the SDP value") {
  Sampler rng(53);
  for (const char* name : {"full:2", "diag:3", "corner:1", "corner:2"}) {
    const SpacePtr s = make_example(name);
    for (Index n = 1; n <= 2; ++n) {
      const DualNormResult r = dual_cb_norm(random_functional(rng, s, n), 32, 7);
      CAPTURE(name);
      CHECK_FALSE(r.undecided);
      CHECK(r.sampled_lower <= r.value + 1e-6);
      CHECK(r.lower <= r.upper + 1e-9);
    }
  }
}

TEST_CASE("complete positivity verdicts") {
  const SpacePtr m2 = full_space(2);
  const CpResult yes = cp_membership(MatrixFunctional(m2, 2, units(2, false)));
  REQUIRE(yes.verdict == CpVerdict::certified_yes);
  REQUIRE(yes.choi_witness);
  CVec omega = CVec::Zero(4);
  omega(0) = omega(3) = 1;  // (a·n + i) with a = i
  CHECK((*yes.choi_witness - omega * omega.adjoint()).norm() <= 1e-6);

  const MatrixFunctional transpose(m2, 2, units(2, true));
  const CpResult no = cp_membership(transpose);
  REQUIRE(no.verdict == CpVerdict::certified_no);
  REQUIRE(no.violation);
  CHECK(cone_member(*no.violation).member == Membership::yes);
  CHECK(min_eigenvalue(apply(transpose, *no.violation)) <= -0.9);

  // Trivial cone: every functional is vacuously positive.
  Sampler rng(54);
  for (int t = 0; t < 4; ++t) {
    MatrixFunctional f = random_functional(rng, corner_space(1), 1 + t % 2);
    f = f + f.adjoint();
    CHECK(cp_membership(f).verdict == CpVerdict::certified_yes);
  }
}

TEST_CASE("a certified CP functional shows no violation on sampled cone elements") {
  Sampler rng(55);
  const SpacePtr m2 = full_space(2);
  const MatrixFunctional f = kraus_functional(m2, {rng.gaussian(2, 2), rng.gaussian(2, 2)});
  REQUIRE(cp_membership(f).verdict == CpVerdict::certified_yes);
  double worst = 0.0;
  for (int t = 0; t < 500; ++t) {
    const LevelElement y = rng.element(m2, 1 + t % 2);
    const LevelElement p = project(m2, y.concrete().adjoint() * y.concrete(), y.level()).element;
    worst = std::min(worst, min_eigenvalue(apply(f, p)) / std::max(1.0, level_norm(p)));
  }
  CHECK(worst >= -1e-7);
}

TEST_CASE("modified numerical radius") {
  const NuResult z = nu(LevelElement::zero(full_space(2), 1));
  CHECK(z.lower == 0.0);
  CHECK(z.upper == 0.0);

  Sampler rng(56);
  const SpacePtr m2 = full_space(2);
  for (int t = 0; t < 5; ++t) {
    const LevelElement x = rng.hermitian_element(m2, 1 + t % 2);
    const NuResult r = nu(x);
    const double nx = level_norm(x);
    CHECK(r.lower <= nx * (1 + 1e-7));
    CHECK(r.upper >= nx * (1 - 1e-7));
    CHECK(std::abs(r.upper - nx) <= 2e-3 * nx);
  }
  const SpacePtr c2 = corner_space(2);
  for (int t = 0; t < 5; ++t) {
    const LevelElement x = rng.element(c2, 1 + t % 2);
    const NuResult r = nu(x);
    CHECK(std::abs(r.lower - level_norm(x)) <= 1e-3);
    CHECK(std::abs(r.upper - level_norm(x)) <= 1e-3);
  }
}

TEST_CASE("grid sandwich and refinement") {
  Sampler rng(57);
  const WData w;
  for (int t = 0; t < 10; ++t) {
    const LevelElement x = rng.element(t % 2 ? w.space : corner_space(1), 1);
    double prev_lower = -1.0, prev_slack = 1e300;
    for (int grid : {8, 16, 64}) {
      const NuResult r = nu(x, grid);
      CHECK(r.upper / r.lower <= 1.0 / std::cos(std::numbers::pi / grid) + 1e-8);
      CHECK(r.lower >= prev_lower - 1e-9);
      CHECK(r.upper - r.lower <= prev_slack + 1e-9);
      CHECK(r.upper <= level_norm(x) + 1e-6);
      prev_lower = r.lower;
      prev_slack = r.upper - r.lower;
    }
  }
  CHECK_THROWS_AS(nu(LevelElement::zero(full_space(2), 1), 4), Error);
}

TEST_CASE("nu on the dual side matches the reference SDP") {
  const WData w;
  const NuResult r1 = nu_dual(w.f1()), r2 = nu_dual(w.f2());
  CHECK(std::abs(r1.lower - 4.8425974) <= 1e-6);
  CHECK(std::abs(r2.lower - 4.6666666) <= 1e-6);
  CHECK(r1.upper >= r1.lower);
  // ν never exceeds the norm, and the norm is at most twice ν.
  for (const MatrixFunctional& f : {w.f1(), w.f2()}) {
    const NuResult r = nu_dual(f);
    const double fn = dual_cb_norm(f).value;
    CHECK(r.upper <= fn + 1e-6);
    CHECK(fn <= 2 * r.upper + 1e-5);
  }
}

TEST_CASE("phi witness") {
  Sampler rng(58);
  const SpacePtr m2 = full_space(2);
  for (Index n = 1; n <= 2; ++n) {
    const LevelElement x0 = rng.element(m2, n);
    const LevelElement x = x0 * Complex(0.7 / level_norm(x0));
    const LevelElement a = project(m2, 0.8 * CMat::Identity(2 * n, 2 * n), n).element;
    const CVec xi = rng.unit_vector(2 * n * n);
    const PhiReport zero = phi_witness(x, a, a, xi, MatrixFunctional::zero(m2, n), 4, 1);
    CHECK(zero.value == 0.0);
    CHECK(zero.identity_residual <= 1e-12);

    const MatrixFunctional f = random_functional(rng, m2, n);
    const PhiReport r = phi_witness(x, a, a, xi, f, 8, 2);
    CHECK(r.identity_residual <= 1e-8);
    CHECK(r.min_on_positive >= -1e-8);
    CHECK(r.max_contractivity <= 1.0 + 1e-8);
    CHECK(2 * std::abs(r.value) <= dual_cb_norm(f).value + 1e-6);
  }
}

TEST_CASE("corner unitization") {
  for (const char* name : {"full:2", "diag:3", "corner:1"}) {
    const SpacePtr v = make_example(name);
    const SpacePtr u = corner_unitization(v);
    const Index k = v->ambient_dim();
    CHECK(u->ambient_dim() == 2 * k);
    CHECK(u->dim() == 2 * v->dim() + 2);
    CHECK(u->distance(CMat::Identity(2 * k, 2 * k)) <= 1e-10);
  }
}

TEST_CASE("Choi extensions") {
  Sampler rng(59);
  for (int t = 0; t < 5; ++t) {
    std::vector<CMat> gens;
    for (int g = 0; g < 3; ++g) gens.push_back(rng.hermitian(3));
    const SpacePtr s = build_space(gens);
    const MatrixFunctional f = kraus_functional(s, {rng.gaussian(2, 3), rng.gaussian(2, 3)});
    const ExtendResult e = arveson_extend(f, ExtendMode::cp);
    CHECK(e.feasible);
    CHECK(e.restriction_residual <= 1e-6);
    CHECK(e.choi_min_eigenvalue >= -1e-7);
    // Pulling the extension back through the identity reproduces f.
    const MatrixFunctional back = choi_pullback(e.choi, 3, 2, s, CMat::Identity(3, 3), CMat::Identity(3, 3));
    for (std::size_t i = 0; i < f.reps().size(); ++i) CHECK(hs_norm(back.reps()[i] - f.reps()[i]) <= 1e-6);
  }
  const ExtendResult tr = arveson_extend(MatrixFunctional(full_space(2), 2, units(2, true)), ExtendMode::cp);
  CHECK_FALSE(tr.feasible);
  CHECK_FALSE(tr.undecided);
  CHECK(tr.certificate_margin > 0.0);

  // A unital CP map restricted to an operator system extends unitally.
  const CMat u = Eigen::HouseholderQR<CMat>(rng.gaussian(3, 3)).householderQ();
  const SpacePtr sys = build_space({CMat::Identity(3, 3), rng.hermitian(3)});
  const MatrixFunctional conj = kraus_functional(sys, {u});
  const ExtendResult ucp = arveson_extend(conj, ExtendMode::ucp);
  CHECK(ucp.feasible);
  CHECK(ucp.unital_residual <= 1e-6);
  CHECK(ucp.restriction_residual <= 1e-6);
}

TEST_CASE("corner pipeline") {
  Sampler rng(60);
  for (const char* name : {"full:2", "diag:2", "corner:1"}) {
    const MatrixFunctional f = random_functional(rng, make_example(name), 1 + std::string(name).size() % 2);
    const PipelineReport p = corner_pipeline(f);
    CAPTURE(name);
    CHECK(p.extended);
    CHECK(p.corner_residual <= 1e-6);
    CHECK(p.phi1_norm <= 1.0 + 1e-4);
    CHECK(p.phi2_norm <= 1.0 + 1e-4);
    CHECK(p.positivity >= -1e-7);
  }
}

TEST_CASE("bidual identification") {
  for (const char* name : {"full:2", "diag:2", "corner:2"}) {
    const BidualReport b = bidual_check(make_example(name), {1, 2}, 4, 61);
    CAPTURE(name);
    CHECK(b.undecided == 0);
    CHECK(b.max_isometry_residual <= 1e-5);
    CHECK(b.order_cone_failures == 0);
    CHECK(b.separation_successes == b.separation_samples);
  }
  // Every nonzero Hermitian element of the corner space lies outside the cone.
  const BidualReport c = bidual_check(corner_space(2), {1}, 6, 62);
  CHECK(c.separation_samples > 0);
  CHECK(c.order_cone_samples == 0);
}
