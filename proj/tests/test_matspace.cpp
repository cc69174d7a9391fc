#include "doctest.h"

#include "opspace/atlas.hpp"
#include "opspace/matspace.hpp"
#include "opspace/sampling.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

using namespace opspace;

namespace {

CMat e(Index k, Index p, Index q) { return matrix_unit(k, k, p, q); }

// Rank of the real span of {Re, Im parts} of the generators and adjoints,
// straight from an SVD of the stacked vectorisations.
Index span_rank(const std::vector<CMat>& gens) {
  const Index k = gens.front().rows();
  RMat stack(2 * k * k, 2 * static_cast<Index>(gens.size()));
  Index c = 0;
  for (const CMat& g : gens)
    for (const CMat& h : {CMat((g + g.adjoint()) / 2.0), CMat((g - g.adjoint()) / Complex(0, 2))}) {
      stack.col(c).head(k * k) = h.real().reshaped();
      stack.col(c).tail(k * k) = h.imag().reshaped();
      ++c;
    }
  Eigen::JacobiSVD<RMat> svd(stack);
  const RVec s = svd.singularValues();
  return (s.array() > 1e-10 * s(0)).count();
}

}  // namespace

TEST_CASE("build_space closes under the adjoint") {
  const SpacePtr v = build_space({e(2, 0, 1)});
  CHECK(v->dim() == 2);
  CHECK(v->distance(e(2, 0, 1)) < 1e-12);
  CHECK(v->distance(e(2, 1, 0)) < 1e-12);
  CHECK(v->distance(e(2, 0, 0)) == doctest::Approx(1.0));

  CHECK(build_space({CMat::Identity(3, 3)})->dim() == 1);

  Sampler rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const CMat a = rng.gaussian(3, 3);
    const std::vector<CMat> gens = {a, a.adjoint(), a + a.adjoint()};
    const SpacePtr s = build_space(gens);
    CHECK(s->dim() == 2);
    CHECK(s->dim() == span_rank(gens));
  }
}

TEST_CASE("basis invariants hold for random and atlas spaces") {
  Sampler rng(5);
  std::vector<SpacePtr> spaces = {full_space(3), diagonal_space(4), corner_space(2)};
  for (int i = 0; i < 4; ++i) {
    std::vector<CMat> gens;
    for (int g = 0; g <= i; ++g) gens.push_back(rng.gaussian(4, 4));
    spaces.push_back(build_space(gens));
  }
  for (const auto& s : spaces) {
    CAPTURE(s->name());
    CHECK(s->gram_defect() <= 1e-10);
    CHECK(s->adjoint_closure_defect() <= 1e-10);
    for (const CMat& b : s->basis()) CHECK(hermitian_defect(b) <= 1e-12);
  }
}

TEST_CASE("build_space rejects bad generator lists") {
  CHECK_THROWS_AS(build_space({}), Error);
  CHECK_THROWS_AS(build_space({CMat::Zero(2, 2)}), Error);
  CHECK_THROWS_AS(build_space({CMat::Identity(2, 2), CMat::Identity(3, 3)}), Error);
  CHECK_THROWS_AS(build_space({CMat::Identity(2, 3)}), Error);
}

TEST_CASE("projection onto M_n(V)") {
  const SpacePtr v = build_space({e(3, 0, 1), CMat::Identity(3, 3)});
  // A basis element comes back unchanged.
  const Projection p0 = project(v, v->basis(0), 1);
  CHECK(p0.residual <= 1e-12);
  CHECK(hs_norm(p0.element.concrete() - v->basis(0)) <= 1e-12);

  // Orthogonal input projects to zero with the full HS norm as residual.
  const CMat perp = e(3, 1, 2) + 2.0 * e(3, 0, 0) - e(3, 1, 1) - e(3, 2, 2);
  const Projection p1 = project(v, perp, 1);
  CHECK(p1.element.concrete().norm() <= 1e-12);
  CHECK(p1.residual == doctest::Approx(hs_norm(perp)).epsilon(1e-12));

  // in-space part + complement part, at level 2.
  Sampler rng(8);
  const LevelElement in = rng.element(v, 2);
  CMat out = CMat::Zero(6, 6);
  out.block(0, 3, 3, 3) = perp;
  out.block(3, 3, 3, 3) = e(3, 2, 0);
  const Projection p2 = project(v, in.concrete() + out, 2);
  CHECK(hs_norm(p2.element.concrete() - in.concrete()) <= 1e-10);
  CHECK(p2.residual == doctest::Approx(hs_norm(out)).epsilon(1e-10));

  CHECK_THROWS_AS(project(v, CMat::Zero(4, 4), 1), Error);
}

TEST_CASE("involution") {
  Sampler rng(9);
  const SpacePtr v = build_space({rng.gaussian(3, 3), rng.gaussian(3, 3)});
  const LevelElement h = rng.hermitian_element(v, 2);
  CHECK(hs_norm(involution(h).concrete() - h.concrete()) <= 1e-12);

  const LevelElement x = rng.element(v, 2);
  const LevelElement xs = involution(x);
  CHECK(hs_norm(xs.concrete() - x.concrete().adjoint()) <= 1e-12);
  // Hermitian basis: coefficient (p, q, i) of x* is conj of coefficient (q, p, i) of x.
  for (Index p = 0; p < 2; ++p)
    for (Index q = 0; q < 2; ++q)
      for (Index i = 0; i < v->dim(); ++i)
        CHECK(std::abs(xs.coeff(p, q, i) - std::conj(x.coeff(q, p, i))) <= 1e-12);

  for (int s = 0; s < 50; ++s) {
    const LevelElement y = rng.element(v, 1 + s % 4);
    CHECK(std::abs(level_norm(involution(y)) - level_norm(y)) <= 1e-12);
  }
}

TEST_CASE("level norms") {
  const SpacePtr full = full_space(3);
  CHECK(level_norm(project(full, CMat::Identity(3, 3), 1).element) == doctest::Approx(1.0));

  Sampler rng(10);
  const SpacePtr corner = corner_space(2);
  for (int t = 0; t < 5; ++t) {
    const CMat alpha = rng.gaussian(2, 2), beta = rng.gaussian(2, 2);
    CMat m = CMat::Zero(4, 4);
    m.topRightCorner(2, 2) = alpha;
    m.bottomLeftCorner(2, 2) = beta;
    const Eigen::JacobiSVD<CMat> sa(alpha), sb(beta);
    const double oracle = std::max(sa.singularValues()(0), sb.singularValues()(0));
    CHECK(std::abs(level_norm(project(corner, m, 1).element) - oracle) <= 1e-12);
  }

  // Unit-HS rank one: spectral norm equals the HS norm, so 2 b has norm 2.
  const CVec u = rng.unit_vector(3);
  const SpacePtr r1 = build_space({u * u.adjoint()});
  const LevelElement b = project(r1, 2.0 * r1->basis(0), 1).element;
  Eigen::SelfAdjointEigenSolver<CMat> es(2.0 * r1->basis(0));
  CHECK(level_norm(b) == doctest::Approx(es.eigenvalues().cwiseAbs().maxCoeff()).epsilon(1e-12));
  CHECK(level_norm(b) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("cone membership") {
  const SpacePtr corner = corner_space(2);
  CHECK(cone_member(LevelElement::zero(corner, 2)).member == Membership::yes);
  Sampler rng(11);
  for (int t = 0; t < 20; ++t) {
    const LevelElement x = t % 2 ? rng.element(corner, 1 + t % 3) : rng.hermitian_element(corner, 1 + t % 3);
    CHECK(cone_member(x).member == Membership::no);
  }
  const SpacePtr full = full_space(3);
  for (int t = 0; t < 10; ++t) {
    const LevelElement v = rng.element(full, 1);
    const LevelElement sq = project(full, v.concrete().adjoint() * v.concrete(), 1).element;
    CHECK(cone_member(sq).member == Membership::yes);
    // Properness: x and −x both in the cone only at zero.
    CHECK(cone_member(-sq).member != Membership::yes);
  }
  // Tiny negative eigenvalue inside the band is marginal, not no.
  const LevelElement m = project(full, -1e-8 * CMat::Identity(3, 3), 1).element;
  CHECK(cone_member(m, 1e-8).member == Membership::yes);
  const LevelElement m2 = project(full, -5e-8 * CMat::Identity(3, 3), 1).element;
  CHECK(cone_member(m2, 1e-8).member == Membership::marginal);
  const LevelElement m3 = project(full, -2e-7 * CMat::Identity(3, 3), 1).element;
  CHECK(cone_member(m3, 1e-8).member == Membership::no);
}

TEST_CASE("compression") {
  Sampler rng(12);
  const SpacePtr v = full_space(2);
  const LevelElement x = rng.element(v, 2);
  const CMat id = CMat::Identity(2, 2);
  CHECK(hs_norm(compress(x, id, id).concrete() - x.concrete()) <= 1e-12);

  // Conjugation by the isometry (1 1)/√2 returns a from diag(a, a).
  const LevelElement a = project(v, rng.positive_concrete(2), 1).element;
  const LevelElement aa = direct_sum(a, a);
  CMat row(1, 2);
  row << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const LevelElement back = compress(aa, row, row.adjoint());
  CHECK(hs_norm(back.concrete() - a.concrete()) <= 1e-12);
  CHECK(cone_member(back).member == Membership::yes);

  for (int t = 0; t < 50; ++t) {
    const Index m = 1 + t % 3, n = 1 + (t / 3) % 3;
    const LevelElement y = rng.element(v, m);
    const CMat alpha = rng.gaussian(n, m), beta = rng.gaussian(m, n);
    CHECK(level_norm(compress(y, alpha, beta)) <=
          spectral_norm(alpha) * level_norm(y) * spectral_norm(beta) * (1 + 1e-12));
  }
  // α* x α keeps cone elements in the cone.
  const SpacePtr d = diagonal_space(3);
  for (int t = 0; t < 100; ++t) {
    const LevelElement y = rng.element(d, 2);
    const LevelElement p = project(d, y.concrete().adjoint() * y.concrete(), 2).element;
    const CMat alpha = rng.gaussian(2, 1 + t % 3);
    CHECK(cone_member(compress(p, alpha.adjoint(), alpha)).member == Membership::yes);
  }
  CHECK_THROWS_AS(compress(x, rng.gaussian(1, 3), rng.gaussian(3, 1)), Error);
}

TEST_CASE("direct sums") {
  Sampler rng(13);
  const SpacePtr v = build_space({rng.gaussian(3, 3), rng.gaussian(3, 3)});
  const LevelElement x = rng.element(v, 2);
  CHECK(level_norm(direct_sum(x, LevelElement::zero(v, 1))) == doctest::Approx(level_norm(x)).epsilon(1e-12));
  CHECK(level_norm(direct_sum(x, x)) == doctest::Approx(level_norm(x)).epsilon(1e-12));
  for (int t = 0; t < 20; ++t) {
    const LevelElement a = rng.element(v, 1 + t % 2), b = rng.element(v, 1 + t % 3);
    CHECK(std::abs(level_norm(direct_sum(a, b)) - std::max(level_norm(a), level_norm(b))) <= 1e-10);
  }
  CHECK_THROWS_AS(direct_sum(x, LevelElement::zero(full_space(3), 1)), Error);
}

TEST_CASE("level elements reconstruct from coefficients") {
  Sampler rng(14);
  const SpacePtr v = corner_space(2);
  for (Index n = 1; n <= 3; ++n) {
    const LevelElement x = rng.element(v, n);
    CHECK(x.reconstruction_residual() <= 1e-9);
    CHECK(x.concrete().rows() == 4 * n);
  }
  CHECK_THROWS_AS(check_caps(*v, 7), Error);
  CHECK_THROWS_AS(check_caps(*full_space(9), 1), Error);
}

TEST_CASE("realify of small examples") {
  CHECK((realify(CMat::Identity(2, 2)) - RMat::Identity(4, 4)).norm() == 0.0);
  CMat h(2, 2);
  h << 0, kI, -kI, 0;
  Eigen::SelfAdjointEigenSolver<RMat> es(realify(h));
  RVec expected(4);
  expected << -1, -1, 1, 1;
  CHECK((es.eigenvalues() - expected).norm() <= 1e-12);
}
