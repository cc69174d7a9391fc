#include "doctest.h"

#include "opspace/atlas.hpp"
#include "opspace/norms.hpp"
#include "opspace/sampling.hpp"

using namespace opspace;

namespace {

// Non-unital operator space in M_3 containing a positive definite element:
// span{diag(1,2,3), tridiagonal ones, i E_13, (i E_13)*}. Reference values
// below come from tests/oracles/compute_oracles.py (cvxpy + Clarabel).
SpacePtr w_space() {
  CMat g1 = CMat::Zero(3, 3), g2 = CMat::Zero(3, 3), g3 = CMat::Zero(3, 3);
  g1.diagonal() << 1, 2, 3;
  g2(0, 1) = g2(1, 0) = g2(1, 2) = g2(2, 1) = 1;
  g3(0, 2) = kI;
  return build_space({g1, g2, g3}, 1e-10, "W");
}

LevelElement w_x1(const SpacePtr& w) {
  CMat g1 = CMat::Zero(3, 3), g2 = CMat::Zero(3, 3), g3 = CMat::Zero(3, 3);
  g1.diagonal() << 1, 2, 3;
  g2(0, 1) = g2(1, 0) = g2(1, 2) = g2(2, 1) = 1;
  g3(0, 2) = kI;
  return project(w, Complex(1, 1) * g3 + 0.5 * g2 - 0.25 * g1, 1).element;
}

LevelElement w_x2(const SpacePtr& w) {
  CMat g1 = CMat::Zero(3, 3), g2 = CMat::Zero(3, 3), g3 = CMat::Zero(3, 3);
  g1.diagonal() << 1, 2, 3;
  g2(0, 1) = g2(1, 0) = g2(1, 2) = g2(2, 1) = 1;
  g3(0, 2) = kI;
  CMat x(6, 6);
  x << g2, 2.0 * g3, g3.adjoint(), -g1 + kI * g2;
  return project(w, x, 2).element;
}

}  // namespace

TEST_CASE("reg norm equals the operator norm on the full algebra") {
  Sampler rng(21);
  const SpacePtr v = full_space(3);
  for (int t = 0; t < 10; ++t) {
    const LevelElement x = t % 2 ? rng.element(v, 1 + t % 2) : rng.hermitian_element(v, 1 + t % 2);
    const RegResult r = reg_norm(x);
    REQUIRE_FALSE(r.infinite);
    REQUIRE_FALSE(r.undecided);
    CHECK(std::abs(r.value - level_norm(x)) <= 1e-5);
    // Witnesses are certified independently of the solver.
    REQUIRE(r.a);
    REQUIRE(r.d);
    CHECK(r.psd_residual <= 1e-7);
    CHECK(r.subspace_residual <= 1e-9);
    CHECK(cone_member(*r.a, 1e-7).member == Membership::yes);
  }
}

TEST_CASE("reg norm on a non-unital space matches the reference SDP") {
  const SpacePtr w = w_space();
  REQUIRE(w->dim() == 4);
  const LevelElement x1 = w_x1(w), x2 = w_x2(w);
  CHECK(level_norm(x1) == doctest::Approx(1.8775039952).epsilon(1e-9));
  const RegResult r1 = reg_norm(x1), r2 = reg_norm(x2);
  CHECK(std::abs(r1.value - 2.7787696) <= 1e-6);
  CHECK(std::abs(r2.value - 4.2251783) <= 1e-6);
  // Strictly above the norm here: the regularity constant is not 1.
  CHECK(r1.value > level_norm(x1) + 0.5);
}

TEST_CASE("trivial cone gives an infinite reg norm") {
  Sampler rng(22);
  const SpacePtr c = corner_space(2);
  for (int t = 0; t < 5; ++t) {
    const RegResult r = reg_norm(rng.element(c, 1 + t % 2));
    CHECK(r.infinite);
    CHECK_FALSE(r.undecided);
    CHECK(r.status == conic::Status::Infeasible);
    CHECK(r.certificate_margin > 0.0);
  }
  const RegResult z = reg_norm(LevelElement::zero(c, 2));
  CHECK_FALSE(z.infinite);
  CHECK(z.value == doctest::Approx(0.0));
}

TEST_CASE("zero has reg norm zero with zero witnesses") {
  const RegResult r = reg_norm(LevelElement::zero(full_space(2), 2));
  CHECK_FALSE(r.infinite);
  CHECK(std::abs(r.value) <= 1e-7);
  REQUIRE(r.a);
  CHECK(level_norm(*r.a) <= 1e-7);
  CHECK(level_norm(*r.d) <= 1e-7);
}

TEST_CASE("reg norm dominates the norm") {
  Sampler rng(23);
  for (int t = 0; t < 12; ++t) {
    const SpacePtr v = build_space({CMat::Identity(3, 3) + rng.hermitian(3) * 0.3, rng.gaussian(3, 3)});
    const LevelElement x = rng.element(v, 1 + t % 2);
    const RegResult r = reg_norm(x);
    if (r.infinite) continue;
    CHECK(r.value >= level_norm(x) - 1e-6);
    // Adjoint invariance.
    CHECK(std::abs(reg_norm(involution(x)).value - r.value) <= 1e-6);
  }
}

TEST_CASE("order interval checks") {
  Sampler rng(24);
  const SpacePtr v = full_space(3);
  const LevelElement p = project(v, rng.positive_concrete(3), 1).element;
  CHECK(order_interval_check(p, p).verdict == OrderVerdict::holds);

  for (int t = 0; t < 10; ++t) {
    const LevelElement x = rng.hermitian_element(v, 1 + t % 2);
    const Index n = x.level();
    const LevelElement y = project(v, level_norm(x) * CMat::Identity(3 * n, 3 * n), n).element;
    const OrderResult r = order_interval_check(x, y);
    CHECK(r.verdict == OrderVerdict::holds);
    CHECK(r.norm_x <= r.norm_y + 1e-8);

    const LevelElement y2 = x + project(v, 0.5 * CMat::Identity(3 * n, 3 * n), n).element;
    // x ⪯ x + εI always; −(x + εI) ⪯ x only when x ⪰ −ε/2, so mostly not comparable.
    const OrderResult r2 = order_interval_check(x, y2);
    if (r2.verdict != OrderVerdict::not_comparable) CHECK(r2.verdict == OrderVerdict::holds);
    CHECK(r2.upper.member == Membership::yes);
  }
  // Non-comparable: y = 0 and x ≠ 0.
  const LevelElement x = rng.hermitian_element(v, 1);
  CHECK(order_interval_check(x, LevelElement::zero(v, 1)).verdict == OrderVerdict::not_comparable);
}

TEST_CASE("regularity profiles") {
  const RegularityProfile m2 = regularity_profile(full_space(2), {1, 2}, 200, 31);
  CHECK(m2.empirical_K == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(m2.condition1_violations == 0);
  CHECK(m2.condition1_checks > 0);
  CHECK_FALSE(m2.non_regular);
  CHECK(m2.undecided == 0);

  const RegularityProfile d3 = regularity_profile(diagonal_space(3), {1, 2}, 60, 32);
  CHECK(d3.empirical_K == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(d3.condition1_violations == 0);

  const RegularityProfile c2 = regularity_profile(corner_space(2), {1}, 4, 33);
  CHECK(c2.non_regular);
  CHECK(c2.infinite_ratios == c2.samples);

  // Reg dominates the norm, so the estimate never drops below one.
  const RegularityProfile w = regularity_profile(w_space(), {1, 2}, 20, 34);
  CHECK(w.empirical_K >= 1.0 - 1e-6);
  CHECK(w.condition1_violations == 0);

  // Same seed, same numbers.
  const RegularityProfile again = regularity_profile(diagonal_space(3), {1, 2}, 60, 32);
  CHECK(again.empirical_K == d3.empirical_K);
}

TEST_CASE("operator-system constant estimates") {
  const OsConstantResult m2 = os_constant_estimate(full_space(2), {1, 2}, 10, 64, 41);
  CHECK_FALSE(m2.infinite);
  CHECK(m2.estimate <= 1.0 + 1e-3);
  CHECK(m2.estimate >= 1.0 - 1e-6);
  CHECK(m2.max_nu_excess <= 1e-6);

  const OsConstantResult c2 = os_constant_estimate(corner_space(2), {1, 2}, 6, 64, 42);
  CHECK(c2.estimate <= 1.0 + 1e-3);
  CHECK(c2.undecided == 0);
}
