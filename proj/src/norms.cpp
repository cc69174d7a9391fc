#include "opspace/norms.hpp"

#include "opspace/duality.hpp"
#include "opspace/level_sdp.hpp"
#include "opspace/sampling.hpp"

#include <cmath>
#include <limits>

namespace opspace {

using namespace conic;

RegResult reg_norm(const LevelElement& x, double tol, int max_iter) {
  const SpacePtr& space = x.space();
  const Index n = x.level();
  const Index dim = n * space->ambient_dim();
  RegResult out;
  const double scale = level_norm(x);
  if (scale == 0.0) {
    out.value = 0.0;
    out.a = LevelElement::zero(space, n);
    out.d = LevelElement::zero(space, n);
    return out;
  }
  // Homogeneous in x, so solve for x / ||x|| and rescale.
  const CMat xs = x.concrete() / scale;

  ConicProgram p;
  const Index t = p.add_scalar("t");
  const LevelVar a = add_level_hermitian(p, space, n, "a");
  const LevelVar d = add_level_hermitian(p, space, n, "d");
  const AffineMatrix xc = AffineMatrix::constant_matrix(xs);
  p.add_psd("completion", block2x2(a.expr, xc, xc.adjoint(), d.expr));
  AffineMatrix ti(dim, dim);
  ti.add_term(t, CMat::Identity(dim, dim));
  p.add_psd("tI-a", ti - a.expr);
  p.add_psd("tI-d", ti - d.expr);
  p.minimize(AffineScalar::variable(t));

  const ConicSolution sol = solve(p, settings_for(tol, max_iter));
  out.status = sol.status;
  if (sol.status == Status::Infeasible) {
    out.infinite = true;
    out.value = std::numeric_limits<double>::infinity();
    out.certificate_margin = sol.certificate_margin;
    return out;
  }
  if (sol.status != Status::Optimal) out.undecided = true;
  if (sol.status == Status::Unbounded) {
    // Cannot happen for a well-posed instance (t ≥ ||a|| ≥ 0); report as undecided.
    out.value = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  LevelElement av = a.value(sol) * Complex(scale);
  LevelElement dv = d.value(sol) * Complex(scale);
  out.value = sol.objective * scale;
  CMat full(2 * dim, 2 * dim);
  full << av.concrete(), x.concrete(), x.concrete().adjoint(), dv.concrete();
  out.psd_residual = std::max(0.0, -min_eigenvalue(full));
  out.subspace_residual =
      std::max(project(space, av.concrete(), n).residual, project(space, dv.concrete(), n).residual);
  out.value_residual = std::abs(std::max(level_norm(av), level_norm(dv)) - out.value);
  out.a = std::move(av);
  out.d = std::move(dv);
  return out;
}

const char* to_string(OrderVerdict v) {
  switch (v) {
    case OrderVerdict::holds: return "holds";
    case OrderVerdict::fails: return "fails";
    case OrderVerdict::not_comparable: return "not_comparable";
  }
  return "?";
}

OrderResult order_interval_check(const LevelElement& x, const LevelElement& y, double tol) {
  require(x.space() == y.space() && x.level() == y.level(),
          "order_interval_check: elements live in different spaces or levels");
  OrderResult out;
  out.upper = cone_member(y - x, tol);
  out.lower = cone_member(y + x, tol);
  out.norm_x = level_norm(x);
  out.norm_y = level_norm(y);
  if (out.upper.member != Membership::yes || out.lower.member != Membership::yes) {
    out.verdict = OrderVerdict::not_comparable;
    return out;
  }
  out.verdict = out.norm_x <= out.norm_y + tol * std::max(1.0, out.norm_y) ? OrderVerdict::holds
                                                                           : OrderVerdict::fails;
  return out;
}

RegularityProfile regularity_profile(const SpacePtr& space, const std::vector<Index>& levels,
                                     int samples, std::uint64_t seed, double tol) {
  RegularityProfile prof;
  prof.space = space->name();
  prof.levels = levels;
  Sampler rng(seed);
  double worst = 0.0;
  for (Index n : levels) {
    check_caps(*space, n);
    for (int s = 0; s < samples; ++s) {
      const bool hermitian = s % 2 == 0;
      const LevelElement x = hermitian ? rng.hermitian_element(space, n) : rng.element(space, n);
      const double nx = level_norm(x);
      if (nx == 0.0) continue;
      ++prof.samples;
      const RegResult r = reg_norm(x, tol);
      if (r.undecided) {
        ++prof.undecided;
        continue;
      }
      if (r.infinite) {
        ++prof.infinite_ratios;
        prof.non_regular = true;
        if (!prof.worst_direction) prof.worst_direction = x;
        continue;
      }
      const double ratio = r.value / nx;
      if (ratio > worst) {
        worst = ratio;
        if (!prof.non_regular) prof.worst_direction = x;
      }
      if (hermitian) {
        // Compressing the completion by (1, ±1)/√2 gives −u ⪯ x ⪯ u with
        // u = (a + d)/2, so condition (1) must then bound ||x|| by ||u||.
        const LevelElement u = (*r.a + *r.d) * Complex(0.5);
        const double slack = std::max(tol, 10.0 * r.psd_residual) * std::max(1.0, nx);
        const OrderResult o = order_interval_check(x, u, slack);
        if (o.verdict != OrderVerdict::not_comparable) {
          ++prof.condition1_checks;
          if (o.verdict == OrderVerdict::fails) ++prof.condition1_violations;
        }
      }
    }
  }
  prof.empirical_K = prof.non_regular ? std::numeric_limits<double>::infinity() : worst;
  return prof;
}

OsConstantResult os_constant_estimate(const SpacePtr& space, const std::vector<Index>& levels,
                                      int samples, int grid, std::uint64_t seed, double tol) {
  OsConstantResult out;
  Sampler rng(seed);
  for (Index n : levels) {
    check_caps(*space, 2 * n);
    for (int s = 0; s < samples; ++s) {
      const LevelElement x = rng.element(space, n);
      const double nx = level_norm(x);
      if (nx == 0.0) continue;
      ++out.samples;
      const NuResult r = nu(x, grid, tol);
      if (r.undecided) {
        ++out.undecided;
        continue;
      }
      out.max_nu_excess = std::max(out.max_nu_excess, r.upper - nx);
      if (r.upper <= 0.0) {
        out.infinite = true;
        out.estimate = std::numeric_limits<double>::infinity();
        continue;
      }
      out.estimate = std::max(out.estimate, nx / r.upper);
    }
  }
  return out;
}

}  // namespace opspace
