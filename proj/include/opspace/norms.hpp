// Norm-side quantities: the regularization norm ||x||_reg with its positive
// completion witnesses, order-interval checks, regularity profiling and the
// operator-system constant estimate.
#pragma once

#include "opspace/conic.hpp"
#include "opspace/matspace.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

namespace opspace {

struct RegResult {
  /// +∞ when no positive completion [[a, x], [x*, d]] exists.
  bool infinite = false;
  double value = 0.0;
  /// Solver gave up (NumericalLimit); value is then the best bound seen.
  bool undecided = false;
  std::optional<LevelElement> a, d;
  conic::Status status = conic::Status::Optimal;
  double psd_residual = 0.0;       // max(0, −λ_min [[a, x], [x*, d]])
  double subspace_residual = 0.0;  // a, d distance to M_n(V)
  double value_residual = 0.0;     // |max(||a||, ||d||) − value|
  double certificate_margin = 0.0;
};

/// min t s.t. a, d ∈ M_n(V)_sa, [[a, x], [x*, d]] ⪰ 0, tI − a ⪰ 0, tI − d ⪰ 0.
RegResult reg_norm(const LevelElement& x, double tol = kDefaultTol, int max_iter = 200);

enum class OrderVerdict { holds, fails, not_comparable };
const char* to_string(OrderVerdict v);

struct OrderResult {
  OrderVerdict verdict = OrderVerdict::not_comparable;
  double norm_x = 0.0;
  double norm_y = 0.0;
  ConeMembershipResult upper;  // y − x
  ConeMembershipResult lower;  // y + x
};

/// −y ⪯ x ⪯ y inside M_n(V), and if so whether ||x|| ≤ ||y|| + tol.
OrderResult order_interval_check(const LevelElement& x, const LevelElement& y,
                                 double tol = kDefaultTol);

struct RegularityProfile {
  std::string space;
  std::vector<Index> levels;
  /// sup of reg/norm over the samples; a lower bound for the true constant.
  double empirical_K = 1.0;
  bool non_regular = false;  // some sample had reg = +∞
  int samples = 0;
  int infinite_ratios = 0;
  int undecided = 0;
  int condition1_checks = 0;
  int condition1_violations = 0;
  std::optional<LevelElement> worst_direction;
};

RegularityProfile regularity_profile(const SpacePtr& space, const std::vector<Index>& levels,
                                     int samples, std::uint64_t seed, double tol = kDefaultTol);

struct OsConstantResult {
  /// sup ||x|| / ν_upper(x); a lower bound for the operator-system constant.
  double estimate = 0.0;
  bool infinite = false;
  int samples = 0;
  int undecided = 0;
  /// Largest ν_upper − ||x|| seen (should be ≤ 0 up to solver noise).
  double max_nu_excess = -std::numeric_limits<double>::infinity();
};

OsConstantResult os_constant_estimate(const SpacePtr& space, const std::vector<Index>& levels,
                                      int samples, int grid, std::uint64_t seed,
                                      double tol = kDefaultTol);

}  // namespace opspace
