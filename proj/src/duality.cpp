#include "opspace/duality.hpp"

#include "opspace/level_sdp.hpp"
#include "opspace/sampling.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <numbers>

namespace opspace {

using namespace conic;

namespace {

double max_rep_norm(const MatrixFunctional& f) {
  double s = 0.0;
  for (const CMat& r : f.reps()) s = std::max(s, hs_norm(r));
  return s;
}

// Partial trace over the outer (input) index of a (k·n) x (k·n) matrix.
CMat trace_outer(const CMat& m, Index k, Index n) {
  CMat out = CMat::Zero(n, n);
  for (Index a = 0; a < k; ++a) out += m.block(a * n, a * n, n, n);
  return out;
}

LevelElement as_element(const SpacePtr& space, const CMat& m, Index level) {
  return project(space, m, level).element;
}

// Cone element with unit-ish scale when I ∈ V: h + (0.05 − λ_min(h)) I.
std::optional<LevelElement> random_cone_element(Sampler& rng, const SpacePtr& space, Index level) {
  if (!space->contains_identity()) return std::nullopt;
  const LevelElement h = rng.hermitian_element(space, level);
  const Index dim = level * space->ambient_dim();
  const double shift = 0.05 - min_eigenvalue(h.concrete());
  const LevelElement id = as_element(space, CMat::Identity(dim, dim), level);
  return h + id * Complex(shift);
}

std::vector<CMat> random_kraus(Sampler& rng, Index rows, Index cols, int count) {
  std::vector<CMat> out;
  for (int i = 0; i < count; ++i) out.push_back(rng.gaussian(rows, cols) / std::sqrt(2.0 * cols));
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

MatrixFunctional::MatrixFunctional(SpacePtr space, Index n, std::vector<CMat> reps)
    : space_(std::move(space)), n_(n), reps_(std::move(reps)) {
  require(space_ != nullptr, "functional needs a space");
  require(n_ >= 1, "functional size must be positive");
  require(static_cast<Index>(reps_.size()) == n_ * n_, "functional needs n*n representatives");
  const Index k = space_->ambient_dim();
  for (CMat& r : reps_) {
    require(r.rows() == k && r.cols() == k, "representative has the wrong size");
    require(all_finite(r), "representative has non-finite entries");
    const CMat p = space_->from_coefficients(space_->coefficients(r));
    projection_residual_ = std::max(projection_residual_, hs_norm(r - p));
    r = p;
  }
}

MatrixFunctional MatrixFunctional::zero(SpacePtr space, Index n) {
  const Index k = space->ambient_dim();
  return MatrixFunctional(std::move(space), n,
                          std::vector<CMat>(static_cast<std::size_t>(n * n), CMat::Zero(k, k)));
}

Complex MatrixFunctional::evaluate(Index i, Index j, const CMat& v) const {
  return hs_inner(rep(i, j), v);
}

CMat MatrixFunctional::evaluate(const CMat& v) const {
  CMat out(n_, n_);
  for (Index i = 0; i < n_; ++i)
    for (Index j = 0; j < n_; ++j) out(i, j) = evaluate(i, j, v);
  return out;
}

MatrixFunctional MatrixFunctional::adjoint() const {
  std::vector<CMat> r(reps_.size());
  for (Index i = 0; i < n_; ++i)
    for (Index j = 0; j < n_; ++j) r[static_cast<std::size_t>(i * n_ + j)] = rep(j, i).adjoint();
  return MatrixFunctional(space_, n_, std::move(r));
}

bool MatrixFunctional::is_self_adjoint(double tol) const {
  const double scale = std::max(1.0, max_rep_norm(*this));
  for (Index i = 0; i < n_; ++i)
    for (Index j = 0; j < n_; ++j)
      if (hs_norm(rep(i, j) - rep(j, i).adjoint()) > tol * scale) return false;
  return true;
}

MatrixFunctional MatrixFunctional::operator*(double s) const {
  std::vector<CMat> r = reps_;
  for (CMat& m : r) m *= s;
  return MatrixFunctional(space_, n_, std::move(r));
}

MatrixFunctional MatrixFunctional::operator+(const MatrixFunctional& o) const {
  require(space_ == o.space_ && n_ == o.n_, "functional sum: mismatched operands");
  std::vector<CMat> r = reps_;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += o.reps_[i];
  return MatrixFunctional(space_, n_, std::move(r));
}

CMat apply(const MatrixFunctional& f, const LevelElement& v) {
  require(f.space() == v.space(), "apply: functional and element live on different spaces");
  const Index n = f.size();
  const Index m = v.level();
  const Index d = f.space()->dim();
  // g(i, j, l) = f_ij(b_l), so f_ij(v_pq) = Σ_l coeff(p, q, l) g(i, j, l).
  CMat g(n * n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      for (Index l = 0; l < d; ++l) g(i * n + j, l) = f.evaluate(i, j, f.space()->basis(l));
  CMat out(m * n, m * n);
  for (Index p = 0; p < m; ++p)
    for (Index q = 0; q < m; ++q) {
      const CVec c = v.coeffs().segment((p * m + q) * d, d);
      const CVec vals = g * c;
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) out(p * n + i, q * n + j) = vals(i * n + j);
    }
  return out;
}

Complex pairing(const MatrixFunctional& f, const LevelElement& w) {
  require(f.space() == w.space() && f.size() == w.level(), "pairing: mismatched sizes");
  Complex s = 0.0;
  for (Index i = 0; i < f.size(); ++i)
    for (Index j = 0; j < f.size(); ++j) s += f.evaluate(i, j, w.block(i, j));
  return s;
}

MatrixFunctional offdiag(const MatrixFunctional& f) {
  const Index n = f.size();
  const Index k = f.space()->ambient_dim();
  std::vector<CMat> r(static_cast<std::size_t>(4 * n * n), CMat::Zero(k, k));
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      r[static_cast<std::size_t>(i * 2 * n + (n + j))] = f.rep(i, j);
      r[static_cast<std::size_t>((n + i) * 2 * n + j)] = f.rep(j, i).adjoint();
    }
  return MatrixFunctional(f.space(), 2 * n, std::move(r));
}

MatrixFunctional kraus_functional(const SpacePtr& space, const std::vector<CMat>& kraus) {
  require(!kraus.empty(), "kraus_functional: empty Kraus list");
  const Index n = kraus.front().rows();
  const Index k = space->ambient_dim();
  std::vector<CMat> r(static_cast<std::size_t>(n * n), CMat::Zero(k, k));
  for (const CMat& kl : kraus) {
    require(kl.rows() == n && kl.cols() == k, "kraus_functional: Kraus operator has wrong shape");
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        r[static_cast<std::size_t>(i * n + j)] += kl.row(i).adjoint() * kl.row(j);
  }
  return MatrixFunctional(space, n, std::move(r));
}

// ---------------------------------------------------------------------------
// cb-norm: with C the Choi matrix of the adjoint of an extension G: M_k → M_n,
// ||G||_cb = min ½(s0 + s1) s.t. [[W0, C], [C*, W1]] ⪰ 0, Tr_k W_i ⪯ s_i I.
// C's inner blocks are R_ij + P_ij with P_ij ∈ V^⊥ free.

DualNormResult dual_cb_norm(const MatrixFunctional& f, int samples, std::uint64_t seed,
                            double tol) {
  DualNormResult out;
  const SpacePtr& space = f.space();
  const Index n = f.size();
  const Index k = space->ambient_dim();
  const double scale = max_rep_norm(f);

  Sampler rng(seed);
  for (int s = 0; s < samples; ++s) {
    const LevelElement x = rng.element(space, n);
    const double nx = level_norm(x);
    if (nx == 0.0) continue;
    out.sampled_lower =
        std::max(out.sampled_lower, spectral_norm(apply(f, x * Complex(1.0 / nx))));
    ++out.samples;
  }
  if (scale == 0.0) return out;

  ConicProgram p;
  const Index s0 = p.add_scalar("s0");
  const Index s1 = p.add_scalar("s1");
  const AffineMatrix w0 = p.add_hermitian("W0", k * n, false).expr;
  const AffineMatrix w1 = p.add_hermitian("W1", k * n, false).expr;
  AffineMatrix c(k * n, k * n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      const CMat r = f.rep(i, j) / scale;
      for (Index a = 0; a < k; ++a)
        for (Index b = 0; b < k; ++b) c.constant(a * n + i, b * n + j) = r(a, b);
    }
  const auto perp = complement_basis(*space);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      for (std::size_t l = 0; l < perp.size(); ++l) {
        CMat m = CMat::Zero(k * n, k * n);
        for (Index a = 0; a < k; ++a)
          for (Index b = 0; b < k; ++b) m(a * n + i, b * n + j) = perp[l](a, b);
        c.add_term(p.add_scalar("P.re"), m);
        c.add_term(p.add_scalar("P.im"), kI * m);
      }
  p.add_psd("choi block", block2x2(w0, c, c.adjoint(), w1));
  auto ptrace = [k, n](const CMat& m) { return trace_outer(m, k, n); };
  AffineMatrix t0(n, n), t1(n, n);
  t0.add_term(s0, CMat::Identity(n, n));
  t1.add_term(s1, CMat::Identity(n, n));
  p.add_psd("s0 - Tr W0", t0 - w0.map(ptrace));
  p.add_psd("s1 - Tr W1", t1 - w1.map(ptrace));
  p.minimize(0.5 * (AffineScalar::variable(s0) + AffineScalar::variable(s1)));

  const ConicSolution sol = solve(p, settings_for(tol));
  out.status = sol.status;
  out.max_residual = sol.max_residual;
  if (sol.status != Status::Optimal) {
    out.undecided = true;
    out.value = sol.objective * scale;
    out.lower = out.sampled_lower;
    out.upper = std::numeric_limits<double>::infinity();
    return out;
  }
  out.value = sol.objective * scale;
  out.upper = out.value;
  out.lower = std::max(out.sampled_lower, sol.dual_objective * scale);
  return out;
}

// ---------------------------------------------------------------------------

const char* to_string(CpVerdict v) {
  switch (v) {
    case CpVerdict::certified_yes: return "certified_yes";
    case CpVerdict::certified_no: return "certified_no";
    case CpVerdict::undecided: return "undecided";
  }
  return "?";
}

namespace {

// max Tr(G v) over v ∈ V^+, Tr v ≤ 1 for a few directions G; returns the cone
// elements found (empty when the cone is {0}).
std::vector<LevelElement> probe_cone(const SpacePtr& space, Sampler& rng, int directions,
                                     double tol, bool& trivial, bool& undecided) {
  std::vector<LevelElement> found;
  trivial = false;
  undecided = false;
  const Index k = space->ambient_dim();
  for (int t = 0; t <= directions; ++t) {
    ConicProgram p;
    const LevelVar v = add_level_hermitian(p, space, 1, "v");
    p.add_psd("v >= 0", v.expr);
    AffineMatrix one(1, 1);
    one.constant(0, 0) = 1.0;
    p.add_psd("Tr v <= 1", one - v.expr.map([](const CMat& m) {
      CMat r(1, 1);
      r(0, 0) = m.trace().real();
      return r;
    }));
    const CMat g = t == 0 ? CMat(CMat::Identity(k, k)) : CMat(rng.hermitian(k));
    p.minimize(-1.0 * trace_inner(g, v.expr));
    const ConicSolution sol = solve(p, settings_for(tol));
    if (sol.status != Status::Optimal) {
      undecided = true;
      return found;
    }
    const LevelElement val = v.value(sol);
    if (t == 0 && -sol.objective <= 10 * tol) {
      trivial = true;
      return found;
    }
    if (hs_norm(val.concrete()) > 10 * tol) found.push_back(val);
  }
  return found;
}

}  // namespace

CpResult cp_membership(const MatrixFunctional& f, double tol, int samples, std::uint64_t seed) {
  CpResult out;
  const SpacePtr& space = f.space();
  const Index n = f.size();
  const Index k = space->ambient_dim();
  const double scale = max_rep_norm(f);
  if (scale == 0.0) {
    out.verdict = CpVerdict::certified_yes;
    out.choi_witness = CMat::Zero(n * k, n * k);
    return out;
  }
  const MatrixFunctional fs = f * (1.0 / scale);
  Sampler rng(seed);

  if (!fs.is_self_adjoint(1e-9)) {
    // A positive map sends cone elements to Hermitian matrices; a non-self-
    // adjoint F can only be CP when the cone does not see the defect.
    bool trivial = false, undecided = false;
    const auto cone = probe_cone(space, rng, 4, tol, trivial, undecided);
    if (trivial) {
      out.verdict = CpVerdict::certified_yes;
      out.trivial_cone = true;
      out.note = "the cone is {0}, positivity is vacuous";
      return out;
    }
    for (const LevelElement& v : cone) {
      const CMat fv = fs.evaluate(v.concrete());
      if (hermitian_defect(fv) > 10 * tol) {
        out.verdict = CpVerdict::certified_no;
        out.violation = v;
        out.violation_eigenvalue = min_eigenvalue(fv) * scale;
        out.note = "output on a cone element is not Hermitian";
        return out;
      }
    }
    out.note = undecided ? "solver did not settle the cone probe"
                         : "non-self-adjoint functional without a visible defect";
    return out;
  }

  // Yes: a PSD W on M_nk reproducing the Choi functional on M_n(V).
  {
    ConicProgram p;
    const auto& wv = p.add_hermitian("W", n * k, true);
    const AffineMatrix w = wv.expr;
    const auto basis = hermitian_level_basis(*space, n);
    std::vector<double> target;
    for (std::size_t l = 0; l < basis.size(); ++l) {
      const double s = pairing(fs, as_element(space, basis[l], n)).real();
      target.push_back(s);
      p.add_equality("choi[" + std::to_string(l) + "]", trace_inner(basis[l], w), s);
    }
    const ConicSolution sol = feasibility(p, settings_for(tol));
    if (sol.status == Status::Optimal) {
      const CMat wval = hermitian_part(sol.value(w));
      double res = 0.0;
      for (std::size_t l = 0; l < basis.size(); ++l)
        res = std::max(res, std::abs((wval * basis[l]).trace().real() - target[l]));
      out.choi_min_eigenvalue = min_eigenvalue(wval) * scale;
      out.choi_residual = res * scale;
      if (min_eigenvalue(wval) >= -tol && res <= tol * std::max(1.0, hs_norm(wval))) {
        out.verdict = CpVerdict::certified_yes;
        out.choi_witness = wval * scale;
        return out;
      }
    }
  }

  // No: minimise the Choi functional over cone elements with diagonal blocks
  // below I; λ_min(F_n(v)) ≤ s_F(v) / n, and random cone draws at every level.
  double best = std::numeric_limits<double>::infinity();
  auto consider = [&](const LevelElement& v) {
    if (cone_member(v, tol).member != Membership::yes) return;
    // Normalised so that the largest diagonal block has norm one.
    double nv = 0.0;
    for (Index q = 0; q < v.level(); ++q) nv = std::max(nv, spectral_norm(v.block(q, q)));
    if (nv == 0.0) return;
    const double lam = min_eigenvalue(apply(fs, v)) / nv;
    if (lam < best) {
      best = lam;
      out.violation = v * Complex(1.0 / nv);
    }
  };
  {
    ConicProgram p;
    const LevelVar v = add_level_hermitian(p, space, n, "v");
    p.add_psd("v >= 0", v.expr);
    for (Index q = 0; q < n; ++q) {
      AffineMatrix idk = AffineMatrix::constant_matrix(CMat::Identity(k, k));
      p.add_psd("I - v_qq", idk - v.expr.block(q * k, q * k, k, k));
    }
    AffineScalar obj;
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        obj += trace_inner(fs.rep(i, j), v.expr.block(i * k, j * k, k, k));
    p.minimize(obj);
    const ConicSolution sol = solve(p, settings_for(tol));
    if (sol.status == Status::Optimal) consider(v.value(sol));
  }
  for (Index m = 1; m <= n; ++m)
    for (int s = 0; s < samples; ++s)
      if (auto v = random_cone_element(rng, space, m)) consider(*v);

  if (best < -10 * tol) {
    out.verdict = CpVerdict::certified_no;
    out.violation_eigenvalue = best * scale;
    return out;
  }
  out.violation.reset();
  out.note = "neither an extension witness nor a violation was found";
  return out;
}

// ---------------------------------------------------------------------------
// ν(x): for H = [[0, x], [x*, 0]] and each sign σ,
//   min ||u||  s.t.  u ∈ M_2n(V)_sa,  u ⪰ σH
// is the dual of  max σ Tr(T2 H)  over PSD T2 with T2 − T1 ⊥ M_2n(V), ||T1||_1 ≤ 1.
// Positive φ give real φ(H), so on any grid containing 0 and π the phase sweep
// reduces to these two programs.

NuResult nu(const LevelElement& x, int grid, double tol) {
  require(grid >= 8, "nu: grid size must be at least 8");
  NuResult out;
  out.grid = grid;
  const SpacePtr& space = x.space();
  const Index n = x.level();
  const Index dim = 2 * n * space->ambient_dim();
  check_caps(*space, 2 * n);
  const double nx = level_norm(x);
  if (nx == 0.0) {
    out.t1 = out.t2 = CMat::Zero(dim, dim);
    return out;
  }
  CMat h(dim, dim);
  h << CMat::Zero(dim / 2, dim / 2), x.concrete() / nx, x.concrete().adjoint() / nx,
      CMat::Zero(dim / 2, dim / 2);

  double primal[2] = {0, 0}, dual[2] = {0, 0};
  CMat t1[2], t2[2];
  for (int sgn = 0; sgn < 2; ++sgn) {
    const double sigma = sgn == 0 ? 1.0 : -1.0;
    ConicProgram p;
    const Index t = p.add_scalar("t");
    const LevelVar u = add_level_hermitian(p, space, 2 * n, "u");
    AffineMatrix ti(dim, dim);
    ti.add_term(t, CMat::Identity(dim, dim));
    p.add_psd("u - sH", u.expr - AffineMatrix::constant_matrix(sigma * h));
    p.add_psd("tI - u", ti - u.expr);
    p.add_psd("tI + u", ti + u.expr);
    p.minimize(AffineScalar::variable(t));
    const ConicSolution sol = solve(p, settings_for(tol));
    out.status = sol.status;
    if (sol.status != Status::Optimal) {
      out.undecided = true;
      out.lower = 0.0;
      out.upper = nx;
      return out;
    }
    primal[sgn] = sol.objective;
    dual[sgn] = sol.dual_objective;
    t2[sgn] = sol.psd_duals[0];
    t1[sgn] = sol.psd_duals[1] - sol.psd_duals[2];
  }
  // Grid: Re(e^{-iθ} φ(H)) = cos θ · φ(H) for real φ(H).
  double best = -1.0;
  int best_sign = 0;
  for (int j = 0; j < grid; ++j) {
    const double theta = 2.0 * std::numbers::pi * j / grid;
    const double c = std::cos(theta);
    const double v = c >= 0 ? c * dual[0] : -c * dual[1];
    if (v > best) {
      best = v;
      out.theta = theta;
      best_sign = c >= 0 ? 0 : 1;
    }
  }
  out.lower = std::max(0.0, best) * nx;
  // u = σH is always feasible, so ||x|| bounds ν; so do the primal optima of
  // the two programs and the grid slack.
  const double grid_bound = out.lower / std::cos(std::numbers::pi / grid);
  out.upper = std::min({grid_bound, std::max(primal[0], primal[1]) * nx, nx});
  out.upper = std::max(out.upper, out.lower);
  out.t1 = t1[best_sign];
  out.t2 = t2[best_sign];
  return out;
}

NuResult nu_dual(const MatrixFunctional& f, int grid, double tol) {
  require(grid >= 8, "nu: grid size must be at least 8");
  NuResult out;
  out.grid = grid;
  const SpacePtr& space = f.space();
  const Index n = f.size();
  const Index k = space->ambient_dim();
  check_caps(*space, 2 * n);
  const double scale = max_rep_norm(f);
  if (scale == 0.0) return out;
  const MatrixFunctional h = offdiag(f * (1.0 / scale));
  const Index m = 2 * n;

  double lower[2] = {0, 0}, upper[2] = {0, 0};
  CMat wbest[2], pbest[2];
  for (int sgn = 0; sgn < 2; ++sgn) {
    const double sigma = sgn == 0 ? 1.0 : -1.0;
    ConicProgram p;
    const LevelVar w = add_level_hermitian(p, space, m, "w");
    const AffineMatrix pm = p.add_hermitian("P", m, true).expr;
    p.add_psd("w >= 0", w.expr);
    p.add_psd("P(x)I - w",
              pm.map([k](const CMat& a) { return kron(a, CMat::Identity(k, k)); }) - w.expr);
    AffineMatrix one(1, 1);
    one.constant(0, 0) = 1.0;
    p.add_psd("Tr P <= 1", one - pm.map([](const CMat& a) {
      CMat r(1, 1);
      r(0, 0) = a.trace().real();
      return r;
    }));
    AffineScalar obj;
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < m; ++j)
        if (hs_norm(h.rep(i, j)) > 0.0)
          obj += trace_inner(h.rep(i, j), w.expr.block(i * k, j * k, k, k));
    p.minimize(-sigma * obj);
    const ConicSolution sol = solve(p, settings_for(tol));
    out.status = sol.status;
    if (sol.status != Status::Optimal) {
      out.undecided = true;
      out.lower = 0.0;
      out.upper = std::numeric_limits<double>::infinity();
      return out;
    }
    lower[sgn] = -sol.objective;
    upper[sgn] = -sol.dual_objective;
    wbest[sgn] = sol.value(w.expr);
    pbest[sgn] = sol.value(pm);
  }
  const int b = lower[0] >= lower[1] ? 0 : 1;
  out.theta = b == 0 ? 0.0 : std::numbers::pi;
  out.lower = std::max(0.0, lower[b]) * scale;
  const double grid_bound = out.lower / std::cos(std::numbers::pi / grid);
  out.upper = std::max(out.lower, std::min(grid_bound, std::max(upper[0], upper[1]) * scale));
  out.t1 = pbest[b];
  out.t2 = wbest[b];
  return out;
}

// ---------------------------------------------------------------------------

PhiReport phi_witness(const LevelElement& x, const LevelElement& a, const LevelElement& d,
                      const CVec& xi, const MatrixFunctional& f, int samples, std::uint64_t seed,
                      double tol) {
  const SpacePtr& space = x.space();
  const Index n = x.level();
  const Index k = space->ambient_dim();
  require(a.space() == space && d.space() == space && f.space() == space,
          "phi_witness: inputs live on different spaces");
  require(a.level() == n && d.level() == n && f.size() == n, "phi_witness: level mismatch");
  require(xi.size() == 2 * n * n, "phi_witness: xi must have length 2n^2");
  require(xi.norm() <= 1.0 + 1e-12, "phi_witness: ||xi|| must be at most 1");
  require(level_norm(a) < 1.0 && level_norm(d) < 1.0, "phi_witness: need ||a||, ||d|| < 1");
  CMat xc(2 * n * k, 2 * n * k);
  xc << a.concrete(), x.concrete(), x.concrete().adjoint(), d.concrete();
  const LevelElement big = as_element(space, xc, 2 * n);
  require(cone_member(big, tol).member == Membership::yes,
          "phi_witness: [[a, x], [x*, d]] is not positive");

  // Rows of G_2n(X) kept by S: (level, functional) in (top, top) then (bottom, bottom).
  std::vector<Index> keep;
  for (Index half = 0; half < 2; ++half)
    for (Index p = 0; p < n; ++p)
      for (Index i = 0; i < n; ++i) keep.push_back((half * n + p) * 2 * n + half * n + i);
  auto phi = [&](const MatrixFunctional& g) {
    const CMat full = apply(g, big);
    CMat c(keep.size(), keep.size());
    for (std::size_t r = 0; r < keep.size(); ++r)
      for (std::size_t s = 0; s < keep.size(); ++s) c(r, s) = full(keep[r], keep[s]);
    return 0.5 * xi.dot(c * xi);  // ½ <C ξ, ξ>
  };

  PhiReport out;
  out.value = phi(offdiag(f)).real();
  const CMat fx = apply(f, x);
  const Index m = fx.rows();
  CMat dil = CMat::Zero(2 * m, 2 * m);
  dil.topRightCorner(m, m) = fx;
  dil.bottomLeftCorner(m, m) = fx.adjoint();
  out.identity_rhs = 0.5 * xi.dot(dil * xi).real();
  out.identity_residual = std::abs(phi(offdiag(f)) - Complex(out.identity_rhs));

  Sampler rng(seed);
  out.min_on_positive = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    const MatrixFunctional g = kraus_functional(space, random_kraus(rng, 2 * n, k, 2));
    out.min_on_positive = std::min(out.min_on_positive, phi(g).real());
    ++out.positive_samples;
  }
  for (int s = 0; s < std::max(1, samples / 4); ++s) {
    std::vector<CMat> reps;
    for (Index i = 0; i < 4 * n * n; ++i) reps.push_back(rng.gaussian(k, k));
    const MatrixFunctional g(space, 2 * n, std::move(reps));
    const DualNormResult nr = dual_cb_norm(g, 0, 0, tol);
    if (nr.undecided || nr.value == 0.0) continue;
    out.max_contractivity = std::max(out.max_contractivity, std::abs(phi(g)) / nr.value);
    ++out.contractive_samples;
  }
  return out;
}

// ---------------------------------------------------------------------------

SpacePtr corner_unitization(const SpacePtr& space) {
  const Index k = space->ambient_dim();
  std::vector<CMat> gens;
  CMat e = CMat::Zero(2 * k, 2 * k);
  e.topLeftCorner(k, k).setIdentity();
  gens.push_back(e);
  e.setZero();
  e.bottomRightCorner(k, k).setIdentity();
  gens.push_back(e);
  for (const CMat& b : space->basis()) {
    e.setZero();
    e.topRightCorner(k, k) = b;
    gens.push_back(e);
    e.setZero();
    e.bottomLeftCorner(k, k) = b;
    gens.push_back(e);
  }
  return build_space(gens, 1e-10, "unitization(" + space->name() + ")");
}

const char* to_string(ExtendMode m) { return m == ExtendMode::cp ? "cp" : "ucp"; }

namespace {

CMat choi_apply(const CMat& choi, Index p, Index n, const CMat& s) {
  CMat out = CMat::Zero(n, n);
  for (Index a = 0; a < p; ++a)
    for (Index b = 0; b < p; ++b)
      if (s(a, b) != 0.0) out += s(a, b) * choi.block(a * n, b * n, n, n);
  return out;
}

}  // namespace

ExtendResult arveson_extend(const MatrixFunctional& f, ExtendMode mode, double tol) {
  const SpacePtr& space = f.space();
  const Index p = space->ambient_dim();
  const Index n = f.size();
  if (mode == ExtendMode::ucp) {
    require(space->contains_identity(), "arveson_extend: ucp mode needs I in the subspace");
  }
  ConicProgram prog;
  const AffineMatrix j = prog.add_hermitian("J", p * n, true).expr;
  for (Index l = 0; l < space->dim(); ++l) {
    const CMat& b = space->basis(l);
    prog.add_equality("restrict[" + std::to_string(l) + "]",
                      j.map([&](const CMat& m) { return choi_apply(m, p, n, b); }),
                      f.evaluate(b));
  }
  if (mode == ExtendMode::ucp) {
    const CMat id = CMat::Identity(p, p);
    prog.add_equality("unital", j.map([&](const CMat& m) { return choi_apply(m, p, n, id); }),
                      CMat::Identity(n, n));
  }
  ExtendResult out;
  const ConicSolution sol = feasibility(prog, settings_for(tol));
  out.status = sol.status;
  if (sol.status == Status::Infeasible) {
    out.certificate_margin = sol.certificate_margin;
    return out;
  }
  if (sol.status != Status::Optimal) {
    out.undecided = true;
    return out;
  }
  out.feasible = true;
  out.choi = hermitian_part(sol.value(j));
  out.choi_min_eigenvalue = min_eigenvalue(out.choi);
  for (Index l = 0; l < space->dim(); ++l) {
    const CMat& b = space->basis(l);
    out.restriction_residual = std::max(
        out.restriction_residual, hs_norm(choi_apply(out.choi, p, n, b) - f.evaluate(b)));
  }
  if (mode == ExtendMode::ucp)
    out.unital_residual =
        hs_norm(choi_apply(out.choi, p, n, CMat::Identity(p, p)) - CMat::Identity(n, n));
  return out;
}

MatrixFunctional choi_pullback(const CMat& choi, Index p, Index n, const SpacePtr& space,
                               const CMat& left, const CMat& right) {
  require(choi.rows() == p * n && choi.cols() == p * n, "choi_pullback: Choi size mismatch");
  std::vector<CMat> reps;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      CMat nij(p, p);
      for (Index a = 0; a < p; ++a)
        for (Index b = 0; b < p; ++b) nij(a, b) = std::conj(choi(a * n + i, b * n + j));
      reps.push_back(left.adjoint() * nij * right.adjoint());
    }
  return MatrixFunctional(space, n, std::move(reps));
}

PipelineReport corner_pipeline(const MatrixFunctional& f, double target, double tol) {
  PipelineReport out;
  const SpacePtr& space = f.space();
  const Index n = f.size();
  const Index k = space->ambient_dim();
  const DualNormResult fn = dual_cb_norm(f, 16, 1, tol);
  const MatrixFunctional fs = fn.value > 0.0 ? f * (target / fn.value) : f;
  out.f_norm = fn.value > 0.0 ? target : 0.0;

  const SpacePtr x = corner_unitization(space);
  std::vector<CMat> reps(static_cast<std::size_t>(4 * n * n), CMat::Zero(2 * k, 2 * k));
  auto at = [&](Index i, Index j) -> CMat& { return reps[static_cast<std::size_t>(i * 2 * n + j)]; };
  for (Index i = 0; i < n; ++i) {
    at(i, i).topLeftCorner(k, k) = CMat::Identity(k, k) / static_cast<double>(k);
    at(n + i, n + i).bottomRightCorner(k, k) = CMat::Identity(k, k) / static_cast<double>(k);
    for (Index j = 0; j < n; ++j) {
      at(i, n + j).topRightCorner(k, k) = fs.rep(i, j);
      at(n + i, j).bottomLeftCorner(k, k) = fs.rep(j, i).adjoint();
    }
  }
  const MatrixFunctional phi(x, 2 * n, std::move(reps));
  const ExtendResult ext = arveson_extend(phi, ExtendMode::ucp, tol);
  out.extended = ext.feasible;
  if (!ext.feasible) return out;
  out.positivity = ext.choi_min_eigenvalue;

  const CMat id = CMat::Identity(k, k);
  const CMat zero = CMat::Zero(k, k);
  CMat both_l(2 * k, k), both_r(k, 2 * k), top_l(2 * k, k), top_r(k, 2 * k), bot_l(2 * k, k),
      bot_r(k, 2 * k);
  both_l << id, id;
  both_r << id, id;
  top_l << id, zero;
  top_r << id, zero;
  bot_l << zero, id;
  bot_r << zero, id;
  // ψ∘θ with θ(x) = (1 1)^T x (1 1): its off-diagonal corner must be F.
  const MatrixFunctional composed = choi_pullback(ext.choi, 2 * k, 2 * n, space, both_l, both_r);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      out.corner_residual = std::max(out.corner_residual,
                                     hs_norm(composed.rep(i, n + j) - fs.rep(i, j)));
      out.corner_residual = std::max(
          out.corner_residual, hs_norm(composed.rep(n + i, j) - fs.rep(j, i).adjoint()));
    }
  auto diag_block = [&](const CMat& l, const CMat& r, Index off) {
    const MatrixFunctional full = choi_pullback(ext.choi, 2 * k, 2 * n, space, l, r);
    std::vector<CMat> rs;
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) rs.push_back(full.rep(off + i, off + j));
    return MatrixFunctional(space, n, std::move(rs));
  };
  out.phi1_norm = dual_cb_norm(diag_block(top_l, top_r, 0), 16, 2, tol).value;
  out.phi2_norm = dual_cb_norm(diag_block(bot_l, bot_r, n), 16, 3, tol).value;
  return out;
}

// ---------------------------------------------------------------------------

BidualReport bidual_check(const SpacePtr& space, const std::vector<Index>& levels, int samples,
                          std::uint64_t seed, double tol) {
  BidualReport out;
  out.space = space->name();
  out.levels = levels;
  const Index k = space->ambient_dim();
  Sampler rng(seed);
  for (Index n : levels) {
    check_caps(*space, n);
    for (int s = 0; s < samples; ++s) {
      // Isometry: the top singular pair gives F_ij(w) = <w η_j, ξ_i>.
      const LevelElement v = rng.element(space, n);
      const double nv = level_norm(v);
      if (nv > 0.0) {
        Eigen::JacobiSVD<CMat> svd(v.concrete(), Eigen::ComputeFullU | Eigen::ComputeFullV);
        const CVec u = svd.matrixU().col(0);
        const CVec w = svd.matrixV().col(0);
        std::vector<CMat> reps;
        for (Index i = 0; i < n; ++i)
          for (Index j = 0; j < n; ++j)
            reps.push_back(u.segment(i * k, k) * w.segment(j * k, k).adjoint());
        const MatrixFunctional f(space, n, std::move(reps));
        const DualNormResult fn = dual_cb_norm(f, 0, 0, tol);
        if (fn.undecided) {
          ++out.undecided;
        } else {
          const double res = std::max(std::abs(pairing(f, v) - Complex(nv)) / nv,
                                      std::max(0.0, fn.value - 1.0));
          out.max_isometry_residual = std::max(out.max_isometry_residual, res);
          ++out.isometry_samples;
        }
      }

      // Order: cone elements stay positive under CP maps; non-cone Hermitian
      // elements are separated by the compression onto a negative eigenvector.
      std::vector<LevelElement> herm{rng.hermitian_element(space, n)};
      if (auto c = random_cone_element(rng, space, n)) herm.push_back(*c);
      for (const LevelElement& h : herm) {
        const ConeMembershipResult cm = cone_member(h, tol);
        const double scale = std::max(1.0, level_norm(h));
        if (cm.member == Membership::yes) {
          ++out.order_cone_samples;
          for (int t = 0; t < 3; ++t) {
            const MatrixFunctional g = kraus_functional(space, random_kraus(rng, n, k, 2));
            if (min_eigenvalue(apply(g, h)) < -tol * scale * std::max(1.0, max_rep_norm(g))) {
              ++out.order_cone_failures;
              break;
            }
          }
        } else if (cm.member == Membership::no) {
          ++out.separation_samples;
          Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(h.concrete()));
          const CVec z = es.eigenvectors().col(0);
          std::vector<CMat> reps;
          for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j)
              reps.push_back(z.segment(i * k, k) * z.segment(j * k, k).adjoint());
          const MatrixFunctional g(space, n, std::move(reps));
          if (pairing(g, h).real() < -tol * scale) ++out.separation_successes;
        }
      }
    }
  }
  return out;
}

}  // namespace opspace
