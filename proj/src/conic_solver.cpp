// Homogeneous self-dual interior-point method for
//
//   minimize c^T x   s.t.   G x + s = h,   A x = b,   s ∈ K,
//
// K a product of real symmetric PSD cones. Complex constraint blocks arrive
// realified; see conic.hpp for the mapping from the user-facing program.
//
// Each iteration scales with the Nesterov-Todd point W (W^T z = W^{-T} s = λ),
// takes a Mehrotra predictor-corrector step, and solves the KKT system
//
//   [ 0  A^T  G^T   ] [ux]   [bx]
//   [ A  0    0     ] [uy] = [by]
//   [ G  0   -W^T W ] [uz]   [bz]
//
// through the normal equations H = G^T (W^T W)^{-1} G with iterative refinement.
#include "opspace/conic.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <optional>

namespace opspace::conic {

namespace {

using Cone = std::vector<RMat>;

struct Entry {
  Index row;
  Index col;
  double value;
};

struct Term {
  Index var;
  std::vector<Entry> entries;
};

struct Block {
  Index size = 0;
  bool complex = false;
  RMat h;
  std::vector<Term> terms;  // coefficient of x_var in G (i.e. −F_var)
};

struct Lowered {
  Index nvar = 0;
  RVec c;
  double c0 = 0.0;
  std::vector<Block> blocks;
  RMat a;
  RVec b;
  std::vector<Index> row_of_eq;  // equality index -> row of A, or -1 if dropped
  Index num_user_eqs = 0;
  std::optional<ConicSolution> early;
};

constexpr double kInf = std::numeric_limits<double>::infinity();

double cone_dot(const Cone& a, const Cone& b) {
  double s = 0.0;
  for (std::size_t l = 0; l < a.size(); ++l) s += a[l].cwiseProduct(b[l]).sum();
  return s;
}

double cone_norm(const Cone& a) { return std::sqrt(cone_dot(a, a)); }

Cone cone_zero(const Lowered& L) {
  Cone c;
  for (const auto& blk : L.blocks) c.push_back(RMat::Zero(blk.size, blk.size));
  return c;
}

void cone_axpy(double alpha, const Cone& x, Cone& y) {
  for (std::size_t l = 0; l < x.size(); ++l) y[l] += alpha * x[l];
}

RMat sym(const RMat& m) { return (m + m.transpose()) / 2.0; }

RMat realify_unchecked(const CMat& h) {
  const Index m = h.rows();
  RMat out(2 * m, 2 * m);
  out << h.real(), -h.imag(), h.imag(), h.real();
  return out;
}

CMat unrealify_dual(const RMat& z, bool complex) {
  if (!complex) return z.cast<Complex>();
  const Index m = z.rows() / 2;
  const RMat re = z.topLeftCorner(m, m) + z.bottomRightCorner(m, m);
  const RMat im = z.bottomLeftCorner(m, m) - z.topRightCorner(m, m);
  CMat out(m, m);
  out.real() = re;
  out.imag() = im;
  return hermitian_part(out);
}

std::vector<Entry> sparse_entries(const RMat& m) {
  std::vector<Entry> out;
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i)
      if (m(i, j) != 0.0) out.push_back({i, j, m(i, j)});
  return out;
}

bool is_complex(const AffineMatrix& e) {
  auto has_imag = [](const CMat& m) { return m.imag().cwiseAbs().maxCoeff() > 0.0; };
  if (has_imag(e.constant)) return true;
  for (const auto& [v, m] : e.terms)
    if (has_imag(m)) return true;
  return false;
}

Lowered lower(const ConicProgram& p) {
  Lowered L;
  L.nvar = p.num_scalars();
  L.c = RVec::Zero(L.nvar);
  for (const auto& [v, c] : p.objective().terms) L.c(v) += c;
  L.c0 = p.objective().constant;

  std::vector<bool> used(static_cast<std::size_t>(L.nvar), false);
  for (const auto& con : p.psd_constraints()) {
    Block blk;
    blk.complex = is_complex(con.expr);
    blk.h = blk.complex ? realify_unchecked(hermitian_part(con.expr.constant))
                        : RMat(hermitian_part(con.expr.constant).real());
    blk.size = blk.h.rows();
    for (const auto& [v, m] : con.expr.terms) {
      const RMat g = blk.complex ? RMat(-realify_unchecked(hermitian_part(m)))
                                 : RMat(-hermitian_part(m).real());
      auto entries = sparse_entries(g);
      if (entries.empty()) continue;
      used[static_cast<std::size_t>(v)] = true;
      blk.terms.push_back({v, std::move(entries)});
    }
    L.blocks.push_back(std::move(blk));
  }

  // Equalities: drop dependent rows, detect inconsistency.
  const Index m = static_cast<Index>(p.equalities().size());
  L.num_user_eqs = m;
  RMat e = RMat::Zero(m, L.nvar);
  RVec f = RVec::Zero(m);
  for (Index r = 0; r < m; ++r) {
    const auto& eq = p.equalities()[static_cast<std::size_t>(r)];
    for (const auto& [v, c] : eq.expr.terms) e(r, v) += c;
    f(r) = -eq.expr.constant;
  }
  L.row_of_eq.assign(static_cast<std::size_t>(m), -1);
  std::vector<Index> keep;
  if (m > 0) {
    Eigen::ColPivHouseholderQR<RMat> qr(e.transpose());
    qr.setThreshold(1e-11);
    const Index rank = qr.rank();
    for (Index i = 0; i < rank; ++i) keep.push_back(qr.colsPermutation().indices()(i));
    std::sort(keep.begin(), keep.end());
    Eigen::CompleteOrthogonalDecomposition<RMat> cod(e);
    cod.setThreshold(1e-11);
    const RVec xls = cod.solve(f);
    const RVec r = f - e * xls;
    if (r.lpNorm<Eigen::Infinity>() > 1e-9 * std::max(1.0, f.lpNorm<Eigen::Infinity>())) {
      ConicSolution s;
      s.status = Status::Infeasible;
      s.eq_duals = r / r.squaredNorm();
      for (const auto& blk : L.blocks) {
        const Index sz = blk.complex ? blk.size / 2 : blk.size;
        s.psd_duals.push_back(CMat::Zero(sz, sz));
      }
      s.primal = RVec::Zero(L.nvar);
      s.certificate_margin = 1.0 / (1.0 + s.eq_duals.norm());
      L.early = s;
      return L;
    }
    for (Index v = 0; v < L.nvar; ++v)
      if (e.col(v).cwiseAbs().maxCoeff() > 0.0) used[static_cast<std::size_t>(v)] = true;
  }

  // Variables that no constraint touches: unbounded if they carry cost,
  // otherwise pinned to zero so the KKT system stays nonsingular.
  std::vector<Index> pinned;
  for (Index v = 0; v < L.nvar; ++v) {
    if (used[static_cast<std::size_t>(v)]) continue;
    if (L.c(v) != 0.0) {
      ConicSolution s;
      s.status = Status::Unbounded;
      s.primal = RVec::Zero(L.nvar);
      s.primal(v) = L.c(v) > 0.0 ? -1.0 : 1.0;
      s.certificate_margin = std::abs(L.c(v));
      L.early = s;
      return L;
    }
    pinned.push_back(v);
  }

  const Index rows = static_cast<Index>(keep.size() + pinned.size());
  L.a = RMat::Zero(rows, L.nvar);
  L.b = RVec::Zero(rows);
  Index r = 0;
  for (Index k : keep) {
    L.a.row(r) = e.row(k);
    L.b(r) = f(k);
    L.row_of_eq[static_cast<std::size_t>(k)] = r;
    ++r;
  }
  for (Index v : pinned) L.a(r++, v) = 1.0;
  return L;
}

struct Scaling {
  RMat r, rinv, winv, wm;
  RVec lambda;
};

class Ipm {
 public:
  Ipm(const Lowered& L, const Settings& st) : L_(L), st_(st) {
    n_ = L.nvar;
    p_ = L.a.rows();
    degree_ = 0;
    for (const auto& blk : L.blocks) degree_ += blk.size;
    trace_ = std::getenv("OPSPACE_IPM_TRACE") != nullptr;
  }

  ConicSolution run();

 private:
  Cone gx(const RVec& x) const {
    Cone out = cone_zero(L_);
    for (std::size_t l = 0; l < L_.blocks.size(); ++l)
      for (const auto& t : L_.blocks[l].terms) {
        const double xv = x(t.var);
        if (xv == 0.0) continue;
        for (const auto& e : t.entries) out[l](e.row, e.col) += xv * e.value;
      }
    return out;
  }

  RVec gtz(const Cone& z) const {
    RVec out = RVec::Zero(n_);
    for (std::size_t l = 0; l < L_.blocks.size(); ++l)
      for (const auto& t : L_.blocks[l].terms) {
        double s = 0.0;
        for (const auto& e : t.entries) s += e.value * z[l](e.row, e.col);
        out(t.var) += s;
      }
    return out;
  }

  bool compute_scaling(const Cone& s, const Cone& z);
  void set_identity_scaling();
  bool factor();
  void kkt_solve(const RVec& bx, const RVec& by, const Cone& bz, RVec& ux, RVec& uy,
                 Cone& uz) const;
  void kkt_solve_once(const RVec& bx, const RVec& by, const Cone& bz, RVec& ux, RVec& uy,
                      Cone& uz) const;
  double max_step(const Cone& ds, const Cone& dz, double dtau, double dkappa) const;
  static void shift_into_cone(Cone& c);

  const Lowered& L_;
  Settings st_;
  Index n_ = 0, p_ = 0, degree_ = 0;
  std::vector<Scaling> w_;
  Eigen::PartialPivLU<RMat> lu_;
  bool no_eq_ = false;
  Eigen::LDLT<RMat> ldlt_;
  RVec x_, y_;
  Cone s_, z_;
  double tau_ = 1.0, kappa_ = 1.0;
  bool trace_ = false;
};

void Ipm::set_identity_scaling() {
  w_.clear();
  for (const auto& blk : L_.blocks) {
    const Index k = blk.size;
    w_.push_back({RMat::Identity(k, k), RMat::Identity(k, k), RMat::Identity(k, k),
                  RMat::Identity(k, k), RVec::Ones(k)});
  }
}

void Ipm::shift_into_cone(Cone& c) {
  double alpha = -kInf;
  for (auto& m : c) {
    m = sym(m);
    Eigen::SelfAdjointEigenSolver<RMat> es(m, Eigen::EigenvaluesOnly);
    alpha = std::max(alpha, -es.eigenvalues()(0));
  }
  if (alpha >= -1e-8) {
    for (auto& m : c) m += (1.0 + alpha) * RMat::Identity(m.rows(), m.cols());
  }
}

bool Ipm::factor() {
  RMat h = RMat::Zero(n_, n_);
  for (std::size_t l = 0; l < L_.blocks.size(); ++l) {
    const auto& blk = L_.blocks[l];
    const RMat& winv = w_[l].winv;
    const Index k = blk.size;
    for (const auto& ti : blk.terms) {
      RMat pm;
      if (static_cast<Index>(ti.entries.size()) <= 2 * k) {
        pm = RMat::Zero(k, k);
        for (const auto& e : ti.entries)
          pm.noalias() += e.value * winv.col(e.row) * winv.row(e.col);
      } else {
        RMat g = RMat::Zero(k, k);
        for (const auto& e : ti.entries) g(e.row, e.col) = e.value;
        pm.noalias() = winv * g * winv;
      }
      for (const auto& tj : blk.terms) {
        double s = 0.0;
        for (const auto& e : tj.entries) s += e.value * pm(e.row, e.col);
        h(ti.var, tj.var) += s;
      }
    }
  }
  h = sym(h);
  const double reg = 1e-14 * std::max(1.0, h.diagonal().cwiseAbs().maxCoeff());
  h.diagonal().array() += reg;
  if (!h.allFinite()) return false;
  if (p_ == 0) {
    no_eq_ = true;
    ldlt_.compute(h);
    return ldlt_.info() == Eigen::Success;
  }
  no_eq_ = false;
  RMat k = RMat::Zero(n_ + p_, n_ + p_);
  k.topLeftCorner(n_, n_) = h;
  k.topRightCorner(n_, p_) = L_.a.transpose();
  k.bottomLeftCorner(p_, n_) = L_.a;
  lu_.compute(k);
  return true;
}

// Right-hand side bz and solution uz are both in scaled coordinates:
// bz~ = R^{-1} bz R^{-T},  uz~ = R^T uz R.  Then the last block row reads
// uz~ = G~ ux − bz~ with G~ = R^{-1} G R^{-T}, which avoids forming W^2 uz W^2.
void Ipm::kkt_solve_once(const RVec& bx, const RVec& by, const Cone& bz, RVec& ux, RVec& uy,
                         Cone& uz) const {
  Cone t(bz.size());
  for (std::size_t l = 0; l < t.size(); ++l) t[l] = w_[l].rinv.transpose() * bz[l] * w_[l].rinv;
  const RVec r1 = bx + gtz(t);
  if (no_eq_) {
    ux = ldlt_.solve(r1);
    uy = RVec::Zero(0);
  } else {
    RVec rhs(n_ + p_);
    rhs << r1, by;
    const RVec sol = lu_.solve(rhs);
    ux = sol.head(n_);
    uy = sol.tail(p_);
  }
  uz = gx(ux);
  for (std::size_t l = 0; l < uz.size(); ++l)
    uz[l] = sym(w_[l].rinv * uz[l] * w_[l].rinv.transpose() - bz[l]);
}

void Ipm::kkt_solve(const RVec& bx, const RVec& by, const Cone& bz, RVec& ux, RVec& uy,
                    Cone& uz) const {
  kkt_solve_once(bx, by, bz, ux, uy, uz);
  const double scale = 1.0 + std::max({bx.lpNorm<Eigen::Infinity>(),
                                       by.size() ? by.lpNorm<Eigen::Infinity>() : 0.0,
                                       cone_norm(bz)});
  double prev = kInf;
  for (int it = 0; it < 3; ++it) {
    Cone zu(uz.size());
    for (std::size_t l = 0; l < uz.size(); ++l) zu[l] = w_[l].rinv.transpose() * uz[l] * w_[l].rinv;
    RVec ex = bx - gtz(zu);
    if (p_ > 0) ex -= L_.a.transpose() * uy;
    RVec ey = p_ > 0 ? RVec(by - L_.a * ux) : RVec(RVec::Zero(0));
    Cone ez = gx(ux);
    for (std::size_t l = 0; l < ez.size(); ++l)
      ez[l] = bz[l] - (w_[l].rinv * ez[l] * w_[l].rinv.transpose() - uz[l]);
    const double err = std::max({ex.lpNorm<Eigen::Infinity>(),
                                 ey.size() ? ey.lpNorm<Eigen::Infinity>() : 0.0, cone_norm(ez)});
    if (err <= 1e-15 * scale || err >= prev) break;
    prev = err;
    RVec dx, dy;
    Cone dz;
    kkt_solve_once(ex, ey, ez, dx, dy, dz);
    ux += dx;
    if (p_ > 0) uy += dy;
    cone_axpy(1.0, dz, uz);
  }
}

// Nesterov-Todd scaling from Cholesky factors: with Ls Ls^T = s, Lz Lz^T = z and
// Lz^T Ls = U Λ V^T, R = Ls V Λ^{-1/2} gives R^T z R = R^{-1} s R^{-T} = Λ.
bool Ipm::compute_scaling(const Cone& s, const Cone& z) {
  w_.resize(s.size());
  for (std::size_t l = 0; l < s.size(); ++l) {
    Eigen::LLT<RMat> cs(sym(s[l])), cz(sym(z[l]));
    if (cs.info() != Eigen::Success || cz.info() != Eigen::Success) return false;
    const RMat ls = cs.matrixL();
    const RMat lz = cz.matrixL();
    Eigen::JacobiSVD<RMat> svd(lz.transpose() * ls, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const RVec lam = svd.singularValues();
    if (!(lam.minCoeff() > 0.0) || !lam.allFinite()) return false;
    const RVec isq = lam.cwiseSqrt().cwiseInverse();
    Scaling& w = w_[l];
    w.lambda = lam;
    w.r = ls * svd.matrixV() * isq.asDiagonal();
    w.rinv = isq.asDiagonal() * svd.matrixU().transpose() * lz.transpose();
    w.wm = w.r * w.r.transpose();
    w.winv = w.rinv.transpose() * w.rinv;
  }
  return true;
}

double Ipm::max_step(const Cone& ds, const Cone& dz, double dtau, double dkappa) const {
  double alpha = kInf;
  auto limit = [&alpha](const RMat& m) {
    Eigen::SelfAdjointEigenSolver<RMat> es(sym(m), Eigen::EigenvaluesOnly);
    const double t = es.eigenvalues()(0);
    if (t < 0.0) alpha = std::min(alpha, -1.0 / t);
  };
  for (std::size_t l = 0; l < ds.size(); ++l) {
    const Scaling& w = w_[l];
    const RVec isq = w.lambda.cwiseSqrt().cwiseInverse();
    limit(isq.asDiagonal() * ds[l] * isq.asDiagonal());
    limit(isq.asDiagonal() * dz[l] * isq.asDiagonal());
  }
  if (dtau < 0.0) alpha = std::min(alpha, -tau_ / dtau);
  if (dkappa < 0.0) alpha = std::min(alpha, -kappa_ / dkappa);
  return alpha;
}

ConicSolution Ipm::run() {
  const double resx0 = std::max(1.0, L_.c.norm());
  const double resy0 = std::max(1.0, p_ ? L_.b.norm() : 0.0);
  Cone hcone;
  for (const auto& blk : L_.blocks) hcone.push_back(blk.h);
  const double resz0 = std::max(1.0, cone_norm(hcone));

  auto finish = [&](Status st, int iters) {
    ConicSolution out;
    out.status = st;
    out.iterations = iters;
    const double tau = tau_;
    auto map_eq = [&](const RVec& y, double scale) {
      RVec nu = RVec::Zero(L_.num_user_eqs);
      for (Index i = 0; i < L_.num_user_eqs; ++i) {
        const Index r = L_.row_of_eq[static_cast<std::size_t>(i)];
        if (r >= 0) nu(i) = -y(r) * scale;
      }
      return nu;
    };
    auto map_z = [&](double scale) {
      std::vector<CMat> zs;
      for (std::size_t l = 0; l < L_.blocks.size(); ++l)
        zs.push_back(unrealify_dual(z_[l] * scale, L_.blocks[l].complex));
      return zs;
    };
    const double hz = cone_dot(hcone, z_);
    const double by = p_ ? L_.b.dot(y_) : 0.0;
    const double cx = L_.c.dot(x_);
    if (st == Status::Infeasible) {
      const double scale = 1.0 / -(hz + by);
      out.primal = RVec::Zero(n_);
      out.eq_duals = map_eq(y_, scale);
      out.psd_duals = map_z(scale);
      double size = 1.0 + out.eq_duals.norm();
      for (const auto& z : out.psd_duals) size += hs_norm(z);
      out.certificate_margin = 1.0 / size;
    } else if (st == Status::Unbounded) {
      out.primal = x_ / -cx;
      out.eq_duals = RVec::Zero(L_.num_user_eqs);
      out.psd_duals = map_z(0.0);
      out.certificate_margin = 1.0 / (1.0 + out.primal.norm());
    } else {
      out.primal = x_ / tau;
      out.eq_duals = map_eq(y_, 1.0 / tau);
      out.psd_duals = map_z(1.0 / tau);
      out.objective = cx / tau + L_.c0;
      out.dual_objective = -(by + hz) / tau + L_.c0;
      out.gap = std::abs(out.objective - out.dual_objective) /
                std::max(1.0, std::abs(out.objective));
    }
    return out;
  };

  // Starting point: least-squares primal and dual points pushed into the cone.
  set_identity_scaling();
  if (!factor()) {
    x_ = RVec::Zero(n_);
    y_ = RVec::Zero(p_);
    z_ = cone_zero(L_);
    s_ = cone_zero(L_);
    tau_ = kappa_ = 1.0;
    return finish(Status::NumericalLimit, 0);
  }
  {
    RVec ux, uy;
    Cone uz;
    kkt_solve(RVec::Zero(n_), p_ ? L_.b : RVec(RVec::Zero(0)), hcone, ux, uy, uz);
    x_ = ux;
    s_ = uz;
    for (auto& m : s_) m = -m;
    shift_into_cone(s_);
    kkt_solve(-L_.c, RVec::Zero(p_), cone_zero(L_), ux, uy, uz);
    y_ = uy;
    z_ = uz;
    shift_into_cone(z_);
    tau_ = kappa_ = 1.0;
  }

  const double cnorm = L_.c.norm();
  for (int it = 0; it <= st_.max_iter; ++it) {
    const Cone gxv = gx(x_);
    const RVec gz = gtz(z_);
    const RVec aty = p_ ? RVec(L_.a.transpose() * y_) : RVec(RVec::Zero(n_));
    const double cx = L_.c.dot(x_);
    const double by = p_ ? L_.b.dot(y_) : 0.0;
    const double hz = cone_dot(hcone, z_);
    const double sz = cone_dot(s_, z_);

    const RVec rx = -aty - gz - L_.c * tau_;
    const RVec ry = p_ ? RVec(L_.a * x_ - L_.b * tau_) : RVec(RVec::Zero(0));
    Cone rz = s_;
    cone_axpy(1.0, gxv, rz);
    cone_axpy(-tau_, hcone, rz);
    const double rt = kappa_ + cx + by + hz;
    const double mu = (sz + tau_ * kappa_) / static_cast<double>(degree_ + 1);

    const double pres = std::max(p_ ? ry.norm() / resy0 : 0.0, cone_norm(rz) / resz0) / tau_;
    const double dres = rx.norm() / resx0 / tau_;
    const double pcost = cx / tau_;
    const double dcost = -(by + hz) / tau_;
    const double gap = sz / (tau_ * tau_);
    double relgap = kInf;
    if (pcost < 0.0)
      relgap = gap / -pcost;
    else if (dcost > 0.0)
      relgap = gap / dcost;
    (void)cnorm;

    const double pinfres =
        (hz + by < 0.0) ? (aty + gz).norm() / std::max(1.0, resx0) / -(hz + by) : kInf;
    double dinfres = kInf;
    if (cx < 0.0) {
      Cone sg = s_;
      cone_axpy(1.0, gxv, sg);
      const double ax = p_ ? (L_.a * x_).norm() : 0.0;
      dinfres = std::max(ax / resy0, cone_norm(sg) / resz0) / -cx;
    }

    if (trace_)
      std::fprintf(stderr, "%3d pcost % .9e dcost % .9e gap %.2e pres %.2e dres %.2e k/t %.2e\n",
                   it, pcost, dcost, gap, pres, dres, kappa_ / tau_);
    if (pres <= st_.feas_tol && dres <= st_.feas_tol &&
        (gap / std::max(1.0, std::abs(pcost)) <= st_.gap_tol || relgap <= st_.gap_tol))
      return finish(Status::Optimal, it);
    if (pinfres <= st_.feas_tol) return finish(Status::Infeasible, it);
    if (dinfres <= st_.feas_tol) return finish(Status::Unbounded, it);
    if (it == st_.max_iter) break;

    if (!compute_scaling(s_, z_) || !factor()) break;

    // Directions below carry s and z in scaled coordinates.
    Cone hs(L_.blocks.size()), rzs(L_.blocks.size());
    for (std::size_t l = 0; l < hs.size(); ++l) {
      hs[l] = w_[l].rinv * hcone[l] * w_[l].rinv.transpose();
      rzs[l] = w_[l].rinv * rz[l] * w_[l].rinv.transpose();
    }
    RVec x1, y1;
    Cone z1;
    kkt_solve(-L_.c, p_ ? L_.b : RVec(RVec::Zero(0)), hs, x1, y1, z1);
    const double den =
        L_.c.dot(x1) + (p_ ? L_.b.dot(y1) : 0.0) + cone_dot(hs, z1) - kappa_ / tau_;

    struct Dir {
      RVec x, y;
      Cone s, z;
      double tau = 0.0, kappa = 0.0;
    };
    auto direction = [&](double sigma, double d, const Dir* corr) {
      Cone xm(L_.blocks.size());
      Cone bz(L_.blocks.size());
      for (std::size_t l = 0; l < L_.blocks.size(); ++l) {
        const Scaling& w = w_[l];
        const Index k = w.lambda.size();
        RMat rc = RMat::Zero(k, k);
        rc.diagonal() = -w.lambda.cwiseProduct(w.lambda);
        rc.diagonal().array() += sigma * mu;
        if (corr) rc -= sym(corr->s[l] * corr->z[l]);
        xm[l].resize(k, k);
        for (Index j = 0; j < k; ++j)
          for (Index i = 0; i < k; ++i)
            xm[l](i, j) = 2.0 * rc(i, j) / (w.lambda(i) + w.lambda(j));
        bz[l] = -d * rzs[l] - xm[l];
      }
      RVec x0, y0;
      Cone z0;
      kkt_solve(d * rx, -d * ry, bz, x0, y0, z0);
      double rhs_k = -tau_ * kappa_ + sigma * mu;
      if (corr) rhs_k -= corr->tau * corr->kappa;
      const double num = -d * rt - rhs_k / tau_ -
                         (L_.c.dot(x0) + (p_ ? L_.b.dot(y0) : 0.0) + cone_dot(hs, z0));
      Dir out;
      out.tau = num / den;
      out.x = x0 + out.tau * x1;
      out.y = p_ ? RVec(y0 + out.tau * y1) : RVec(RVec::Zero(0));
      out.z = z0;
      cone_axpy(out.tau, z1, out.z);
      out.s.resize(L_.blocks.size());
      for (std::size_t l = 0; l < L_.blocks.size(); ++l) out.s[l] = xm[l] - out.z[l];
      out.kappa = (rhs_k - kappa_ * out.tau) / tau_;
      return out;
    };

    const Dir aff = direction(0.0, 1.0, nullptr);
    const double alpha_aff = std::min(1.0, max_step(aff.s, aff.z, aff.tau, aff.kappa));
    const double sigma = std::pow(1.0 - alpha_aff, 3);
    const Dir dir = direction(sigma, 1.0 - sigma, &aff);
    const double alpha = std::min(1.0, 0.99 * max_step(dir.s, dir.z, dir.tau, dir.kappa));
    if (!(alpha > 1e-12) || !dir.x.allFinite()) break;

    x_ += alpha * dir.x;
    if (p_) y_ += alpha * dir.y;
    for (std::size_t l = 0; l < s_.size(); ++l) {
      const Scaling& w = w_[l];
      s_[l] = sym(s_[l] + alpha * (w.r * dir.s[l] * w.r.transpose()));
      z_[l] = sym(z_[l] + alpha * (w.rinv.transpose() * dir.z[l] * w.rinv));
    }
    tau_ += alpha * dir.tau;
    kappa_ += alpha * dir.kappa;
  }
  return finish(Status::NumericalLimit, st_.max_iter);
}

}  // namespace

ConicSolution InteriorPointBackend::solve(const ConicProgram& p, const Settings& s) const {
  Lowered L = lower(p);
  if (L.early) return *L.early;
  Ipm ipm(L, s);
  return ipm.run();
}

}  // namespace opspace::conic
