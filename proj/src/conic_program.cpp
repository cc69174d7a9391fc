#include "opspace/conic.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace opspace::conic {

// ---------------------------------------------------------------- AffineScalar

AffineScalar AffineScalar::variable(Index v, double coef) {
  AffineScalar a;
  a.terms[v] = coef;
  return a;
}

AffineScalar AffineScalar::constant_value(double c) {
  AffineScalar a;
  a.constant = c;
  return a;
}

AffineScalar& AffineScalar::operator+=(const AffineScalar& o) {
  for (const auto& [v, c] : o.terms) terms[v] += c;
  constant += o.constant;
  return *this;
}

AffineScalar& AffineScalar::operator-=(const AffineScalar& o) {
  for (const auto& [v, c] : o.terms) terms[v] -= c;
  constant -= o.constant;
  return *this;
}

AffineScalar& AffineScalar::operator*=(double s) {
  for (auto& [v, c] : terms) c *= s;
  constant *= s;
  return *this;
}

double AffineScalar::evaluate(const RVec& y) const {
  double out = constant;
  for (const auto& [v, c] : terms) out += c * y(v);
  return out;
}

AffineScalar operator+(AffineScalar a, const AffineScalar& b) { return a += b; }
AffineScalar operator-(AffineScalar a, const AffineScalar& b) { return a -= b; }
AffineScalar operator*(double s, AffineScalar a) { return a *= s; }

// ---------------------------------------------------------------- AffineMatrix

AffineMatrix AffineMatrix::constant_matrix(const CMat& m) {
  AffineMatrix a(m.rows(), m.cols());
  a.constant = m;
  return a;
}

AffineMatrix& AffineMatrix::operator+=(const AffineMatrix& o) {
  require(rows == o.rows && cols == o.cols, "AffineMatrix +: shape mismatch");
  constant += o.constant;
  for (const auto& [v, m] : o.terms) add_term(v, m);
  return *this;
}

AffineMatrix& AffineMatrix::operator-=(const AffineMatrix& o) {
  require(rows == o.rows && cols == o.cols, "AffineMatrix -: shape mismatch");
  constant -= o.constant;
  for (const auto& [v, m] : o.terms) add_term(v, -m);
  return *this;
}

AffineMatrix& AffineMatrix::operator*=(double s) {
  constant *= s;
  for (auto& [v, m] : terms) m *= s;
  return *this;
}

void AffineMatrix::add_term(Index var, const CMat& m) {
  require(m.rows() == rows && m.cols() == cols, "AffineMatrix::add_term: shape mismatch");
  auto it = terms.find(var);
  if (it == terms.end())
    terms.emplace(var, m);
  else
    it->second += m;
}

AffineMatrix AffineMatrix::adjoint() const {
  return map([](const CMat& m) -> CMat { return m.adjoint(); });
}

AffineMatrix AffineMatrix::sandwich(const CMat& left, const CMat& right) const {
  require(left.cols() == rows && right.rows() == cols, "AffineMatrix::sandwich: shape mismatch");
  return map([&](const CMat& m) -> CMat { return left * m * right; });
}

AffineMatrix AffineMatrix::block(Index r0, Index c0, Index nr, Index nc) const {
  require(r0 + nr <= rows && c0 + nc <= cols, "AffineMatrix::block: out of range");
  return map([&](const CMat& m) -> CMat { return m.block(r0, c0, nr, nc); });
}

CMat AffineMatrix::evaluate(const RVec& y) const {
  CMat out = constant;
  for (const auto& [v, m] : terms) out += y(v) * m;
  return out;
}

AffineMatrix operator+(AffineMatrix a, const AffineMatrix& b) { return a += b; }
AffineMatrix operator-(AffineMatrix a, const AffineMatrix& b) { return a -= b; }
AffineMatrix operator*(double s, AffineMatrix a) { return a *= s; }

AffineMatrix block2x2(const AffineMatrix& a, const AffineMatrix& b, const AffineMatrix& c,
                      const AffineMatrix& d) {
  require(a.rows == b.rows && c.rows == d.rows && a.cols == c.cols && b.cols == d.cols,
          "block2x2: incompatible block shapes");
  const Index r = a.rows + c.rows;
  const Index cc = a.cols + b.cols;
  auto place = [&](const AffineMatrix& src, Index r0, Index c0, AffineMatrix& dst) {
    dst.constant.block(r0, c0, src.rows, src.cols) += src.constant;
    for (const auto& [v, m] : src.terms) {
      CMat big = CMat::Zero(r, cc);
      big.block(r0, c0, src.rows, src.cols) = m;
      dst.add_term(v, big);
    }
  };
  AffineMatrix out(r, cc);
  place(a, 0, 0, out);
  place(b, 0, a.cols, out);
  place(c, a.rows, 0, out);
  place(d, a.rows, a.cols, out);
  return out;
}

AffineScalar trace_inner(const CMat& c, const AffineMatrix& e) {
  AffineScalar s;
  s.constant = hs_inner(c, e.constant).real();
  for (const auto& [v, m] : e.terms) {
    const double w = hs_inner(c, m).real();
    if (w != 0.0) s.terms[v] += w;
  }
  return s;
}

AffineScalar real_trace(const AffineMatrix& e) {
  require(e.rows == e.cols, "real_trace: expression must be square");
  return trace_inner(CMat::Identity(e.rows, e.cols), e);
}

// ---------------------------------------------------------------- ConicProgram

Index ConicProgram::add_scalar(std::string label) {
  labels_.push_back(std::move(label));
  return num_scalars() - 1;
}

const MatrixVariable& ConicProgram::add_hermitian(std::string label, Index dim, bool psd) {
  require(dim >= 1, "add_hermitian: dimension must be positive");
  MatrixVariable mv;
  mv.label = label;
  mv.dim = dim;
  mv.first_var = num_scalars();
  mv.expr = AffineMatrix(dim, dim);
  for (Index a = 0; a < dim; ++a) {
    const Index v = add_scalar(label + "[" + std::to_string(a) + "," + std::to_string(a) + "]");
    mv.expr.add_term(v, matrix_unit(dim, dim, a, a));
  }
  for (Index a = 0; a < dim; ++a)
    for (Index b = a + 1; b < dim; ++b) {
      const std::string tag = "[" + std::to_string(a) + "," + std::to_string(b) + "]";
      const Index re = add_scalar(label + ".re" + tag);
      const Index im = add_scalar(label + ".im" + tag);
      const CMat eab = matrix_unit(dim, dim, a, b);
      mv.expr.add_term(re, eab + eab.transpose());
      mv.expr.add_term(im, kI * eab - kI * eab.transpose());
    }
  if (psd) {
    add_psd(label, mv.expr);
    mv.psd_constraint = static_cast<int>(psd_.size()) - 1;
  }
  matrix_vars_.push_back(std::move(mv));
  return matrix_vars_.back();
}

AffineMatrix ConicProgram::add_general(std::string label, Index rows, Index cols) {
  AffineMatrix e(rows, cols);
  for (Index a = 0; a < rows; ++a)
    for (Index b = 0; b < cols; ++b) {
      const std::string tag = "[" + std::to_string(a) + "," + std::to_string(b) + "]";
      const CMat eab = matrix_unit(rows, cols, a, b);
      e.add_term(add_scalar(label + ".re" + tag), eab);
      e.add_term(add_scalar(label + ".im" + tag), kI * eab);
    }
  return e;
}

void ConicProgram::add_psd(std::string label, AffineMatrix expr) {
  require(expr.rows == expr.cols && expr.rows >= 1, "add_psd: expression must be square");
  psd_.push_back({std::move(label), std::move(expr)});
}

void ConicProgram::add_equality(std::string label, AffineScalar lhs, double rhs) {
  lhs.constant -= rhs;
  eqs_.push_back({std::move(label), std::move(lhs)});
}

void ConicProgram::add_equality(std::string label, const AffineMatrix& lhs, const CMat& rhs) {
  require(lhs.rows == rhs.rows() && lhs.cols == rhs.cols(), "add_equality: shape mismatch");
  for (Index a = 0; a < lhs.rows; ++a)
    for (Index b = 0; b < lhs.cols; ++b) {
      AffineScalar re, im;
      re.constant = lhs.constant(a, b).real() - rhs(a, b).real();
      im.constant = lhs.constant(a, b).imag() - rhs(a, b).imag();
      for (const auto& [v, m] : lhs.terms) {
        if (m(a, b).real() != 0.0) re.terms[v] = m(a, b).real();
        if (m(a, b).imag() != 0.0) im.terms[v] = m(a, b).imag();
      }
      const std::string tag = "[" + std::to_string(a) + "," + std::to_string(b) + "]";
      eqs_.push_back({label + ".re" + tag, std::move(re)});
      eqs_.push_back({label + ".im" + tag, std::move(im)});
    }
}

void ConicProgram::minimize(AffineScalar objective) { objective_ = std::move(objective); }

void ConicProgram::validate() const {
  const Index n = num_scalars();
  require(!psd_.empty(), "conic program has no semidefinite constraint");
  auto check_var = [&](Index v) {
    if (v < 0 || v >= n) throw Error("conic program references unknown variable " + std::to_string(v));
  };
  for (const auto& [v, c] : objective_.terms) {
    check_var(v);
    require(std::isfinite(c), "objective has a non-finite coefficient");
  }
  for (const auto& e : eqs_)
    for (const auto& [v, c] : e.expr.terms) {
      check_var(v);
      require(std::isfinite(c), "equality '" + e.label + "' has a non-finite coefficient");
    }
  for (const auto& c : psd_) {
    require(c.expr.constant.rows() == c.expr.rows && c.expr.constant.cols() == c.expr.cols,
            "psd constraint '" + c.label + "' has inconsistent dimensions");
    require(all_finite(c.expr.constant), "psd constraint '" + c.label + "' has non-finite data");
    require(hermitian_defect(c.expr.constant) <= 1e-12 * std::max(1.0, c.expr.constant.norm()),
            "psd constraint '" + c.label + "' has a non-Hermitian constant");
    for (const auto& [v, m] : c.expr.terms) {
      check_var(v);
      require(m.rows() == c.expr.rows && m.cols() == c.expr.cols,
              "psd constraint '" + c.label + "' has inconsistent dimensions");
      require(all_finite(m), "psd constraint '" + c.label + "' has non-finite data");
      require(hermitian_defect(m) <= 1e-12 * std::max(1.0, m.norm()),
              "psd constraint '" + c.label + "' has a non-Hermitian coefficient");
    }
  }
}

const char* to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "Optimal";
    case Status::Infeasible: return "Infeasible";
    case Status::Unbounded: return "Unbounded";
    case Status::NumericalLimit: return "NumericalLimit";
  }
  return "?";
}

// ---------------------------------------------------------------- entry points

const Backend& default_backend() {
  static const InteriorPointBackend backend;
  return backend;
}

ConicSolution solve(const ConicProgram& p, const Settings& s, const Backend& backend) {
  p.validate();
  require(s.feas_tol > 0.0 && s.gap_tol > 0.0 && s.max_iter > 0, "solve: invalid settings");
  ConicSolution sol = backend.solve(p, s);
  if (sol.status == Status::Optimal) {
    const Verification v = verify(p, sol);
    sol.max_residual = v.max_residual();
    sol.gap = v.gap;
    if (sol.max_residual > 10.0 * s.feas_tol || sol.gap > 10.0 * s.gap_tol)
      sol.status = Status::NumericalLimit;
  }
  return sol;
}

ConicSolution feasibility(const ConicProgram& p, const Settings& s, const Backend& backend) {
  p.validate();
  ConicProgram aux;
  for (const auto& l : p.scalar_labels()) aux.add_scalar(l);
  const Index t = aux.add_scalar("feasibility.t");
  for (const auto& c : p.psd_constraints()) {
    AffineMatrix e = c.expr;
    e.add_term(t, CMat::Identity(e.rows, e.cols));
    aux.add_psd(c.label, std::move(e));
  }
  AffineMatrix lower(1, 1);
  lower.constant(0, 0) = 1.0;
  lower.add_term(t, CMat::Identity(1, 1));
  aux.add_psd("feasibility.t>=-1", lower);
  for (const auto& e : p.equalities()) aux.add_equality(e.label, e.expr, 0.0);
  aux.minimize(AffineScalar::variable(t));

  ConicSolution a = solve(aux, s, backend);
  ConicSolution out;
  out.iterations = a.iterations;
  out.max_residual = a.max_residual;
  out.gap = a.gap;
  const Index n = p.num_scalars();
  if (a.status == Status::Infeasible) {
    // Equality constraints alone are inconsistent.
    out.status = Status::Infeasible;
    out.psd_duals.assign(a.psd_duals.begin(), a.psd_duals.end() - 1);
    out.eq_duals = a.eq_duals;
    out.certificate_margin = a.certificate_margin;
    return out;
  }
  if (a.status != Status::Optimal) {
    out.status = Status::NumericalLimit;
    if (a.primal.size() > n) out.primal = a.primal.head(n);
    return out;
  }
  const double tstar = a.objective;
  out.primal = a.primal.head(n);
  out.objective = 0.0;
  if (tstar <= s.feas_tol) {
    out.status = Status::Optimal;
    out.psd_duals.assign(a.psd_duals.begin(), a.psd_duals.end() - 1);
    out.eq_duals = a.eq_duals;
    out.max_residual = std::max(out.max_residual, std::max(0.0, tstar));
  } else {
    // The auxiliary dual is a Farkas certificate: every point violates some
    // constraint by at least t*.
    out.status = Status::Infeasible;
    out.psd_duals.assign(a.psd_duals.begin(), a.psd_duals.end() - 1);
    out.eq_duals = a.eq_duals;
    out.certificate_margin = tstar;
  }
  return out;
}

// ---------------------------------------------------------------- verification

namespace {

struct EqualityData {
  RMat e;
  RVec f;
};

EqualityData equality_data(const ConicProgram& p) {
  const Index m = static_cast<Index>(p.equalities().size());
  EqualityData d{RMat::Zero(m, p.num_scalars()), RVec::Zero(m)};
  for (Index r = 0; r < m; ++r) {
    const auto& eq = p.equalities()[static_cast<std::size_t>(r)];
    for (const auto& [v, c] : eq.expr.terms) d.e(r, v) += c;
    d.f(r) = -eq.expr.constant;
  }
  return d;
}

double hermitian_min_eig(const CMat& m) { return min_eigenvalue(m); }

}  // namespace

double Verification::max_residual() const {
  return std::max({primal_equality, primal_cone, dual_equality, dual_cone});
}

Verification verify(const ConicProgram& p, const ConicSolution& s) {
  Verification v;
  const Index n = p.num_scalars();
  require(s.primal.size() == n, "verify: primal vector has the wrong size");
  require(s.psd_duals.size() == p.psd_constraints().size(), "verify: dual block count mismatch");
  const EqualityData eq = equality_data(p);
  require(s.eq_duals.size() == eq.f.size(), "verify: equality dual count mismatch");

  if (eq.f.size() > 0) {
    const RVec r = eq.e * s.primal - eq.f;
    v.primal_equality = r.lpNorm<Eigen::Infinity>() / std::max(1.0, eq.f.lpNorm<Eigen::Infinity>());
  }
  RVec reduced(n);
  for (Index i = 0; i < n; ++i) {
    auto it = p.objective().terms.find(i);
    reduced(i) = it == p.objective().terms.end() ? 0.0 : it->second;
  }
  const double cnorm = reduced.norm();
  double dual_obj = p.objective().constant;
  if (eq.f.size() > 0) {
    reduced -= eq.e.transpose() * s.eq_duals;
    dual_obj += eq.f.dot(s.eq_duals);
  }
  double zscale = 1.0;
  for (const auto& z : s.psd_duals) zscale = std::max(zscale, spectral_norm(z));
  for (std::size_t l = 0; l < p.psd_constraints().size(); ++l) {
    const auto& c = p.psd_constraints()[l];
    const CMat& z = s.psd_duals[l];
    const CMat value = c.expr.evaluate(s.primal);
    v.primal_cone = std::max(v.primal_cone, std::max(0.0, -hermitian_min_eig(value)) /
                                                std::max(1.0, spectral_norm(c.expr.constant)));
    v.dual_cone = std::max(v.dual_cone, std::max(0.0, -hermitian_min_eig(z)) / zscale);
    for (const auto& [var, m] : c.expr.terms) reduced(var) -= hs_inner(m, z).real();
    dual_obj -= hs_inner(c.expr.constant, z).real();
  }
  v.dual_equality = reduced.norm() / std::max(1.0, cnorm);
  const double primal_obj = p.objective().evaluate(s.primal);
  v.gap = std::abs(primal_obj - dual_obj) / std::max(1.0, std::abs(primal_obj));
  return v;
}

double farkas_residual(const ConicProgram& p, const ConicSolution& s) {
  const EqualityData eq = equality_data(p);
  RVec r = RVec::Zero(p.num_scalars());
  double value = 0.0;
  if (eq.f.size() > 0 && s.eq_duals.size() == eq.f.size()) {
    r += eq.e.transpose() * s.eq_duals;
    value += eq.f.dot(s.eq_duals);
  }
  for (std::size_t l = 0; l < p.psd_constraints().size() && l < s.psd_duals.size(); ++l) {
    const auto& c = p.psd_constraints()[l];
    for (const auto& [var, m] : c.expr.terms) r(var) += hs_inner(m, s.psd_duals[l]).real();
    value -= hs_inner(c.expr.constant, s.psd_duals[l]).real();
  }
  // A valid certificate has r = 0 and value > 0; report the residual
  // relative to the separation it achieves.
  if (value <= 0.0) return std::numeric_limits<double>::infinity();
  return r.norm() / value;
}

// ---------------------------------------------------------------- dump

namespace {

nlohmann::json matrix_json(const CMat& m) {
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    nlohmann::json rr = nlohmann::json::array(), ii = nlohmann::json::array();
    for (Index j = 0; j < m.cols(); ++j) {
      rr.push_back(m(i, j).real());
      ii.push_back(m(i, j).imag());
    }
    re.push_back(rr);
    im.push_back(ii);
  }
  return {{"re", re}, {"im", im}};
}

}  // namespace

std::string dump_json(const ConicProgram& p) {
  nlohmann::json j;
  j["scalars"] = p.scalar_labels();
  nlohmann::json mv = nlohmann::json::array();
  for (const auto& m : p.matrix_variables())
    mv.push_back({{"label", m.label}, {"dim", m.dim}, {"first_scalar", m.first_var},
                  {"psd", m.psd_constraint >= 0}});
  j["matrix_vars"] = mv;
  nlohmann::json obj = {{"constant", p.objective().constant}, {"terms", nlohmann::json::array()}};
  for (const auto& [v, c] : p.objective().terms) obj["terms"].push_back({v, c});
  j["objective"] = obj;
  nlohmann::json eqs = nlohmann::json::array();
  for (const auto& e : p.equalities()) {
    nlohmann::json t = nlohmann::json::array();
    for (const auto& [v, c] : e.expr.terms) t.push_back({v, c});
    eqs.push_back({{"label", e.label}, {"terms", t}, {"rhs", -e.expr.constant}});
  }
  j["equalities"] = eqs;
  nlohmann::json psd = nlohmann::json::array();
  for (const auto& c : p.psd_constraints()) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [v, m] : c.expr.terms) terms.push_back({{"scalar", v}, {"matrix", matrix_json(m)}});
    psd.push_back({{"label", c.label}, {"dim", c.expr.rows}, {"constant", matrix_json(c.expr.constant)},
                   {"terms", terms}});
  }
  j["psd_constraints"] = psd;
  return j.dump(2);
}

}  // namespace opspace::conic
