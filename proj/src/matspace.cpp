#include "opspace/matspace.hpp"

#include <algorithm>
#include <cmath>

namespace opspace {

namespace {

double real_inner(const CMat& a, const CMat& b) { return hs_inner(a, b).real(); }

}  // namespace

MatrixSpace::MatrixSpace(std::string name, Index ambient_dim, std::vector<CMat> basis)
    : name_(std::move(name)), k_(ambient_dim), basis_(std::move(basis)) {
  require(k_ >= 1, "MatrixSpace: ambient dimension must be positive");
  require(!basis_.empty(), "MatrixSpace: the zero space is not supported");
  require(dim() <= k_ * k_, "MatrixSpace: more basis elements than k^2");
  for (const auto& b : basis_)
    require(b.rows() == k_ && b.cols() == k_, "MatrixSpace: basis element has wrong size");
}

CVec MatrixSpace::coefficients(const CMat& m) const {
  require(m.rows() == k_ && m.cols() == k_, "coefficients: size mismatch");
  CVec c(dim());
  for (Index i = 0; i < dim(); ++i) c(i) = hs_inner(basis(i), m);
  return c;
}

CMat MatrixSpace::from_coefficients(const CVec& c) const {
  require(c.size() == dim(), "from_coefficients: size mismatch");
  CMat m = CMat::Zero(k_, k_);
  for (Index i = 0; i < dim(); ++i) m += c(i) * basis(i);
  return m;
}

double MatrixSpace::distance(const CMat& m) const {
  return (m - from_coefficients(coefficients(m))).norm();
}

double MatrixSpace::gram_defect() const {
  double worst = 0.0;
  for (Index i = 0; i < dim(); ++i)
    for (Index j = 0; j < dim(); ++j) {
      const Complex g = hs_inner(basis(i), basis(j));
      worst = std::max(worst, std::abs(g - Complex(i == j ? 1.0 : 0.0)));
    }
  return worst;
}

double MatrixSpace::adjoint_closure_defect() const {
  double worst = 0.0;
  for (const auto& b : basis_) worst = std::max(worst, distance(b.adjoint()));
  return worst;
}

bool MatrixSpace::contains_identity(double tol) const {
  return distance(CMat::Identity(k_, k_)) <= tol;
}

SpacePtr build_space(const std::vector<CMat>& generators, double tol, std::string name) {
  require(!generators.empty(), "build_space: empty generator list");
  require(tol > 0.0, "build_space: tol must be positive");
  const Index k = generators.front().rows();
  require(k >= 1, "build_space: generators must be non-empty matrices");
  for (const auto& g : generators) {
    require(g.rows() == k && g.cols() == k,
            "build_space: generators must be square and of identical dimension");
    require(all_finite(g), "build_space: generator has non-finite entries");
  }

  // Hermitian real and imaginary parts span generators ∪ generators* over C.
  std::vector<CMat> candidates;
  candidates.reserve(2 * generators.size());
  for (const auto& g : generators) {
    candidates.push_back((g + g.adjoint()) / 2.0);
    candidates.push_back((g - g.adjoint()) / (2.0 * kI));
  }
  double scale = 0.0;
  for (const auto& c : candidates) scale = std::max(scale, c.norm());
  require(scale > 0.0, "build_space: all generators are zero");

  std::vector<CMat> basis;
  for (auto v : candidates) {
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) v -= real_inner(b, v) * b;
    const double r = v.norm();
    if (r > tol * scale) {
      v /= r;
      v = hermitian_part(v);  // strip rounding drift
      v /= v.norm();
      basis.push_back(std::move(v));
    }
    if (static_cast<Index>(basis.size()) == k * k) break;
  }
  return std::make_shared<const MatrixSpace>(std::move(name), k, std::move(basis));
}

CMat concrete_from_coeffs(const MatrixSpace& space, Index level, const CVec& coeffs) {
  const Index k = space.ambient_dim();
  const Index d = space.dim();
  CMat m = CMat::Zero(level * k, level * k);
  for (Index p = 0; p < level; ++p)
    for (Index q = 0; q < level; ++q) {
      auto blk = m.block(p * k, q * k, k, k);
      for (Index i = 0; i < d; ++i) {
        const Complex c = coeffs((p * level + q) * d + i);
        if (c != Complex(0.0)) blk += c * space.basis(i);
      }
    }
  return m;
}

LevelElement::LevelElement(SpacePtr space, Index level, CVec coeffs)
    : space_(std::move(space)), n_(level), coeffs_(std::move(coeffs)) {
  require(space_ != nullptr, "LevelElement: null space");
  require(n_ >= 1, "LevelElement: level must be positive");
  require(coeffs_.size() == n_ * n_ * space_->dim(), "LevelElement: coefficient count mismatch");
  concrete_ = concrete_from_coeffs(*space_, n_, coeffs_);
}

LevelElement LevelElement::zero(SpacePtr space, Index level) {
  const Index d = space->dim();
  return LevelElement(std::move(space), level, CVec::Zero(level * level * d));
}

LevelElement LevelElement::from_blocks(SpacePtr space,
                                       const std::vector<std::vector<CMat>>& blocks) {
  const Index n = static_cast<Index>(blocks.size());
  require(n >= 1, "from_blocks: empty block grid");
  const Index d = space->dim();
  CVec c(n * n * d);
  for (Index p = 0; p < n; ++p) {
    require(static_cast<Index>(blocks[p].size()) == n, "from_blocks: grid is not square");
    for (Index q = 0; q < n; ++q)
      c.segment((p * n + q) * d, d) = space->coefficients(blocks[p][q]);
  }
  return LevelElement(std::move(space), n, std::move(c));
}

CMat LevelElement::block(Index p, Index q) const {
  const Index k = ambient_dim();
  return concrete_.block(p * k, q * k, k, k);
}

double LevelElement::reconstruction_residual() const {
  return (concrete_ - concrete_from_coeffs(*space_, n_, coeffs_)).norm();
}

LevelElement LevelElement::operator+(const LevelElement& other) const {
  require(space_ == other.space_ && n_ == other.n_, "LevelElement +: incompatible operands");
  return LevelElement(space_, n_, coeffs_ + other.coeffs_);
}

LevelElement LevelElement::operator-(const LevelElement& other) const {
  require(space_ == other.space_ && n_ == other.n_, "LevelElement -: incompatible operands");
  return LevelElement(space_, n_, coeffs_ - other.coeffs_);
}

LevelElement LevelElement::operator-() const { return LevelElement(space_, n_, -coeffs_); }

LevelElement LevelElement::operator*(Complex s) const {
  return LevelElement(space_, n_, s * coeffs_);
}

Projection project(const SpacePtr& space, const CMat& m, Index level) {
  const Index k = space->ambient_dim();
  require(level >= 1, "project: level must be positive");
  require(m.rows() == level * k && m.cols() == level * k, "project: size mismatch");
  const Index d = space->dim();
  CVec c(level * level * d);
  for (Index p = 0; p < level; ++p)
    for (Index q = 0; q < level; ++q)
      c.segment((p * level + q) * d, d) = space->coefficients(m.block(p * k, q * k, k, k));
  LevelElement e(space, level, std::move(c));
  const double residual = (m - e.concrete()).norm();
  return {std::move(e), residual};
}

LevelElement involution(const LevelElement& x) {
  const Index n = x.level();
  const Index d = x.space()->dim();
  CVec c(n * n * d);
  for (Index p = 0; p < n; ++p)
    for (Index q = 0; q < n; ++q)
      for (Index i = 0; i < d; ++i) c((p * n + q) * d + i) = std::conj(x.coeff(q, p, i));
  return LevelElement(x.space(), n, std::move(c));
}

double level_norm(const LevelElement& x) { return spectral_norm(x.concrete()); }

const char* to_string(Membership m) {
  switch (m) {
    case Membership::yes: return "yes";
    case Membership::no: return "no";
    case Membership::marginal: return "marginal";
  }
  return "?";
}

ConeMembershipResult cone_member(const LevelElement& x, double tol) {
  require(tol > 0.0, "cone_member: tol must be positive");
  const double residual = std::max(hermitian_defect(x.concrete()), x.reconstruction_residual());
  const double lmin = min_eigenvalue(x.concrete());
  Membership m = Membership::marginal;
  if (lmin >= -tol && residual <= tol)
    m = Membership::yes;
  else if (lmin < -10.0 * tol || residual > 10.0 * tol)
    m = Membership::no;
  return {m, lmin, residual, tol};
}

LevelElement compress(const LevelElement& x, const CMat& alpha, const CMat& beta) {
  const Index m = x.level();
  require(alpha.cols() == m && beta.rows() == m, "compress: shape mismatch with level");
  require(alpha.rows() == beta.cols(), "compress: alpha and beta give a non-square result");
  const Index n = alpha.rows();
  const Index d = x.space()->dim();
  CVec c = CVec::Zero(n * n * d);
  for (Index p = 0; p < n; ++p)
    for (Index q = 0; q < n; ++q) {
      auto out = c.segment((p * n + q) * d, d);
      for (Index r = 0; r < m; ++r)
        for (Index s = 0; s < m; ++s) {
          const Complex w = alpha(p, r) * beta(s, q);
          if (w != Complex(0.0)) out += w * x.coeffs().segment((r * m + s) * d, d);
        }
    }
  return LevelElement(x.space(), n, std::move(c));
}

LevelElement direct_sum(const LevelElement& x, const LevelElement& y) {
  require(x.space() == y.space(), "direct_sum: elements live in different spaces");
  const Index m = x.level();
  const Index n = y.level();
  const Index t = m + n;
  const Index d = x.space()->dim();
  CVec c = CVec::Zero(t * t * d);
  for (Index p = 0; p < m; ++p)
    for (Index q = 0; q < m; ++q)
      c.segment((p * t + q) * d, d) = x.coeffs().segment((p * m + q) * d, d);
  for (Index p = 0; p < n; ++p)
    for (Index q = 0; q < n; ++q)
      c.segment(((m + p) * t + (m + q)) * d, d) = y.coeffs().segment((p * n + q) * d, d);
  return LevelElement(x.space(), t, std::move(c));
}

void check_caps(const MatrixSpace& space, Index level, const Caps& caps) {
  if (level < 1 || level > caps.max_level)
    throw Error("level " + std::to_string(level) + " outside the cap 1.." +
                std::to_string(caps.max_level));
  if (space.ambient_dim() > caps.max_ambient)
    throw Error("ambient dimension " + std::to_string(space.ambient_dim()) +
                " exceeds the cap " + std::to_string(caps.max_ambient));
}

}  // namespace opspace
