#include "opspace/level_sdp.hpp"

#include <cmath>

namespace opspace {

std::vector<CMat> hermitian_level_basis(const MatrixSpace& space, Index level) {
  const Index k = space.ambient_dim();
  const double r = 1.0 / std::sqrt(2.0);
  std::vector<CMat> out;
  out.reserve(static_cast<std::size_t>(level * level * space.dim()));
  for (Index p = 0; p < level; ++p)
    for (Index q = p; q < level; ++q)
      for (const CMat& b : space.basis()) {
        if (p == q) {
          out.push_back(kron(matrix_unit(level, level, p, p), b));
          continue;
        }
        CMat m = CMat::Zero(level * k, level * k);
        m.block(p * k, q * k, k, k) = r * b;
        m.block(q * k, p * k, k, k) = r * b;
        out.push_back(m);
        m.block(p * k, q * k, k, k) = kI * r * b;
        m.block(q * k, p * k, k, k) = -kI * r * b;
        out.push_back(m);
      }
  return out;
}

std::vector<CMat> complement_basis(const MatrixSpace& space) {
  const Index k = space.ambient_dim();
  const double r = 1.0 / std::sqrt(2.0);
  std::vector<CMat> candidates;
  for (Index a = 0; a < k; ++a) {
    candidates.push_back(matrix_unit(k, k, a, a));
    for (Index b = a + 1; b < k; ++b) {
      candidates.push_back(r * (matrix_unit(k, k, a, b) + matrix_unit(k, k, b, a)));
      candidates.push_back(kI * r * (matrix_unit(k, k, a, b) - matrix_unit(k, k, b, a)));
    }
  }
  std::vector<CMat> out;
  const auto want = static_cast<std::size_t>(k * k - space.dim());
  for (const CMat& c : candidates) {
    if (out.size() == want) break;
    CMat v = c;
    for (int pass = 0; pass < 2; ++pass) {
      v -= space.from_coefficients(space.coefficients(v));
      for (const CMat& u : out) v -= hs_inner(u, v) * u;
    }
    const double nv = hs_norm(v);
    if (nv < 1e-8) continue;
    out.push_back(hermitian_part(v / nv));
  }
  return out;
}

LevelElement LevelVar::value(const conic::ConicSolution& s) const {
  return project(space, hermitian_part(s.value(expr)), level).element;
}

LevelVar add_level_hermitian(conic::ConicProgram& p, const SpacePtr& space, Index level,
                             const std::string& label) {
  LevelVar v;
  v.space = space;
  v.level = level;
  const Index dim = level * space->ambient_dim();
  v.expr = conic::AffineMatrix(dim, dim);
  const auto basis = hermitian_level_basis(*space, level);
  for (std::size_t j = 0; j < basis.size(); ++j) {
    const Index var = p.add_scalar(label + "[" + std::to_string(j) + "]");
    if (j == 0) v.first = var;
    v.expr.add_term(var, basis[j]);
  }
  return v;
}

conic::Settings settings_for(double tol, int max_iter) {
  conic::Settings s;
  s.feas_tol = std::min(tol, 1e-8);
  s.gap_tol = std::min(tol, 1e-8);
  s.max_iter = max_iter;
  return s;
}

}  // namespace opspace
