#include "opspace/sampling.hpp"

namespace opspace {

CMat Sampler::gaussian(Index rows, Index cols) {
  CMat m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = complex_normal();
  return m;
}

CMat Sampler::hermitian(Index dim) {
  const CMat g = gaussian(dim, dim);
  return (g + g.adjoint()) / 2.0;
}

CVec Sampler::unit_vector(Index dim) {
  CVec v(dim);
  for (Index i = 0; i < dim; ++i) v(i) = complex_normal();
  return v / v.norm();
}

LevelElement Sampler::element(const SpacePtr& space, Index level) {
  CVec c(level * level * space->dim());
  for (Index i = 0; i < c.size(); ++i) c(i) = complex_normal();
  return LevelElement(space, level, std::move(c));
}

LevelElement Sampler::hermitian_element(const SpacePtr& space, Index level) {
  const CMat h = hermitian(level * space->ambient_dim());
  const LevelElement p = project(space, h, level).element;
  // The projection of a Hermitian matrix is Hermitian because the basis is;
  // averaging with the involution removes rounding.
  return LevelElement(space, level, (p.coeffs() + involution(p).coeffs()) / 2.0);
}

CMat Sampler::positive_concrete(Index dim) {
  const CMat y = gaussian(dim, dim);
  return y.adjoint() * y;
}

}  // namespace opspace
