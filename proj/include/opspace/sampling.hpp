// Seeded random draws used by profiling, property checks and the acceptance suite.
#pragma once

#include "opspace/matspace.hpp"

#include <cstdint>
#include <random>

namespace opspace {

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  double normal() { return normal_(rng_); }
  double uniform() { return uniform_(rng_); }
  Complex complex_normal() { return {normal(), normal()}; }

  CMat gaussian(Index rows, Index cols);
  /// GUE-style Hermitian matrix.
  CMat hermitian(Index dim);
  CVec unit_vector(Index dim);

  /// Independent complex Gaussian coefficients.
  LevelElement element(const SpacePtr& space, Index level);
  /// GUE sample projected onto M_n(V) and re-Hermitised.
  LevelElement hermitian_element(const SpacePtr& space, Index level);
  /// y* y for y drawn in M_n(V); lies in M_n(V) only when V is an algebra,
  /// so callers project and check.
  CMat positive_concrete(Index dim);

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace opspace
