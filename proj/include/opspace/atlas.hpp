// Named example spaces: full matrix algebras, diagonals, square corners and
// user files; plus the ℓ¹₂ probe.
#pragma once

#include "opspace/matspace.hpp"

#include <cstdint>
#include <string>

namespace opspace {

enum class Family { full, diagonal, corner, user };

struct ExampleSpec {
  Family family = Family::full;
  Index param = 1;   // k for full, m for diagonal / corner
  std::string path;  // user family only
};

/// "full:k", "diag:m", "corner:m" or "user:path".
ExampleSpec parse_example(const std::string& selector);
std::string to_string(const ExampleSpec& spec);

SpacePtr make_example(const ExampleSpec& spec);
SpacePtr make_example(const std::string& selector);

SpacePtr full_space(Index k);
SpacePtr diagonal_space(Index m);
/// {[[0, α], [β, 0]] : α, β ∈ M_m} ⊆ M_2m.
SpacePtr corner_space(Index m);

struct L1ProbeReport {
  /// Dual norm of the positive element (1, 1), i.e. the trace on diag(2).
  double unit_norm = 0.0;
  /// sup ||F|| / ν_upper(F) over samples: lower bound for the constant.
  double estimate = 0.0;
  /// sup ||F|| − ν_upper(F).
  double max_gap = 0.0;
  int samples = 0;
  int undecided = 0;
};

/// ℓ¹₂ realised as the dual of diag(2).
L1ProbeReport l1_two_probe(int samples, std::uint64_t seed, int grid = 64,
                           double tol = kDefaultTol);

}  // namespace opspace
