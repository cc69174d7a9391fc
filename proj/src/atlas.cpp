#include "opspace/atlas.hpp"

#include "opspace/duality.hpp"
#include "opspace/report.hpp"
#include "opspace/sampling.hpp"

#include <charconv>

namespace opspace {

ExampleSpec parse_example(const std::string& selector) {
  const auto colon = selector.find(':');
  if (colon == std::string::npos)
    throw Error("space selector '" + selector + "' must look like full:k, diag:m, corner:m or user:path");
  const std::string family = selector.substr(0, colon);
  const std::string arg = selector.substr(colon + 1);
  ExampleSpec spec;
  if (family == "user") {
    if (arg.empty()) throw Error("user space needs a file path");
    spec.family = Family::user;
    spec.path = arg;
    return spec;
  }
  if (family == "full")
    spec.family = Family::full;
  else if (family == "diag" || family == "diagonal")
    spec.family = Family::diagonal;
  else if (family == "corner")
    spec.family = Family::corner;
  else
    throw Error("unknown space family '" + family + "'");
  long v = 0;
  const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), v);
  if (ec != std::errc() || ptr != arg.data() + arg.size() || v < 1)
    throw Error("space parameter '" + arg + "' must be a positive integer");
  spec.param = v;
  const Caps caps;
  const Index ambient = spec.family == Family::corner ? 2 * v : v;
  if (ambient > caps.max_ambient)
    throw Error("space " + selector + " exceeds the ambient size cap " +
                std::to_string(caps.max_ambient));
  return spec;
}

std::string to_string(const ExampleSpec& spec) {
  switch (spec.family) {
    case Family::full: return "full:" + std::to_string(spec.param);
    case Family::diagonal: return "diag:" + std::to_string(spec.param);
    case Family::corner: return "corner:" + std::to_string(spec.param);
    case Family::user: return "user:" + spec.path;
  }
  return "?";
}

SpacePtr full_space(Index k) {
  std::vector<CMat> gens;
  for (Index a = 0; a < k; ++a)
    for (Index b = 0; b < k; ++b) gens.push_back(matrix_unit(k, k, a, b));
  return build_space(gens, 1e-10, "full:" + std::to_string(k));
}

SpacePtr diagonal_space(Index m) {
  std::vector<CMat> gens;
  for (Index a = 0; a < m; ++a) gens.push_back(matrix_unit(m, m, a, a));
  return build_space(gens, 1e-10, "diag:" + std::to_string(m));
}

SpacePtr corner_space(Index m) {
  std::vector<CMat> gens;
  for (Index a = 0; a < m; ++a)
    for (Index b = 0; b < m; ++b) {
      gens.push_back(matrix_unit(2 * m, 2 * m, a, m + b));
      gens.push_back(matrix_unit(2 * m, 2 * m, m + a, b));
    }
  return build_space(gens, 1e-10, "corner:" + std::to_string(m));
}

SpacePtr make_example(const ExampleSpec& spec) {
  switch (spec.family) {
    case Family::full: return full_space(spec.param);
    case Family::diagonal: return diagonal_space(spec.param);
    case Family::corner: return corner_space(spec.param);
    case Family::user: return load_space_file(spec.path);
  }
  throw Error("unknown space family");
}

SpacePtr make_example(const std::string& selector) { return make_example(parse_example(selector)); }

L1ProbeReport l1_two_probe(int samples, std::uint64_t seed, int grid, double tol) {
  L1ProbeReport out;
  const SpacePtr v = diagonal_space(2);
  const MatrixFunctional unit(v, 1, {CMat::Identity(2, 2)});
  out.unit_norm = dual_cb_norm(unit, 16, seed, tol).value;

  Sampler rng(seed);
  for (Index n = 1; n <= 2; ++n)
    for (int s = 0; s < samples; ++s) {
      std::vector<CMat> reps;
      for (Index i = 0; i < n * n; ++i) reps.push_back(rng.gaussian(2, 2));
      const MatrixFunctional f(v, n, std::move(reps));
      const DualNormResult fn = dual_cb_norm(f, 16, seed + static_cast<std::uint64_t>(s), tol);
      const NuResult nr = nu_dual(f, grid, tol);
      ++out.samples;
      if (fn.undecided || nr.undecided || nr.upper <= 0.0) {
        ++out.undecided;
        continue;
      }
      out.estimate = std::max(out.estimate, fn.value / nr.upper);
      out.max_gap = std::max(out.max_gap, fn.value - nr.upper);
    }
  return out;
}

}  // namespace opspace
