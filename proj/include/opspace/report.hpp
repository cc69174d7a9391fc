// JSON formats for spaces, elements and functionals, and the report record
// every command emits.
#pragma once

#include "opspace/duality.hpp"
#include "opspace/matspace.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace opspace {

using Json = nlohmann::ordered_json;

/// {"re": [[...]], "im": [[...]]}, row-major; "im" may be omitted.
Json matrix_to_json(const CMat& m);
CMat matrix_from_json(const Json& j);

/// {"name", "ambient_dim", "generators": [{re, im}, ...]}.
SpacePtr space_from_json(const Json& j);
Json space_to_json(const MatrixSpace& space);
SpacePtr load_space_file(const std::string& path);

/// An nk x nk {re, im} matrix. The level is inferred from the size; input
/// farther than 1e-8 (relative) from M_n(V) is rejected.
LevelElement element_from_json(const SpacePtr& space, const Json& j);
Json element_to_json(const LevelElement& x);

/// {"space": name, "n": n, "representatives": [[{re, im}, ...], ...]}.
MatrixFunctional functional_from_json(const SpacePtr& space, const Json& j);
Json functional_to_json(const MatrixFunctional& f);

Json read_json_file(const std::string& path);

struct Report {
  std::string op;
  std::string space;
  Index level = 0;
  /// Numeric value; +∞ is written as the string "+inf".
  std::optional<double> value;
  std::string status;
  Json witness_residuals = Json::object();
  std::optional<std::uint64_t> seed;
  Json tolerances = Json::object();
  double runtime_ms = 0.0;
  Json details = Json::object();

  Json to_json() const;
};

/// Throws Error unless j carries every field of a report with the right types.
void validate_report(const Json& j);

/// key,re,im rows; matrices are flattened row-major as key[i][j].
std::string report_to_csv(const Json& j);

Json value_json(double v);

}  // namespace opspace
