#include "opspace/report.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace opspace {

Json value_json(double v) {
  if (std::isinf(v)) return v > 0 ? Json("+inf") : Json("-inf");
  if (std::isnan(v)) return Json(nullptr);
  return Json(v);
}

Json matrix_to_json(const CMat& m) {
  Json re = Json::array(), im = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json rr = Json::array(), ri = Json::array();
    for (Index j = 0; j < m.cols(); ++j) {
      rr.push_back(m(i, j).real());
      ri.push_back(m(i, j).imag());
    }
    re.push_back(rr);
    im.push_back(ri);
  }
  return Json{{"re", re}, {"im", im}};
}

namespace {

RMat real_grid(const Json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw Error(std::string(what) + " must be a non-empty array of rows");
  const auto rows = static_cast<Index>(j.size());
  if (!j[0].is_array() || j[0].empty()) throw Error(std::string(what) + " rows must be arrays");
  const auto cols = static_cast<Index>(j[0].size());
  RMat m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols)
      throw Error(std::string(what) + " has ragged rows");
    for (Index c = 0; c < cols; ++c) {
      const Json& e = row[static_cast<std::size_t>(c)];
      if (!e.is_number()) throw Error(std::string(what) + " has a non-numeric entry");
      m(r, c) = e.get<double>();
    }
  }
  return m;
}

}  // namespace

CMat matrix_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("re")) throw Error("matrix must be an object with \"re\" (and \"im\")");
  const RMat re = real_grid(j["re"], "re");
  RMat im = RMat::Zero(re.rows(), re.cols());
  if (j.contains("im")) {
    im = real_grid(j["im"], "im");
    if (im.rows() != re.rows() || im.cols() != re.cols()) throw Error("re and im sizes differ");
  }
  CMat m(re.rows(), re.cols());
  m.real() = re;
  m.imag() = im;
  if (!all_finite(m)) throw Error("matrix has non-finite entries");
  return m;
}

SpacePtr space_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("generators") || !j["generators"].is_array())
    throw Error("space file needs a \"generators\" array");
  std::vector<CMat> gens;
  for (const Json& g : j["generators"]) {
    CMat m = matrix_from_json(g);
    if (m.rows() != m.cols()) throw Error("space generator is not square");
    gens.push_back(std::move(m));
  }
  if (gens.empty()) throw Error("space file has no generators");
  const Index k = gens.front().rows();
  if (j.contains("ambient_dim")) {
    if (!j["ambient_dim"].is_number_integer() || j["ambient_dim"].get<Index>() != k)
      throw Error("ambient_dim does not match the generator size");
  }
  for (const CMat& g : gens)
    if (g.rows() != k) throw Error("space generators have mixed sizes");
  if (k > Caps{}.max_ambient) throw Error("space exceeds the ambient size cap");
  const std::string name = j.contains("name") && j["name"].is_string() ? j["name"].get<std::string>()
                                                                       : std::string("user");
  return build_space(gens, 1e-10, name);
}

Json space_to_json(const MatrixSpace& space) {
  Json gens = Json::array();
  for (const CMat& b : space.basis()) gens.push_back(matrix_to_json(b));
  return Json{{"name", space.name()}, {"ambient_dim", space.ambient_dim()}, {"generators", gens}};
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error("'" + path + "' is not valid JSON: " + e.what());
  }
}

SpacePtr load_space_file(const std::string& path) { return space_from_json(read_json_file(path)); }

LevelElement element_from_json(const SpacePtr& space, const Json& j) {
  const CMat m = matrix_from_json(j);
  const Index k = space->ambient_dim();
  if (m.rows() != m.cols() || m.rows() % k != 0)
    throw Error("element must be nk x nk for k = " + std::to_string(k));
  const Index n = m.rows() / k;
  check_caps(*space, n);
  Projection pr = project(space, m, n);
  if (pr.residual > 1e-8 * std::max(1.0, hs_norm(m)))
    throw Error("element is not in M_" + std::to_string(n) + "(V) (distance " +
                std::to_string(pr.residual) + ")");
  return std::move(pr.element);
}

Json element_to_json(const LevelElement& x) { return matrix_to_json(x.concrete()); }

MatrixFunctional functional_from_json(const SpacePtr& space, const Json& j) {
  if (!j.is_object() || !j.contains("representatives") || !j["representatives"].is_array())
    throw Error("functional file needs a \"representatives\" array");
  const Json& reps = j["representatives"];
  const auto n = static_cast<Index>(reps.size());
  if (n == 0) throw Error("functional has no representatives");
  if (j.contains("n") && (!j["n"].is_number_integer() || j["n"].get<Index>() != n))
    throw Error("functional \"n\" does not match the representative grid");
  std::vector<CMat> out;
  for (const Json& row : reps) {
    if (!row.is_array() || static_cast<Index>(row.size()) != n)
      throw Error("representatives must form an n x n grid");
    for (const Json& r : row) out.push_back(matrix_from_json(r));
  }
  MatrixFunctional f(space, n, std::move(out));
  if (f.projection_residual() > 1e-9)
    throw Error("functional representatives do not lie in the space (distance " +
                std::to_string(f.projection_residual()) + ")");
  return f;
}

Json functional_to_json(const MatrixFunctional& f) {
  Json reps = Json::array();
  for (Index i = 0; i < f.size(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < f.size(); ++j) row.push_back(matrix_to_json(f.rep(i, j)));
    reps.push_back(row);
  }
  return Json{{"space", f.space()->name()}, {"n", f.size()}, {"representatives", reps}};
}

Json Report::to_json() const {
  Json j;
  j["op"] = op;
  j["space"] = space;
  j["level"] = level;
  j["value"] = value ? value_json(*value) : Json(nullptr);
  j["status"] = status;
  j["witness_residuals"] = witness_residuals;
  j["seed"] = seed ? Json(*seed) : Json(nullptr);
  j["tolerances"] = tolerances;
  j["runtime_ms"] = runtime_ms;
  j["details"] = details;
  return j;
}

void validate_report(const Json& j) {
  if (!j.is_object()) throw Error("report must be a JSON object");
  auto need = [&](const char* key) {
    if (!j.contains(key)) throw Error(std::string("report lacks \"") + key + "\"");
    return j[key];
  };
  if (!need("op").is_string()) throw Error("report op must be a string");
  if (!need("space").is_string()) throw Error("report space must be a string");
  if (!need("level").is_number_integer()) throw Error("report level must be an integer");
  const Json v = need("value");
  if (!(v.is_null() || v.is_number() || (v.is_string() && (v == "+inf" || v == "-inf"))))
    throw Error("report value must be a number, \"+inf\" or null");
  if (!need("status").is_string()) throw Error("report status must be a string");
  if (!need("witness_residuals").is_object()) throw Error("witness_residuals must be an object");
  const Json s = need("seed");
  if (!(s.is_null() || s.is_number_unsigned() || s.is_number_integer()))
    throw Error("report seed must be an integer or null");
  if (!need("tolerances").is_object()) throw Error("tolerances must be an object");
  if (!need("runtime_ms").is_number()) throw Error("runtime_ms must be a number");
}

namespace {

bool is_matrix(const Json& j) {
  return j.is_object() && j.size() == 2 && j.contains("re") && j.contains("im") &&
         j["re"].is_array() && (j["re"].empty() || j["re"][0].is_array());
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void flatten(const std::string& key, const Json& j, std::ostringstream& os) {
  if (is_matrix(j)) {
    for (std::size_t r = 0; r < j["re"].size(); ++r)
      for (std::size_t c = 0; c < j["re"][r].size(); ++c)
        os << csv_field(key + "[" + std::to_string(r) + "][" + std::to_string(c) + "]") << ','
           << j["re"][r][c].dump() << ',' << j["im"][r][c].dump() << '\n';
    return;
  }
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      flatten(key.empty() ? it.key() : key + "." + it.key(), it.value(), os);
    return;
  }
  if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(key + "[" + std::to_string(i) + "]", j[i], os);
    return;
  }
  os << csv_field(key) << ',' << csv_field(j.is_string() ? j.get<std::string>() : j.dump()) << ",\n";
}

}  // namespace

std::string report_to_csv(const Json& j) {
  std::ostringstream os;
  os << "key,re,im\n";
  flatten("", j, os);
  return os.str();
}

}  // namespace opspace
