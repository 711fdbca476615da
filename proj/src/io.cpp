#include "cexp/io.hpp"

#include "cexp/error.hpp"

#include <cmath>
#include <fstream>
#include <regex>

namespace cexp::io {

namespace {

[[noreturn]] void malformed(const std::string& what) { fail(ErrorKind::MalformedSpec, what); }

const Json& require(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) malformed(where + ": missing \"" + key + "\"");
  return j.at(key);
}

double as_number(const Json& j, const std::string& where) {
  if (!j.is_number()) malformed(where + ": expected a number");
  return j.get<double>();
}

Support support_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) malformed(where + ": support must be a nonempty array");
  Support s;
  for (const auto& x : j) {
    if (!x.is_number_integer()) malformed(where + ": support entries must be integers");
    s.push_back(x.get<int>());
  }
  return s;
}

}  // namespace

Matrix matrix_from_json(const Json& j) {
  const Json& re = require(j, "re", "matrix");
  if (!re.is_array() || re.empty()) malformed("matrix: \"re\" must be a nonempty array of rows");
  const auto rows = static_cast<Eigen::Index>(re.size());
  const Json* im = j.contains("im") ? &j.at("im") : nullptr;
  if (im && (!im->is_array() || im->size() != re.size())) malformed("matrix: \"im\" shape differs from \"re\"");
  Eigen::Index cols = -1;
  Matrix m;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Json& row = re[r];
    if (!row.is_array()) malformed("matrix: rows must be arrays");
    if (cols < 0) {
      cols = static_cast<Eigen::Index>(row.size());
      m.resize(rows, cols);
    }
    if (static_cast<Eigen::Index>(row.size()) != cols) malformed("matrix: ragged rows");
    if (im && (!(*im)[r].is_array() || static_cast<Eigen::Index>((*im)[r].size()) != cols))
      malformed("matrix: \"im\" shape differs from \"re\"");
    for (Eigen::Index c = 0; c < cols; ++c) {
      const double a = as_number(row[c], "matrix");
      const double b = im ? as_number((*im)[r][c], "matrix") : 0.0;
      m(r, c) = Complex(a, b);
    }
  }
  return m;
}

Json matrix_to_json(const Matrix& m) {
  Json re = Json::array(), im = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json rr = Json::array(), ri = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      rr.push_back(m(r, c).real());
      ri.push_back(m(r, c).imag());
    }
    re.push_back(rr);
    im.push_back(ri);
  }
  return Json{{"re", re}, {"im", im}};
}

Vector vector_from_json(const Json& j) {
  if (j.is_array()) {
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = as_number(j[i], "vector");
    return v;
  }
  const Json& re = require(j, "re", "vector");
  if (!re.is_array()) malformed("vector: \"re\" must be an array");
  const Json* im = j.contains("im") ? &j.at("im") : nullptr;
  if (im && (!im->is_array() || im->size() != re.size())) malformed("vector: \"im\" length differs from \"re\"");
  Vector v(static_cast<Eigen::Index>(re.size()));
  for (std::size_t i = 0; i < re.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = Complex(as_number(re[i], "vector"), im ? as_number((*im)[i], "vector") : 0.0);
  return v;
}

LocalHamiltonian hamiltonian_from_json(const Json& j) {
  if (!j.is_object()) malformed("Hamiltonian must be a JSON object");
  const Json& n = require(j, "n", "Hamiltonian");
  const Json& d = require(j, "d", "Hamiltonian");
  if (!n.is_number_integer() || !d.is_number_integer()) malformed("Hamiltonian: n and d must be integers");
  const Json& terms = require(j, "terms", "Hamiltonian");
  if (!terms.is_array()) malformed("Hamiltonian: terms must be an array");
  std::vector<Term> out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const std::string where = "term " + std::to_string(i);
    const Json& t = terms[i];
    Term term;
    term.support = support_from_json(require(t, "support", where), where);
    term.coefficient = t.contains("coefficient") ? as_number(t.at("coefficient"), where) : 1.0;
    term.matrix = matrix_from_json(require(t, "matrix", where));
    out.push_back(std::move(term));
  }
  return LocalHamiltonian(n.get<int>(), d.get<int>(), std::move(out));
}

Json hamiltonian_to_json(const LocalHamiltonian& h) {
  Json terms = Json::array();
  for (const auto& t : h.terms())
    terms.push_back({{"support", t.support}, {"coefficient", t.coefficient}, {"matrix", matrix_to_json(t.matrix)}});
  return Json{{"n", h.sites()}, {"d", h.local_dim()}, {"terms", terms}};
}

ProductState state_from_json(const Json& j) {
  const Json& sites = require(j, "sites", "state");
  if (!sites.is_array() || sites.empty()) malformed("state: sites must be a nonempty array");
  bool all_vectors = true;
  for (const auto& s : sites) {
    if (!s.is_object() || (s.contains("vector") == s.contains("matrix")))
      malformed("state: each site needs exactly one of \"vector\" or \"matrix\"");
    if (!s.contains("vector")) all_vectors = false;
  }
  if (all_vectors) {
    std::vector<Vector> psis;
    for (const auto& s : sites) psis.push_back(vector_from_json(s.at("vector")));
    return ProductState::from_vectors(psis);
  }
  std::vector<Matrix> rhos;
  for (const auto& s : sites) {
    if (s.contains("vector")) {
      const Vector v = vector_from_json(s.at("vector"));
      if (std::abs(v.norm() - 1.0) > 1e-10) malformed("state: site vector is not normalized");
      rhos.push_back(v * v.adjoint());
    } else {
      rhos.push_back(matrix_from_json(s.at("matrix")));
    }
  }
  return ProductState::from_density_matrices(std::move(rhos));
}

Observable observable_from_json(const Json& j) {
  Support s = support_from_json(require(j, "support", "observable"), "observable");
  Matrix m = matrix_from_json(require(j, "matrix", "observable"));
  if (j.contains("coefficient")) m *= as_number(j.at("coefficient"), "observable");
  return Observable(std::move(s), std::move(m));
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) malformed("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    malformed(path + ": " + e.what());
  }
}

LocalHamiltonian load_hamiltonian(const std::string& path) { return hamiltonian_from_json(read_json_file(path)); }
ProductState load_state(const std::string& path) { return state_from_json(read_json_file(path)); }
Observable load_observable(const std::string& path) { return observable_from_json(read_json_file(path)); }

Complex parse_complex(const std::string& text) {
  static const std::regex number(R"([+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?)");
  static const std::regex imag_only(R"(([+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?)?[ij])");
  static const std::regex both(R"(([+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?)([+-](\d+\.?\d*|\.\d+)([eE][+-]?\d+)?)?[ij])");
  std::string s;
  for (char c : text)
    if (c != ' ') s.push_back(c);
  std::smatch m;
  if (std::regex_match(s, number)) return {std::stod(s), 0.0};
  if (std::regex_match(s, m, imag_only)) {
    const std::string coef = m[1].str();
    return {0.0, coef.empty() ? 1.0 : (coef == "+" ? 1.0 : (coef == "-" ? -1.0 : std::stod(coef)))};
  }
  if (std::regex_match(s, m, both)) {
    const std::string im = s.substr(m[1].length(), s.size() - m[1].length() - 1);
    return {std::stod(m[1].str()), (im == "+" ? 1.0 : (im == "-" ? -1.0 : std::stod(im)))};
  }
  fail(ErrorKind::Usage, "cannot parse complex number \"" + text + "\"");
}

Json complex_to_json(Complex z) { return Json{{"re", number_or_null(z.real())}, {"im", number_or_null(z.imag())}}; }

Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

}  // namespace cexp::io
