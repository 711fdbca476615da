#pragma once

#include "cexp/model.hpp"

#include <json.hpp>

#include <string>

namespace cexp::io {

using Json = nlohmann::json;

// {"re": [[...]], "im": [[...]]}; "im" may be omitted.
Matrix matrix_from_json(const Json& j);
Json matrix_to_json(const Matrix& m);

// Plain array of reals or {"re": [...], "im": [...]}.
Vector vector_from_json(const Json& j);

// {"n", "d", "terms": [{"support", "coefficient", "matrix"}]}
LocalHamiltonian hamiltonian_from_json(const Json& j);
Json hamiltonian_to_json(const LocalHamiltonian& h);

// {"sites": [{"vector": ...} | {"matrix": ...}]}
ProductState state_from_json(const Json& j);

// {"support", "matrix", optional "coefficient"}
Observable observable_from_json(const Json& j);

Json read_json_file(const std::string& path);
LocalHamiltonian load_hamiltonian(const std::string& path);
ProductState load_state(const std::string& path);
Observable load_observable(const std::string& path);

// Accepts "a", "bi", "a+bi", "a-bi" (also with j for the imaginary unit).
Complex parse_complex(const std::string& text);
Json complex_to_json(Complex z);
// Nonfinite values become null.
Json number_or_null(double x);

}  // namespace cexp::io
