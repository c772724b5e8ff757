#pragma once

// JSON encodings of matrices, states, quadruple bundles and morphisms.
//
//   matrix:     { "dim": n, "entries": [[ [re, im], ... ], ...] }   row-major
//   state:      matrix fields + "trace_tol"
//   quadruple:  { "split": {"dA": a, "dB": b}, "A1": m, "A2": m, "B1": m, "B2": m }
//   morphism:   { "source_dim": n, "multiplicity": k, "conjugator": m }
//
// Doubles are written in shortest round-trip form, so decode(encode(x)) == x
// bit for bit. Malformed input raises Error(ErrorCode::Parse).

#include <filesystem>
#include <string>

#include "json.hpp"

#include "bellcat/functor.hpp"

namespace bellcat::io {

using Json = nlohmann::ordered_json;

Json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const Json& j);

Json state_to_json(const DensityState<double>& state, double trace_tol = kStateTol<double>);
DensityState<double> state_from_json(const Json& j);

Json quadruple_to_json(const AdmissibleQuadruple<double>& q);
AdmissibleQuadruple<double> quadruple_from_json(const Json& j);

Json morphism_to_json(const Monomorphism<double>& m);
Monomorphism<double> morphism_from_json(const Json& j);

/// Reads and parses a JSON file; I/O and syntax failures raise Parse.
Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Deterministic text form: two-space indent, trailing newline.
std::string dump(const Json& j);

/// Shortest decimal that round-trips the double.
std::string format_double(double x);

}  // namespace bellcat::io
