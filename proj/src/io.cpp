#include "bellcat/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

namespace bellcat::io {

namespace {

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorCode::Parse, what); }

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) parse_error(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

Eigen::Index positive_index(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number_integer() || v.get<long long>() < 1)
    parse_error(std::string("field \"") + key + "\" must be a positive integer");
  return static_cast<Eigen::Index>(v.get<long long>());
}

// Parse errors from nlohmann and our own structural checks both surface as
// ErrorCode::Parse; validation errors of the decoded objects keep their codes.
template <typename Fn>
auto guarded(Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const nlohmann::json::exception& e) {
    parse_error(e.what());
  }
}

}  // namespace

Json matrix_to_json(const ComplexMatrix& m) {
  Json entries = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
    entries.push_back(std::move(row));
  }
  Json out;
  out["dim"] = m.rows();
  out["entries"] = std::move(entries);
  return out;
}

ComplexMatrix matrix_from_json(const Json& j) {
  return guarded([&] {
    const Eigen::Index n = positive_index(j, "dim");
    const Json& entries = field(j, "entries");
    if (!entries.is_array() || static_cast<Eigen::Index>(entries.size()) != n)
      parse_error("\"entries\" must have dim rows");
    ComplexMatrix m(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
      const Json& row = entries[static_cast<std::size_t>(r)];
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) parse_error("matrix row has wrong length");
      for (Eigen::Index c = 0; c < n; ++c) {
        const Json& z = row[static_cast<std::size_t>(c)];
        if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number())
          parse_error("matrix entry must be [re, im]");
        m(r, c) = {z[0].get<double>(), z[1].get<double>()};
      }
    }
    if (!m.allFinite()) parse_error("matrix has non-finite entries");
    return m;
  });
}

Json state_to_json(const DensityState<double>& state, double trace_tol) {
  Json out = matrix_to_json(state.matrix());
  out["trace_tol"] = trace_tol;
  return out;
}

DensityState<double> state_from_json(const Json& j) {
  ComplexMatrix rho = matrix_from_json(j);
  const double tol = guarded([&] {
    if (!j.contains("trace_tol")) return kStateTol<double>;
    const Json& t = j.at("trace_tol");
    if (!t.is_number() || !(t.get<double>() >= 0.0)) parse_error("\"trace_tol\" must be a non-negative number");
    return t.get<double>();
  });
  return DensityState<double>(std::move(rho), tol);
}

Json quadruple_to_json(const AdmissibleQuadruple<double>& q) {
  Json out;
  out["split"] = {{"dA", q.split().dim_a}, {"dB", q.split().dim_b}};
  out["A1"] = matrix_to_json(q.a1());
  out["A2"] = matrix_to_json(q.a2());
  out["B1"] = matrix_to_json(q.b1());
  out["B2"] = matrix_to_json(q.b2());
  return out;
}

AdmissibleQuadruple<double> quadruple_from_json(const Json& j) {
  const Json& split = guarded([&]() -> const Json& { return field(j, "split"); });
  const Eigen::Index da = guarded([&] { return positive_index(split, "dA"); });
  const Eigen::Index db = guarded([&] { return positive_index(split, "dB"); });
  const auto read = [&](const char* key) { return matrix_from_json(guarded([&]() -> const Json& { return field(j, key); })); };
  return AdmissibleQuadruple<double>(BipartiteSplit(da, db), read("A1"), read("A2"), read("B1"), read("B2"));
}

Json morphism_to_json(const Monomorphism<double>& m) {
  Json out;
  out["source_dim"] = m.source_dim();
  out["multiplicity"] = m.multiplicity();
  out["conjugator"] = matrix_to_json(m.conjugator());
  return out;
}

Monomorphism<double> morphism_from_json(const Json& j) {
  const Eigen::Index n = guarded([&] { return positive_index(j, "source_dim"); });
  const Eigen::Index k = guarded([&] { return positive_index(j, "multiplicity"); });
  ComplexMatrix u = matrix_from_json(guarded([&]() -> const Json& { return field(j, "conjugator"); }));
  return Monomorphism<double>(n, k, std::move(u));
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) parse_error("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return Json::parse(buffer.str());
  } catch (const nlohmann::json::exception& e) {
    parse_error(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string format_double(double x) {
  std::array<char, 64> buf{};
  const auto result = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), result.ptr);
}

}  // namespace bellcat::io
