#include "bellcat/manifest.hpp"

namespace bellcat {

io::Json manifest_to_json(const RunManifest& m) {
  io::Json out;
  out["command"] = m.command;
  out["parameters"] = m.parameters;
  out["seed"] = m.seed;
  out["tool_version"] = m.tool_version;
  out["results_path"] = m.results_path;
  return out;
}

RunManifest manifest_from_json(const io::Json& j) {
  try {
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.parameters = j.at("parameters");
    if (!m.parameters.is_object()) throw Error(ErrorCode::Parse, "manifest parameters must be an object");
    m.seed = j.at("seed").get<std::uint64_t>();
    m.tool_version = j.at("tool_version").get<std::string>();
    m.results_path = j.at("results_path").get<std::string>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("manifest: ") + e.what());
  }
}

void write_manifest(const std::filesystem::path& path, const RunManifest& m) {
  io::write_text_file(path, io::dump(manifest_to_json(m)));
}

RunManifest read_manifest(const std::filesystem::path& path) {
  return manifest_from_json(io::read_json_file(path));
}

}  // namespace bellcat
