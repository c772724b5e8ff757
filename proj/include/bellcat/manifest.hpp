#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "bellcat/io.hpp"

namespace bellcat {

/// Everything needed to replay a CLI run. Parameters hold the parsed flag
/// values, so replaying reproduces the outputs byte for byte for a fixed seed.
struct RunManifest {
  std::string command;
  io::Json parameters = io::Json::object();
  std::uint64_t seed = 0;
  std::string tool_version = BELLCAT_VERSION;
  std::string results_path;
};

io::Json manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const io::Json& j);

void write_manifest(const std::filesystem::path& path, const RunManifest& m);
RunManifest read_manifest(const std::filesystem::path& path);

}  // namespace bellcat
