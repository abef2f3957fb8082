#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace convlab {

/// Everything needed to reproduce one CLI run byte-for-byte: command,
/// parameters, seed, version, plus where the outputs went.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> parameters;
  std::uint64_t seed = 0;
  std::string version;
  double elapsed_ms = 0;
  std::vector<std::string> outputs;

  std::string to_json() const;
};

extern const char* const kVersion;

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace convlab
