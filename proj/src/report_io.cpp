#include "convlab/report_io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "convlab/errors.hpp"
#include "convlab/rational.hpp"

namespace convlab {

const char* const kVersion = "convlab 0.1.0";

std::string RunManifest::to_json() const {
  nlohmann::json j;
  j["command"] = command;
  j["parameters"] = parameters;
  j["seed"] = seed;
  j["version"] = version;
  j["elapsed_ms"] = elapsed_ms;
  j["outputs"] = outputs;
  return j.dump(2);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParameterError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw ParameterError("failed while writing '" + path + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParameterError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Rational rational_from_string(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return Rational(BigInt(text));
    return Rational(BigInt(text.substr(0, slash)), BigInt(text.substr(slash + 1)));
  } catch (const std::exception&) {
    throw ParameterError("cannot parse rational '" + text + "' (expected a or a/b)");
  }
}

std::string rational_to_string(const Rational& q) {
  std::ostringstream os;
  os << numerator(q);
  if (denominator(q) != 1) os << '/' << denominator(q);
  return os.str();
}

}  // namespace convlab
