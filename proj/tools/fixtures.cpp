#include "fixtures.hpp"

#include <filesystem>

#include "config.hpp"

namespace ghostqc::cli {

Image load_object(const std::string& spec) {
  if (spec.starts_with("builtin:")) {
    const auto first = spec.find(':');
    const auto second = spec.find(':', first + 1);
    if (second == std::string::npos) {
      throw ConfigError("builtin object must look like builtin:<kind>:<side>");
    }
    const std::string kind = spec.substr(first + 1, second - first - 1);
    int side = 0;
    try {
      side = std::stoi(spec.substr(second + 1));
    } catch (const std::exception&) {
      throw ConfigError("bad side in builtin object spec: " + spec);
    }
    try {
      return make_fixture_object(kind, side);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }

  if (!std::filesystem::exists(spec)) throw InputError("object image not found: " + spec);
  try {
    if (spec.ends_with(".pgm")) return read_pgm(spec);
    if (spec.ends_with(".csv")) return read_image_csv(spec);
  } catch (const std::exception& e) {
    throw InputError("cannot read object image " + spec + ": " + e.what());
  }
  throw ConfigError("object image must be builtin:, .pgm or .csv: " + spec);
}

}  // namespace ghostqc::cli
