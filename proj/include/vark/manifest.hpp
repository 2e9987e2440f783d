#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include "json.hpp"

namespace vark {

inline constexpr std::string_view kToolVersion = "1.0.0";

/// Lower-case hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

/// Provenance block written into every output file.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> flags;  // resolved values, including defaults
  std::string input_sha256;                  // empty when the command reads no input
  std::uint64_t seed = 0;
  std::string version{kToolVersion};

  nlohmann::json to_json() const;
};

}  // namespace vark
