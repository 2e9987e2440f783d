#include "vark/manifest.hpp"

#include <array>
#include <cstdio>

#include <openssl/evp.h>

#include "vark/error.hpp"

namespace vark {

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::Io, "SHA-256 digest failed");
  }
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    char buf[3];
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

nlohmann::json RunManifest::to_json() const {
  return {{"command", command},
          {"flags", flags},
          {"input_sha256", input_sha256},
          {"seed", seed},
          {"version", version}};
}

}  // namespace vark
