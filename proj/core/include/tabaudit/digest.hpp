#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace tabaudit {

// Lowercase hex SHA-256 of the given bytes.
std::string sha256_hex(std::string_view bytes);

constexpr std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace tabaudit
