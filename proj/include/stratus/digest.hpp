#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace stratus {

/// FNV-1a 64-bit over raw bytes. Used for checkpoint integrity, not security.
constexpr std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string to_hex(std::uint64_t v);

}  // namespace stratus
