#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <openssl/evp.h>

#include "ordx/error.hpp"

namespace ordx {

using bytes = std::vector<std::uint8_t>;

struct hash256 {
  std::array<std::uint8_t, 32> v{};

  auto operator<=>(const hash256&) const = default;
};

inline std::string to_hex(std::span<const std::uint8_t> data) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (auto b : data) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0x0f]);
  }
  return out;
}

inline std::string to_hex(const hash256& h) { return to_hex(std::span<const std::uint8_t>(h.v)); }

namespace detail {
inline int hex_nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}
}  // namespace detail

inline bytes from_hex(std::string_view s) {
  if (s.size() % 2 != 0) fail(errc::parse_error, "odd-length hex string");
  bytes out(s.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    int hi = detail::hex_nibble(s[2 * i]);
    int lo = detail::hex_nibble(s[2 * i + 1]);
    if (hi < 0 || lo < 0) fail(errc::parse_error, "invalid hex digit");
    out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return out;
}

/// Parses a txid: exactly 64 lowercase hex characters.
inline hash256 hash_from_hex(std::string_view s) {
  if (s.size() != 64) fail(errc::parse_error, "txid must be 64 hex characters");
  for (char c : s)
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f')))
      fail(errc::parse_error, "txid must be lowercase hex");
  hash256 h;
  auto raw = from_hex(s);
  std::copy(raw.begin(), raw.end(), h.v.begin());
  return h;
}

inline hash256 sha256(std::span<const std::uint8_t> data) {
  hash256 h;
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), h.v.data(), &len, EVP_sha256(), nullptr) != 1 || len != 32)
    fail(errc::invariant_violation, "sha256 digest failed");
  return h;
}

inline hash256 sha256(std::string_view s) {
  return sha256(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

}  // namespace ordx
