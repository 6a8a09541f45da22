// Copyright (c) 2026 The vaultlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <vaultlab/hex.h>

namespace vaultlab {

namespace {

constexpr char kHexDigits[] = "0123456789abcdef";

int HexDigit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::string HexStr(const uint8_t* data, size_t len) {
  std::string out;
  out.reserve(len * 2);
  for (size_t i = 0; i < len; ++i) {
    out.push_back(kHexDigits[data[i] >> 4]);
    out.push_back(kHexDigits[data[i] & 0x0f]);
  }
  return out;
}

std::string HexStr(const std::vector<uint8_t>& data) { return HexStr(data.data(), data.size()); }

std::string HexStr(const Hash256& h) { return HexStr(h.data(), h.size()); }

std::optional<std::vector<uint8_t>> ParseHex(const std::string& hex) {
  if (hex.size() % 2 != 0) return std::nullopt;
  std::vector<uint8_t> out;
  out.reserve(hex.size() / 2);
  for (size_t i = 0; i < hex.size(); i += 2) {
    int hi = HexDigit(hex[i]);
    int lo = HexDigit(hex[i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    out.push_back(uint8_t((hi << 4) | lo));
  }
  return out;
}

std::optional<Hash256> ParseHash256(const std::string& hex) {
  auto bytes = ParseHex(hex);
  if (!bytes || bytes->size() != 32) return std::nullopt;
  Hash256 out;
  std::copy(bytes->begin(), bytes->end(), out.begin());
  return out;
}

}  // namespace vaultlab
