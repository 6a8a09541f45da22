// Copyright (c) 2026 The vaultlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef VAULTLAB_HASH_H
#define VAULTLAB_HASH_H

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace vaultlab {

using Hash256 = std::array<uint8_t, 32>;

/** Streaming SHA-256 (FIPS 180-4). */
class Sha256 {
 public:
  Sha256() { Reset(); }
  Sha256& Write(const uint8_t* data, size_t len);
  Sha256& Write(const std::vector<uint8_t>& data) { return Write(data.data(), data.size()); }
  void Finalize(Hash256& out);
  Sha256& Reset();

 private:
  void Transform(const uint8_t* chunk);

  uint32_t m_s[8];
  uint8_t m_buf[64];
  uint64_t m_bytes;
};

Hash256 Sha256Of(const std::vector<uint8_t>& data);

/** Double SHA-256, used for transaction ids. */
Hash256 Sha256d(const std::vector<uint8_t>& data);

/** Domain-separated hash: SHA256(SHA256(tag) || SHA256(tag) || data).
 *  Distinct tags keep key images, signatures, digests and template hashes
 *  from ever colliding across protocol roles. */
Hash256 TaggedHash(const std::string& tag, const std::vector<uint8_t>& data);

}  // namespace vaultlab

#endif  // VAULTLAB_HASH_H
