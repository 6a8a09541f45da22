// Copyright (c) 2026 The vaultlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef VAULTLAB_KEYS_H
#define VAULTLAB_KEYS_H

#include <optional>
#include <vector>

#include <vaultlab/hash.h>

namespace vaultlab {

using PubKey = Hash256;

enum class SighashMode : uint8_t {
  All = 0x01,
  AllAnyoneCanPay = 0x81,
};

/** Keyed-hash signature: tag = H(secret || digest || mode). The scheme is a
 *  stand-in for a real curve signature behind the same sign/verify interface;
 *  unforgeability holds inside the simulation because a correct tag cannot be
 *  produced without the secret. */
struct Signature {
  PubKey pubkey{};
  Hash256 digest{};
  Hash256 tag{};
  SighashMode mode = SighashMode::All;

  std::vector<uint8_t> Serialize() const;
  static std::optional<Signature> Parse(const std::vector<uint8_t>& bytes);

  bool operator==(const Signature&) const = default;
};

class KeyPair {
 public:
  /** public = H(secret). Registers the pair with the verification oracle. */
  static KeyPair FromSecret(const Hash256& secret);

  const PubKey& GetPubKey() const { return m_pub; }
  const Hash256& GetSecret() const { return m_secret; }

  Signature Sign(const Hash256& digest, SighashMode mode) const;

 private:
  KeyPair(const Hash256& secret, const PubKey& pub) : m_secret(secret), m_pub(pub) {}

  Hash256 m_secret;
  PubKey m_pub;
};

/** True iff sig was produced by the holder of the secret matching pubkey over
 *  exactly this digest and mode. Holding a signature never helps produce
 *  another one. */
bool VerifySignature(const PubKey& pubkey, const Hash256& digest, const Signature& sig);

PubKey PubKeyFromSecret(const Hash256& secret);

}  // namespace vaultlab

#endif  // VAULTLAB_KEYS_H
