// Copyright (c) 2026 The vaultlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <vaultlab/keys.h>

#include <map>
#include <mutex>

namespace vaultlab {

namespace {

// The verification oracle: public key -> secret. The map stands in for the
// mathematical fact that each public key has exactly one signer; it is
// content-addressed (public = H(secret)), append-only and never consulted for
// anything but tag recomputation, so sharing it across simulation runs is
// observationally pure.
std::map<PubKey, Hash256>& Oracle() {
  static std::map<PubKey, Hash256> oracle;
  return oracle;
}

std::mutex& OracleMutex() {
  static std::mutex m;
  return m;
}

Hash256 SigTag(const Hash256& secret, const Hash256& digest, SighashMode mode) {
  std::vector<uint8_t> buf;
  buf.insert(buf.end(), secret.begin(), secret.end());
  buf.insert(buf.end(), digest.begin(), digest.end());
  buf.push_back(uint8_t(mode));
  return TaggedHash("vaultlab/sig", buf);
}

}  // namespace

PubKey PubKeyFromSecret(const Hash256& secret) {
  return TaggedHash("vaultlab/pubkey", std::vector<uint8_t>(secret.begin(), secret.end()));
}

KeyPair KeyPair::FromSecret(const Hash256& secret) {
  PubKey pub = PubKeyFromSecret(secret);
  {
    std::lock_guard<std::mutex> lock(OracleMutex());
    Oracle().emplace(pub, secret);
  }
  return KeyPair(secret, pub);
}

Signature KeyPair::Sign(const Hash256& digest, SighashMode mode) const {
  return Signature{m_pub, digest, SigTag(m_secret, digest, mode), mode};
}

bool VerifySignature(const PubKey& pubkey, const Hash256& digest, const Signature& sig) {
  if (sig.pubkey != pubkey || sig.digest != digest) return false;
  Hash256 secret;
  {
    std::lock_guard<std::mutex> lock(OracleMutex());
    auto it = Oracle().find(pubkey);
    if (it == Oracle().end()) return false;
    secret = it->second;
  }
  return sig.tag == SigTag(secret, digest, sig.mode);
}

std::vector<uint8_t> Signature::Serialize() const {
  std::vector<uint8_t> out;
  out.reserve(97);
  out.insert(out.end(), pubkey.begin(), pubkey.end());
  out.insert(out.end(), digest.begin(), digest.end());
  out.insert(out.end(), tag.begin(), tag.end());
  out.push_back(uint8_t(mode));
  return out;
}

std::optional<Signature> Signature::Parse(const std::vector<uint8_t>& bytes) {
  if (bytes.size() != 97) return std::nullopt;
  Signature sig;
  std::copy(bytes.begin(), bytes.begin() + 32, sig.pubkey.begin());
  std::copy(bytes.begin() + 32, bytes.begin() + 64, sig.digest.begin());
  std::copy(bytes.begin() + 64, bytes.begin() + 96, sig.tag.begin());
  uint8_t mode = bytes[96];
  if (mode != uint8_t(SighashMode::All) && mode != uint8_t(SighashMode::AllAnyoneCanPay)) {
    return std::nullopt;
  }
  sig.mode = SighashMode(mode);
  return sig;
}

}  // namespace vaultlab
