// Copyright (c) 2026 The vaultlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <vaultlab/hash.h>

#include <cstring>

namespace vaultlab {

namespace {

inline uint32_t Rotr(uint32_t x, int n) { return (x >> n) | (x << (32 - n)); }
inline uint32_t Ch(uint32_t x, uint32_t y, uint32_t z) { return z ^ (x & (y ^ z)); }
inline uint32_t Maj(uint32_t x, uint32_t y, uint32_t z) { return (x & y) | (z & (x | y)); }
inline uint32_t Sigma0(uint32_t x) { return Rotr(x, 2) ^ Rotr(x, 13) ^ Rotr(x, 22); }
inline uint32_t Sigma1(uint32_t x) { return Rotr(x, 6) ^ Rotr(x, 11) ^ Rotr(x, 25); }
inline uint32_t sigma0(uint32_t x) { return Rotr(x, 7) ^ Rotr(x, 18) ^ (x >> 3); }
inline uint32_t sigma1(uint32_t x) { return Rotr(x, 17) ^ Rotr(x, 19) ^ (x >> 10); }

inline uint32_t ReadBE32(const uint8_t* p) {
  return (uint32_t(p[0]) << 24) | (uint32_t(p[1]) << 16) | (uint32_t(p[2]) << 8) | uint32_t(p[3]);
}

inline void WriteBE32(uint8_t* p, uint32_t v) {
  p[0] = v >> 24;
  p[1] = (v >> 16) & 0xff;
  p[2] = (v >> 8) & 0xff;
  p[3] = v & 0xff;
}

inline void WriteBE64(uint8_t* p, uint64_t v) {
  WriteBE32(p, uint32_t(v >> 32));
  WriteBE32(p + 4, uint32_t(v & 0xffffffff));
}

constexpr uint32_t K[64] = {
    0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4, 0xab1c5ed5,
    0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174,
    0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
    0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967,
    0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85,
    0xa2bfe8a1, 0xa81a664b, 0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
    0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
    0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2,
};

}  // namespace

Sha256& Sha256::Reset() {
  m_s[0] = 0x6a09e667;
  m_s[1] = 0xbb67ae85;
  m_s[2] = 0x3c6ef372;
  m_s[3] = 0xa54ff53a;
  m_s[4] = 0x510e527f;
  m_s[5] = 0x9b05688c;
  m_s[6] = 0x1f83d9ab;
  m_s[7] = 0x5be0cd19;
  m_bytes = 0;
  return *this;
}

void Sha256::Transform(const uint8_t* chunk) {
  uint32_t w[64];
  for (int i = 0; i < 16; ++i) w[i] = ReadBE32(chunk + 4 * i);
  for (int i = 16; i < 64; ++i) w[i] = sigma1(w[i - 2]) + w[i - 7] + sigma0(w[i - 15]) + w[i - 16];

  uint32_t a = m_s[0], b = m_s[1], c = m_s[2], d = m_s[3];
  uint32_t e = m_s[4], f = m_s[5], g = m_s[6], h = m_s[7];
  for (int i = 0; i < 64; ++i) {
    uint32_t t1 = h + Sigma1(e) + Ch(e, f, g) + K[i] + w[i];
    uint32_t t2 = Sigma0(a) + Maj(a, b, c);
    h = g;
    g = f;
    f = e;
    e = d + t1;
    d = c;
    c = b;
    b = a;
    a = t1 + t2;
  }
  m_s[0] += a;
  m_s[1] += b;
  m_s[2] += c;
  m_s[3] += d;
  m_s[4] += e;
  m_s[5] += f;
  m_s[6] += g;
  m_s[7] += h;
}

Sha256& Sha256::Write(const uint8_t* data, size_t len) {
  size_t fill = m_bytes % 64;
  m_bytes += len;
  if (fill) {
    size_t take = 64 - fill;
    if (take > len) take = len;
    std::memcpy(m_buf + fill, data, take);
    data += take;
    len -= take;
    if (fill + take == 64) Transform(m_buf);
    else return *this;
  }
  while (len >= 64) {
    Transform(data);
    data += 64;
    len -= 64;
  }
  if (len) std::memcpy(m_buf, data, len);
  return *this;
}

void Sha256::Finalize(Hash256& out) {
  uint8_t pad[72];
  uint64_t bits = m_bytes * 8;
  size_t fill = m_bytes % 64;
  size_t padlen = (fill < 56) ? (56 - fill) : (120 - fill);
  std::memset(pad, 0, sizeof(pad));
  pad[0] = 0x80;
  Write(pad, padlen);
  uint8_t lenbuf[8];
  WriteBE64(lenbuf, bits);
  Write(lenbuf, 8);
  for (int i = 0; i < 8; ++i) WriteBE32(out.data() + 4 * i, m_s[i]);
}

Hash256 Sha256Of(const std::vector<uint8_t>& data) {
  Hash256 out;
  Sha256().Write(data).Finalize(out);
  return out;
}

Hash256 Sha256d(const std::vector<uint8_t>& data) {
  Hash256 first = Sha256Of(data);
  Hash256 out;
  Sha256().Write(first.data(), first.size()).Finalize(out);
  return out;
}

Hash256 TaggedHash(const std::string& tag, const std::vector<uint8_t>& data) {
  Hash256 tag_hash;
  Sha256().Write(reinterpret_cast<const uint8_t*>(tag.data()), tag.size()).Finalize(tag_hash);
  Hash256 out;
  Sha256()
      .Write(tag_hash.data(), tag_hash.size())
      .Write(tag_hash.data(), tag_hash.size())
      .Write(data)
      .Finalize(out);
  return out;
}

}  // namespace vaultlab
