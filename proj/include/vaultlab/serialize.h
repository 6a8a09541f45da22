// Copyright (c) 2026 The vaultlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef VAULTLAB_SERIALIZE_H
#define VAULTLAB_SERIALIZE_H

#include <cstdint>
#include <stdexcept>
#include <vector>

#include <vaultlab/hash.h>

namespace vaultlab {

/** Little-endian byte writer for the canonical wire forms documented in
 *  docs/FORMATS.md. */
class ByteWriter {
 public:
  void U8(uint8_t v) { m_buf.push_back(v); }
  void U32(uint32_t v) {
    for (int i = 0; i < 4; ++i) m_buf.push_back(uint8_t(v >> (8 * i)));
  }
  void U64(uint64_t v) {
    for (int i = 0; i < 8; ++i) m_buf.push_back(uint8_t(v >> (8 * i)));
  }
  /** Compact size: 1-byte value below 0xfd, then 0xfd/0xfe/0xff prefixed widths. */
  void VarInt(uint64_t v);
  void Bytes(const uint8_t* data, size_t len) { m_buf.insert(m_buf.end(), data, data + len); }
  void Bytes(const std::vector<uint8_t>& data) { Bytes(data.data(), data.size()); }
  void Bytes(const Hash256& h) { Bytes(h.data(), h.size()); }
  void VarBytes(const std::vector<uint8_t>& data) {
    VarInt(data.size());
    Bytes(data);
  }

  const std::vector<uint8_t>& Get() const { return m_buf; }
  std::vector<uint8_t> Take() { return std::move(m_buf); }

 private:
  std::vector<uint8_t> m_buf;
};

/** Bounds-checked reader over a byte span; throws std::out_of_range on
 *  underflow so malformed inputs surface as parse failures, never UB. */
class ByteReader {
 public:
  ByteReader(const uint8_t* data, size_t len) : m_data(data), m_len(len) {}
  explicit ByteReader(const std::vector<uint8_t>& data) : ByteReader(data.data(), data.size()) {}

  uint8_t U8();
  uint32_t U32();
  uint64_t U64();
  uint64_t VarInt();
  std::vector<uint8_t> Bytes(size_t len);
  Hash256 Hash();
  std::vector<uint8_t> VarBytes();

  size_t Remaining() const { return m_len - m_pos; }
  bool AtEnd() const { return m_pos == m_len; }

 private:
  void Need(size_t n) const {
    if (m_len - m_pos < n) throw std::out_of_range("byte reader underflow");
  }

  const uint8_t* m_data;
  size_t m_len;
  size_t m_pos = 0;
};

}  // namespace vaultlab

#endif  // VAULTLAB_SERIALIZE_H
