// Copyright (c) 2026 The vaultlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <vaultlab/serialize.h>

namespace vaultlab {

void ByteWriter::VarInt(uint64_t v) {
  if (v < 0xfd) {
    U8(uint8_t(v));
  } else if (v <= 0xffff) {
    U8(0xfd);
    U8(uint8_t(v & 0xff));
    U8(uint8_t(v >> 8));
  } else if (v <= 0xffffffff) {
    U8(0xfe);
    U32(uint32_t(v));
  } else {
    U8(0xff);
    U64(v);
  }
}

uint8_t ByteReader::U8() {
  Need(1);
  return m_data[m_pos++];
}

uint32_t ByteReader::U32() {
  Need(4);
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= uint32_t(m_data[m_pos + size_t(i)]) << (8 * i);
  m_pos += 4;
  return v;
}

uint64_t ByteReader::U64() {
  Need(8);
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= uint64_t(m_data[m_pos + size_t(i)]) << (8 * i);
  m_pos += 8;
  return v;
}

uint64_t ByteReader::VarInt() {
  uint8_t first = U8();
  if (first < 0xfd) return first;
  if (first == 0xfd) {
    uint64_t v = U8();
    v |= uint64_t(U8()) << 8;
    return v;
  }
  if (first == 0xfe) return U32();
  return U64();
}

std::vector<uint8_t> ByteReader::Bytes(size_t len) {
  Need(len);
  std::vector<uint8_t> out(m_data + m_pos, m_data + m_pos + len);
  m_pos += len;
  return out;
}

Hash256 ByteReader::Hash() {
  Need(32);
  Hash256 out;
  std::copy(m_data + m_pos, m_data + m_pos + 32, out.begin());
  m_pos += 32;
  return out;
}

std::vector<uint8_t> ByteReader::VarBytes() {
  uint64_t len = VarInt();
  if (len > Remaining()) throw std::out_of_range("var bytes length exceeds input");
  return Bytes(size_t(len));
}

}  // namespace vaultlab
