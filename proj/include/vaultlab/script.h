// Copyright (c) 2026 The vaultlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef VAULTLAB_SCRIPT_H
#define VAULTLAB_SCRIPT_H

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <vaultlab/hash.h>
#include <vaultlab/serialize.h>

namespace vaultlab {

/** Opcode byte values follow the classic script assignments so fixtures read
 *  naturally; only the opcodes the vault scripts need are implemented. */
enum Opcode : uint8_t {
  OP_0 = 0x00,
  OP_PUSHDATA = 0x01,  // structured data push; length carried out of band
  OP_1 = 0x51,
  OP_16 = 0x60,
  OP_IF = 0x63,
  OP_ELSE = 0x67,
  OP_ENDIF = 0x68,
  OP_DROP = 0x75,
  OP_CHECKMULTISIG = 0xae,
  OP_CHECKSEQUENCEVERIFY = 0xb2,
  OP_CHECKTEMPLATEVERIFY = 0xb3,
};

struct ScriptOp {
  uint8_t opcode = OP_0;
  std::vector<uint8_t> data;  // only meaningful for OP_PUSHDATA

  bool operator==(const ScriptOp&) const = default;
  auto operator<=>(const ScriptOp&) const = default;
};

/** Number encoding: little-endian, minimal length, sign bit in the top byte. */
std::vector<uint8_t> EncodeScriptNum(int64_t value);
std::optional<int64_t> DecodeScriptNum(const std::vector<uint8_t>& bytes, size_t max_size = 5);

struct Script {
  std::vector<ScriptOp> ops;

  Script& Add(uint8_t opcode) {
    ops.push_back(ScriptOp{opcode, {}});
    return *this;
  }
  Script& Push(std::vector<uint8_t> data) {
    ops.push_back(ScriptOp{OP_PUSHDATA, std::move(data)});
    return *this;
  }
  Script& Push(const Hash256& h) { return Push(std::vector<uint8_t>(h.begin(), h.end())); }
  /** Minimal integer push: 0..16 map to OP_0/OP_1..OP_16, larger values to a
   *  minimal number push. Negative values are rejected. */
  Script& PushInt(int64_t value);

  bool empty() const { return ops.empty(); }
  bool operator==(const Script&) const = default;
  auto operator<=>(const Script&) const = default;
};

void SerializeScript(ByteWriter& w, const Script& script);
std::vector<uint8_t> SerializeScript(const Script& script);
/** Throws std::out_of_range / std::invalid_argument on malformed bytes. */
Script DeserializeScript(ByteReader& r);

/** Text form: whitespace-separated tokens. "OP_*" mnemonics, bare decimal
 *  integers for number pushes, 0x-prefixed hex for raw data pushes. */
std::string FormatScript(const Script& script);
std::optional<Script> ParseScriptText(const std::string& text, std::string* error = nullptr);

/** threshold-of-N multisig over 32-byte key images, checked in key order. */
Script MultisigScript(int threshold, const std::vector<Hash256>& pubkeys);

/** Unspendable data carrier: PUSH(data) OP_DROP OP_0 always evaluates false. */
Script DataCarrierScript(const Hash256& data);

}  // namespace vaultlab

#endif  // VAULTLAB_SCRIPT_H
