// Copyright (c) 2026 The vaultlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <vaultlab/script.h>

#include <map>
#include <stdexcept>

#include <vaultlab/hex.h>

namespace vaultlab {

namespace {

const std::map<std::string, uint8_t>& MnemonicMap() {
  static const std::map<std::string, uint8_t> kMap = {
      {"OP_0", OP_0},
      {"OP_IF", OP_IF},
      {"OP_ELSE", OP_ELSE},
      {"OP_ENDIF", OP_ENDIF},
      {"OP_DROP", OP_DROP},
      {"OP_CHECKMULTISIG", OP_CHECKMULTISIG},
      {"OP_CHECKSEQUENCEVERIFY", OP_CHECKSEQUENCEVERIFY},
      {"OP_CHECKTEMPLATEVERIFY", OP_CHECKTEMPLATEVERIFY},
  };
  return kMap;
}

std::string Mnemonic(uint8_t opcode) {
  for (const auto& [name, op] : MnemonicMap()) {
    if (op == opcode) return name;
  }
  if (opcode >= OP_1 && opcode <= OP_16) return "OP_" + std::to_string(opcode - OP_1 + 1);
  return "OP_UNKNOWN(" + std::to_string(opcode) + ")";
}

}  // namespace

std::vector<uint8_t> EncodeScriptNum(int64_t value) {
  std::vector<uint8_t> out;
  if (value == 0) return out;
  bool neg = value < 0;
  uint64_t abs = neg ? uint64_t(-value) : uint64_t(value);
  while (abs) {
    out.push_back(uint8_t(abs & 0xff));
    abs >>= 8;
  }
  // If the sign bit of the top byte is taken, extend by one byte.
  if (out.back() & 0x80) {
    out.push_back(neg ? 0x80 : 0x00);
  } else if (neg) {
    out.back() |= 0x80;
  }
  return out;
}

std::optional<int64_t> DecodeScriptNum(const std::vector<uint8_t>& bytes, size_t max_size) {
  if (bytes.size() > max_size) return std::nullopt;
  if (bytes.empty()) return 0;
  // Reject non-minimal encodings: a zero top byte is only allowed when the
  // next byte needs its high bit for magnitude.
  if ((bytes.back() & 0x7f) == 0) {
    if (bytes.size() == 1 || !(bytes[bytes.size() - 2] & 0x80)) return std::nullopt;
  }
  int64_t result = 0;
  for (size_t i = 0; i < bytes.size(); ++i) {
    uint8_t b = (i == bytes.size() - 1) ? (bytes[i] & 0x7f) : bytes[i];
    result |= int64_t(uint64_t(b) << (8 * i));
  }
  if (bytes.back() & 0x80) result = -result;
  return result;
}

Script& Script::PushInt(int64_t value) {
  if (value < 0) throw std::invalid_argument("script numbers in locking scripts are non-negative");
  if (value == 0) return Add(OP_0);
  if (value <= 16) return Add(uint8_t(OP_1 + value - 1));
  return Push(EncodeScriptNum(value));
}

void SerializeScript(ByteWriter& w, const Script& script) {
  w.VarInt(script.ops.size());
  for (const ScriptOp& op : script.ops) {
    w.U8(op.opcode);
    if (op.opcode == OP_PUSHDATA) w.VarBytes(op.data);
  }
}

std::vector<uint8_t> SerializeScript(const Script& script) {
  ByteWriter w;
  SerializeScript(w, script);
  return w.Take();
}

Script DeserializeScript(ByteReader& r) {
  Script out;
  uint64_t count = r.VarInt();
  if (count > 10000) throw std::invalid_argument("script op count implausible");
  for (uint64_t i = 0; i < count; ++i) {
    ScriptOp op;
    op.opcode = r.U8();
    if (op.opcode == OP_PUSHDATA) op.data = r.VarBytes();
    out.ops.push_back(std::move(op));
  }
  return out;
}

std::string FormatScript(const Script& script) {
  std::string out;
  for (const ScriptOp& op : script.ops) {
    if (!out.empty()) out.push_back(' ');
    if (op.opcode == OP_0) {
      out += "0";
    } else if (op.opcode >= OP_1 && op.opcode <= OP_16) {
      out += std::to_string(op.opcode - OP_1 + 1);
    } else if (op.opcode == OP_PUSHDATA) {
      // Short minimal number pushes print as decimal (timelocks, thresholds);
      // everything else as raw hex.
      auto num = (op.data.size() <= 2) ? DecodeScriptNum(op.data, 2) : std::nullopt;
      if (num && *num > 16 && op.data == EncodeScriptNum(*num)) {
        out += std::to_string(*num);
      } else {
        out += "0x" + HexStr(op.data);
      }
    } else {
      out += Mnemonic(op.opcode);
    }
  }
  return out;
}

std::optional<Script> ParseScriptText(const std::string& text, std::string* error) {
  Script out;
  size_t pos = 0;
  auto fail = [&](const std::string& msg) -> std::optional<Script> {
    if (error) *error = msg;
    return std::nullopt;
  };
  while (pos < text.size()) {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos >= text.size()) break;
    size_t end = pos;
    while (end < text.size() && !std::isspace(static_cast<unsigned char>(text[end]))) ++end;
    std::string token = text.substr(pos, end - pos);
    pos = end;

    if (token.rfind("OP_", 0) == 0) {
      auto it = MnemonicMap().find(token);
      if (it != MnemonicMap().end()) {
        out.Add(it->second);
        continue;
      }
      // OP_1..OP_16 written out explicitly.
      try {
        int n = std::stoi(token.substr(3));
        if (n >= 1 && n <= 16) {
          out.Add(uint8_t(OP_1 + n - 1));
          continue;
        }
      } catch (const std::exception&) {
      }
      return fail("unknown opcode mnemonic: " + token);
    }
    if (token.rfind("0x", 0) == 0) {
      auto bytes = ParseHex(token.substr(2));
      if (!bytes) return fail("bad hex push: " + token);
      out.Push(std::move(*bytes));
      continue;
    }
    if (!token.empty() && token.find_first_not_of("0123456789") == std::string::npos) {
      try {
        long long v = std::stoll(token);
        out.PushInt(v);
        continue;
      } catch (const std::exception&) {
        return fail("number out of range: " + token);
      }
    }
    return fail("unrecognized script token: " + token);
  }
  return out;
}

Script MultisigScript(int threshold, const std::vector<Hash256>& pubkeys) {
  if (threshold < 1 || size_t(threshold) > pubkeys.size() || pubkeys.empty() || pubkeys.size() > 20) {
    throw std::invalid_argument("multisig threshold out of range");
  }
  Script s;
  s.PushInt(threshold);
  for (const Hash256& pk : pubkeys) s.Push(pk);
  s.PushInt(int64_t(pubkeys.size()));
  s.Add(OP_CHECKMULTISIG);
  return s;
}

Script DataCarrierScript(const Hash256& data) {
  Script s;
  s.Push(data);
  s.Add(OP_DROP);
  s.Add(OP_0);
  return s;
}

}  // namespace vaultlab
