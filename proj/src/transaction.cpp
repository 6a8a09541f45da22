// Copyright (c) 2026 The vaultlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <vaultlab/transaction.h>

#include <set>
#include <stdexcept>

#include <vaultlab/hex.h>

namespace vaultlab {

bool IsWellFormed(const Transaction& tx, std::string* error) {
  auto fail = [&](const std::string& msg) {
    if (error) *error = msg;
    return false;
  };
  if (tx.inputs.empty()) return fail("transaction has no inputs");
  if (tx.outputs.empty()) return fail("transaction has no outputs");
  std::set<OutPoint> seen;
  for (const TxInput& in : tx.inputs) {
    if (!seen.insert(in.prevout).second) return fail("duplicate input outpoint");
  }
  for (const TxOutput& out : tx.outputs) {
    if (out.amount < 0) return fail("negative output amount");
  }
  if (tx.witnesses.size() > tx.inputs.size()) return fail("more witness stacks than inputs");
  return true;
}

static void SerializeCore(ByteWriter& w, const Transaction& tx) {
  w.U32(tx.version);
  w.VarInt(tx.inputs.size());
  for (const TxInput& in : tx.inputs) {
    w.Bytes(in.prevout.txid);
    w.U32(in.prevout.vout);
    w.U32(in.sequence);
  }
  w.VarInt(tx.outputs.size());
  for (const TxOutput& out : tx.outputs) {
    w.U64(uint64_t(out.amount));
    SerializeScript(w, out.script);
  }
  w.U32(tx.locktime);
}

std::vector<uint8_t> SerializeTx(const Transaction& tx) {
  ByteWriter w;
  SerializeCore(w, tx);
  return w.Take();
}

std::vector<uint8_t> SerializeTxWithWitness(const Transaction& tx) {
  ByteWriter w;
  SerializeCore(w, tx);
  // One stack per input, absent stacks written as empty.
  for (size_t i = 0; i < tx.inputs.size(); ++i) {
    const WitnessStack empty;
    const WitnessStack& stack = i < tx.witnesses.size() ? tx.witnesses[i] : empty;
    w.VarInt(stack.size());
    for (const std::vector<uint8_t>& item : stack) w.VarBytes(item);
  }
  return w.Take();
}

Transaction DeserializeTx(const std::vector<uint8_t>& bytes, bool with_witness) {
  ByteReader r(bytes);
  Transaction tx;
  tx.version = r.U32();
  uint64_t n_in = r.VarInt();
  if (n_in > 100000) throw std::invalid_argument("input count implausible");
  for (uint64_t i = 0; i < n_in; ++i) {
    TxInput in;
    in.prevout.txid = r.Hash();
    in.prevout.vout = r.U32();
    in.sequence = r.U32();
    tx.inputs.push_back(in);
  }
  uint64_t n_out = r.VarInt();
  if (n_out > 100000) throw std::invalid_argument("output count implausible");
  for (uint64_t i = 0; i < n_out; ++i) {
    TxOutput out;
    out.amount = Amount(r.U64());
    out.script = DeserializeScript(r);
    tx.outputs.push_back(std::move(out));
  }
  tx.locktime = r.U32();
  if (with_witness) {
    for (uint64_t i = 0; i < n_in; ++i) {
      WitnessStack stack;
      uint64_t items = r.VarInt();
      if (items > 100000) throw std::invalid_argument("witness item count implausible");
      for (uint64_t j = 0; j < items; ++j) stack.push_back(r.VarBytes());
      tx.witnesses.push_back(std::move(stack));
    }
  }
  if (!r.AtEnd()) throw std::invalid_argument("trailing bytes after transaction");
  return tx;
}

Txid ComputeTxid(const Transaction& tx) {
  std::string err;
  if (!IsWellFormed(tx, &err)) throw std::invalid_argument("malformed transaction: " + err);
  return Sha256d(SerializeTx(tx));
}

std::string TxidHex(const Txid& txid) { return HexStr(txid); }

}  // namespace vaultlab
