// Copyright (c) 2026 The vaultlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <vaultlab/sighash.h>

#include <stdexcept>

namespace vaultlab {

Hash256 SighashDigest(const Transaction& tx, size_t input_index, SighashMode mode,
                      const Script& spent_script, Amount spent_amount) {
  std::string err;
  if (!IsWellFormed(tx, &err)) throw std::invalid_argument("malformed transaction: " + err);
  if (input_index >= tx.inputs.size()) throw std::out_of_range("input index out of range");

  ByteWriter w;
  w.U32(tx.version);
  w.U32(tx.locktime);
  w.U8(uint8_t(mode));

  const TxInput& signed_input = tx.inputs[input_index];
  w.Bytes(signed_input.prevout.txid);
  w.U32(signed_input.prevout.vout);
  w.U32(signed_input.sequence);

  if (mode == SighashMode::All) {
    ByteWriter ins;
    for (const TxInput& in : tx.inputs) {
      ins.Bytes(in.prevout.txid);
      ins.U32(in.prevout.vout);
      ins.U32(in.sequence);
    }
    w.Bytes(Sha256Of(ins.Get()));
  }

  ByteWriter outs;
  for (const TxOutput& out : tx.outputs) {
    outs.U64(uint64_t(out.amount));
    SerializeScript(outs, out.script);
  }
  w.Bytes(Sha256Of(outs.Get()));

  SerializeScript(w, spent_script);
  w.U64(uint64_t(spent_amount));

  return TaggedHash("vaultlab/sighash", w.Get());
}

}  // namespace vaultlab
