// Copyright (c) 2026 The vaultlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <vaultlab/interpreter.h>

#include <algorithm>

#include <vaultlab/sighash.h>

namespace vaultlab {

namespace {

using StackItem = std::vector<uint8_t>;

/** Empty, all-zero, and negative-zero items are false; anything else true. */
bool CastToBool(const StackItem& item) {
  for (size_t i = 0; i < item.size(); ++i) {
    if (item[i] != 0) {
      if (i == item.size() - 1 && item[i] == 0x80) return false;
      return true;
    }
  }
  return false;
}

/** In-order threshold check: signatures must appear in the same relative
 *  order as their keys; each signature is consumed by the first key it
 *  verifies against. */
bool CheckMultisig(const std::vector<StackItem>& sigs, const std::vector<StackItem>& pubkeys,
                   const Script& spent_script, const ExecContext& ctx) {
  size_t key_cursor = 0;
  for (const StackItem& raw_sig : sigs) {
    auto sig = Signature::Parse(raw_sig);
    if (!sig) return false;
    Hash256 digest;
    try {
      digest = SighashDigest(ctx.spending_tx, ctx.input_index, sig->mode, spent_script,
                             ctx.spent_amount);
    } catch (const std::exception&) {
      return false;
    }
    bool matched = false;
    while (key_cursor < pubkeys.size()) {
      const StackItem& raw_key = pubkeys[key_cursor];
      ++key_cursor;
      if (raw_key.size() != 32) continue;
      PubKey pk;
      std::copy(raw_key.begin(), raw_key.end(), pk.begin());
      if (VerifySignature(pk, digest, *sig)) {
        matched = true;
        break;
      }
    }
    if (!matched) return false;
  }
  return true;
}

}  // namespace

Hash256 CtvHash(const Transaction& tx, size_t input_index) {
  ByteWriter w;
  w.U32(tx.version);
  w.U32(tx.locktime);
  w.VarInt(tx.inputs.size());
  ByteWriter seqs;
  for (const TxInput& in : tx.inputs) seqs.U32(in.sequence);
  w.Bytes(Sha256Of(seqs.Get()));
  w.VarInt(tx.outputs.size());
  ByteWriter outs;
  for (const TxOutput& out : tx.outputs) {
    outs.U64(uint64_t(out.amount));
    SerializeScript(outs, out.script);
  }
  w.Bytes(Sha256Of(outs.Get()));
  w.U32(uint32_t(input_index));
  return TaggedHash("vaultlab/ctv", w.Get());
}

ScriptResult EvalCtv(const Hash256& commitment, const ExecContext& ctx) {
  if (ctx.input_index >= ctx.spending_tx.inputs.size()) return ScriptResult::Rejected("ctv");
  if (CtvHash(ctx.spending_tx, ctx.input_index) != commitment) return ScriptResult::Rejected("ctv");
  return ScriptResult::Accepted();
}

ScriptResult EvalScript(const Script& script, const ExecContext& ctx) {
  if (ctx.input_index >= ctx.spending_tx.inputs.size()) return ScriptResult::Rejected("op");

  std::vector<StackItem> stack = ctx.witness;
  std::vector<bool> exec_branch;  // IF nesting; entry false = branch skipped

  auto executing = [&]() {
    return std::all_of(exec_branch.begin(), exec_branch.end(), [](bool b) { return b; });
  };

  for (const ScriptOp& op : script.ops) {
    bool exec = executing();

    if (op.opcode == OP_IF) {
      bool branch = false;
      if (exec) {
        if (stack.empty()) return ScriptResult::Rejected("stack");
        branch = CastToBool(stack.back());
        stack.pop_back();
      }
      exec_branch.push_back(branch);
      continue;
    }
    if (op.opcode == OP_ELSE) {
      if (exec_branch.empty()) return ScriptResult::Rejected("malformed");
      exec_branch.back() = !exec_branch.back();
      continue;
    }
    if (op.opcode == OP_ENDIF) {
      if (exec_branch.empty()) return ScriptResult::Rejected("malformed");
      exec_branch.pop_back();
      continue;
    }
    if (!exec) continue;

    switch (op.opcode) {
      case OP_0:
        stack.push_back({});
        break;
      case OP_PUSHDATA:
        stack.push_back(op.data);
        break;
      case OP_DROP:
        if (stack.empty()) return ScriptResult::Rejected("stack");
        stack.pop_back();
        break;
      case OP_CHECKSEQUENCEVERIFY: {
        if (stack.empty()) return ScriptResult::Rejected("stack");
        auto required = DecodeScriptNum(stack.back());
        if (!required) return ScriptResult::Rejected("num");
        if (*required < 0) return ScriptResult::Rejected("csv");
        const TxInput& input = ctx.spending_tx.inputs[ctx.input_index];
        if (int64_t(input.sequence) < *required) return ScriptResult::Rejected("csv");
        if (int64_t(ctx.confirmations_of_prevout) < *required) return ScriptResult::Rejected("csv");
        break;  // leaves its operand; pair with OP_DROP
      }
      case OP_CHECKMULTISIG: {
        if (stack.empty()) return ScriptResult::Rejected("stack");
        auto n_keys = DecodeScriptNum(stack.back());
        stack.pop_back();
        if (!n_keys || *n_keys < 1 || *n_keys > 20) return ScriptResult::Rejected("num");
        if (stack.size() < size_t(*n_keys)) return ScriptResult::Rejected("stack");
        std::vector<StackItem> pubkeys(stack.end() - *n_keys, stack.end());
        stack.resize(stack.size() - size_t(*n_keys));

        if (stack.empty()) return ScriptResult::Rejected("stack");
        auto threshold = DecodeScriptNum(stack.back());
        stack.pop_back();
        if (!threshold || *threshold < 1 || *threshold > *n_keys) return ScriptResult::Rejected("num");
        if (stack.size() < size_t(*threshold)) return ScriptResult::Rejected("stack");
        std::vector<StackItem> sigs(stack.end() - *threshold, stack.end());
        stack.resize(stack.size() - size_t(*threshold));

        bool ok = CheckMultisig(sigs, pubkeys, script, ctx);
        stack.push_back(ok ? StackItem{1} : StackItem{});
        break;
      }
      case OP_CHECKTEMPLATEVERIFY: {
        if (stack.empty()) return ScriptResult::Rejected("stack");
        if (stack.back().size() != 32) return ScriptResult::Rejected("ctv");
        Hash256 commitment;
        std::copy(stack.back().begin(), stack.back().end(), commitment.begin());
        ScriptResult r = EvalCtv(commitment, ctx);
        if (!r.accept) return r;
        break;  // leaves the commitment on the stack (soft-fork style)
      }
      default:
        if (op.opcode >= OP_1 && op.opcode <= OP_16) {
          stack.push_back({uint8_t(op.opcode - OP_1 + 1)});
          break;
        }
        return ScriptResult::Rejected("op");
    }
  }

  if (!exec_branch.empty()) return ScriptResult::Rejected("malformed");
  if (stack.empty()) return ScriptResult::Rejected("stack");
  if (!CastToBool(stack.back())) return ScriptResult::Rejected("false");
  return ScriptResult::Accepted();
}

}  // namespace vaultlab
