// Copyright (c) 2026 The vaultlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef VAULTLAB_INTERPRETER_H
#define VAULTLAB_INTERPRETER_H

#include <string>

#include <vaultlab/script.h>
#include <vaultlab/transaction.h>

namespace vaultlab {

/** Everything an input's script evaluation may consult. The witness stack is
 *  the initial stack; the script evaluated is the locking script of the spent
 *  output (script-hash wrappers are treated as storage labels, not executed). */
struct ExecContext {
  const Transaction& spending_tx;
  size_t input_index = 0;
  /** Confirmations of the transaction that created the spent output at the
   *  time of evaluation; unconfirmed (mempool) parents count 0. */
  int confirmations_of_prevout = 0;
  WitnessStack witness;
  Amount spent_amount = 0;
};

struct ScriptResult {
  bool accept = false;
  /** One of: "" (accepted), "csv", "stack", "num", "malformed", "ctv",
   *  "false", "op". Stable strings; chain-sim maps them onto submit errors. */
  std::string reason;

  static ScriptResult Accepted() { return {true, ""}; }
  static ScriptResult Rejected(std::string why) { return {false, std::move(why)}; }
};

/** Evaluate a locking script against a context. Never throws on malformed
 *  witness data — hostile inputs must map to clean rejections. */
ScriptResult EvalScript(const Script& script, const ExecContext& ctx);

/** Template hash: commits to version, locktime, input count, the hash of all
 *  input sequences, output count, the hash of all outputs, and the executing
 *  input index. Input outpoints and witnesses are deliberately excluded, so
 *  the hash of a planned template equals the hash of the eventual spend. */
Hash256 CtvHash(const Transaction& tx, size_t input_index);

/** Standalone template check used by OP_CHECKTEMPLATEVERIFY. */
ScriptResult EvalCtv(const Hash256& commitment, const ExecContext& ctx);

}  // namespace vaultlab

#endif  // VAULTLAB_INTERPRETER_H
