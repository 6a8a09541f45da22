// Copyright (c) 2026 The vaultlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <vaultlab/ctv_plan.h>

#include <stdexcept>

#include <vaultlab/interpreter.h>

namespace vaultlab {

namespace {

TxOutput SaltOutput(const Hash256& salt) { return TxOutput{0, DataCarrierScript(salt)}; }

Transaction TemplateTx(const TxOutput& main_output, const Hash256& salt, bool fee_slot) {
  Transaction tx;
  tx.inputs.push_back(TxInput{OutPoint{}, 0});
  if (fee_slot) tx.inputs.push_back(TxInput{OutPoint{Hash256{}, 1}, 0});
  tx.outputs.push_back(main_output);
  tx.outputs.push_back(SaltOutput(salt));
  return tx;
}

Script TemplatePairScript(const Hash256& bare_hash, const Hash256& fee_hash) {
  Script script;
  script.Add(Opcode::OP_IF);
  script.Push(bare_hash);
  script.Add(Opcode::OP_ELSE);
  script.Push(fee_hash);
  script.Add(Opcode::OP_ENDIF);
  script.Add(Opcode::OP_CHECKTEMPLATEVERIFY);
  return script;
}

}  // namespace

CtvPlan BuildCtvPlan(Amount amount, Amount vault_fee, int timelock,
                     int active_threshold, const std::vector<PubKey>& active_keys,
                     int recovery_threshold, const std::vector<PubKey>& recovery_keys,
                     const Hash256& salt) {
  if (amount <= 0 || vault_fee < 0) throw std::invalid_argument("ctv plan: bad amounts");
  CtvPlan plan;
  plan.salt = salt;
  plan.amount = amount;
  plan.vault_fee = vault_fee;
  plan.timelock = timelock;
  plan.deposit_amount = amount + vault_fee;

  // Bottom-up: recovery push first, then the vault output that commits to it,
  // then the deposit script that commits to the vault transaction.
  plan.recovery_script = MultisigScript(recovery_threshold, recovery_keys);
  plan.p2rw_tx = TemplateTx(TxOutput{amount, plan.recovery_script}, salt, /*fee_slot=*/false);
  plan.p2rw_tx_fee = TemplateTx(TxOutput{amount, plan.recovery_script}, salt, /*fee_slot=*/true);
  plan.p2rw_hash = CtvHash(plan.p2rw_tx, 0);
  plan.p2rw_fee_hash = CtvHash(plan.p2rw_tx_fee, 0);

  Script vault_script;
  vault_script.Add(Opcode::OP_IF);
  vault_script.PushInt(timelock);
  vault_script.Add(Opcode::OP_CHECKSEQUENCEVERIFY);
  vault_script.Add(Opcode::OP_DROP);
  const Script active = MultisigScript(active_threshold, active_keys);
  vault_script.ops.insert(vault_script.ops.end(), active.ops.begin(), active.ops.end());
  vault_script.Add(Opcode::OP_ELSE);
  const Script recovery_arm = TemplatePairScript(plan.p2rw_hash, plan.p2rw_fee_hash);
  vault_script.ops.insert(vault_script.ops.end(), recovery_arm.ops.begin(), recovery_arm.ops.end());
  vault_script.Add(Opcode::OP_ENDIF);
  plan.vault_script = vault_script;

  plan.vault_tx = TemplateTx(TxOutput{amount, plan.vault_script}, salt, /*fee_slot=*/false);
  plan.vault_tx_fee = TemplateTx(TxOutput{amount, plan.vault_script}, salt, /*fee_slot=*/true);
  plan.vault_hash = CtvHash(plan.vault_tx, 0);
  plan.vault_fee_hash = CtvHash(plan.vault_tx_fee, 0);

  plan.deposit_script = TemplatePairScript(plan.vault_hash, plan.vault_fee_hash);
  return plan;
}

WitnessStack CtvDepositWitness(bool fee_variant) {
  if (fee_variant) return {{}};
  return {{0x01}};
}

WitnessStack CtvRecoveryWitness(bool fee_variant) {
  // Bottom item feeds the inner template selector, top item picks the outer
  // OP_ELSE arm.
  if (fee_variant) return {{}, {}};
  return {{0x01}, {}};
}

Transaction InstantiateTemplate(const Transaction& tmpl, const OutPoint& covenant_outpoint) {
  Transaction tx = tmpl;
  tx.inputs.at(0).prevout = covenant_outpoint;
  return tx;
}

}  // namespace vaultlab
