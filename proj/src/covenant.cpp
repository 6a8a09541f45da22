// Copyright (c) 2026 The vaultlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <vaultlab/covenant.h>

#include <stdexcept>

#include <vaultlab/sighash.h>

namespace vaultlab {

std::string MechanismName(Mechanism mechanism) {
  return mechanism == Mechanism::DeletedKey ? "deleted-key" : "ctv";
}

std::optional<Mechanism> MechanismFromName(const std::string& name) {
  if (name == "deleted-key") return Mechanism::DeletedKey;
  if (name == "ctv") return Mechanism::Ctv;
  return std::nullopt;
}

Script VaultScript(int timelock, int active_threshold, const std::vector<PubKey>& active_keys,
                   int vault_threshold, const std::vector<PubKey>& vault_keys) {
  if (timelock < 1) throw std::invalid_argument("vault script: timelock must be positive");
  Script script;
  script.Add(Opcode::OP_IF);
  script.PushInt(timelock);
  script.Add(Opcode::OP_CHECKSEQUENCEVERIFY);
  script.Add(Opcode::OP_DROP);
  const Script active = MultisigScript(active_threshold, active_keys);
  script.ops.insert(script.ops.end(), active.ops.begin(), active.ops.end());
  script.Add(Opcode::OP_ELSE);
  const Script vault = MultisigScript(vault_threshold, vault_keys);
  script.ops.insert(script.ops.end(), vault.ops.begin(), vault.ops.end());
  script.Add(Opcode::OP_ENDIF);
  return script;
}

WitnessStack MultisigWitness(const std::vector<Signature>& sigs, std::optional<bool> branch) {
  WitnessStack stack;
  for (const Signature& sig : sigs) stack.push_back(sig.Serialize());
  if (branch.has_value()) {
    if (*branch) {
      stack.push_back({0x01});
    } else {
      stack.push_back({});  // empty item selects the OP_ELSE arm
    }
  }
  return stack;
}

WitnessStack SignMultisigInput(const Transaction& tx, size_t input_index, const Script& spent_script,
                               Amount spent_amount, const std::vector<KeyPair>& signers,
                               SighashMode mode, std::optional<bool> branch) {
  const Hash256 digest = SighashDigest(tx, input_index, mode, spent_script, spent_amount);
  std::vector<Signature> sigs;
  sigs.reserve(signers.size());
  for (const KeyPair& key : signers) sigs.push_back(key.Sign(digest, mode));
  return MultisigWitness(sigs, branch);
}

VaultTemplate BuildVaultTx(const OutPoint& deposit_outpoint, Amount deposit_amount, int timelock,
                           int active_threshold, const std::vector<PubKey>& active_keys,
                           int vault_threshold, const std::vector<PubKey>& vault_keys, Amount fee) {
  if (fee < 0 || fee >= deposit_amount) throw std::invalid_argument("vault tx: fee out of range");
  VaultTemplate tmpl;
  tmpl.deposit_outpoint = deposit_outpoint;
  tmpl.deposit_amount = deposit_amount;
  tmpl.timelock = timelock;
  tmpl.vault_script = VaultScript(timelock, active_threshold, active_keys, vault_threshold, vault_keys);
  tmpl.vault_amount = deposit_amount - fee;
  tmpl.tx.inputs.push_back(TxInput{deposit_outpoint, 0});
  tmpl.tx.outputs.push_back(TxOutput{tmpl.vault_amount, tmpl.vault_script});
  return tmpl;
}

Transaction BuildP2rwTx(const Txid& vault_txid, Amount vault_amount,
                        int recovery_threshold, const std::vector<PubKey>& recovery_keys) {
  Transaction tx;
  tx.inputs.push_back(TxInput{OutPoint{vault_txid, 0}, 0});
  tx.outputs.push_back(TxOutput{vault_amount, MultisigScript(recovery_threshold, recovery_keys)});
  return tx;
}

Transaction BuildRevaultTx(const Txid& vault_txid, Amount vault_amount,
                           const Script& next_deposit_script, Amount fee) {
  if (fee < 0 || fee >= vault_amount) throw std::invalid_argument("re-vault tx: fee out of range");
  Transaction tx;
  tx.inputs.push_back(TxInput{OutPoint{vault_txid, 0}, 0});
  tx.outputs.push_back(TxOutput{vault_amount - fee, next_deposit_script});
  return tx;
}

size_t AppendFeeInput(Transaction& tx, const OutPoint& fee_outpoint) {
  // Witness slots for existing inputs must already be present so the new
  // input's slot lines up with its index.
  while (tx.witnesses.size() < tx.inputs.size()) tx.witnesses.emplace_back();
  tx.inputs.push_back(TxInput{fee_outpoint, 0});
  tx.witnesses.emplace_back();
  return tx.inputs.size() - 1;
}

}  // namespace vaultlab
