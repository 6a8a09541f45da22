// Copyright (c) 2026 The vaultlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef VAULTLAB_COVENANT_H
#define VAULTLAB_COVENANT_H

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <vaultlab/keys.h>
#include <vaultlab/script.h>
#include <vaultlab/transaction.h>

namespace vaultlab {

enum class Mechanism : uint8_t {
  DeletedKey,  // pre-signed covenant, ephemeral keys destroyed
  Ctv,         // output commits to the template hash of the next transaction
};

std::string MechanismName(Mechanism mechanism);
std::optional<Mechanism> MechanismFromName(const std::string& name);

/** Locking script of a vault output. The first branch releases funds to the
 *  active wallet after `timelock` blocks; the second releases them
 *  immediately to whoever satisfies the ephemeral multisig (in practice only
 *  the pre-signed recovery-push and re-vault transactions, because the keys
 *  are deleted).
 *
 *    OP_IF <timelock> OP_CSV OP_DROP <j> <active keys...> <k> OP_CHECKMULTISIG
 *    OP_ELSE <p> <ephemeral keys...> <t> OP_CHECKMULTISIG OP_ENDIF
 */
Script VaultScript(int timelock, int active_threshold, const std::vector<PubKey>& active_keys,
                   int vault_threshold, const std::vector<PubKey>& vault_keys);

/** Append a branch selector to multisig witness items: true selects the
 *  OP_IF arm, false the OP_ELSE arm, nullopt emits a bare multisig witness. */
WitnessStack MultisigWitness(const std::vector<Signature>& sigs, std::optional<bool> branch);

/** Collect threshold signatures over one input and assemble its witness.
 *  Signers must be listed in locking-script key order. */
WitnessStack SignMultisigInput(const Transaction& tx, size_t input_index, const Script& spent_script,
                               Amount spent_amount, const std::vector<KeyPair>& signers,
                               SighashMode mode, std::optional<bool> branch);

/** Vault transaction template: spends the deposit output into a vault output
 *  carrying the full deposited amount minus an embedded fee. */
struct VaultTemplate {
  Transaction tx;  // unsigned
  OutPoint deposit_outpoint;
  Amount deposit_amount = 0;
  Script vault_script;
  Amount vault_amount = 0;
  int timelock = 0;
};

VaultTemplate BuildVaultTx(const OutPoint& deposit_outpoint, Amount deposit_amount, int timelock,
                           int active_threshold, const std::vector<PubKey>& active_keys,
                           int vault_threshold, const std::vector<PubKey>& vault_keys, Amount fee);

/** Recovery-push template: spends the vault output (index 0 of the vault
 *  transaction, asserted) into the recovery multisig for the full amount.
 *  Its single covenant input is meant to be signed ALL|ANYONECANPAY so fee
 *  inputs can be appended later without invalidating it. */
Transaction BuildP2rwTx(const Txid& vault_txid, Amount vault_amount,
                        int recovery_threshold, const std::vector<PubKey>& recovery_keys);

/** Re-vault template: spends the vault output into the deposit script of the
 *  next layer, embedding `fee`. Signed SIGHASH_ALL; fee flexibility comes
 *  from pre-signing several fee tiers. */
Transaction BuildRevaultTx(const Txid& vault_txid, Amount vault_amount,
                           const Script& next_deposit_script, Amount fee);

/** Append a fee input to a transaction whose existing witnesses were signed
 *  ANYONECANPAY. The fee input's full value is spent as fees (outputs are
 *  covenant-fixed, so no change can be added). Returns the new input index. */
size_t AppendFeeInput(Transaction& tx, const OutPoint& fee_outpoint);

/** One fully signed covenant pair plus its activation bookkeeping. The pair
 *  only becomes Active once the deposit confirmed and enough distinct devices
 *  reported deletion of their ephemeral key that no signing quorum survives. */
enum class Activation { Pending, Active };

struct CovenantPair {
  Transaction avt;   // signed vault transaction
  Transaction p2rw;  // signed recovery-push
  Txid vault_txid{};
  OutPoint deposit_outpoint;
  Script vault_script;
  Script recovery_script;
  Amount amount = 0;
  int timelock = 0;
  int deletions = 0;
  int deletions_required = 0;  // vault_count - vault_threshold + 1
  bool deposit_confirmed = false;

  Activation State() const {
    return (deposit_confirmed && deletions >= deletions_required) ? Activation::Active
                                                                  : Activation::Pending;
  }
};

/** Node of the pre-signed transaction tree for one deposit. Every re-vault
 *  fee tier owns its own child node, because the child vault transaction
 *  spends that specific re-vault output. */
struct VaultNode {
  CovenantPair pair;
  std::vector<Transaction> revault_txs;      // parallel to children
  std::vector<Amount> revault_fees;          // embedded fee per tier
  std::vector<VaultNode> children;           // next-layer tree per tier
};

struct VaultPlan {
  Mechanism mechanism = Mechanism::DeletedKey;
  Transaction deposit_tx;  // signed at broadcast time; txid is witness-independent
  OutPoint deposit_outpoint;
  Script deposit_script;
  Amount amount = 0;
  VaultNode root;
};

}  // namespace vaultlab

#endif  // VAULTLAB_COVENANT_H
