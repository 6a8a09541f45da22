// Copyright (c) 2026 The vaultlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef VAULTLAB_CTV_PLAN_H
#define VAULTLAB_CTV_PLAN_H

#include <vector>

#include <vaultlab/keys.h>
#include <vaultlab/script.h>
#include <vaultlab/transaction.h>

namespace vaultlab {

/** Covenant plan for the template-hash mechanism. Instead of pre-signing with
 *  keys that are later deleted, each output's script commits to the hash of
 *  the transaction allowed to spend it. Template hashes exclude input
 *  outpoints and witnesses, so templates are built bottom-up with placeholder
 *  outpoints and instantiated against real outpoints at broadcast time.
 *
 *  Every stage carries two templates: the bare one and a variant with one
 *  extra input slot, so a fee-contributing input can be attached later.
 *  A salt output (zero value, unspendable data carrier) decorrelates the
 *  hashes of otherwise identical plans. */
struct CtvPlan {
  Hash256 salt{};
  Amount amount = 0;             // value held by the vault output
  Amount vault_fee = 0;          // embedded fee of the deposit->vault hop
  int timelock = 0;

  Script deposit_script;         // OP_IF <H(vault)> OP_ELSE <H(vault+fee-slot)> OP_ENDIF OP_CTV
  Amount deposit_amount = 0;     // amount + vault_fee

  Transaction vault_tx;          // template, 1 input
  Transaction vault_tx_fee;      // template, 2 inputs (second is the fee slot)
  Script vault_script;           // timelocked multisig arm + template-hash arm
  Hash256 vault_hash{};          // template hash of vault_tx
  Hash256 vault_fee_hash{};      // template hash of vault_tx_fee

  Transaction p2rw_tx;           // template, 1 input, pays the recovery multisig
  Transaction p2rw_tx_fee;       // template, 2 inputs
  Script recovery_script;
  Hash256 p2rw_hash{};
  Hash256 p2rw_fee_hash{};
};

/** Build the full plan for one deposit. `active`/`recovery` describe the
 *  destination multisigs; the deposit output must carry amount + vault_fee. */
CtvPlan BuildCtvPlan(Amount amount, Amount vault_fee, int timelock,
                     int active_threshold, const std::vector<PubKey>& active_keys,
                     int recovery_threshold, const std::vector<PubKey>& recovery_keys,
                     const Hash256& salt);

/** Witness items selecting a template arm of the deposit script. */
WitnessStack CtvDepositWitness(bool fee_variant);

/** Witness items selecting a template arm of the vault script's second
 *  branch (the recovery push). */
WitnessStack CtvRecoveryWitness(bool fee_variant);

/** Copy a template and point its covenant input at a real outpoint. The
 *  template hash is unaffected because outpoints are not committed. */
Transaction InstantiateTemplate(const Transaction& tmpl, const OutPoint& covenant_outpoint);

}  // namespace vaultlab

#endif  // VAULTLAB_CTV_PLAN_H
