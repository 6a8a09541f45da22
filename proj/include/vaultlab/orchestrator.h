// Copyright (c) 2026 The vaultlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef VAULTLAB_ORCHESTRATOR_H
#define VAULTLAB_ORCHESTRATOR_H

#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <vaultlab/chain.h>
#include <vaultlab/config.h>
#include <vaultlab/covenant.h>
#include <vaultlab/ctv_plan.h>
#include <vaultlab/fleet.h>
#include <vaultlab/rng.h>
#include <vaultlab/watchtower.h>

namespace vaultlab {

/** One audited step of an operational process. */
struct TraceStep {
  int index = 0;
  std::string actor;   // interface | owner | active-0 | vault-2 | watchtower-1 | ...
  std::string action;
  std::string result;  // ok | refused | error detail
};

struct ProcessTrace {
  std::string process;
  std::vector<TraceStep> steps;
  bool completed = false;
  std::string abort_reason;

  void Step(const std::string& actor, const std::string& action, const std::string& result = "ok") {
    steps.push_back(TraceStep{static_cast<int>(steps.size()), actor, action, result});
  }
};

/** Canonical action labels the trace auditor keys on. */
inline constexpr const char* kActionGenerateEphemeral = "generate ephemeral key set";
inline constexpr const char* kActionSignCovenant = "sign covenant templates";
inline constexpr const char* kActionVerifyPair = "verify covenant pair";
inline constexpr const char* kActionStorePair = "store covenant pair";
inline constexpr const char* kActionDeleteKey = "delete ephemeral key";
inline constexpr const char* kActionRegisterWatch = "register covenant watch";
inline constexpr const char* kActionBroadcastDeposit = "broadcast deposit";

/** Ordering violations inside a vaulting trace, e.g. a deposit broadcast
 *  before the ephemeral keys were deleted. Returns human-readable findings. */
std::vector<std::string> AuditVaultingTrace(const ProcessTrace& trace, int vault_count,
                                            int vault_threshold);

/** True if any step's actor starts with `actor_prefix`. */
bool TraceTouchesActor(const ProcessTrace& trace, const std::string& actor_prefix);

struct HealthEntry {
  std::string component;
  bool ok = false;
  std::string detail;
};

struct HealthReport {
  std::vector<HealthEntry> entries;
  bool AllOk() const;
};

/** Per-deposit state: the pre-signed tree (or template plan), where the funds
 *  currently sit, and bookkeeping the owner keeps off-device. */
struct PairState {
  size_t index = 0;
  Amount amount = 0;  // vaulted amount at layer 1
  VaultPlan plan;
  std::optional<CtvPlan> ctv;
  std::vector<std::vector<std::string>> ephemeral_ids;  // [layer][device] key ids
  std::vector<int> layer_deletions;                     // distinct devices per layer
  std::vector<size_t> live_path;  // re-vault tier choices from the root (empty = layer 1)
  uint32_t recovery_address_index = 0;
  uint32_t unvault_address_index = 0;
  bool deposit_confirmed = false;
  bool unvault_broadcast = false;
  Txid broadcast_vault_txid{};  // realized vault txid once un-vaulted
  bool completed = false;       // spent to the active wallet
  bool recovered = false;       // pushed to the recovery wallet
  bool frozen = false;
};

/** Drives the custody protocol end to end on top of the chain simulator:
 *  setup, vaulting, un-vaulting, recovery, re-vaulting, device rotation and
 *  health checks, with every step traced. Adversarial moves live in the
 *  threat engine, which manipulates the exposed chain/fleet/watchtowers. */
class Simulation {
 public:
  explicit Simulation(const ScenarioConfig& config);

  // Embedded fee schedule of pre-signed transactions (sats, not feerates).
  static constexpr Amount kVaultFee = 100;   // deposit -> vault hop
  static constexpr Amount kTxFee = 100;      // ordinary owner transactions
  static constexpr Amount kRevaultFeeStep = 100;  // tier i embeds (tiers - i) * step
  /** Recovery addresses are precomputed for this many indices at setup, so
   *  replacing a recovery device never requires touching the others. */
  static constexpr uint32_t kRecoveryWindow = 16;

  ProcessTrace& RunSetup();
  /** Faucet: fee wallet plus one exact deposit-sized coin per partition. */
  ProcessTrace& FundWallets();
  /** Receive an external payment to a fresh address, optionally with the
   *  displayed address tampered by malware (caught unless both verification
   *  channels of the receiving device are compromised). */
  ProcessTrace& RunExternalPayment(Amount amount, bool tampered);
  ProcessTrace& RunVaulting();
  /** Vault one partition; exposed for re-vault flows after rotation. */
  ProcessTrace& RunVaultingPartition(size_t pair_index, const OutPoint& coin, Amount coin_value,
                                     uint32_t recovery_address_index);

  ProcessTrace& RunUnvaultBroadcast(size_t pair);
  ProcessTrace& RunUnvaultComplete(size_t pair);
  ProcessTrace& RunUnvault(size_t pair);

  /** Push pairs to the recovery wallet (broadcasting the vault transaction
   *  first if the funds are still at rest). */
  ProcessTrace& RunRecovery(const std::vector<size_t>& pair_indices, const std::string& reason);
  /** Owner-initiated re-vault of one pair through a stored fee tier. */
  ProcessTrace& RunRevault(size_t pair, size_t tier);
  ProcessTrace& RunDeviceRotation(WalletRole role, int device_index);
  ProcessTrace& RunHealthCheck();

  // Owner-side reactions used by scenario scripts.
  void OwnerSalvageRecoveryOutputs(int64_t feerate);
  void FreezePair(size_t pair);
  void StandDownResponders();
  void ReRegisterAfterRevault(size_t pair);
  void OwnerAbortUnvault(size_t pair) { Pair(pair).unvault_broadcast = false; }

  /** Deliver the public feed to every live node; responders may act. */
  void PumpWatchtowers();
  void MineAndPump(int blocks = 1);

  // Classification registries.
  void RegisterAttackerScript(const Script& script);
  void RegisterOwnerScript(const Script& script);
  bool IsAttackerScript(const Script& script) const;
  bool IsOwnerScript(const Script& script) const;

  /** Tally every chain UTXO into owner / attacker / frozen buckets. Throws if
   *  any non-zero UTXO is unattributable. */
  struct Tally {
    Amount attacker = 0;
    Amount owner = 0;
    Amount frozen = 0;
    Amount fees = 0;
    Amount funded = 0;
  };
  Tally TallyFunds() const;

  // Exposed internals for the threat engine, tests and reports.
  Chain& chain() { return m_chain; }
  const Chain& chain() const { return m_chain; }
  Fleet& fleet() { return m_fleet; }
  const Fleet& fleet() const { return m_fleet; }
  std::vector<WatchtowerNode>& nodes() { return m_nodes; }
  std::vector<PairState>& pairs() { return m_pairs; }
  const std::vector<PairState>& pairs() const { return m_pairs; }
  PairState& Pair(size_t index) { return m_pairs.at(index); }
  const ScenarioConfig& config() const { return m_config; }
  Rng& rng() { return m_rng; }
  const std::vector<ProcessTrace>& traces() const { return m_traces; }
  const std::vector<Alert>& AlertLog() const { return m_alert_log; }
  const std::vector<Alert>& Inbox() const { return m_inbox; }
  bool HasAlert(const std::string& kind) const;
  const HealthReport& LastHealth() const { return m_last_health; }
  int StorageDeviceCount() const;  // min(avt_storage, vault_count)

  /** Resolve the live (possibly re-vaulted) node of a pair. */
  VaultNode& LiveNode(PairState& pair);
  const VaultNode& LiveNode(const PairState& pair) const;

  /** The pair's current resting UTXO (deposit or vault output), if any. */
  std::optional<std::pair<OutPoint, Amount>> RestingOutpoint(const PairState& pair) const;

  /** Total of partitions currently un-vaulted but not yet finished. */
  Amount FundsInFlight() const;

  Script ActiveAddress(uint32_t index);
  Script RecoveryAddress(uint32_t index);
  Script FeeAddress(uint32_t index);

  /** Collect threshold signatures from a wallet's devices over one input.
   *  Devices that are failed are skipped; throws if fewer than `threshold`
   *  can sign. */
  WitnessStack SignWalletInput(WalletRole role, int threshold, uint32_t address_index,
                               const Transaction& tx, size_t input_index,
                               const Script& spent_script, Amount spent_amount, SighashMode mode,
                               std::optional<bool> branch);

  /** Append a fee-wallet input to an ANYONECANPAY-signed transaction if a fee
   *  coin is available; returns true when attached. */
  bool AttachFeeInput(Transaction& tx);

  /** Point an existing fee-slot input at a live fee coin and sign it; returns
   *  false (leaving the transaction untouched) when no fee coin remains. Used
   *  directly by template transactions whose input count is committed. */
  bool FillFeeSlot(Transaction& tx, size_t fee_index);

 private:
  /** Which wallet formed a script, under which address index, with which
   *  device roster (in script key order). Keyed by serialized script. */
  struct AddressInfo {
    WalletRole role = WalletRole::Active;
    uint32_t index = 0;
    std::vector<int> roster;
  };

  ProcessTrace& NewTrace(const std::string& process);
  void RegisterPairWithWatchtowers(PairState& pair, ProcessTrace& trace);
  void AuthorizeWithWatchtowers(const Txid& txid, ProcessTrace& trace);
  void BuildDeletedKeyTree(PairState& pair, ProcessTrace& trace, const OutPoint& coin);
  void BuildCtvPair(PairState& pair, ProcessTrace& trace, const OutPoint& coin);
  VaultNode BuildTreeNode(PairState& pair, int layer, const OutPoint& deposit_outpoint,
                          Amount deposit_amount);
  void SignAndStoreTree(PairState& pair, ProcessTrace& trace);
  void CollectTreeTransactions(PairState& pair, VaultNode& node, int layer,
                               std::vector<std::tuple<Transaction*, Script, Amount, SighashMode,
                                                      std::optional<bool>, int>>& out);
  void StoreTreeBundle(PairState& pair, int device, const std::vector<Transaction>& bundle);
  Amount RevaultFee(size_t tier) const;

  ScenarioConfig m_config;
  Rng m_rng;
  Chain m_chain;
  Fleet m_fleet;
  std::vector<WatchtowerNode> m_nodes;
  std::vector<PairState> m_pairs;
  std::vector<ProcessTrace> m_traces;
  std::vector<Alert> m_alert_log;
  std::vector<Alert> m_inbox;
  HealthReport m_last_health;

  // Owner-side wallet bookkeeping (the "interface" view).
  std::vector<std::pair<OutPoint, Amount>> m_active_coins;    // spendable active UTXOs
  std::vector<uint32_t> m_active_coin_address;                // parallel: address index
  std::vector<std::pair<OutPoint, Amount>> m_fee_coins;
  std::set<std::string> m_owner_scripts;    // serialized script hex
  std::set<std::string> m_attacker_scripts;
  std::set<std::string> m_recovery_scripts;  // subset of owner scripts: recovery addresses
  std::map<std::string, AddressInfo> m_address_info;
  std::vector<std::vector<PubKey>> m_cached_recovery_pubkeys;  // per address index, from setup
  std::vector<int> m_active_roster;   // devices forming new active addresses
  std::vector<int> m_recovery_roster;
  std::vector<int> m_vault_roster;    // devices used for new vaultings
  uint32_t m_next_active_index = 0;
  uint32_t m_next_recovery_index = 0;
  int m_last_unvault_height = -1 << 20;
  int m_health_nonce = 0;
};

}  // namespace vaultlab

#endif  // VAULTLAB_ORCHESTRATOR_H
