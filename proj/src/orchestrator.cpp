// Copyright (c) 2026 The vaultlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <vaultlab/orchestrator.h>

#include <algorithm>
#include <functional>
#include <map>
#include <stdexcept>
#include <tuple>

#include <vaultlab/hex.h>
#include <vaultlab/serialize.h>
#include <vaultlab/sighash.h>

namespace vaultlab {

namespace {

std::string PairTag(size_t pair_index) { return "p" + std::to_string(pair_index); }

/** Blob label of one covenant tree node: layer section first so theft of a
 *  single layer's storage can be modeled as a prefix leak. */
std::string NodeLabel(size_t pair_index, const std::vector<size_t>& path) {
  std::string label = "L" + std::to_string(path.size()) + "/" + PairTag(pair_index);
  for (size_t tier : path) label += "/t" + std::to_string(tier);
  return label;
}

std::string ScriptKey(const Script& script) { return HexStr(SerializeScript(script)); }

const ScenarioConfig& Validated(const ScenarioConfig& config) {
  if (auto bad = config.Validate()) {
    throw std::invalid_argument("invalid configuration field: " + *bad);
  }
  return config;
}

}  // namespace

bool HealthReport::AllOk() const {
  for (const HealthEntry& entry : entries) {
    if (!entry.ok) return false;
  }
  return true;
}

std::vector<std::string> AuditVaultingTrace(const ProcessTrace& trace, int vault_count,
                                            int vault_threshold) {
  std::vector<std::string> findings;
  const int required_deletions = vault_count - vault_threshold + 1;
  int broadcast_step = -1;
  std::set<std::string> deleting_actors_before_broadcast;
  int verifications = 0;
  for (const TraceStep& step : trace.steps) {
    const bool is_delete = step.action.rfind(kActionDeleteKey, 0) == 0;
    const bool is_broadcast = step.action.rfind(kActionBroadcastDeposit, 0) == 0;
    if (is_broadcast && broadcast_step < 0) broadcast_step = step.index;
    if (is_delete && broadcast_step < 0) deleting_actors_before_broadcast.insert(step.actor);
    if (step.action.rfind(kActionVerifyPair, 0) == 0) ++verifications;
  }
  if (broadcast_step < 0) {
    findings.push_back("deposit was never broadcast");
    return findings;
  }
  if (static_cast<int>(deleting_actors_before_broadcast.size()) < required_deletions) {
    findings.push_back("deposit broadcast after deletions on only " +
                       std::to_string(deleting_actors_before_broadcast.size()) +
                       " devices (need " + std::to_string(required_deletions) +
                       " before funds move)");
  }
  if (verifications == 0) findings.push_back("no device verified the covenant pair");
  return findings;
}

bool TraceTouchesActor(const ProcessTrace& trace, const std::string& actor_prefix) {
  for (const TraceStep& step : trace.steps) {
    if (step.actor.rfind(actor_prefix, 0) == 0) return true;
  }
  return false;
}

Simulation::Simulation(const ScenarioConfig& config)
    : m_config(Validated(config)),
      m_rng(Rng(config.seed).Child("simulation")),
      m_chain(config.feerates.bribe),
      m_fleet(config.topology, Rng(config.seed).Child("fleet")) {
  for (int i = 0; i < m_config.topology.active_count; ++i) m_active_roster.push_back(i);
  for (int i = 0; i < m_config.topology.recovery_count; ++i) m_recovery_roster.push_back(i);
  for (int i = 0; i < m_config.topology.vault_count; ++i) m_vault_roster.push_back(i);
}

ProcessTrace& Simulation::NewTrace(const std::string& process) {
  m_traces.push_back(ProcessTrace{process, {}, false, ""});
  return m_traces.back();
}

int Simulation::StorageDeviceCount() const {
  return std::min(m_config.topology.avt_storage, m_config.topology.vault_count);
}

Script Simulation::ActiveAddress(uint32_t index) {
  const auto pubkeys = m_fleet.AddressPubKeysFor(WalletRole::Active, m_active_roster, index);
  const Script script = MultisigScript(m_config.topology.active_threshold, pubkeys);
  RegisterOwnerScript(script);
  m_address_info[ScriptKey(script)] = AddressInfo{WalletRole::Active, index, m_active_roster};
  return script;
}

Script Simulation::RecoveryAddress(uint32_t index) {
  Script script;
  if (index < m_cached_recovery_pubkeys.size()) {
    // Formed purely from pubkeys cached at setup: no recovery-device access.
    script = MultisigScript(m_config.topology.recovery_threshold, m_cached_recovery_pubkeys[index]);
  } else {
    const auto pubkeys = m_fleet.AddressPubKeysFor(WalletRole::Recovery, m_recovery_roster, index);
    script = MultisigScript(m_config.topology.recovery_threshold, pubkeys);
  }
  RegisterOwnerScript(script);
  m_recovery_scripts.insert(ScriptKey(script));
  m_address_info[ScriptKey(script)] = AddressInfo{WalletRole::Recovery, index, m_recovery_roster};
  return script;
}

Script Simulation::FeeAddress(uint32_t index) {
  std::vector<int> roster;
  for (int i = 0; i < m_fleet.DeviceCount(WalletRole::Fee); ++i) roster.push_back(i);
  const auto pubkeys = m_fleet.AddressPubKeysFor(WalletRole::Fee, roster, index);
  const Script script = MultisigScript(m_config.topology.fee_threshold, pubkeys);
  RegisterOwnerScript(script);
  m_address_info[ScriptKey(script)] = AddressInfo{WalletRole::Fee, index, roster};
  return script;
}

void Simulation::RegisterAttackerScript(const Script& script) {
  m_attacker_scripts.insert(ScriptKey(script));
}

void Simulation::RegisterOwnerScript(const Script& script) {
  m_owner_scripts.insert(ScriptKey(script));
}

bool Simulation::IsAttackerScript(const Script& script) const {
  return m_attacker_scripts.count(ScriptKey(script)) > 0;
}

bool Simulation::IsOwnerScript(const Script& script) const {
  return m_owner_scripts.count(ScriptKey(script)) > 0;
}

bool Simulation::HasAlert(const std::string& kind) const {
  for (const Alert& alert : m_inbox) {
    if (alert.kind == kind) return true;
  }
  return false;
}

void Simulation::PumpWatchtowers() {
  // Node order is fixed; each node drains the feed to its end, possibly
  // submitting responses the next node then sees. Repeat until quiescent.
  bool progressed = true;
  while (progressed) {
    progressed = false;
    for (WatchtowerNode& node : m_nodes) {
      const std::vector<Alert> alerts = node.Observe(m_chain);
      if (!alerts.empty()) progressed = true;
      for (const Alert& alert : alerts) {
        m_alert_log.push_back(alert);
        if (alert.delivered) m_inbox.push_back(alert);
      }
    }
  }
}

void Simulation::MineAndPump(int blocks) {
  for (int i = 0; i < blocks; ++i) {
    m_chain.MineBlock();
    PumpWatchtowers();
  }
}

ProcessTrace& Simulation::RunSetup() {
  ProcessTrace& trace = NewTrace("setup");
  const WalletTopology& topo = m_config.topology;
  trace.Step("interface", "provision devices: active x" + std::to_string(topo.active_count) +
                              ", recovery x" + std::to_string(topo.recovery_count) + ", vault x" +
                              std::to_string(topo.vault_count) + ", fee x" +
                              std::to_string(topo.fee_count));
  trace.Step("owner", "establish in-band and out-of-band verification channels");

  // Hierarchical trees for the persistent wallets; vault keys stay ephemeral.
  for (int i = 0; i < topo.active_count; ++i) {
    m_fleet.DeriveWalletKey(WalletRole::Active, i, 0);
    trace.Step("active-" + std::to_string(i), "derive wallet key tree");
  }
  for (int i = 0; i < topo.recovery_count; ++i) {
    m_fleet.DeriveWalletKey(WalletRole::Recovery, i, 0);
    trace.Step("recovery-" + std::to_string(i), "derive wallet key tree");
  }
  for (int i = 0; i < topo.fee_count; ++i) {
    m_fleet.DeriveWalletKey(WalletRole::Fee, i, 0);
    trace.Step("fee-" + std::to_string(i), "derive wallet key tree");
  }

  // Cache recovery pubkeys for a window of future addresses so later address
  // construction (including rotation) never touches the retired devices.
  m_cached_recovery_pubkeys.clear();
  for (uint32_t index = 0; index < kRecoveryWindow; ++index) {
    m_cached_recovery_pubkeys.push_back(
        m_fleet.AddressPubKeysFor(WalletRole::Recovery, m_recovery_roster, index));
  }
  trace.Step("interface", "cache recovery pubkey window (" + std::to_string(kRecoveryWindow) +
                              " addresses)");

  ActiveAddress(m_next_active_index);
  RecoveryAddress(m_next_recovery_index);
  FeeAddress(0);
  for (int i = 0; i < topo.active_count; ++i) {
    const bool ok = m_fleet.HumanCheck(WalletRole::Active, i, /*payload_tampered=*/false);
    trace.Step("active-" + std::to_string(i), "verify exchanged address set over both channels",
               ok ? "ok" : "mismatch");
    if (!ok) {
      trace.abort_reason = "address set verification failed";
      return trace;
    }
  }

  WatchtowerPolicy policy;
  policy.variant = m_config.watchtower.variant;
  policy.rate_cap_count = m_config.watchtower.rate_cap_count;
  policy.rate_cap_window = m_config.watchtower.rate_cap_window;
  policy.response_feerate = m_config.RecoveryFeerate();
  for (int i = 0; i < topo.watchtowers; ++i) {
    m_nodes.emplace_back(i, policy);
    trace.Step("watchtower-" + std::to_string(i), "initialize node");
  }
  for (int node : m_config.options.kill_nodes) {
    m_nodes.at(static_cast<size_t>(node)).Fail();
    trace.Step("watchtower-" + std::to_string(node), "node offline", "failed");
  }
  trace.completed = true;
  return trace;
}

ProcessTrace& Simulation::FundWallets() {
  ProcessTrace& trace = NewTrace("funding");
  if (m_config.funds.fee_wallet > 0) {
    const Script fee_script = FeeAddress(0);
    const Amount quarter = m_config.funds.fee_wallet / 4;
    for (int i = 0; i < 4; ++i) {
      Amount value = quarter;
      if (i == 0) value = m_config.funds.fee_wallet - 3 * quarter;
      if (value <= 0) continue;
      const OutPoint coin = m_chain.Fund(value, fee_script);
      m_fee_coins.emplace_back(coin, value);
    }
    trace.Step("owner", "fund fee wallet with " + std::to_string(m_config.funds.fee_wallet));
  }
  for (size_t i = 0; i < m_config.funds.partitions.size(); ++i) {
    const Amount partition = m_config.funds.partitions[i];
    const Amount coin_value = partition + kVaultFee + kTxFee;
    const uint32_t address_index = m_next_active_index++;
    const Script script = ActiveAddress(address_index);
    const OutPoint coin = m_chain.Fund(coin_value, script);
    m_active_coins.emplace_back(coin, coin_value);
    m_active_coin_address.push_back(address_index);
    trace.Step("owner", "receive partition " + std::to_string(i) + " funds (" +
                            std::to_string(partition) + " plus fee reserve)");
  }
  trace.completed = true;
  return trace;
}

ProcessTrace& Simulation::RunExternalPayment(Amount amount, bool tampered) {
  ProcessTrace& trace = NewTrace("external-payment");
  const uint32_t address_index = m_next_active_index++;
  const Script script = ActiveAddress(address_index);
  trace.Step("interface", "derive fresh receiving address");
  const bool accepted = m_fleet.HumanCheck(WalletRole::Active, 0, tampered);
  if (!accepted) {
    trace.Step("active-0", "verify displayed address over both channels", "mismatch");
    trace.abort_reason = "address verification failed; payment not released";
    return trace;
  }
  trace.Step("active-0", "verify displayed address over both channels", "ok");
  if (tampered) {
    // Both verification channels were compromised: the displayed (and
    // "verified") address is the adversary's. The payer funds it.
    const Hash256 hijack_secret = m_rng.Child("hijacked-address").NextHash();
    const PubKey hijack_pub = KeyPair::FromSecret(hijack_secret).GetPubKey();
    m_fleet.Adversary().secrets["attacker/hijacked-address"] = hijack_secret;
    m_fleet.Adversary().any_data_seen = true;
    const Script hijacked = MultisigScript(1, {hijack_pub});
    RegisterAttackerScript(hijacked);
    m_chain.Fund(amount, hijacked);
    trace.Step("owner", "payer settles invoice", "address had been substituted");
    trace.completed = true;
    return trace;
  }
  const OutPoint coin = m_chain.Fund(amount, script);
  m_active_coins.emplace_back(coin, amount);
  m_active_coin_address.push_back(address_index);
  trace.Step("owner", "payer settles invoice");
  trace.completed = true;
  return trace;
}

Amount Simulation::RevaultFee(size_t tier) const {
  return static_cast<Amount>(m_config.revault_fee_tiers - static_cast<int>(tier)) * kRevaultFeeStep;
}

VaultNode Simulation::BuildTreeNode(PairState& pair, int layer, const OutPoint& deposit_outpoint,
                                    Amount deposit_amount) {
  const WalletTopology& topo = m_config.topology;
  std::vector<PubKey> vault_keys;
  for (const std::string& key_id : pair.ephemeral_ids[static_cast<size_t>(layer)]) {
    vault_keys.push_back(m_fleet.EphemeralPubKey(key_id));
  }
  const auto active_keys =
      m_fleet.AddressPubKeysFor(WalletRole::Active, m_active_roster, pair.unvault_address_index);

  VaultNode node;
  VaultTemplate tmpl =
      BuildVaultTx(deposit_outpoint, deposit_amount, topo.timelock, topo.active_threshold,
                   active_keys, topo.vault_threshold, vault_keys, kVaultFee);
  node.pair.avt = tmpl.tx;
  node.pair.vault_txid = ComputeTxid(tmpl.tx);
  node.pair.deposit_outpoint = deposit_outpoint;
  node.pair.vault_script = tmpl.vault_script;
  node.pair.amount = tmpl.vault_amount;
  node.pair.timelock = topo.timelock;
  node.pair.deletions_required = topo.vault_count - topo.vault_threshold + 1;
  RegisterOwnerScript(tmpl.vault_script);

  node.pair.recovery_script = RecoveryAddress(pair.recovery_address_index);
  node.pair.p2rw = BuildP2rwTx(node.pair.vault_txid, node.pair.amount, topo.recovery_threshold,
                               pair.recovery_address_index < m_cached_recovery_pubkeys.size()
                                   ? m_cached_recovery_pubkeys[pair.recovery_address_index]
                                   : m_fleet.AddressPubKeysFor(WalletRole::Recovery,
                                                               m_recovery_roster,
                                                               pair.recovery_address_index));
  // The recovery push must consume the vault output, nothing else.
  if (!(node.pair.p2rw.inputs.at(0).prevout == OutPoint{node.pair.vault_txid, 0})) {
    throw std::logic_error("recovery push does not spend the vault output");
  }

  if (layer + 1 < m_config.revault_layers) {
    std::vector<PubKey> next_keys;
    for (const std::string& key_id : pair.ephemeral_ids[static_cast<size_t>(layer) + 1]) {
      next_keys.push_back(m_fleet.EphemeralPubKey(key_id));
    }
    const Script next_deposit = MultisigScript(topo.vault_threshold, next_keys);
    RegisterOwnerScript(next_deposit);
    for (int tier = 0; tier < m_config.revault_fee_tiers; ++tier) {
      const Amount fee = RevaultFee(static_cast<size_t>(tier));
      Transaction revault =
          BuildRevaultTx(node.pair.vault_txid, node.pair.amount, next_deposit, fee);
      const Txid revault_txid = ComputeTxid(revault);
      node.revault_txs.push_back(revault);
      node.revault_fees.push_back(fee);
      node.children.push_back(
          BuildTreeNode(pair, layer + 1, OutPoint{revault_txid, 0}, node.pair.amount - fee));
    }
  }
  return node;
}

void Simulation::CollectTreeTransactions(
    PairState& pair, VaultNode& node, int layer,
    std::vector<std::tuple<Transaction*, Script, Amount, SighashMode, std::optional<bool>, int>>&
        out) {
  // The vault transaction spends a bare multisig (the deposit script); the
  // recovery push and re-vault transactions spend the vault script's second
  // branch. Only the recovery push is ANYONECANPAY (fee inputs may be
  // appended later); re-vault fees are covenant-fixed per tier.
  Script deposit_script;
  if (layer == 0) {
    deposit_script = pair.plan.deposit_script;
  } else {
    std::vector<PubKey> keys;
    for (const std::string& key_id : pair.ephemeral_ids[static_cast<size_t>(layer)]) {
      keys.push_back(m_fleet.EphemeralPubKey(key_id));
    }
    deposit_script = MultisigScript(m_config.topology.vault_threshold, keys);
  }
  const Amount deposit_amount = node.pair.amount + kVaultFee;
  out.emplace_back(&node.pair.avt, deposit_script, deposit_amount, SighashMode::All, std::nullopt,
                   layer);
  out.emplace_back(&node.pair.p2rw, node.pair.vault_script, node.pair.amount,
                   SighashMode::AllAnyoneCanPay, std::make_optional(false), layer);
  for (size_t tier = 0; tier < node.revault_txs.size(); ++tier) {
    out.emplace_back(&node.revault_txs[tier], node.pair.vault_script, node.pair.amount,
                     SighashMode::All, std::make_optional(false), layer);
    CollectTreeTransactions(pair, node.children[tier], layer + 1, out);
  }
}

void Simulation::StoreTreeBundle(PairState& pair, int device,
                                 const std::vector<Transaction>& bundle) {
  // The bundle is in CollectTreeTransactions order; rebuild the same order of
  // storage labels by walking the tree the same way.
  std::vector<std::string> labels;
  std::vector<size_t> path;
  const std::function<void(const VaultNode&)> walk = [&](const VaultNode& node) {
    const std::string base = NodeLabel(pair.index, path);
    labels.push_back(base + "/avt");
    labels.push_back(base + "/p2rw");
    for (size_t tier = 0; tier < node.revault_txs.size(); ++tier) {
      labels.push_back(base + "/rv" + std::to_string(tier));
      path.push_back(tier);
      walk(node.children[tier]);
      path.pop_back();
    }
  };
  walk(pair.plan.root);
  if (labels.size() != bundle.size()) throw std::logic_error("covenant bundle label mismatch");
  for (size_t i = 0; i < labels.size(); ++i) {
    m_fleet.StoreBlob(WalletRole::Vault, device, labels[i], SerializeTxWithWitness(bundle[i]));
  }
}

void Simulation::SignAndStoreTree(PairState& pair, ProcessTrace& trace) {
  const WalletTopology& topo = m_config.topology;
  const int threshold = topo.vault_threshold;
  const int count = topo.vault_count;
  const int storage_devices = StorageDeviceCount();

  std::vector<std::tuple<Transaction*, Script, Amount, SighashMode, std::optional<bool>, int>> txs;
  CollectTreeTransactions(pair, pair.plan.root, 0, txs);

  // Early signatures from threshold-1 devices. Each finisher then applies the
  // final signature itself, yielding a complete copy (witnesses differ across
  // finishers, txids do not). The first finisher's copy circulates back to
  // the early signers for storage; only then does anyone delete keys.
  std::map<const Transaction*, std::vector<std::pair<int, Signature>>> early_sigs;
  for (int position = 0; position < threshold - 1; ++position) {
    const int device = m_vault_roster[static_cast<size_t>(position)];
    for (auto& [tx, spent_script, spent_amount, mode, branch, layer] : txs) {
      const Hash256 digest = SighashDigest(*tx, 0, mode, spent_script, spent_amount);
      const std::string& key_id =
          pair.ephemeral_ids[static_cast<size_t>(layer)][static_cast<size_t>(position)];
      early_sigs[tx].emplace_back(
          position, m_fleet.SignWithDevice(WalletRole::Vault, device, key_id, digest, mode));
    }
    trace.Step("vault-" + std::to_string(device), kActionSignCovenant);
  }

  std::vector<Transaction> canonical;  // first finisher's complete copies, in txs order

  const auto finish_bundle = [&](int position) {
    std::vector<Transaction> bundle;
    bundle.reserve(txs.size());
    const int device = m_vault_roster[static_cast<size_t>(position)];
    for (auto& [tx, spent_script, spent_amount, mode, branch, layer] : txs) {
      const Hash256 digest = SighashDigest(*tx, 0, mode, spent_script, spent_amount);
      const std::string& key_id =
          pair.ephemeral_ids[static_cast<size_t>(layer)][static_cast<size_t>(position)];
      std::vector<std::pair<int, Signature>> sigs = early_sigs[tx];
      sigs.emplace_back(position,
                        m_fleet.SignWithDevice(WalletRole::Vault, device, key_id, digest, mode));
      std::sort(sigs.begin(), sigs.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      std::vector<Signature> ordered;
      ordered.reserve(sigs.size());
      for (auto& [pos, sig] : sigs) ordered.push_back(sig);
      Transaction complete = *tx;
      complete.witnesses = {MultisigWitness(ordered, branch)};
      bundle.push_back(std::move(complete));
    }
    return bundle;
  };

  const auto verify_store_delete = [&](int position, const std::vector<Transaction>& bundle) {
    const int device = m_vault_roster[static_cast<size_t>(position)];
    const std::string actor = "vault-" + std::to_string(device);
    trace.Step(actor, kActionVerifyPair,
               m_fleet.HumanCheck(WalletRole::Vault, device, false) ? "ok" : "mismatch");
    if (position < storage_devices) {
      StoreTreeBundle(pair, device, bundle);
      trace.Step(actor, kActionStorePair);
    }
    for (int layer = 0; layer < m_config.revault_layers; ++layer) {
      const std::string& key_id =
          pair.ephemeral_ids[static_cast<size_t>(layer)][static_cast<size_t>(position)];
      m_fleet.DeleteKey(device, key_id);
      pair.layer_deletions[static_cast<size_t>(layer)]++;
      trace.Step(actor, std::string(kActionDeleteKey) + " " + key_id);
    }
    trace.Step(actor, "notify owner of storage and deletion");
  };

  for (int position = threshold - 1; position < count; ++position) {
    std::vector<Transaction> bundle = finish_bundle(position);
    if (canonical.empty()) {
      canonical = bundle;
      // Keep the canonical completed witnesses in the in-memory plan.
      for (size_t i = 0; i < txs.size(); ++i) {
        std::get<0>(txs[i])->witnesses = canonical[i].witnesses;
      }
    }
    verify_store_delete(position, bundle);
  }
  for (int position = 0; position < threshold - 1; ++position) {
    verify_store_delete(position, canonical);
  }
}

ProcessTrace& Simulation::RunVaulting() {
  if (m_active_coins.size() < m_config.funds.partitions.size()) {
    throw std::logic_error("funding must precede vaulting");
  }
  ProcessTrace* last = nullptr;
  const size_t partitions = m_config.funds.partitions.size();
  for (size_t i = 0; i < partitions; ++i) {
    // Always vault the front coin: RunVaultingPartition erases it.
    const auto [coin, value] = m_active_coins.front();
    last = &RunVaultingPartition(m_pairs.size(), coin, value, static_cast<uint32_t>(i));
  }
  return *last;
}

ProcessTrace& Simulation::RunVaultingPartition(size_t pair_index, const OutPoint& coin,
                                               Amount coin_value,
                                               uint32_t recovery_address_index) {
  ProcessTrace& trace = NewTrace("vaulting-" + PairTag(pair_index));
  if (m_next_recovery_index <= recovery_address_index) {
    m_next_recovery_index = recovery_address_index + 1;
  }
  if (pair_index != m_pairs.size()) throw std::logic_error("pairs must be vaulted in order");
  m_pairs.push_back(PairState{});
  PairState& pair = m_pairs.back();
  pair.index = pair_index;
  pair.amount = coin_value - kVaultFee - kTxFee;
  pair.recovery_address_index = recovery_address_index;
  pair.unvault_address_index = m_next_active_index++;
  pair.layer_deletions.assign(static_cast<size_t>(m_config.revault_layers), 0);
  ActiveAddress(pair.unvault_address_index);

  if (m_config.mechanism == Mechanism::Ctv) {
    BuildCtvPair(pair, trace, coin);
  } else {
    BuildDeletedKeyTree(pair, trace, coin);
  }
  if (!trace.abort_reason.empty()) return trace;

  RegisterPairWithWatchtowers(pair, trace);

  // Endorse and broadcast the deposit only now: the covenant is in place and
  // (for the deleted-key mechanism) no signing quorum of ephemeral keys
  // survives, so the deposited funds cannot be diverted anymore.
  const size_t coin_slot = [&] {
    for (size_t i = 0; i < m_active_coins.size(); ++i) {
      if (m_active_coins[i].first == coin) return i;
    }
    throw std::logic_error("vaulting an unknown coin");
  }();
  const uint32_t coin_address = m_active_coin_address[coin_slot];
  m_active_coins.erase(m_active_coins.begin() + static_cast<long>(coin_slot));
  m_active_coin_address.erase(m_active_coin_address.begin() + static_cast<long>(coin_slot));

  Transaction& deposit = pair.plan.deposit_tx;
  deposit.witnesses = {SignWalletInput(WalletRole::Active, m_config.topology.active_threshold,
                                       coin_address, deposit, 0, ActiveAddress(coin_address),
                                       coin_value, SighashMode::All, std::nullopt)};
  for (int i = 0; i < m_config.topology.active_threshold; ++i) {
    const int device = m_active_roster[static_cast<size_t>(i)];
    trace.Step("active-" + std::to_string(device),
               "endorse deposit after verifying target address",
               m_fleet.HumanCheck(WalletRole::Active, device, false) ? "ok" : "mismatch");
  }
  const SubmitResult result = m_chain.Submit(deposit, m_config.feerates.owner, Visibility::Public);
  trace.Step("interface", kActionBroadcastDeposit, result.accepted ? "ok" : result.reason);
  if (!result.accepted) {
    trace.abort_reason = "deposit rejected: " + result.reason;
    return trace;
  }
  MineAndPump(1);
  pair.deposit_confirmed = true;
  const bool active = m_config.mechanism == Mechanism::Ctv ||
                      pair.layer_deletions[0] >= m_config.topology.vault_count -
                                                     m_config.topology.vault_threshold + 1;
  trace.Step("owner", "covenant state check", active ? "active" : "pending");
  if (!active) {
    trace.abort_reason = "covenant failed to activate";
    return trace;
  }
  trace.completed = true;
  return trace;
}

void Simulation::BuildDeletedKeyTree(PairState& pair, ProcessTrace& trace, const OutPoint& coin) {
  const WalletTopology& topo = m_config.topology;
  for (int layer = 0; layer < m_config.revault_layers; ++layer) {
    std::vector<std::string> ids;
    for (size_t position = 0; position < m_vault_roster.size(); ++position) {
      const int device = m_vault_roster[position];
      ids.push_back(
          m_fleet.GenEphemeralKey(device, PairTag(pair.index) + "/L" + std::to_string(layer)));
    }
    pair.ephemeral_ids.push_back(std::move(ids));
    trace.Step("vault-wallet",
               std::string(kActionGenerateEphemeral) + " layer " + std::to_string(layer));
  }

  std::vector<PubKey> deposit_keys;
  for (const std::string& key_id : pair.ephemeral_ids[0]) {
    deposit_keys.push_back(m_fleet.EphemeralPubKey(key_id));
  }
  pair.plan.mechanism = Mechanism::DeletedKey;
  pair.plan.deposit_script = MultisigScript(topo.vault_threshold, deposit_keys);
  RegisterOwnerScript(pair.plan.deposit_script);
  trace.Step("interface", "construct deposit address from the ephemeral key set");

  pair.plan.amount = pair.amount;
  pair.plan.deposit_tx.inputs.push_back(TxInput{coin, 0});
  pair.plan.deposit_tx.outputs.push_back(
      TxOutput{pair.amount + kVaultFee, pair.plan.deposit_script});
  pair.plan.deposit_outpoint = OutPoint{ComputeTxid(pair.plan.deposit_tx), 0};
  trace.Step("interface", "assemble deposit transaction (txid fixed before endorsement)");

  pair.plan.root = BuildTreeNode(pair, 0, pair.plan.deposit_outpoint, pair.amount + kVaultFee);
  trace.Step("interface", "assemble covenant pair templates (layers=" +
                              std::to_string(m_config.revault_layers) + ")");

  SignAndStoreTree(pair, trace);
}

void Simulation::BuildCtvPair(PairState& pair, ProcessTrace& trace, const OutPoint& coin) {
  const WalletTopology& topo = m_config.topology;
  const Hash256 salt = m_rng.Child("plan-salt/" + PairTag(pair.index)).NextHash();
  trace.Step("interface", "derive plan entropy salt");

  const auto active_keys =
      m_fleet.AddressPubKeysFor(WalletRole::Active, m_active_roster, pair.unvault_address_index);
  const Script recovery_script = RecoveryAddress(pair.recovery_address_index);
  const auto recovery_keys = pair.recovery_address_index < m_cached_recovery_pubkeys.size()
                                 ? m_cached_recovery_pubkeys[pair.recovery_address_index]
                                 : m_fleet.AddressPubKeysFor(WalletRole::Recovery,
                                                             m_recovery_roster,
                                                             pair.recovery_address_index);
  CtvPlan plan = BuildCtvPlan(pair.amount, kVaultFee, topo.timelock, topo.active_threshold,
                              active_keys, topo.recovery_threshold, recovery_keys, salt);
  RegisterOwnerScript(plan.deposit_script);
  RegisterOwnerScript(plan.vault_script);
  for (const TxOutput& out : plan.vault_tx.outputs) RegisterOwnerScript(out.script);
  for (const TxOutput& out : plan.p2rw_tx.outputs) RegisterOwnerScript(out.script);
  trace.Step("interface", "assemble template plan committing each hop by hash");

  pair.plan.mechanism = Mechanism::Ctv;
  pair.plan.amount = pair.amount;
  pair.plan.deposit_script = plan.deposit_script;
  pair.plan.deposit_tx.inputs.push_back(TxInput{coin, 0});
  pair.plan.deposit_tx.outputs.push_back(TxOutput{plan.deposit_amount, plan.deposit_script});
  pair.plan.deposit_outpoint = OutPoint{ComputeTxid(pair.plan.deposit_tx), 0};

  // The realized vault transaction: the bare template pointed at the deposit.
  Transaction vault_tx = InstantiateTemplate(plan.vault_tx, pair.plan.deposit_outpoint);
  vault_tx.witnesses = {CtvDepositWitness(false)};
  pair.plan.root.pair.avt = vault_tx;
  pair.plan.root.pair.vault_txid = ComputeTxid(vault_tx);
  pair.plan.root.pair.deposit_outpoint = pair.plan.deposit_outpoint;
  pair.plan.root.pair.vault_script = plan.vault_script;
  pair.plan.root.pair.recovery_script = recovery_script;
  pair.plan.root.pair.amount = plan.amount;
  pair.plan.root.pair.timelock = topo.timelock;
  pair.plan.root.pair.deletions_required = 0;

  Transaction p2rw =
      InstantiateTemplate(plan.p2rw_tx, OutPoint{pair.plan.root.pair.vault_txid, 0});
  p2rw.witnesses = {CtvRecoveryWitness(false)};
  pair.plan.root.pair.p2rw = p2rw;
  pair.ctv = std::move(plan);

  const std::string base = NodeLabel(pair.index, {});
  for (int position = 0; position < StorageDeviceCount(); ++position) {
    const int device = m_vault_roster[static_cast<size_t>(position)];
    const std::string actor = "vault-" + std::to_string(device);
    m_fleet.StoreBlob(WalletRole::Vault, device, base + "/avt",
                      SerializeTxWithWitness(pair.plan.root.pair.avt));
    m_fleet.StoreBlob(WalletRole::Vault, device, base + "/avt-fee",
                      SerializeTxWithWitness(pair.ctv->vault_tx_fee));
    m_fleet.StoreBlob(WalletRole::Vault, device, base + "/p2rw",
                      SerializeTxWithWitness(pair.plan.root.pair.p2rw));
    m_fleet.StoreBlob(WalletRole::Vault, device, base + "/p2rw-fee",
                      SerializeTxWithWitness(pair.ctv->p2rw_tx_fee));
    trace.Step(actor, kActionStorePair);
  }
}

void Simulation::RegisterPairWithWatchtowers(PairState& pair, ProcessTrace& trace) {
  const VaultNode& node = LiveNode(pair);
  WatchRequest request;
  request.vault_txid = node.pair.vault_txid;
  request.deposit_outpoint = node.pair.deposit_outpoint;
  request.amount = node.pair.amount;
  request.vault_script = node.pair.vault_script;
  request.recovery_script = node.pair.recovery_script;
  request.instantiate_response = m_config.mechanism == Mechanism::Ctv;

  const int holders =
      std::min<int>(m_config.topology.p2rw_storage, static_cast<int>(m_nodes.size()));
  for (WatchtowerNode& watchtower : m_nodes) {
    WatchRequest node_request = request;
    if (watchtower.Id() < holders) {
      node_request.response_p2rw = node.pair.p2rw;
      // Re-vault responses are preferred where a deeper layer exists; tier 0
      // (highest embedded fee) first.
      node_request.response_revaults = node.revault_txs;
    }
    const bool registered = watchtower.Register(node_request, /*authenticated=*/true);
    trace.Step("watchtower-" + std::to_string(watchtower.Id()), kActionRegisterWatch,
               registered ? "ok" : "unreachable");
    if (registered && watchtower.IsCompromised()) {
      // Stored responses leak the moment they reach a hostile node.
      const std::string prefix =
          "watchtower-" + std::to_string(watchtower.Id()) + "/" + PairTag(pair.index);
      if (node_request.response_p2rw) {
        m_fleet.Adversary().blobs[prefix + "/p2rw"] =
            SerializeTxWithWitness(*node_request.response_p2rw);
      }
      for (size_t tier = 0; tier < node_request.response_revaults.size(); ++tier) {
        m_fleet.Adversary().blobs[prefix + "/rv" + std::to_string(tier)] =
            SerializeTxWithWitness(node_request.response_revaults[tier]);
      }
      m_fleet.Adversary().any_data_seen = true;
    }
  }
}

void Simulation::AuthorizeWithWatchtowers(const Txid& txid, ProcessTrace& trace) {
  for (WatchtowerNode& node : m_nodes) {
    const bool ok = node.Authorize(txid, /*authenticated=*/true);
    trace.Step("watchtower-" + std::to_string(node.Id()), "record owner authorization",
               ok ? "ok" : "unreachable");
  }
}

VaultNode& Simulation::LiveNode(PairState& pair) {
  VaultNode* node = &pair.plan.root;
  for (size_t tier : pair.live_path) node = &node->children.at(tier);
  return *node;
}

const VaultNode& Simulation::LiveNode(const PairState& pair) const {
  const VaultNode* node = &pair.plan.root;
  for (size_t tier : pair.live_path) node = &node->children.at(tier);
  return *node;
}

std::optional<std::pair<OutPoint, Amount>> Simulation::RestingOutpoint(
    const PairState& pair) const {
  const VaultNode& node = LiveNode(pair);
  if (const auto deposit = m_chain.GetUtxo(node.pair.deposit_outpoint)) {
    return std::make_pair(node.pair.deposit_outpoint, deposit->amount);
  }
  const OutPoint vault_out{
      pair.unvault_broadcast ? pair.broadcast_vault_txid : node.pair.vault_txid, 0};
  if (const auto vault = m_chain.GetUtxo(vault_out)) {
    return std::make_pair(vault_out, vault->amount);
  }
  return std::nullopt;
}

Amount Simulation::FundsInFlight() const {
  Amount total = 0;
  for (const PairState& pair : m_pairs) {
    if (pair.unvault_broadcast && !pair.completed && !pair.recovered) total += pair.amount;
  }
  return total;
}

WitnessStack Simulation::SignWalletInput(WalletRole role, int threshold, uint32_t address_index,
                                         const Transaction& tx, size_t input_index,
                                         const Script& spent_script, Amount spent_amount,
                                         SighashMode mode, std::optional<bool> branch) {
  const auto info_it = m_address_info.find(ScriptKey(spent_script));
  std::vector<int> roster;
  if (info_it != m_address_info.end()) {
    roster = info_it->second.roster;
  } else {
    for (int i = 0; i < m_fleet.DeviceCount(role); ++i) roster.push_back(i);
  }
  const Hash256 digest = SighashDigest(tx, input_index, mode, spent_script, spent_amount);
  std::vector<Signature> sigs;
  for (int device : roster) {
    if (static_cast<int>(sigs.size()) == threshold) break;
    if (m_fleet.Device(role, device).failed) continue;
    // Derivation is idempotent; replacement devices materialize the key for
    // this address index on demand.
    m_fleet.DeriveWalletKey(role, device, address_index);
    const std::string key_id = m_fleet.Device(role, device).name + "/m/vault custody/" +
                               RoleName(role) + "/" + std::to_string(address_index);
    sigs.push_back(m_fleet.SignWithDevice(role, device, key_id, digest, mode));
  }
  if (static_cast<int>(sigs.size()) < threshold) {
    throw DeviceFailedError("insufficient live devices to sign for " + RoleName(role));
  }
  return MultisigWitness(sigs, branch);
}

bool Simulation::FillFeeSlot(Transaction& tx, size_t fee_index) {
  while (!m_fee_coins.empty() && !m_chain.IsUnspent(m_fee_coins.front().first)) {
    m_fee_coins.erase(m_fee_coins.begin());  // swept or already consumed
  }
  if (m_fee_coins.empty()) return false;
  const auto [coin, value] = m_fee_coins.front();
  m_fee_coins.erase(m_fee_coins.begin());
  tx.inputs.at(fee_index).prevout = coin;
  if (tx.witnesses.size() < tx.inputs.size()) tx.witnesses.resize(tx.inputs.size());
  tx.witnesses[fee_index] =
      SignWalletInput(WalletRole::Fee, m_config.topology.fee_threshold, 0, tx, fee_index,
                      FeeAddress(0), value, SighashMode::All, std::nullopt);
  return true;
}

bool Simulation::AttachFeeInput(Transaction& tx) {
  while (!m_fee_coins.empty() && !m_chain.IsUnspent(m_fee_coins.front().first)) {
    m_fee_coins.erase(m_fee_coins.begin());  // swept or already consumed
  }
  if (m_fee_coins.empty()) return false;
  const size_t fee_index = AppendFeeInput(tx, m_fee_coins.front().first);
  return FillFeeSlot(tx, fee_index);
}

ProcessTrace& Simulation::RunUnvaultBroadcast(size_t pair_index) {
  ProcessTrace& trace = NewTrace("unvault-broadcast-" + PairTag(pair_index));
  PairState& pair = Pair(pair_index);
  if (pair.frozen) {
    trace.abort_reason = "pair is frozen by policy";
    return trace;
  }
  if (pair.completed || pair.recovered) {
    trace.abort_reason = "pair already settled";
    return trace;
  }
  if (FundsInFlight() + pair.amount > m_config.MaxFundsInFlight()) {
    trace.Step("interface", "throttle check", "refused");
    trace.abort_reason = "throttle: funds in flight would exceed policy";
    return trace;
  }
  if (m_chain.GetHeight() - m_last_unvault_height < m_config.MinBlocksBetweenUnvaults()) {
    trace.Step("interface", "throttle check", "refused");
    trace.abort_reason = "throttle: spacing between un-vaults";
    return trace;
  }
  trace.Step("interface", "throttle check");

  const VaultNode& node = LiveNode(pair);
  const bool active =
      pair.deposit_confirmed &&
      (m_config.mechanism == Mechanism::Ctv ||
       pair.layer_deletions[pair.live_path.size()] >= node.pair.deletions_required);
  if (!active) {
    trace.abort_reason = "covenant not active";
    return trace;
  }

  // Fetch the stored vault transaction from redundant storage.
  const std::string base = NodeLabel(pair_index, pair.live_path);
  std::optional<std::vector<uint8_t>> bytes;
  for (int position = 0; position < StorageDeviceCount(); ++position) {
    const int device = m_vault_roster[static_cast<size_t>(position)];
    bytes = m_fleet.FetchBlob(WalletRole::Vault, device, base + "/avt");
    trace.Step("vault-" + std::to_string(device), "fetch stored vault transaction",
               bytes ? "ok" : "unavailable");
    if (bytes) break;
  }
  if (!bytes) {
    trace.abort_reason = "stored covenant unavailable on every device";
    return trace;
  }
  Transaction avt = DeserializeTx(*bytes, /*with_witness=*/true);
  if (m_config.mechanism == Mechanism::Ctv) {
    avt = InstantiateTemplate(avt, node.pair.deposit_outpoint);
  }
  const Txid vault_txid = ComputeTxid(avt);

  AuthorizeWithWatchtowers(vault_txid, trace);
  const SubmitResult result = m_chain.Submit(avt, m_config.feerates.owner, Visibility::Public);
  trace.Step("interface", "broadcast vault transaction", result.accepted ? "ok" : result.reason);
  if (!result.accepted) {
    trace.abort_reason = "vault transaction rejected: " + result.reason;
    return trace;
  }
  MineAndPump(1);
  if (!m_chain.GetConfirmations(vault_txid)) {
    trace.Step("owner", "inspect the chain for the vault transaction", "not confirmed");
    trace.abort_reason = "vault transaction was outbid by a conflicting spend";
    return trace;
  }
  pair.unvault_broadcast = true;
  pair.broadcast_vault_txid = vault_txid;
  m_last_unvault_height = m_chain.GetHeight();
  trace.Step("owner", "timelock countdown begins");
  trace.completed = true;
  return trace;
}

ProcessTrace& Simulation::RunUnvaultComplete(size_t pair_index) {
  ProcessTrace& trace = NewTrace("unvault-complete-" + PairTag(pair_index));
  PairState& pair = Pair(pair_index);
  if (!pair.unvault_broadcast) {
    trace.abort_reason = "no un-vault in flight";
    return trace;
  }
  const VaultNode& node = LiveNode(pair);
  const auto confirmations = m_chain.GetConfirmations(pair.broadcast_vault_txid);
  if (!confirmations || *confirmations < node.pair.timelock) {
    trace.abort_reason = "timelock not yet expired";
    return trace;
  }
  Transaction spend;
  spend.inputs.push_back(
      TxInput{OutPoint{pair.broadcast_vault_txid, 0}, static_cast<uint32_t>(node.pair.timelock)});
  const Script destination = ActiveAddress(pair.unvault_address_index);
  spend.outputs.push_back(TxOutput{node.pair.amount - kTxFee, destination});
  spend.witnesses = {SignWalletInput(WalletRole::Active, m_config.topology.active_threshold,
                                     pair.unvault_address_index, spend, 0, node.pair.vault_script,
                                     node.pair.amount, SighashMode::All, std::make_optional(true))};
  const Txid spend_txid = ComputeTxid(spend);
  AuthorizeWithWatchtowers(spend_txid, trace);
  const SubmitResult result = m_chain.Submit(spend, m_config.feerates.owner, Visibility::Public);
  trace.Step("interface", "broadcast timelocked spend to the active wallet",
             result.accepted ? "ok" : result.reason);
  if (!result.accepted) {
    trace.abort_reason = "spend rejected: " + result.reason;
    return trace;
  }
  MineAndPump(1);
  if (!m_chain.GetConfirmations(spend_txid)) {
    trace.Step("owner", "inspect the chain for the completing spend", "not confirmed");
    trace.abort_reason = "spend was outbid by a conflicting transaction";
    return trace;
  }
  pair.completed = true;
  pair.unvault_broadcast = false;
  m_active_coins.emplace_back(OutPoint{spend_txid, 0}, node.pair.amount - kTxFee);
  m_active_coin_address.push_back(pair.unvault_address_index);
  trace.completed = true;
  return trace;
}

ProcessTrace& Simulation::RunUnvault(size_t pair_index) {
  ProcessTrace& broadcast = RunUnvaultBroadcast(pair_index);
  if (!broadcast.completed) return broadcast;
  MineAndPump(m_config.topology.timelock - 1);
  return RunUnvaultComplete(pair_index);
}

ProcessTrace& Simulation::RunRecovery(const std::vector<size_t>& pair_indices,
                                      const std::string& reason) {
  ProcessTrace& trace = NewTrace("recovery");
  trace.Step("owner", "initiate recovery: " + reason);
  struct PendingPush {
    size_t pair_index;
    Txid txid;
    Script recovery_script;
  };
  std::vector<PendingPush> pushed;
  bool any = false;
  for (size_t pair_index : pair_indices) {
    PairState& pair = Pair(pair_index);
    if (pair.completed || pair.recovered) {
      trace.Step("owner", "pair " + PairTag(pair_index) + " already settled");
      continue;
    }
    const VaultNode& node = LiveNode(pair);
    Txid vault_txid = node.pair.vault_txid;
    if (!pair.unvault_broadcast) {
      const std::string base = NodeLabel(pair_index, pair.live_path);
      std::optional<std::vector<uint8_t>> bytes;
      for (int position = 0; position < StorageDeviceCount(); ++position) {
        const int device = m_vault_roster[static_cast<size_t>(position)];
        bytes = m_fleet.FetchBlob(WalletRole::Vault, device, base + "/avt");
        if (bytes) break;
      }
      if (!bytes) {
        trace.Step("interface", "fetch stored vault transaction", "unavailable");
        trace.abort_reason = "stored covenant unavailable";
        return trace;
      }
      Transaction avt = DeserializeTx(*bytes, /*with_witness=*/true);
      if (m_config.mechanism == Mechanism::Ctv) {
        avt = InstantiateTemplate(avt, node.pair.deposit_outpoint);
      }
      vault_txid = ComputeTxid(avt);
      AuthorizeWithWatchtowers(vault_txid, trace);
      const SubmitResult push =
          m_chain.Submit(avt, m_config.RecoveryFeerate(), Visibility::Public);
      trace.Step("interface", "broadcast vault transaction at the recovery feerate",
                 push.accepted ? "ok" : push.reason);
    } else {
      vault_txid = pair.broadcast_vault_txid;
    }

    // Recovery push: fetched from its designated holders.
    std::optional<Transaction> p2rw;
    const int holders =
        std::min<int>(m_config.topology.p2rw_storage, static_cast<int>(m_nodes.size()));
    for (int holder = 0; holder < holders; ++holder) {
      WatchtowerNode& watchtower = m_nodes[static_cast<size_t>(holder)];
      if (watchtower.IsFailed()) continue;
      const auto watch = watchtower.Watches().find(node.pair.vault_txid);
      if (watch == watchtower.Watches().end() || !watch->second.response_p2rw) continue;
      p2rw = watch->second.response_p2rw;
      trace.Step("watchtower-" + std::to_string(holder), "provide stored recovery push");
      break;
    }
    if (!p2rw && m_config.topology.p2rw_storage > static_cast<int>(m_nodes.size())) {
      // The interface itself is the last designated holder.
      p2rw = node.pair.p2rw;
      trace.Step("interface", "provide stored recovery push");
    }
    if (!p2rw) {
      trace.Step("owner", "pair " + PairTag(pair_index) + " recovery push unavailable", "lost");
      trace.abort_reason = "recovery push unavailable";
      return trace;
    }
    Transaction push_tx = *p2rw;
    bool fee_attached = false;
    if (m_config.mechanism == Mechanism::Ctv) {
      push_tx = InstantiateTemplate(push_tx, OutPoint{vault_txid, 0});
      // The bare push template commits to a single input, so a fee bump has to
      // go through the committed alternate with the dedicated fee slot.
      if (pair.ctv) {
        Transaction fee_variant =
            InstantiateTemplate(pair.ctv->p2rw_tx_fee, OutPoint{vault_txid, 0});
        fee_variant.witnesses = {CtvRecoveryWitness(/*fee_variant=*/true), {}};
        if (FillFeeSlot(fee_variant, 1)) {
          push_tx = std::move(fee_variant);
          fee_attached = true;
        }
      }
    } else {
      fee_attached = AttachFeeInput(push_tx);
    }
    if (fee_attached) {
      trace.Step("fee-wallet", "attach fee input to the recovery push");
    } else {
      trace.Step("fee-wallet", "attach fee input to the recovery push", "unavailable");
    }
    const Txid push_txid = ComputeTxid(push_tx);
    AuthorizeWithWatchtowers(push_txid, trace);
    const SubmitResult result =
        m_chain.Submit(push_tx, m_config.RecoveryFeerate(), Visibility::Public);
    trace.Step("interface", "broadcast recovery push", result.accepted ? "ok" : result.reason);
    pushed.push_back(PendingPush{pair_index, push_txid, node.pair.recovery_script});
    any = true;
  }
  if (any) MineAndPump(1);
  for (const PendingPush& push : pushed) {
    PairState& pair = Pair(push.pair_index);
    bool settled = m_chain.GetConfirmations(push.txid).has_value();
    if (!settled) {
      // Our own push may have lost to another holder's copy of the same
      // recovery transaction; the funds are safe either way if the recovery
      // output now exists on chain.
      const std::string wanted = ScriptKey(push.recovery_script);
      for (const auto& [outpoint, entry] : m_chain.UtxoSet()) {
        if (ScriptKey(entry.script) == wanted) {
          settled = true;
          break;
        }
      }
      trace.Step("owner", "verify recovery of pair " + PairTag(push.pair_index),
                 settled ? "recovered via another holder's copy" : "not confirmed");
    }
    pair.recovered = settled;
    if (settled) pair.unvault_broadcast = false;
  }
  if (reason.find("compromise") != std::string::npos) {
    trace.Step("owner", "instantiate replacement recovery wallet");
    trace.Step("owner", "previous recovery wallet assumes the active role");
  }
  trace.completed = true;
  return trace;
}

ProcessTrace& Simulation::RunRevault(size_t pair_index, size_t tier) {
  ProcessTrace& trace = NewTrace("revault-" + PairTag(pair_index));
  PairState& pair = Pair(pair_index);
  VaultNode& node = LiveNode(pair);
  if (node.children.empty()) {
    trace.abort_reason = "no deeper covenant layer exists";
    return trace;
  }
  if (tier >= node.revault_txs.size()) {
    trace.abort_reason = "no such fee tier";
    return trace;
  }
  const std::string base = NodeLabel(pair_index, pair.live_path);
  if (!pair.unvault_broadcast) {
    std::optional<std::vector<uint8_t>> bytes;
    for (int position = 0; position < StorageDeviceCount(); ++position) {
      const int device = m_vault_roster[static_cast<size_t>(position)];
      bytes = m_fleet.FetchBlob(WalletRole::Vault, device, base + "/avt");
      if (bytes) break;
    }
    if (!bytes) {
      trace.abort_reason = "stored covenant unavailable";
      return trace;
    }
    const Transaction avt = DeserializeTx(*bytes, /*with_witness=*/true);
    const Txid vault_txid = ComputeTxid(avt);
    AuthorizeWithWatchtowers(vault_txid, trace);
    const SubmitResult push = m_chain.Submit(avt, m_config.feerates.owner, Visibility::Public);
    trace.Step("interface", "broadcast vault transaction", push.accepted ? "ok" : push.reason);
    if (!push.accepted && push.reason != "duplicate") {
      trace.abort_reason = "vault transaction rejected: " + push.reason;
      return trace;
    }
  }
  std::optional<std::vector<uint8_t>> revault_bytes;
  for (int position = 0; position < StorageDeviceCount(); ++position) {
    const int device = m_vault_roster[static_cast<size_t>(position)];
    revault_bytes =
        m_fleet.FetchBlob(WalletRole::Vault, device, base + "/rv" + std::to_string(tier));
    if (revault_bytes) break;
  }
  if (!revault_bytes) {
    trace.abort_reason = "stored re-vault transaction unavailable";
    return trace;
  }
  const Transaction revault = DeserializeTx(*revault_bytes, /*with_witness=*/true);
  const Txid revault_txid = ComputeTxid(revault);
  AuthorizeWithWatchtowers(revault_txid, trace);
  const SubmitResult result = m_chain.Submit(revault, m_config.feerates.owner, Visibility::Public);
  trace.Step("interface", "broadcast re-vault transaction",
             result.accepted ? "ok" : result.reason);
  if (!result.accepted) {
    trace.abort_reason = "re-vault rejected: " + result.reason;
    return trace;
  }
  MineAndPump(1);
  if (!m_chain.GetConfirmations(revault_txid)) {
    trace.abort_reason = "re-vault was outbid by a conflicting transaction";
    return trace;
  }
  pair.live_path.push_back(tier);
  pair.unvault_broadcast = false;
  pair.broadcast_vault_txid = Txid{};
  trace.Step("owner", "funds re-vaulted one layer deeper");
  ReRegisterAfterRevault(pair_index);
  trace.Step("interface", "re-register the deeper covenant with watchtowers");
  trace.completed = true;
  return trace;
}

void Simulation::ReRegisterAfterRevault(size_t pair_index) {
  ProcessTrace& trace = NewTrace("watch-refresh-" + PairTag(pair_index));
  RegisterPairWithWatchtowers(Pair(pair_index), trace);
  trace.completed = true;
}

ProcessTrace& Simulation::RunDeviceRotation(WalletRole role, int device_index) {
  ProcessTrace& trace = NewTrace("device-rotation-" + RoleName(role));
  if (role == WalletRole::Fee) {
    trace.abort_reason = "fee devices are replaced by re-funding, not rotation";
    return trace;
  }
  const int replacement = m_fleet.ProvisionDevice(role);
  trace.Step("interface", "provision replacement device " + RoleName(role) + "-" +
                              std::to_string(replacement));
  std::vector<int>* roster = nullptr;
  switch (role) {
    case WalletRole::Active: roster = &m_active_roster; break;
    case WalletRole::Recovery: roster = &m_recovery_roster; break;
    case WalletRole::Vault: roster = &m_vault_roster; break;
    case WalletRole::Fee: break;
  }
  size_t replaced_position = roster->size();
  for (size_t i = 0; i < roster->size(); ++i) {
    if ((*roster)[i] == device_index) {
      (*roster)[i] = replacement;
      replaced_position = i;
    }
  }
  if (replaced_position == roster->size()) {
    trace.abort_reason = "device is not part of the current roster";
    return trace;
  }
  trace.Step("owner", "retire device " + RoleName(role) + "-" + std::to_string(device_index) +
                          " from the roster");

  if (role == WalletRole::Active) {
    ActiveAddress(m_next_active_index++);
    trace.Step("interface", "derive replacement address set");
    trace.Step("owner", "prefer spending retired addresses first");
    trace.completed = true;
    return trace;
  }
  if (role == WalletRole::Vault) {
    trace.Step("owner", "future vaultings use the replacement device");
    trace.completed = true;
    return trace;
  }

  // Recovery rotation: replacement addresses are assembled from the pubkey
  // window cached at setup plus the replacement device's own pubkeys. The
  // retired device, and every other pre-existing recovery device, is never
  // touched.
  for (uint32_t index = 0; index < m_cached_recovery_pubkeys.size(); ++index) {
    m_cached_recovery_pubkeys[index][replaced_position] =
        m_fleet.DeriveWalletKey(WalletRole::Recovery, replacement, index);
  }
  trace.Step("recovery-" + std::to_string(replacement),
             "publish replacement pubkeys for the cached address window");
  const uint32_t new_index = m_next_recovery_index++;
  RecoveryAddress(new_index);
  trace.Step("interface", "assemble replacement recovery address from cached pubkeys");

  // Rate-limited migration of every resting pair onto the new recovery set.
  for (size_t i = 0, original_pairs = m_pairs.size(); i < original_pairs; ++i) {
    if (Pair(i).completed || Pair(i).recovered || Pair(i).frozen) continue;
    trace.Step("owner", "migrate pair " + PairTag(i) + " to the replacement recovery set");
    MineAndPump(std::max(0, m_config.MinBlocksBetweenUnvaults()));
    const ProcessTrace& unvault = RunUnvault(i);
    if (!unvault.completed) {
      trace.Step("owner", "migration of pair " + PairTag(i) + " halted", unvault.abort_reason);
      continue;
    }
    const auto [coin, value] = m_active_coins.back();
    const ProcessTrace& vaulting = RunVaultingPartition(m_pairs.size(), coin, value, new_index);
    if (!vaulting.completed) {
      trace.Step("owner", "re-vault of pair " + PairTag(i) + " halted", vaulting.abort_reason);
      continue;
    }
  }
  trace.completed = true;
  return trace;
}

ProcessTrace& Simulation::RunHealthCheck() {
  ProcessTrace& trace = NewTrace("health-check");
  m_last_health.entries.clear();
  const auto reserves_probe = [&](WalletRole role, int threshold, const std::vector<int>& roster) {
    // Sign a transaction that can never be mined: it proves key liveness
    // without moving or risking any funds.
    Transaction probe;
    ByteWriter tag;
    tag.U64(static_cast<uint64_t>(m_health_nonce++));
    probe.inputs.push_back(TxInput{OutPoint{TaggedHash("vaultlab/absent", tag.Get()), 0}, 0});
    const Script address = role == WalletRole::Active ? ActiveAddress(0)
                           : role == WalletRole::Fee  ? FeeAddress(0)
                                                      : RecoveryAddress(0);
    probe.outputs.push_back(TxOutput{1, address});
    int live = 0;
    for (int device : roster) {
      const std::string actor = RoleName(role) + "-" + std::to_string(device);
      HealthEntry entry;
      entry.component = actor;
      if (m_fleet.Device(role, device).failed) {
        entry.ok = false;
        entry.detail = "unreachable";
      } else {
        m_fleet.DeriveWalletKey(role, device, 0);
        const Hash256 digest = SighashDigest(probe, 0, SighashMode::All, address, 1);
        const std::string key_id =
            m_fleet.Device(role, device).name + "/m/vault custody/" + RoleName(role) + "/0";
        const Signature sig =
            m_fleet.SignWithDevice(role, device, key_id, digest, SighashMode::All);
        entry.ok = VerifySignature(sig.pubkey, digest, sig);
        entry.detail = entry.ok ? "reserves provable" : "invalid signature";
        if (entry.ok) ++live;
      }
      trace.Step(actor, "prove key liveness", entry.ok ? "ok" : entry.detail);
      m_last_health.entries.push_back(entry);
    }
    if (live >= threshold) {
      probe.witnesses = {SignWalletInput(role, threshold, 0, probe, 0, address, 1,
                                         SighashMode::All, std::nullopt)};
      const SubmitResult result = m_chain.Submit(probe, 1, Visibility::Public);
      HealthEntry entry;
      entry.component = RoleName(role) + "-wallet";
      entry.ok = !result.accepted && result.reason == "missing-input";
      if (entry.ok) {
        entry.detail = "probe rejected as expected";
      } else if (result.accepted) {
        entry.detail = "probe unexpectedly accepted";
      } else {
        entry.detail = "probe rejected for the wrong reason: " + result.reason;
      }
      trace.Step("interface", "submit unmineable probe", entry.detail);
      m_last_health.entries.push_back(entry);
    }
  };
  reserves_probe(WalletRole::Active, m_config.topology.active_threshold, m_active_roster);
  reserves_probe(WalletRole::Recovery, m_config.topology.recovery_threshold, m_recovery_roster);
  {
    std::vector<int> fee_roster;
    for (int i = 0; i < m_fleet.DeviceCount(WalletRole::Fee); ++i) fee_roster.push_back(i);
    reserves_probe(WalletRole::Fee, m_config.topology.fee_threshold, fee_roster);
  }

  // Storage audit: every holder of a covenant blob answers a salted-hash
  // challenge; a corrupted or stale copy diverges from the quorum.
  for (const PairState& pair : m_pairs) {
    if (pair.completed || pair.recovered) continue;
    const std::string base = NodeLabel(pair.index, pair.live_path);
    for (const std::string suffix : {"/avt", "/p2rw"}) {
      ByteWriter nonce_writer;
      nonce_writer.U64(static_cast<uint64_t>(m_health_nonce++));
      const std::vector<uint8_t> nonce = nonce_writer.Get();
      std::map<std::string, std::vector<int>> responses;  // digest hex -> devices
      std::vector<int> unreachable;
      for (int position = 0; position < StorageDeviceCount(); ++position) {
        const int device = m_vault_roster[static_cast<size_t>(position)];
        const auto bytes = m_fleet.FetchBlob(WalletRole::Vault, device, base + suffix);
        if (!bytes) {
          unreachable.push_back(device);
          continue;
        }
        std::vector<uint8_t> challenge = *bytes;
        challenge.insert(challenge.end(), nonce.begin(), nonce.end());
        responses[HexStr(TaggedHash("vaultlab/storage-audit", challenge))].push_back(device);
      }
      const std::vector<int>* majority = nullptr;
      for (const auto& [digest, devices] : responses) {
        if (!majority || devices.size() > majority->size()) majority = &devices;
      }
      for (int position = 0; position < StorageDeviceCount(); ++position) {
        const int device = m_vault_roster[static_cast<size_t>(position)];
        HealthEntry entry;
        entry.component = "vault-" + std::to_string(device) + ":" + base + suffix;
        if (std::find(unreachable.begin(), unreachable.end(), device) != unreachable.end()) {
          entry.ok = false;
          entry.detail = "unreachable";
        } else if (majority &&
                   std::find(majority->begin(), majority->end(), device) != majority->end()) {
          entry.ok = true;
          entry.detail = "storage digest matches quorum";
        } else {
          entry.ok = false;
          entry.detail = "storage digest diverges";
        }
        trace.Step("vault-" + std::to_string(device),
                   "answer storage challenge " + base + suffix, entry.ok ? "ok" : entry.detail);
        m_last_health.entries.push_back(entry);
      }
    }
  }

  // Watchtower consistency: reachability, freshness, watch-set agreement.
  std::map<std::string, int> commitments;
  std::vector<ConsistencyReport> reports;
  for (const WatchtowerNode& node : m_nodes) {
    reports.push_back(node.Consistency());
    if (reports.back().reachable) commitments[HexStr(reports.back().watch_commitment)]++;
  }
  int best = 0;
  std::string majority_commitment;
  for (const auto& [digest, votes] : commitments) {
    if (votes > best) {
      best = votes;
      majority_commitment = digest;
    }
  }
  for (const ConsistencyReport& report : reports) {
    HealthEntry entry;
    entry.component = "watchtower-" + std::to_string(report.node_id);
    if (!report.reachable) {
      entry.ok = false;
      entry.detail = "unreachable";
    } else if (HexStr(report.watch_commitment) != majority_commitment) {
      entry.ok = false;
      entry.detail = "watch set diverges";
    } else if (report.last_seen_height < m_chain.GetHeight() - 2) {
      entry.ok = false;
      entry.detail = "stale view of the chain";
    } else {
      entry.ok = true;
      entry.detail = "consistent";
    }
    trace.Step(entry.component, "report watch-set commitment", entry.ok ? "ok" : entry.detail);
    m_last_health.entries.push_back(entry);
  }
  trace.completed = true;
  return trace;
}

void Simulation::OwnerSalvageRecoveryOutputs(int64_t feerate) {
  ProcessTrace& trace = NewTrace("salvage");
  std::vector<std::pair<OutPoint, UtxoEntry>> targets;
  for (const auto& [outpoint, entry] : m_chain.UtxoSet()) {
    if (m_recovery_scripts.count(ScriptKey(entry.script))) targets.emplace_back(outpoint, entry);
  }
  for (const auto& [outpoint, entry] : targets) {
    const Script destination = ActiveAddress(m_next_active_index++);
    Transaction sweep;
    sweep.inputs.push_back(TxInput{outpoint, 0});
    sweep.outputs.push_back(TxOutput{entry.amount - kTxFee, destination});
    const auto info = m_address_info.find(ScriptKey(entry.script));
    const uint32_t address_index = info != m_address_info.end() ? info->second.index : 0;
    sweep.witnesses = {SignWalletInput(WalletRole::Recovery, m_config.topology.recovery_threshold,
                                       address_index, sweep, 0, entry.script, entry.amount,
                                       SighashMode::All, std::nullopt)};
    const SubmitResult result = m_chain.Submit(sweep, feerate, Visibility::Public);
    trace.Step("interface", "sweep recovered funds to a fresh active address",
               result.accepted ? "ok" : result.reason);
  }
  trace.completed = true;
}

void Simulation::FreezePair(size_t pair) {
  Pair(pair).frozen = true;
  ProcessTrace& trace = NewTrace("freeze-" + PairTag(pair));
  trace.Step("owner", "freeze pair: leave funds under the covenant, suspend operations");
  trace.completed = true;
}

void Simulation::StandDownResponders() {
  ProcessTrace& trace = NewTrace("responder-stand-down");
  for (WatchtowerNode& node : m_nodes) {
    node.ClearResponses();
    trace.Step("watchtower-" + std::to_string(node.Id()),
               "drop stored responses on owner order");
  }
  trace.completed = true;
}

Simulation::Tally Simulation::TallyFunds() const {
  Tally tally;
  tally.fees = m_chain.TotalFees();
  tally.funded = m_chain.TotalFunded();
  std::set<OutPoint> frozen_outpoints;
  for (const PairState& pair : m_pairs) {
    if (!pair.frozen) continue;
    if (const auto resting = RestingOutpoint(pair)) frozen_outpoints.insert(resting->first);
  }
  for (const auto& [outpoint, entry] : m_chain.UtxoSet()) {
    const std::string key = ScriptKey(entry.script);
    if (m_attacker_scripts.count(key)) {
      tally.attacker += entry.amount;
    } else if (frozen_outpoints.count(outpoint)) {
      tally.frozen += entry.amount;
    } else if (m_owner_scripts.count(key) || entry.amount == 0) {
      tally.owner += entry.amount;
    } else {
      throw std::logic_error("unattributed UTXO worth " + std::to_string(entry.amount));
    }
  }
  if (tally.attacker + tally.owner + tally.frozen + tally.fees != tally.funded) {
    throw std::logic_error("value conservation violated");
  }
  return tally;
}

}  // namespace vaultlab
