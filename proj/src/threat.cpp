// Copyright (c) 2026 The vaultlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <vaultlab/threat.h>

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>

#include <vaultlab/covenant.h>
#include <vaultlab/ctv_plan.h>
#include <vaultlab/hash.h>
#include <vaultlab/hex.h>
#include <vaultlab/serialize.h>
#include <vaultlab/sighash.h>

namespace vaultlab {
namespace {

std::vector<int> FirstN(int n) {
  std::vector<int> out;
  for (int i = 0; i < n; ++i) out.push_back(i);
  return out;
}

bool VecSubset(const std::vector<int>& a, const std::vector<int>& b) {
  const std::set<int> rhs(b.begin(), b.end());
  return std::all_of(a.begin(), a.end(), [&](int v) { return rhs.count(v) > 0; });
}

std::string PairTag(size_t index) { return "p" + std::to_string(index); }

std::string RootLabel(size_t pair_index) { return "L0/" + PairTag(pair_index); }

/** The adversary's payout script: a fresh single-key output nobody else can
 *  spend. Registered with the simulation so the funds tally attributes it. */
Script AttackerDestination(Simulation& sim) {
  const Hash256 secret = sim.rng().Child("attacker-payout").NextHash();
  sim.fleet().Adversary().secrets["attacker/payout"] = secret;
  const Script dest = MultisigScript(1, {PubKeyFromSecret(secret)});
  sim.RegisterAttackerScript(dest);
  return dest;
}

/** Key ids of the first `take` devices of a wallet at an address index; this
 *  matches script key order because addresses are formed in roster order and
 *  scenarios always corrupt a roster prefix. */
std::vector<std::string> WalletKeyIds(WalletRole role, uint32_t address_index, int take) {
  std::vector<std::string> ids;
  for (int device = 0; device < take; ++device) {
    ids.push_back(RoleName(role) + "-" + std::to_string(device) + "/m/vault custody/" +
                  RoleName(role) + "/" + std::to_string(address_index));
  }
  return ids;
}

/** One-input theft: spends `outpoint` to the adversary's payout script,
 *  keeping kAdversaryFee as the embedded fee. */
Transaction AdversarySpend(Simulation& sim, const OutPoint& outpoint, Amount amount,
                           const Script& spent_script, const std::vector<std::string>& key_ids,
                           SighashMode mode, std::optional<bool> branch, uint32_t sequence,
                           const Script& destination) {
  Transaction tx;
  tx.inputs.push_back(TxInput{outpoint, sequence});
  tx.outputs.push_back(TxOutput{amount - kAdversaryFee, destination});
  const Hash256 digest = SighashDigest(tx, 0, mode, spent_script, amount);
  const AdversaryKnowledge& adversary = sim.fleet().Adversary();
  std::vector<Signature> sigs;
  sigs.reserve(key_ids.size());
  for (const std::string& id : key_ids) sigs.push_back(adversary.SignAs(id, digest, mode));
  tx.witnesses = {MultisigWitness(sigs, branch)};
  return tx;
}

void CorruptWallet(Simulation& sim, WalletRole role, int count) {
  for (int device = 0; device < count; ++device) sim.fleet().CompromiseDevice(role, device);
}

void CorruptAllWatchtowers(Simulation& sim) {
  for (WatchtowerNode& node : sim.nodes()) node.Compromise();
}

int StorageDevices(const Simulation& sim) {
  return std::min(sim.config().topology.avt_storage, sim.config().topology.vault_count);
}

/** Theft of stored covenant bundles, without corrupting the devices that hold
 *  them: only labels under `prefix` leak. */
void LeakStoredBundles(Simulation& sim, const std::string& prefix) {
  for (int device = 0; device < StorageDevices(sim); ++device) {
    sim.fleet().LeakBlobs(WalletRole::Vault, device, prefix);
  }
}

/** Fetch a leaked blob by its label, trying every storage device's copy. */
std::optional<Transaction> LeakedTransaction(Simulation& sim, const std::string& label) {
  const AdversaryKnowledge& adversary = sim.fleet().Adversary();
  for (int device = 0; device < sim.config().topology.vault_count; ++device) {
    const std::string key = "vault-" + std::to_string(device) + "/" + label;
    const auto it = adversary.blobs.find(key);
    if (it != adversary.blobs.end()) return DeserializeTx(it->second, /*with_witness=*/true);
  }
  return std::nullopt;
}

/** The root vault transaction of a pair, as the adversary would broadcast it
 *  from a leaked bundle. Under the template mechanism the stored transaction
 *  is instantiated against the (publicly visible) deposit outpoint. */
std::optional<Transaction> LeakedVaultTx(Simulation& sim, size_t pair_index) {
  auto avt = LeakedTransaction(sim, RootLabel(pair_index) + "/avt");
  if (!avt) return std::nullopt;
  if (sim.config().mechanism == Mechanism::Ctv) {
    return InstantiateTemplate(*avt, sim.Pair(pair_index).plan.deposit_outpoint);
  }
  return avt;
}

std::optional<Transaction> LeakedRecoveryPush(Simulation& sim, size_t pair_index,
                                              const Txid& vault_txid) {
  auto push = LeakedTransaction(sim, RootLabel(pair_index) + "/p2rw");
  if (!push) return std::nullopt;
  if (sim.config().mechanism == Mechanism::Ctv) {
    return InstantiateTemplate(*push, OutPoint{vault_txid, 0});
  }
  return push;
}

/** Locate the unspent recovery output of a pair on chain. */
std::optional<std::pair<OutPoint, Amount>> RecoveryUtxo(const Simulation& sim,
                                                        const Script& recovery_script) {
  const std::vector<uint8_t> wanted = SerializeScript(recovery_script);
  for (const auto& [outpoint, entry] : sim.chain().UtxoSet()) {
    if (SerializeScript(entry.script) == wanted) return std::make_pair(outpoint, entry.amount);
  }
  return std::nullopt;
}

/** Claim an on-chain recovery output with corrupted recovery-wallet keys. */
bool ClaimRecoveryOutput(Simulation& sim, size_t pair_index, const Script& destination,
                         Visibility visibility, ScenarioOutcome& out) {
  PairState& pair = sim.Pair(pair_index);
  const VaultNode& node = sim.LiveNode(pair);
  const auto utxo = RecoveryUtxo(sim, node.pair.recovery_script);
  if (!utxo) {
    out.notes.push_back("no recovery output found for " + PairTag(pair_index));
    return false;
  }
  const Transaction claim = AdversarySpend(
      sim, utxo->first, utxo->second, node.pair.recovery_script,
      WalletKeyIds(WalletRole::Recovery, pair.recovery_address_index,
                   sim.config().topology.recovery_threshold),
      SighashMode::All, std::nullopt, 0, destination);
  const SubmitResult result = sim.chain().Submit(claim, sim.config().feerates.attacker, visibility);
  out.notes.push_back("adversary claim of " + PairTag(pair_index) + " recovery output: " +
                      (result.accepted ? "submitted" : result.reason));
  return result.accepted;
}

/** Timelocked-branch theft of a realized vault output using corrupted
 *  active-wallet keys. Only possible once the timelock has expired. */
SubmitResult StrikeExpiredVault(Simulation& sim, size_t pair_index, const Script& destination,
                                Visibility visibility) {
  PairState& pair = sim.Pair(pair_index);
  const VaultNode& node = sim.LiveNode(pair);
  const Transaction theft = AdversarySpend(
      sim, OutPoint{pair.broadcast_vault_txid, 0}, node.pair.amount, node.pair.vault_script,
      WalletKeyIds(WalletRole::Active, pair.unvault_address_index,
                   sim.config().topology.active_threshold),
      SighashMode::All, std::make_optional(true), static_cast<uint32_t>(node.pair.timelock),
      destination);
  return sim.chain().Submit(theft, sim.config().feerates.attacker, visibility);
}

/** Owner adopts an un-vault that someone else broadcast: records the realized
 *  vault txid so the ordinary completion path applies. */
void AdoptRealizedUnvault(Simulation& sim, size_t pair_index) {
  PairState& pair = sim.Pair(pair_index);
  pair.unvault_broadcast = true;
  pair.broadcast_vault_txid = sim.LiveNode(pair).pair.vault_txid;
}

ScenarioOutcome FinishScenario(Simulation& sim, ScenarioOutcome out) {
  const Simulation::Tally tally = sim.TallyFunds();
  Amount vaulted = 0;
  for (Amount partition : sim.config().funds.partitions) vaulted += partition;
  out.mechanism = sim.config().mechanism;
  out.attacker_gain = tally.attacker;
  out.owner_total = tally.owner;
  out.frozen_total = tally.frozen;
  out.fees_total = tally.fees;
  out.funded_total = tally.funded;
  out.vaulted_total = vaulted;
  if (tally.attacker == 0) {
    out.cls = ScenarioClass::NoLoss;
  } else if (tally.attacker + kFeeAllowance >= vaulted) {
    out.cls = ScenarioClass::Catastrophic;
  } else {
    out.cls = ScenarioClass::LimitedLoss;
  }
  out.expected = ExpectedClass(out.scenario, sim.config());
  out.matches_expected = out.cls == out.expected;
  return out;
}

// ---------------------------------------------------------------------------
// Scenario scripts. Each plays the honest protocol, the adversary's best
// deterministic moves for what it corrupts, and the owner's scripted
// reaction, in that order.
// ---------------------------------------------------------------------------

ScenarioOutcome PlayHonest(Simulation& sim, ScenarioOutcome out) {
  sim.RunSetup();
  sim.FundWallets();
  sim.RunExternalPayment(sim.config().funds.external_payment, /*tampered=*/false);
  sim.RunVaulting();
  if (sim.config().revault_layers >= 2 && !sim.pairs().empty()) {
    const size_t last = sim.pairs().size() - 1;
    const size_t tier = sim.config().revault_fee_tiers > 1 ? 1 : 0;
    sim.RunRevault(last, tier);
    out.notes.push_back("re-vaulted " + PairTag(last) + " one layer deeper at fee tier " +
                        std::to_string(tier));
  }
  sim.RunUnvault(0);
  sim.RunHealthCheck();
  out.notes.push_back("full lifecycle: deposit, covenant, un-vault, health check");
  return out;
}

ScenarioOutcome PlayRotation(Simulation& sim, ScenarioOutcome out) {
  sim.RunSetup();
  sim.FundWallets();
  sim.RunVaulting();
  const size_t pairs_before = sim.pairs().size();
  sim.RunDeviceRotation(WalletRole::Recovery, 0);
  sim.RunDeviceRotation(WalletRole::Active, 0);
  sim.RunHealthCheck();
  out.notes.push_back("recovery device replaced; " + std::to_string(pairs_before) +
                      " pairs migrated to fresh covenants");
  return out;
}

// Stored covenant bundles leak, nothing else. Broadcasting them only starts
// timelocks the adversary cannot outrun: watchtowers respond immediately.
ScenarioOutcome PlayL1(Simulation& sim, ScenarioOutcome out) {
  sim.RunSetup();
  sim.FundWallets();
  sim.RunVaulting();
  LeakStoredBundles(sim, "");
  for (size_t i = 0; i < sim.pairs().size(); ++i) {
    const auto avt = LeakedVaultTx(sim, i);
    if (!avt) continue;
    const SubmitResult result =
        sim.chain().Submit(*avt, sim.config().feerates.attacker, Visibility::Public);
    out.notes.push_back("adversary broadcast of stored vault tx " + PairTag(i) + ": " +
                        (result.accepted ? "submitted" : result.reason));
  }
  sim.PumpWatchtowers();  // responders push recovery transactions
  sim.MineAndPump(1);
  for (size_t i = 0; i < sim.pairs().size(); ++i) {
    PairState& pair = sim.Pair(i);
    if (RecoveryUtxo(sim, sim.LiveNode(pair).pair.recovery_script)) {
      pair.recovered = true;
      pair.unvault_broadcast = false;
    }
  }
  if (sim.HasAlert("unauthorized-unvault")) {
    out.notes.push_back("owner alerted to the unauthorized un-vault");
  }
  return out;
}

// Active wallet corrupted. The adversary's only window is an owner-authorized
// un-vault: at expiry it races the completing spend with miner help.
ScenarioOutcome PlayL2(Simulation& sim, ScenarioOutcome out) {
  sim.RunSetup();
  sim.FundWallets();
  sim.RunVaulting();
  CorruptWallet(sim, WalletRole::Active, sim.config().topology.active_threshold);
  const Script destination = AttackerDestination(sim);

  sim.RunUnvaultBroadcast(0);
  sim.MineAndPump(sim.config().topology.timelock - 1);
  const SubmitResult theft = StrikeExpiredVault(sim, 0, destination, Visibility::MinerPrivate);
  out.notes.push_back(std::string("adversary strike at expiry: ") +
                      (theft.accepted ? "queued with a colluding miner" : theft.reason));
  const ProcessTrace& complete = sim.RunUnvaultComplete(0);
  if (!complete.completed) {
    out.notes.push_back("owner detected the theft: " + complete.abort_reason);
    sim.RunRecovery({1, 2}, "active wallet compromise suspected after failed spend");
  }
  return out;
}

// L2 plus corrupted watchtowers. The towers never mattered for this theft
// (the strike hides in a miner's private pool), so the outcome is identical.
ScenarioOutcome PlayL3(Simulation& sim, ScenarioOutcome out) {
  sim.RunSetup();
  sim.FundWallets();
  sim.RunVaulting();
  CorruptWallet(sim, WalletRole::Active, sim.config().topology.active_threshold);
  CorruptAllWatchtowers(sim);
  const Script destination = AttackerDestination(sim);

  sim.RunUnvaultBroadcast(0);
  sim.MineAndPump(sim.config().topology.timelock - 1);
  const SubmitResult theft = StrikeExpiredVault(sim, 0, destination, Visibility::MinerPrivate);
  out.notes.push_back(std::string("adversary strike at expiry: ") +
                      (theft.accepted ? "queued with a colluding miner" : theft.reason));
  const ProcessTrace& complete = sim.RunUnvaultComplete(0);
  if (!complete.completed) {
    out.notes.push_back("owner detected the theft: " + complete.abort_reason);
    sim.RunRecovery({1, 2}, "active wallet compromise suspected after failed spend");
  }
  return out;
}

// Active wallet plus stored bundles. Self-broadcast bundles only hand funds
// to the responders; the real gain still comes from the authorized un-vault.
ScenarioOutcome PlayL4(Simulation& sim, ScenarioOutcome out) {
  sim.RunSetup();
  sim.FundWallets();
  sim.RunVaulting();
  CorruptWallet(sim, WalletRole::Active, sim.config().topology.active_threshold);
  LeakStoredBundles(sim, "");
  const Script destination = AttackerDestination(sim);

  sim.RunUnvaultBroadcast(0);
  sim.MineAndPump(sim.config().topology.timelock - 1);
  const SubmitResult theft = StrikeExpiredVault(sim, 0, destination, Visibility::MinerPrivate);
  const ProcessTrace& complete = sim.RunUnvaultComplete(0);
  if (!complete.completed) {
    out.notes.push_back("owner detected the theft: " + complete.abort_reason);
  }
  out.notes.push_back(std::string("strike on the authorized un-vault: ") +
                      (theft.accepted ? "submitted" : theft.reason));

  // Broadcast the remaining stored bundles hoping to repeat the strike.
  for (size_t i = 1; i < sim.pairs().size(); ++i) {
    if (const auto avt = LeakedVaultTx(sim, i)) {
      sim.chain().Submit(*avt, sim.config().feerates.attacker, Visibility::Public);
    }
  }
  sim.PumpWatchtowers();
  sim.MineAndPump(sim.config().topology.timelock);
  for (size_t i = 1; i < sim.pairs().size(); ++i) {
    PairState& pair = sim.Pair(i);
    if (RecoveryUtxo(sim, sim.LiveNode(pair).pair.recovery_script)) {
      pair.recovered = true;
      out.notes.push_back(PairTag(i) + " pushed to recovery by responders before expiry");
    }
  }
  return out;
}

// Stored bundles leak and every watchtower is corrupted, but no wallet keys:
// broadcast bundles strand funds in vault outputs nobody hostile can open.
ScenarioOutcome PlayL5(Simulation& sim, ScenarioOutcome out) {
  sim.RunSetup();
  sim.FundWallets();
  sim.RunVaulting();
  LeakStoredBundles(sim, "");
  CorruptAllWatchtowers(sim);
  for (size_t i = 0; i < sim.pairs().size(); ++i) {
    if (const auto avt = LeakedVaultTx(sim, i)) {
      sim.chain().Submit(*avt, sim.config().feerates.attacker, Visibility::Public);
    }
  }
  sim.MineAndPump(2);
  if (!sim.HasAlert("unauthorized-unvault")) {
    out.notes.push_back("corrupted watchtowers stayed silent");
  }
  const ProcessTrace& attempt = sim.RunUnvaultBroadcast(0);
  if (!attempt.completed) {
    out.notes.push_back("owner discovered the un-vault on their own broadcast: " +
                        attempt.abort_reason);
  }
  for (size_t i = 0; i < sim.pairs().size(); ++i) AdoptRealizedUnvault(sim, i);
  sim.RunRecovery({0, 1, 2}, "unauthorized un-vault discovered; storage assumed leaked");
  return out;
}

// A recovery-push copy leaks. Broadcasting it can only send funds to the
// owner's recovery wallet: denial of service plus lost privacy.
ScenarioOutcome PlayL6(Simulation& sim, ScenarioOutcome out) {
  sim.RunSetup();
  sim.FundWallets();
  sim.RunVaulting();
  for (size_t i = 0; i < sim.pairs().size(); ++i) {
    for (int device = 0; device < StorageDevices(sim); ++device) {
      sim.fleet().LeakBlobs(WalletRole::Vault, device, RootLabel(i) + "/p2rw");
    }
  }
  sim.RunUnvaultBroadcast(0);
  if (const auto push = LeakedRecoveryPush(sim, 0, sim.Pair(0).broadcast_vault_txid)) {
    const SubmitResult result =
        sim.chain().Submit(*push, sim.config().feerates.attacker, Visibility::Public);
    out.notes.push_back(std::string("adversary forced the recovery push: ") +
                        (result.accepted ? "submitted" : result.reason));
  }
  sim.MineAndPump(1);
  if (sim.HasAlert("recovery-broadcast")) {
    out.notes.push_back("owner alerted to the forced recovery");
  }
  PairState& pair = sim.Pair(0);
  if (RecoveryUtxo(sim, sim.LiveNode(pair).pair.recovery_script)) {
    pair.recovered = true;
    pair.unvault_broadcast = false;
  }
  sim.RunRecovery({1, 2}, "recovery push copies leaked; sweeping remaining pairs");
  return out;
}

// Watchtowers corrupted, nothing else: surveillance only.
ScenarioOutcome PlayL7(Simulation& sim, ScenarioOutcome out) {
  sim.RunSetup();
  sim.FundWallets();
  sim.RunVaulting();
  CorruptAllWatchtowers(sim);
  sim.RunUnvault(0);
  sim.RunHealthCheck();
  out.notes.push_back("corrupted watchtowers observe but cannot move funds");
  return out;
}

// Watchtowers plus a recovery-push copy: the forced recovery now happens
// silently, but the funds still land in the owner's recovery wallet.
ScenarioOutcome PlayL8(Simulation& sim, ScenarioOutcome out) {
  sim.RunSetup();
  sim.FundWallets();
  sim.RunVaulting();
  CorruptAllWatchtowers(sim);
  for (size_t i = 0; i < sim.pairs().size(); ++i) {
    for (int device = 0; device < StorageDevices(sim); ++device) {
      sim.fleet().LeakBlobs(WalletRole::Vault, device, RootLabel(i) + "/p2rw");
    }
  }
  sim.RunUnvaultBroadcast(0);
  if (const auto push = LeakedRecoveryPush(sim, 0, sim.Pair(0).broadcast_vault_txid)) {
    sim.chain().Submit(*push, sim.config().feerates.attacker, Visibility::Public);
  }
  sim.MineAndPump(sim.config().topology.timelock - 1);
  const ProcessTrace& complete = sim.RunUnvaultComplete(0);
  if (!complete.completed) {
    out.notes.push_back("owner discovered the forced recovery at expiry: " +
                        complete.abort_reason);
  }
  PairState& pair = sim.Pair(0);
  if (RecoveryUtxo(sim, sim.LiveNode(pair).pair.recovery_script)) {
    pair.recovered = true;
    pair.unvault_broadcast = false;
  }
  sim.RunRecovery({1, 2}, "forced recovery discovered with silent watchtowers");
  return out;
}

// Both verification channels of one signer corrupted: an inbound payment
// address is swapped undetected. The covenant itself is untouched.
ScenarioOutcome PlayL9(Simulation& sim, ScenarioOutcome out) {
  sim.RunSetup();
  sim.FundWallets();
  sim.RunVaulting();
  ChannelPair& channel = sim.fleet().Device(WalletRole::Active, 0).channel;
  channel.inband_compromised = true;
  channel.oob_compromised = true;
  sim.RunExternalPayment(sim.config().funds.external_payment, /*tampered=*/true);
  out.notes.push_back("payment address swapped undetected; loss equals the external payment");
  sim.RunUnvault(0);
  out.notes.push_back("vaulted funds unaffected");
  return out;
}

// Fee wallet corrupted: its coins are sweepable, and nothing else is.
ScenarioOutcome PlayL10(Simulation& sim, ScenarioOutcome out) {
  sim.RunSetup();
  sim.FundWallets();
  sim.RunVaulting();
  CorruptWallet(sim, WalletRole::Fee, sim.config().topology.fee_threshold);
  const Script destination = AttackerDestination(sim);
  const Script fee_script = sim.FeeAddress(0);
  const std::vector<uint8_t> wanted = SerializeScript(fee_script);
  std::vector<std::pair<OutPoint, Amount>> coins;
  for (const auto& [outpoint, entry] : sim.chain().UtxoSet()) {
    if (SerializeScript(entry.script) == wanted) coins.emplace_back(outpoint, entry.amount);
  }
  std::sort(coins.begin(), coins.end(), [](const auto& a, const auto& b) {
    return std::tie(a.first.txid, a.first.vout) < std::tie(b.first.txid, b.first.vout);
  });
  Transaction sweep;
  Amount total = 0;
  for (const auto& [outpoint, amount] : coins) {
    sweep.inputs.push_back(TxInput{outpoint, 0});
    total += amount;
  }
  sweep.outputs.push_back(TxOutput{total - kAdversaryFee, destination});
  const AdversaryKnowledge& adversary = sim.fleet().Adversary();
  const auto key_ids = WalletKeyIds(WalletRole::Fee, 0, sim.config().topology.fee_threshold);
  for (size_t i = 0; i < coins.size(); ++i) {
    const Hash256 digest = SighashDigest(sweep, i, SighashMode::All, fee_script, coins[i].second);
    std::vector<Signature> sigs;
    for (const std::string& id : key_ids) sigs.push_back(adversary.SignAs(id, digest, SighashMode::All));
    sweep.witnesses.push_back(MultisigWitness(sigs, std::nullopt));
  }
  const SubmitResult result =
      sim.chain().Submit(sweep, sim.config().feerates.attacker, Visibility::Public);
  out.notes.push_back(std::string("fee wallet sweep: ") +
                      (result.accepted ? "submitted" : result.reason));
  sim.MineAndPump(1);
  out.notes.push_back("vaulted funds unaffected; recovery pushes would lack fee inputs");
  return out;
}

// Recovery wallet corrupted. Dormant until the owner recovers for an
// unrelated reason; then the recovery output is no longer safe.
ScenarioOutcome PlayC1(Simulation& sim, ScenarioOutcome out) {
  sim.RunSetup();
  sim.FundWallets();
  sim.RunVaulting();
  CorruptWallet(sim, WalletRole::Recovery, sim.config().topology.recovery_threshold);
  const Script destination = AttackerDestination(sim);
  sim.RunRecovery({0}, "possible intrusion reported (false alarm)");
  ClaimRecoveryOutput(sim, 0, destination, Visibility::Public, out);
  sim.MineAndPump(1);
  out.notes.push_back("owner saw the recovery output vanish; freezing remaining pairs");
  sim.StandDownResponders();
  sim.FreezePair(1);
  sim.FreezePair(2);
  return out;
}

// Recovery wallet plus a recovery-push copy: the adversary can now force the
// recovery itself during an authorized un-vault, then claim the output.
ScenarioOutcome PlayC2(Simulation& sim, ScenarioOutcome out) {
  sim.RunSetup();
  sim.FundWallets();
  sim.RunVaulting();
  CorruptWallet(sim, WalletRole::Recovery, sim.config().topology.recovery_threshold);
  for (size_t i = 0; i < sim.pairs().size(); ++i) {
    for (int device = 0; device < StorageDevices(sim); ++device) {
      sim.fleet().LeakBlobs(WalletRole::Vault, device, RootLabel(i) + "/p2rw");
    }
  }
  const Script destination = AttackerDestination(sim);
  sim.RunUnvaultBroadcast(0);
  if (const auto push = LeakedRecoveryPush(sim, 0, sim.Pair(0).broadcast_vault_txid)) {
    sim.chain().Submit(*push, sim.config().feerates.attacker, Visibility::Public);
  }
  sim.MineAndPump(1);
  ClaimRecoveryOutput(sim, 0, destination, Visibility::Public, out);
  sim.MineAndPump(1);
  sim.Pair(0).unvault_broadcast = false;
  out.notes.push_back("forced recovery claimed; owner freezes the remaining pairs");
  sim.StandDownResponders();
  sim.FreezePair(1);
  sim.FreezePair(2);
  return out;
}

// Recovery wallet plus stored bundles: broadcasting every bundle makes the
// responders deliver all funds straight into adversary-spendable outputs.
// If the owner learns of the recovery compromise in time, standing the
// responders down and riding out the timelocks saves everything.
ScenarioOutcome PlayC3(Simulation& sim, ScenarioOutcome out) {
  sim.RunSetup();
  sim.FundWallets();
  sim.RunVaulting();
  CorruptWallet(sim, WalletRole::Recovery, sim.config().topology.recovery_threshold);
  for (size_t i = 0; i < sim.pairs().size(); ++i) {
    for (int device = 0; device < StorageDevices(sim); ++device) {
      sim.fleet().LeakBlobs(WalletRole::Vault, device, RootLabel(i) + "/avt");
    }
  }
  const Script destination = AttackerDestination(sim);
  const bool owner_warned = sim.config().options.owner_detects_recovery_compromise;
  if (owner_warned) {
    sim.StandDownResponders();
    out.notes.push_back("owner learned of the recovery compromise and stood responders down");
  }
  for (size_t i = 0; i < sim.pairs().size(); ++i) {
    if (const auto avt = LeakedVaultTx(sim, i)) {
      sim.chain().Submit(*avt, sim.config().feerates.attacker, Visibility::Public);
    }
  }
  sim.PumpWatchtowers();
  sim.MineAndPump(1);
  if (owner_warned) {
    for (size_t i = 0; i < sim.pairs().size(); ++i) AdoptRealizedUnvault(sim, i);
    sim.MineAndPump(sim.config().topology.timelock);
    for (size_t i = 0; i < sim.pairs().size(); ++i) sim.RunUnvaultComplete(i);
    out.notes.push_back("owner rode out the timelocks into the active wallet");
    return out;
  }
  for (size_t i = 0; i < sim.pairs().size(); ++i) {
    ClaimRecoveryOutput(sim, i, destination, Visibility::Public, out);
  }
  sim.MineAndPump(1);
  return out;
}

// Recovery wallet, stored bundles and recovery-push copies. The adversary
// forces every recovery itself and races the owner's salvage sweeps with a
// colluding miner; the outcome is decided purely by fee priority.
ScenarioOutcome PlayC4(Simulation& sim, ScenarioOutcome out) {
  sim.RunSetup();
  sim.FundWallets();
  sim.RunVaulting();
  CorruptWallet(sim, WalletRole::Recovery, sim.config().topology.recovery_threshold);
  LeakStoredBundles(sim, "");
  const Script destination = AttackerDestination(sim);
  for (size_t i = 0; i < sim.pairs().size(); ++i) {
    const auto avt = LeakedVaultTx(sim, i);
    if (!avt) continue;
    sim.chain().Submit(*avt, sim.config().feerates.attacker, Visibility::Public);
    if (const auto push = LeakedRecoveryPush(sim, i, ComputeTxid(*avt))) {
      sim.chain().Submit(*push, sim.config().feerates.attacker, Visibility::Public);
    }
  }
  sim.MineAndPump(1);
  for (size_t i = 0; i < sim.pairs().size(); ++i) {
    ClaimRecoveryOutput(sim, i, destination, Visibility::MinerPrivate, out);
  }
  sim.OwnerSalvageRecoveryOutputs(sim.config().feerates.owner);
  sim.MineAndPump(1);
  const int64_t adversary_priority = sim.config().feerates.attacker + sim.config().feerates.bribe;
  out.notes.push_back("fee race: owner " + std::to_string(sim.config().feerates.owner) +
                      " vs adversary-with-miner " + std::to_string(adversary_priority));
  return out;
}

// Recovery wallet plus every watchtower: forged alerts talk the owner into a
// full recovery, and the corrupted recovery wallet finishes the job.
ScenarioOutcome PlayC5(Simulation& sim, ScenarioOutcome out) {
  sim.RunSetup();
  sim.FundWallets();
  sim.RunVaulting();
  CorruptWallet(sim, WalletRole::Recovery, sim.config().topology.recovery_threshold);
  CorruptAllWatchtowers(sim);
  const Script destination = AttackerDestination(sim);
  sim.RunRecovery({0, 1, 2}, "responding to forged theft alerts from corrupted watchtowers");
  for (size_t i = 0; i < sim.pairs().size(); ++i) {
    ClaimRecoveryOutput(sim, i, destination, Visibility::Public, out);
  }
  sim.MineAndPump(1);
  out.notes.push_back("owner believed funds were safe; no further reaction");
  return out;
}

// Active wallet, stored bundles and every watchtower: the adversary starts
// all timelocks silently and opens them with the active keys at expiry.
ScenarioOutcome PlayC6(Simulation& sim, ScenarioOutcome out) {
  sim.RunSetup();
  sim.FundWallets();
  sim.RunVaulting();
  CorruptWallet(sim, WalletRole::Active, sim.config().topology.active_threshold);
  LeakStoredBundles(sim, "");
  CorruptAllWatchtowers(sim);
  const Script destination = AttackerDestination(sim);
  for (size_t i = 0; i < sim.pairs().size(); ++i) {
    if (const auto avt = LeakedVaultTx(sim, i)) {
      sim.chain().Submit(*avt, sim.config().feerates.attacker, Visibility::Public);
    }
    AdoptRealizedUnvault(sim, i);  // adversary bookkeeping: realized txids
  }
  sim.MineAndPump(sim.config().topology.timelock);
  for (size_t i = 0; i < sim.pairs().size(); ++i) {
    const SubmitResult theft = StrikeExpiredVault(sim, i, destination, Visibility::Public);
    out.notes.push_back("strike on " + PairTag(i) + " at expiry: " +
                        (theft.accepted ? "submitted" : theft.reason));
  }
  sim.MineAndPump(1);
  return out;
}

// Signing devices corrupted before the covenant ceremony: every ephemeral
// key is captured live, so the "deleted" keys still exist. A public theft of
// the deposit is outrun by the emergency vault broadcast at the panic
// feerate; only the keyless template mechanism has nothing to capture.
ScenarioOutcome PlayC7(Simulation& sim, ScenarioOutcome out) {
  sim.RunSetup();
  sim.FundWallets();
  CorruptWallet(sim, WalletRole::Vault, sim.config().topology.vault_threshold);
  sim.RunVaulting();
  if (sim.config().mechanism == Mechanism::Ctv) {
    out.notes.push_back("template mechanism: corrupted signers hold no spendable key material");
    return out;
  }
  const Script destination = AttackerDestination(sim);
  for (size_t i = 0; i < sim.pairs().size(); ++i) {
    PairState& pair = sim.Pair(i);
    std::vector<std::string> key_ids(
        pair.ephemeral_ids[0].begin(),
        pair.ephemeral_ids[0].begin() + sim.config().topology.vault_threshold);
    const Transaction theft =
        AdversarySpend(sim, pair.plan.deposit_outpoint, pair.plan.amount,
                       pair.plan.deposit_script, key_ids, SighashMode::All, std::nullopt, 0,
                       destination);
    const SubmitResult result =
        sim.chain().Submit(theft, sim.config().feerates.attacker, Visibility::Public);
    out.notes.push_back("deposit theft with captured ephemeral keys " + PairTag(i) + ": " +
                        (result.accepted ? "submitted" : result.reason));
  }
  sim.PumpWatchtowers();
  if (sim.HasAlert("deposit-spend")) {
    out.notes.push_back("watchtowers flagged the deposit spend before it confirmed");
  }
  sim.RunRecovery({0, 1, 2}, "deposit spend detected; ephemeral key compromise assumed");
  return out;
}

// The same live capture with every watchtower corrupted: nobody flags the
// deposit theft and it simply confirms.
ScenarioOutcome PlayC8(Simulation& sim, ScenarioOutcome out) {
  sim.RunSetup();
  sim.FundWallets();
  CorruptWallet(sim, WalletRole::Vault, sim.config().topology.vault_threshold);
  CorruptAllWatchtowers(sim);
  sim.RunVaulting();
  if (sim.config().mechanism == Mechanism::Ctv) {
    out.notes.push_back("template mechanism: corrupted signers hold no spendable key material");
    return out;
  }
  const Script destination = AttackerDestination(sim);
  for (size_t i = 0; i < sim.pairs().size(); ++i) {
    PairState& pair = sim.Pair(i);
    std::vector<std::string> key_ids(
        pair.ephemeral_ids[0].begin(),
        pair.ephemeral_ids[0].begin() + sim.config().topology.vault_threshold);
    const Transaction theft =
        AdversarySpend(sim, pair.plan.deposit_outpoint, pair.plan.amount,
                       pair.plan.deposit_script, key_ids, SighashMode::All, std::nullopt, 0,
                       destination);
    sim.chain().Submit(theft, sim.config().feerates.attacker, Visibility::Public);
  }
  sim.MineAndPump(1);
  out.notes.push_back("corrupted watchtowers stayed silent; deposit thefts confirmed");
  return out;
}

// Layered covenant: only the outermost layer's stored bundles leak. The
// responders prefer the re-vault response, so funds dive one layer deeper
// without a single recovery device waking up.
ScenarioOutcome PlayR1(Simulation& sim, ScenarioOutcome out) {
  if (sim.config().revault_layers < 2) {
    throw std::invalid_argument("scenario R1 requires at least one re-vault layer");
  }
  sim.RunSetup();
  sim.FundWallets();
  sim.RunVaulting();
  const size_t traces_before_attack = sim.traces().size();
  LeakStoredBundles(sim, "L0/");
  for (size_t i = 0; i < sim.pairs().size(); ++i) {
    if (const auto avt = LeakedVaultTx(sim, i)) {
      const SubmitResult result =
          sim.chain().Submit(*avt, sim.config().feerates.attacker, Visibility::Public);
      out.notes.push_back("adversary broadcast of outer vault tx " + PairTag(i) + ": " +
                          (result.accepted ? "submitted" : result.reason));
    }
  }
  sim.PumpWatchtowers();  // responders push the re-vault, not the recovery
  sim.MineAndPump(1);
  for (size_t i = 0; i < sim.pairs().size(); ++i) {
    PairState& pair = sim.Pair(i);
    const VaultNode& deeper = sim.LiveNode(pair).children.front();
    if (sim.chain().GetUtxo(deeper.pair.deposit_outpoint)) {
      pair.live_path.push_back(0);
      pair.unvault_broadcast = false;
      sim.ReRegisterAfterRevault(i);
      out.notes.push_back(PairTag(i) + " re-vaulted one layer deeper by responders");
    }
  }
  bool recovery_touched = false;
  for (size_t t = traces_before_attack; t < sim.traces().size(); ++t) {
    recovery_touched = recovery_touched || TraceTouchesActor(sim.traces()[t], "recovery-");
  }
  out.notes.push_back(recovery_touched ? "recovery devices were touched"
                                       : "no recovery device was touched");
  sim.RunUnvault(0);
  out.notes.push_back("owner un-vaulted from the deeper layer normally");
  return out;
}

using ScenarioFn = ScenarioOutcome (*)(Simulation&, ScenarioOutcome);

const std::map<std::string, ScenarioFn>& ScenarioTable() {
  static const std::map<std::string, ScenarioFn> table = {
      {"honest", PlayHonest}, {"rotation", PlayRotation},
      {"L1", PlayL1},         {"L2", PlayL2},
      {"L3", PlayL3},         {"L4", PlayL4},
      {"L5", PlayL5},         {"L6", PlayL6},
      {"L7", PlayL7},         {"L8", PlayL8},
      {"L9", PlayL9},         {"L10", PlayL10},
      {"C1", PlayC1},         {"C2", PlayC2},
      {"C3", PlayC3},         {"C4", PlayC4},
      {"C5", PlayC5},         {"C6", PlayC6},
      {"C7", PlayC7},         {"C8", PlayC8},
      {"R1", PlayR1},
  };
  return table;
}

}  // namespace

std::string ClassName(ScenarioClass cls) {
  switch (cls) {
    case ScenarioClass::NoLoss: return "no-loss";
    case ScenarioClass::LimitedLoss: return "limited-loss";
    case ScenarioClass::Catastrophic: return "catastrophic";
  }
  return "unknown";
}

std::optional<ScenarioClass> ClassFromName(const std::string& name) {
  if (name == "no-loss") return ScenarioClass::NoLoss;
  if (name == "limited-loss") return ScenarioClass::LimitedLoss;
  if (name == "catastrophic") return ScenarioClass::Catastrophic;
  return std::nullopt;
}

bool CompromiseSet::SubsetOf(const CompromiseSet& other) const {
  return VecSubset(active_devices, other.active_devices) &&
         VecSubset(recovery_devices, other.recovery_devices) &&
         VecSubset(vault_devices, other.vault_devices) &&
         VecSubset(fee_devices, other.fee_devices) &&
         VecSubset(watchtower_nodes, other.watchtower_nodes) &&
         (!covenant_storage || other.covenant_storage) &&
         (!recovery_push_copies || other.recovery_push_copies) &&
         (!human_channels || other.human_channels);
}

std::vector<std::string> ScenarioCatalog() {
  return {"honest", "rotation", "L1", "L2", "L3", "L4", "L5", "L6", "L7", "L8",
          "L9",     "L10",      "C1", "C2", "C3", "C4", "C5", "C6", "C7", "C8",
          "R1"};
}

bool KnownScenarioId(const std::string& id) { return ScenarioTable().count(id) > 0; }

std::string ScenarioDescription(const std::string& id) {
  static const std::map<std::string, std::string> table = {
      {"honest", "full honest lifecycle: deposit, covenant, un-vault, health check"},
      {"rotation", "honest lifecycle with recovery- and active-device replacement"},
      {"L1", "stored covenant bundles leak; responders outrun every timelock"},
      {"L2", "active wallet corrupted; miner-assisted strike on an authorized un-vault"},
      {"L3", "active wallet and watchtowers corrupted; same strike, same outcome"},
      {"L4", "active wallet and stored bundles; self-broadcasts only feed the responders"},
      {"L5", "stored bundles and watchtowers corrupted but no keys; funds strand, owner recovers"},
      {"L6", "a recovery-push copy leaks; forced recovery is denial of service only"},
      {"L7", "watchtowers corrupted; surveillance without spending power"},
      {"L8", "watchtowers and a recovery-push copy; the forced recovery happens silently"},
      {"L9", "both verification channels of a signer corrupted; a payment address is swapped"},
      {"L10", "fee wallet corrupted; its coins are swept, covenants untouched"},
      {"C1", "recovery wallet corrupted; a false-alarm recovery hands over one partition"},
      {"C2", "recovery wallet plus a recovery-push copy; the adversary forces the recovery"},
      {"C3", "recovery wallet plus stored bundles; responders deliver everything (unless warned)"},
      {"C4", "recovery wallet, bundles and push copies; a pure fee race for every output"},
      {"C5", "recovery wallet plus watchtowers; forged alerts drive a full recovery"},
      {"C6", "active wallet, bundles and watchtowers; silent timelocks opened at expiry"},
      {"C7", "signers corrupted before the ceremony; public deposit theft is outrun"},
      {"C8", "pre-ceremony capture plus silent watchtowers; deposit theft confirms"},
      {"R1", "outer-layer bundles leak; responders re-vault a layer deeper, no recovery keys"},
  };
  const auto it = table.find(id);
  return it != table.end() ? it->second : "unknown scenario";
}

CompromiseSet ScenarioCompromises(const std::string& id, const ScenarioConfig& config) {
  const WalletTopology& t = config.topology;
  CompromiseSet set;
  const auto active = [&] { set.active_devices = FirstN(t.active_threshold); };
  const auto recovery = [&] { set.recovery_devices = FirstN(t.recovery_threshold); };
  const auto vault = [&] { set.vault_devices = FirstN(t.vault_threshold); };
  const auto fee = [&] { set.fee_devices = FirstN(t.fee_threshold); };
  const auto towers = [&] { set.watchtower_nodes = FirstN(t.watchtowers); };
  if (id == "L1") set.covenant_storage = true;
  if (id == "L2") active();
  if (id == "L3") { active(); towers(); }
  if (id == "L4") { active(); set.covenant_storage = true; }
  if (id == "L5") { set.covenant_storage = true; towers(); }
  if (id == "L6") set.recovery_push_copies = true;
  if (id == "L7") towers();
  if (id == "L8") { towers(); set.recovery_push_copies = true; }
  if (id == "L9") set.human_channels = true;
  if (id == "L10") fee();
  if (id == "C1") recovery();
  if (id == "C2") { recovery(); set.recovery_push_copies = true; }
  if (id == "C3") { recovery(); set.covenant_storage = true; }
  if (id == "C4") { recovery(); set.covenant_storage = true; set.recovery_push_copies = true; }
  if (id == "C5") { recovery(); towers(); }
  if (id == "C6") { active(); set.covenant_storage = true; towers(); }
  if (id == "C7") vault();
  if (id == "C8") { vault(); towers(); }
  if (id == "R1") set.covenant_storage = true;
  return set;
}

ScenarioClass ExpectedClass(const std::string& id, const ScenarioConfig& config) {
  if (id == "L2" || id == "L3" || id == "L4" || id == "L9" || id == "L10" || id == "C1" ||
      id == "C2") {
    return ScenarioClass::LimitedLoss;
  }
  if (id == "C3") {
    return config.options.owner_detects_recovery_compromise ? ScenarioClass::NoLoss
                                                            : ScenarioClass::Catastrophic;
  }
  if (id == "C4") {
    const int64_t adversary_priority = config.feerates.attacker + config.feerates.bribe;
    return config.feerates.owner > adversary_priority ? ScenarioClass::NoLoss
                                                      : ScenarioClass::Catastrophic;
  }
  if (id == "C5" || id == "C6") return ScenarioClass::Catastrophic;
  if (id == "C7") return ScenarioClass::NoLoss;
  if (id == "C8") {
    return config.mechanism == Mechanism::Ctv ? ScenarioClass::NoLoss
                                              : ScenarioClass::Catastrophic;
  }
  return ScenarioClass::NoLoss;
}

ScenarioOutcome RunScenario(Simulation& sim) {
  const std::string& id = sim.config().scenario;
  const auto it = ScenarioTable().find(id);
  if (it == ScenarioTable().end()) {
    throw std::invalid_argument("unknown scenario: " + id);
  }
  ScenarioOutcome out;
  out.scenario = id;
  out = it->second(sim, std::move(out));
  return FinishScenario(sim, std::move(out));
}

RaceResult RunFeerateRace(int64_t owner_feerate, int64_t attacker_feerate, int64_t bribe,
                          bool attacker_private) {
  Chain chain(bribe);
  const Hash256 leaked_secret = TaggedHash("race/leaked-key", {});
  const KeyPair leaked = KeyPair::FromSecret(leaked_secret);
  const Script contested = MultisigScript(1, {leaked.GetPubKey()});
  const OutPoint coin = chain.Fund(50'000, contested);

  const auto claim = [&](const std::string& tag) {
    Transaction tx;
    tx.inputs.push_back(TxInput{coin, 0});
    tx.outputs.push_back(
        TxOutput{49'900, MultisigScript(1, {PubKeyFromSecret(TaggedHash(tag, {}))})});
    const Hash256 digest = SighashDigest(tx, 0, SighashMode::All, contested, 50'000);
    tx.witnesses = {MultisigWitness({leaked.Sign(digest, SighashMode::All)}, std::nullopt)};
    return tx;
  };
  const Transaction attacker_tx = claim("race/attacker-payout");
  const Transaction owner_tx = claim("race/owner-payout");
  chain.Submit(attacker_tx, attacker_feerate,
               attacker_private ? Visibility::MinerPrivate : Visibility::Public);
  chain.Submit(owner_tx, owner_feerate, Visibility::Public);
  chain.MineBlock();

  RaceResult result;
  result.owner_won = chain.GetUtxo(OutPoint{ComputeTxid(owner_tx), 0}).has_value();
  result.winning_txid = result.owner_won ? ComputeTxid(owner_tx) : ComputeTxid(attacker_tx);
  return result;
}

}  // namespace vaultlab
