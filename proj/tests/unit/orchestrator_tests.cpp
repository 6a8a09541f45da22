// Copyright (c) 2026 The vaultlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <doctest.h>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <vaultlab/chain.h>
#include <vaultlab/config.h>
#include <vaultlab/covenant.h>
#include <vaultlab/fleet.h>
#include <vaultlab/hex.h>
#include <vaultlab/orchestrator.h>
#include <vaultlab/script.h>
#include <vaultlab/transaction.h>

using namespace vaultlab;

namespace {

/** Small, fast deployment: default 2-of-3 wallets, short timelock, two
 *  deposit partitions. */
ScenarioConfig SmallConfig(uint64_t seed = 0x6f726368) {
  ScenarioConfig config;
  config.name = "orchestrator-tests";
  config.seed = seed;
  config.topology.timelock = 3;
  config.funds.partitions = {500'000, 300'000};
  return config;
}

const ProcessTrace* FindTrace(const Simulation& sim, const std::string& process) {
  for (const ProcessTrace& trace : sim.traces()) {
    if (trace.process == process) return &trace;
  }
  return nullptr;
}

bool HasStep(const ProcessTrace& trace, const std::string& actor, const std::string& action_prefix,
             const std::string& result_prefix = "") {
  for (const TraceStep& step : trace.steps) {
    if (step.actor != actor) continue;
    if (step.action.rfind(action_prefix, 0) != 0) continue;
    if (!result_prefix.empty() && step.result.rfind(result_prefix, 0) != 0) continue;
    return true;
  }
  return false;
}

}  // namespace

TEST_SUITE("orchestrator") {

TEST_CASE("construction names the offending configuration field") {
  ScenarioConfig config = SmallConfig();
  config.revault_layers = 9;
  CHECK_THROWS_WITH_AS(Simulation{config}, "invalid configuration field: revault_layers",
                       std::invalid_argument);

  ScenarioConfig premium = SmallConfig();
  premium.feerates.owner = 0;
  CHECK_THROWS_WITH_AS(Simulation{premium}, "invalid configuration field: feerates.owner",
                       std::invalid_argument);
}

TEST_CASE("honest lifecycle vaults every partition and un-vaults on schedule") {
  const ScenarioConfig config = SmallConfig();
  Simulation sim(config);
  CHECK(sim.RunSetup().completed);
  CHECK(sim.FundWallets().completed);
  CHECK(sim.RunVaulting().completed);
  REQUIRE(sim.pairs().size() == 2);

  // Deposits confirmed; all three vault devices deleted their layer-0 key.
  for (const PairState& pair : sim.pairs()) {
    CHECK(pair.deposit_confirmed);
    REQUIRE(pair.layer_deletions.size() == 1);
    CHECK(pair.layer_deletions[0] == 3);
    REQUIRE(pair.ephemeral_ids.size() == 1);
    CHECK(pair.ephemeral_ids[0].size() == 3);
  }

  // Each vaulting trace passes the ordering audit: enough distinct devices
  // deleted their key before the deposit moved, and the pair was verified.
  for (const std::string& process : {"vaulting-p0", "vaulting-p1"}) {
    const ProcessTrace* trace = FindTrace(sim, process);
    REQUIRE(trace != nullptr);
    CHECK(trace->completed);
    CHECK(AuditVaultingTrace(*trace, 3, 2).empty());
  }

  // Funds at rest: the deposit output carries the partition plus the embedded
  // vault-transaction fee.
  const auto resting = sim.RestingOutpoint(sim.Pair(0));
  REQUIRE(resting.has_value());
  CHECK(resting->first == sim.Pair(0).plan.deposit_outpoint);
  CHECK(resting->second == 500'100);
  CHECK(sim.FundsInFlight() == 0);

  // Both watchtowers track both pairs.
  REQUIRE(sim.nodes().size() == 2);
  CHECK(sim.nodes()[0].Watches().size() == 2);
  CHECK(sim.nodes()[1].Watches().size() == 2);

  Simulation::Tally tally = sim.TallyFunds();
  CHECK(tally.funded == 802'400);  // 2'000 fee wallet + 500'200 + 300'200
  CHECK(tally.fees == 200);        // one embedded fee per deposit
  CHECK(tally.owner == 802'200);
  CHECK(tally.attacker == 0);
  CHECK(tally.frozen == 0);

  // Un-vault the first partition: broadcast, ride out the timelock, spend.
  CHECK(sim.RunUnvault(0).completed);
  CHECK(sim.Pair(0).completed);
  CHECK_FALSE(sim.Pair(0).unvault_broadcast);
  CHECK(sim.FundsInFlight() == 0);
  CHECK_FALSE(sim.RestingOutpoint(sim.Pair(0)).has_value());

  // The authorized un-vault informs the owner without triggering a response.
  CHECK(sim.HasAlert("unvault-detected"));
  CHECK_FALSE(sim.HasAlert("unauthorized-unvault"));
  CHECK_FALSE(sim.HasAlert("vault-spend"));

  tally = sim.TallyFunds();
  CHECK(tally.fees == 400);  // + vault transaction fee + completing spend fee
  CHECK(tally.owner == 802'000);
  CHECK(tally.attacker == 0);
}

TEST_CASE("identical seeds replay identical chains") {
  struct RunDigest {
    std::vector<std::string> events;
    Amount owner = 0;
    OutPoint first_deposit;
  };
  const auto run = [](uint64_t seed) {
    Simulation sim(SmallConfig(seed));
    sim.RunSetup();
    sim.FundWallets();
    sim.RunVaulting();
    sim.RunUnvault(0);
    RunDigest digest;
    for (const auto& event : sim.chain().EventLog()) {
      digest.events.push_back(std::to_string(event.height) + " " + event.kind + " " +
                              HexStr(event.txid));
    }
    digest.owner = sim.TallyFunds().owner;
    digest.first_deposit = sim.Pair(0).plan.deposit_outpoint;
    return digest;
  };
  const RunDigest a = run(42);
  const RunDigest b = run(42);
  const RunDigest c = run(43);

  CHECK(a.events == b.events);
  CHECK(a.owner == b.owner);

  // A different seed yields different keys, hence different transactions.
  CHECK(a.first_deposit != c.first_deposit);
}

TEST_CASE("un-vault throttle limits flight value and spacing") {
  ScenarioConfig config = SmallConfig();

  SUBCASE("a second un-vault would exceed the funds-in-flight cap") {
    config.policy.max_funds_in_flight = 500'000;
    config.policy.min_blocks_between_unvaults = 0;
    Simulation sim(config);
    sim.RunSetup();
    sim.FundWallets();
    sim.RunVaulting();
    CHECK(sim.RunUnvaultBroadcast(0).completed);
    CHECK(sim.FundsInFlight() == 500'000);

    ProcessTrace& refused = sim.RunUnvaultBroadcast(1);
    CHECK_FALSE(refused.completed);
    CHECK(refused.abort_reason == "throttle: funds in flight would exceed policy");
    CHECK(HasStep(refused, "interface", "throttle check", "refused"));

    // Finishing the first un-vault frees the budget.
    sim.MineAndPump(config.topology.timelock - 1);
    CHECK(sim.RunUnvaultComplete(0).completed);
    CHECK(sim.FundsInFlight() == 0);
    CHECK(sim.RunUnvaultBroadcast(1).completed);
  }

  SUBCASE("un-vaults must be spaced by the configured number of blocks") {
    config.policy.max_funds_in_flight = 900'000;  // room for both partitions
    Simulation sim(config);
    sim.RunSetup();
    sim.FundWallets();
    sim.RunVaulting();
    CHECK(sim.RunUnvaultBroadcast(0).completed);

    ProcessTrace& refused = sim.RunUnvaultBroadcast(1);
    CHECK_FALSE(refused.completed);
    CHECK(refused.abort_reason == "throttle: spacing between un-vaults");

    sim.MineAndPump(sim.config().MinBlocksBetweenUnvaults());
    CHECK(sim.RunUnvaultBroadcast(1).completed);
  }

  SUBCASE("frozen and settled pairs refuse further un-vaults") {
    Simulation sim(config);
    sim.RunSetup();
    sim.FundWallets();
    sim.RunVaulting();

    sim.FreezePair(1);
    CHECK(sim.RunUnvaultBroadcast(1).abort_reason == "pair is frozen by policy");

    // Frozen funds are tallied separately from free owner funds.
    const Simulation::Tally tally = sim.TallyFunds();
    CHECK(tally.frozen == 300'100);
    CHECK(tally.owner == 802'200 - 300'100);

    CHECK(sim.RunUnvault(0).completed);
    CHECK(sim.RunUnvaultBroadcast(0).abort_reason == "pair already settled");
  }
}

TEST_CASE("external payments verify the displayed address over both channels") {
  ScenarioConfig config = SmallConfig();
  Simulation sim(config);
  sim.RunSetup();
  sim.FundWallets();

  SUBCASE("a clean payment lands on the fresh address") {
    ProcessTrace& trace = sim.RunExternalPayment(250'000, /*tampered=*/false);
    CHECK(trace.completed);
    const Simulation::Tally tally = sim.TallyFunds();
    CHECK(tally.funded == 802'400 + 250'000);
    CHECK(tally.attacker == 0);
    CHECK(tally.owner == tally.funded - tally.fees);
  }

  SUBCASE("a substituted address is caught by the out-of-band check") {
    ProcessTrace& trace = sim.RunExternalPayment(250'000, /*tampered=*/true);
    CHECK_FALSE(trace.completed);
    CHECK(trace.abort_reason == "address verification failed; payment not released");
    CHECK(HasStep(trace, "active-0", "verify displayed address over both channels", "mismatch"));
    // The payment was never released: nothing new was funded.
    CHECK(sim.TallyFunds().funded == 802'400);
    CHECK(sim.TallyFunds().attacker == 0);
  }

  SUBCASE("with both channels compromised the substituted address is funded") {
    sim.fleet().Device(WalletRole::Active, 0).channel.inband_compromised = true;
    sim.fleet().Device(WalletRole::Active, 0).channel.oob_compromised = true;
    ProcessTrace& trace = sim.RunExternalPayment(250'000, /*tampered=*/true);
    CHECK(trace.completed);
    CHECK(HasStep(trace, "owner", "payer settles invoice", "address had been substituted"));
    CHECK(sim.TallyFunds().attacker == 250'000);
  }
}

TEST_CASE("recovery pushes funds to the recovery wallet ahead of any timelock") {
  ScenarioConfig config = SmallConfig();
  config.funds.partitions = {500'000};

  SUBCASE("recovery from rest broadcasts the stored pair and the push") {
    Simulation sim(config);
    sim.RunSetup();
    sim.FundWallets();
    sim.RunVaulting();

    ProcessTrace& trace = sim.RunRecovery({0}, "storage audit failed");
    CHECK(trace.completed);
    CHECK(sim.Pair(0).recovered);
    CHECK_FALSE(sim.RestingOutpoint(sim.Pair(0)).has_value());
    CHECK(HasStep(trace, "watchtower-0", "provide stored recovery push"));
    CHECK(HasStep(trace, "fee-wallet", "attach fee input to the recovery push", "ok"));
    CHECK(sim.HasAlert("recovery-broadcast"));

    Simulation::Tally tally = sim.TallyFunds();
    CHECK(tally.funded == 502'200);
    CHECK(tally.fees == 700);  // deposit 100 + vault tx 100 + fee coin 500
    CHECK(tally.owner == 501'500);
    CHECK(tally.attacker == 0);

    // The owner can then sweep the recovery output back to the active wallet.
    sim.OwnerSalvageRecoveryOutputs(config.feerates.owner);
    sim.MineAndPump(1);
    tally = sim.TallyFunds();
    CHECK(tally.fees == 800);
    CHECK(tally.owner == 501'400);
    const Script recovery_script = sim.LiveNode(sim.Pair(0)).pair.recovery_script;
    for (const auto& [outpoint, entry] : sim.chain().UtxoSet()) {
      CHECK_FALSE(entry.script == recovery_script);
    }
  }

  SUBCASE("recovery interrupts an un-vault already in flight") {
    Simulation sim(config);
    sim.RunSetup();
    sim.FundWallets();
    sim.RunVaulting();
    CHECK(sim.RunUnvaultBroadcast(0).completed);
    const int broadcast_height = sim.chain().GetHeight();

    CHECK(sim.RunRecovery({0}, "suspicious un-vault").completed);
    CHECK(sim.Pair(0).recovered);
    CHECK_FALSE(sim.Pair(0).unvault_broadcast);
    CHECK(sim.FundsInFlight() == 0);
    // The push confirmed well inside the timelock window.
    CHECK(sim.chain().GetHeight() == broadcast_height + 1);
    CHECK(sim.TallyFunds().attacker == 0);
  }

  SUBCASE("a compromise-motivated recovery rotates the recovery wallet") {
    Simulation sim(config);
    sim.RunSetup();
    sim.FundWallets();
    sim.RunVaulting();
    ProcessTrace& trace = sim.RunRecovery({0}, "recovery wallet compromise");
    CHECK(trace.completed);
    CHECK(HasStep(trace, "owner", "instantiate replacement recovery wallet"));
    CHECK(HasStep(trace, "owner", "previous recovery wallet assumes the active role"));
  }

  SUBCASE("settled pairs are skipped") {
    Simulation sim(config);
    sim.RunSetup();
    sim.FundWallets();
    sim.RunVaulting();
    sim.RunUnvault(0);
    ProcessTrace& trace = sim.RunRecovery({0}, "drill");
    CHECK(trace.completed);
    CHECK(HasStep(trace, "owner", "pair p0 already settled"));
    CHECK_FALSE(sim.Pair(0).recovered);
  }

  SUBCASE("a dead first holder fails over to the next one") {
    config.options.kill_nodes = {0};
    Simulation sim(config);
    sim.RunSetup();
    sim.FundWallets();
    sim.RunVaulting();
    ProcessTrace& trace = sim.RunRecovery({0}, "holder failover drill");
    CHECK(trace.completed);
    CHECK(sim.Pair(0).recovered);
    CHECK_FALSE(HasStep(trace, "watchtower-0", "provide stored recovery push"));
    CHECK(HasStep(trace, "watchtower-1", "provide stored recovery push"));
  }
}

TEST_CASE("re-vault drops funds one covenant layer deeper") {
  ScenarioConfig config = SmallConfig();
  config.revault_layers = 2;
  config.revault_fee_tiers = 2;
  config.funds.partitions = {400'000};
  Simulation sim(config);
  sim.RunSetup();
  sim.FundWallets();
  sim.RunVaulting();

  PairState& pair = sim.Pair(0);
  REQUIRE(pair.ephemeral_ids.size() == 2);  // one key set per layer
  REQUIRE(sim.LiveNode(pair).children.size() == 2);
  REQUIRE(sim.LiveNode(pair).revault_txs.size() == 2);
  // Tier 0 embeds the highest fee: (tiers - tier) * step.
  CHECK(sim.LiveNode(pair).revault_fees[0] == 200);
  CHECK(sim.LiveNode(pair).revault_fees[1] == 100);

  CHECK(sim.RunRevault(0, 5).abort_reason == "no such fee tier");

  ProcessTrace& trace = sim.RunRevault(0, 0);
  CHECK(trace.completed);
  CHECK(pair.live_path == std::vector<size_t>{0});
  CHECK(sim.HasAlert("revault-broadcast"));

  // The deeper node's deposit output now holds the funds, minus the embedded
  // re-vault fee.
  const VaultNode& deeper = sim.LiveNode(pair);
  CHECK(deeper.pair.amount == 399'700);
  const auto resting = sim.RestingOutpoint(pair);
  REQUIRE(resting.has_value());
  CHECK(resting->first == deeper.pair.deposit_outpoint);
  CHECK(resting->second == 399'800);

  // Watchtowers were re-registered on the deeper pair.
  const ProcessTrace* refresh = FindTrace(sim, "watch-refresh-p0");
  REQUIRE(refresh != nullptr);
  CHECK(refresh->completed);
  CHECK(sim.nodes()[0].Watches().count(deeper.pair.vault_txid) == 1);

  // The funds exit through the deeper layer's own timelocked path.
  CHECK(sim.RunUnvault(0).completed);
  CHECK(pair.completed);
  const Simulation::Tally tally = sim.TallyFunds();
  CHECK(tally.funded == 402'200);
  CHECK(tally.fees == 600);  // deposit + vault tx + re-vault 200 + deeper vault tx + spend
  CHECK(tally.owner == 401'600);
  CHECK(tally.attacker == 0);
}

TEST_CASE("re-vault is refused when no deeper layer exists") {
  ScenarioConfig config = SmallConfig();
  config.funds.partitions = {400'000};
  Simulation sim(config);
  sim.RunSetup();
  sim.FundWallets();
  sim.RunVaulting();
  CHECK(sim.RunRevault(0, 0).abort_reason == "no deeper covenant layer exists");
}

TEST_CASE("device rotation swaps one device without touching the others") {
  ScenarioConfig config = SmallConfig();
  config.funds.partitions = {300'000};

  SUBCASE("fee devices are not rotated") {
    Simulation sim(config);
    sim.RunSetup();
    CHECK(sim.RunDeviceRotation(WalletRole::Fee, 0).abort_reason ==
          "fee devices are replaced by re-funding, not rotation");
  }

  SUBCASE("rotating a device outside the roster is refused") {
    Simulation sim(config);
    sim.RunSetup();
    CHECK(sim.RunDeviceRotation(WalletRole::Vault, 9).abort_reason ==
          "device is not part of the current roster");
  }

  SUBCASE("active rotation leaves pre-signed pairs spendable") {
    Simulation sim(config);
    sim.RunSetup();
    sim.FundWallets();
    sim.RunVaulting();
    ProcessTrace& trace = sim.RunDeviceRotation(WalletRole::Active, 1);
    CHECK(trace.completed);
    CHECK(sim.fleet().DeviceCount(WalletRole::Active) == 4);
    // The vault script was fixed before rotation; the original signers still
    // hold its keys, so the pair un-vaults normally.
    CHECK(sim.RunUnvault(0).completed);
    CHECK(sim.TallyFunds().attacker == 0);
  }

  SUBCASE("vault rotation changes which devices mint future ephemeral keys") {
    Simulation sim(config);
    sim.RunSetup();
    sim.FundWallets();
    ProcessTrace& trace = sim.RunDeviceRotation(WalletRole::Vault, 0);
    CHECK(trace.completed);
    CHECK(HasStep(trace, "owner", "future vaultings use the replacement device"));
    sim.RunVaulting();
    REQUIRE(sim.pairs().size() == 1);
    CHECK(sim.Pair(0).ephemeral_ids[0][0].rfind("vault-3/eph/", 0) == 0);
    CHECK(sim.RunUnvault(0).completed);
  }

  SUBCASE("recovery rotation migrates resting pairs to the replacement set") {
    Simulation sim(config);
    sim.RunSetup();
    sim.FundWallets();
    sim.RunVaulting();
    ProcessTrace& trace = sim.RunDeviceRotation(WalletRole::Recovery, 0);
    CHECK(trace.completed);
    CHECK(sim.fleet().DeviceCount(WalletRole::Recovery) == 4);

    // The old pair was un-vaulted and re-vaulted under a fresh recovery
    // address assembled from the cached window plus the replacement's keys.
    REQUIRE(sim.pairs().size() == 2);
    CHECK(sim.Pair(0).completed);
    CHECK(sim.Pair(1).deposit_confirmed);
    CHECK_FALSE(sim.Pair(1).completed);
    CHECK(sim.Pair(1).recovery_address_index == 1);
    CHECK(sim.Pair(1).amount == 299'700);  // two transaction fees on the way

    // The migrated pair recovers onto the replacement set, and the
    // replacement device signs the salvage sweep.
    CHECK(sim.RunRecovery({1}, "post-rotation drill").completed);
    CHECK(sim.Pair(1).recovered);
    sim.OwnerSalvageRecoveryOutputs(config.feerates.owner);
    sim.MineAndPump(1);
    const Simulation::Tally tally = sim.TallyFunds();
    CHECK(tally.attacker == 0);
    CHECK(tally.frozen == 0);
    CHECK(tally.owner == tally.funded - tally.fees);
    const Script recovery_script = sim.LiveNode(sim.Pair(1)).pair.recovery_script;
    for (const auto& [outpoint, entry] : sim.chain().UtxoSet()) {
      CHECK_FALSE(entry.script == recovery_script);
    }
  }
}

TEST_CASE("health check proves reserves without touching chain state") {
  ScenarioConfig config = SmallConfig();
  config.funds.partitions = {300'000};
  Simulation sim(config);
  sim.RunSetup();
  sim.FundWallets();
  sim.RunVaulting();

  const int height_before = sim.chain().GetHeight();
  const size_t utxos_before = sim.chain().UtxoSet().size();

  SUBCASE("a healthy deployment reports every component ok") {
    CHECK(sim.RunHealthCheck().completed);
    const HealthReport& report = sim.LastHealth();
    CHECK(report.AllOk());
    // Active, recovery and fee wallets each contribute 3 device entries plus
    // one unmineable-probe entry (vault keys are ephemeral, so that wallet is
    // covered by the storage audit instead): 3 holders for each of the two
    // stored covenant halves, then one consistency entry per watchtower.
    CHECK(report.entries.size() == 3 * 4 + 2 * 3 + 2);
    bool probe_checked = false;
    for (const HealthEntry& entry : report.entries) {
      if (entry.component == "active-wallet") {
        probe_checked = true;
        CHECK(entry.detail == "probe rejected as expected");
      }
    }
    CHECK(probe_checked);
  }

  SUBCASE("a corrupted storage copy diverges from the quorum") {
    auto bytes = sim.fleet().FetchBlob(WalletRole::Vault, 2, "L0/p0/avt");
    REQUIRE(bytes.has_value());
    (*bytes)[10] ^= 0xff;
    sim.fleet().StoreBlob(WalletRole::Vault, 2, "L0/p0/avt", *bytes);

    CHECK(sim.RunHealthCheck().completed);
    CHECK_FALSE(sim.LastHealth().AllOk());
    bool flagged = false;
    for (const HealthEntry& entry : sim.LastHealth().entries) {
      if (entry.component == "vault-2:L0/p0/avt") {
        flagged = true;
        CHECK_FALSE(entry.ok);
        CHECK(entry.detail == "storage digest diverges");
      } else if (entry.component == "vault-0:L0/p0/avt" ||
                 entry.component == "vault-1:L0/p0/avt") {
        CHECK(entry.ok);
      }
    }
    CHECK(flagged);

    // The intact copies still drive a successful un-vault.
    CHECK(sim.RunUnvault(0).completed);
  }

  SUBCASE("failed devices are reported unreachable") {
    sim.fleet().FailDevice(WalletRole::Vault, 1);
    sim.fleet().FailDevice(WalletRole::Active, 2);
    CHECK(sim.RunHealthCheck().completed);
    CHECK_FALSE(sim.LastHealth().AllOk());
    bool vault_flagged = false;
    bool active_flagged = false;
    bool probe_ok = false;
    for (const HealthEntry& entry : sim.LastHealth().entries) {
      if (entry.component == "vault-1:L0/p0/avt") {
        vault_flagged = true;
        CHECK(entry.detail == "unreachable");
      }
      if (entry.component == "active-2") {
        active_flagged = true;
        CHECK(entry.detail == "unreachable");
      }
      // Two live signers still meet the threshold, so the probe still ran.
      if (entry.component == "active-wallet") probe_ok = entry.ok;
    }
    CHECK(vault_flagged);
    CHECK(active_flagged);
    CHECK(probe_ok);
  }

  // Whatever the health check did, it never moved funds or mined a block.
  CHECK(sim.chain().GetHeight() == height_before);
  CHECK(sim.chain().UtxoSet().size() == utxos_before);
  CHECK(sim.chain().PoolTxids(Visibility::Public).empty());
}

TEST_CASE("the vaulting-trace auditor flags ordering violations") {
  ProcessTrace clean{"vaulting-p0", {}, true, ""};
  clean.Step("vault-0", "verify covenant pair");
  clean.Step("vault-0", "delete ephemeral key vault-0/eph/p0/L0");
  clean.Step("vault-1", "delete ephemeral key vault-1/eph/p0/L0");
  clean.Step("interface", "broadcast deposit");
  CHECK(AuditVaultingTrace(clean, 3, 2).empty());

  SUBCASE("a trace without a broadcast is reported as such") {
    ProcessTrace trace{"vaulting-p0", {}, false, ""};
    trace.Step("vault-0", "delete ephemeral key x");
    const auto findings = AuditVaultingTrace(trace, 3, 2);
    REQUIRE(findings.size() == 1);
    CHECK(findings[0] == "deposit was never broadcast");
  }

  SUBCASE("broadcasting before any deletion is the classic violation") {
    ProcessTrace trace{"vaulting-p0", {}, true, ""};
    trace.Step("vault-0", "verify covenant pair");
    trace.Step("interface", "broadcast deposit");
    trace.Step("vault-0", "delete ephemeral key x0");
    trace.Step("vault-1", "delete ephemeral key x1");
    const auto findings = AuditVaultingTrace(trace, 3, 2);
    REQUIRE(findings.size() == 1);
    CHECK(findings[0] ==
          "deposit broadcast after deletions on only 0 devices (need 2 before funds move)");
  }

  SUBCASE("repeat deletions by one device do not count twice") {
    ProcessTrace trace{"vaulting-p0", {}, true, ""};
    trace.Step("vault-0", "verify covenant pair");
    trace.Step("vault-0", "delete ephemeral key x0");
    trace.Step("vault-0", "delete ephemeral key x0-again");
    trace.Step("interface", "broadcast deposit");
    const auto findings = AuditVaultingTrace(trace, 3, 2);
    REQUIRE(findings.size() == 1);
    CHECK(findings[0] ==
          "deposit broadcast after deletions on only 1 devices (need 2 before funds move)");
  }

  SUBCASE("a missing verification step is its own finding") {
    ProcessTrace trace{"vaulting-p0", {}, true, ""};
    trace.Step("vault-0", "delete ephemeral key x0");
    trace.Step("vault-1", "delete ephemeral key x1");
    trace.Step("interface", "broadcast deposit");
    const auto findings = AuditVaultingTrace(trace, 3, 2);
    REQUIRE(findings.size() == 1);
    CHECK(findings[0] == "no device verified the covenant pair");
  }

  CHECK(TraceTouchesActor(clean, "vault-"));
  CHECK(TraceTouchesActor(clean, "interface"));
  CHECK_FALSE(TraceTouchesActor(clean, "watchtower"));
}

TEST_CASE("responders stood down leave recovery to the owner's own copy") {
  ScenarioConfig config = SmallConfig();
  config.funds.partitions = {400'000};
  config.topology.p2rw_storage = 3;  // watchtowers hold two copies, owner one
  Simulation sim(config);
  sim.RunSetup();
  sim.FundWallets();
  sim.RunVaulting();
  sim.StandDownResponders();

  // A hostile un-vault now alerts but draws no automatic response.
  const Transaction avt = sim.LiveNode(sim.Pair(0)).pair.avt;
  const Txid vault_txid = ComputeTxid(avt);
  REQUIRE(sim.chain().Submit(avt, config.feerates.attacker, Visibility::Public).accepted);
  sim.MineAndPump(1);
  CHECK(sim.HasAlert("unauthorized-unvault"));
  CHECK_FALSE(sim.HasAlert("recovery-broadcast"));
  CHECK(sim.chain().GetUtxo(OutPoint{vault_txid, 0}).has_value());

  // The owner still holds the last configured copy of the recovery push.
  ProcessTrace& trace = sim.RunRecovery({0}, "alert raised while responders stood down");
  CHECK(trace.completed);
  CHECK(HasStep(trace, "interface", "provide stored recovery push"));
  CHECK(sim.Pair(0).recovered);
  CHECK(sim.TallyFunds().attacker == 0);
}

TEST_CASE("stored pairs survive storage-device failures up to redundancy") {
  ScenarioConfig config = SmallConfig();
  config.funds.partitions = {300'000};

  SUBCASE("one dead holder is routed around") {
    Simulation sim(config);
    sim.RunSetup();
    sim.FundWallets();
    sim.RunVaulting();
    sim.fleet().FailDevice(WalletRole::Vault, 0);
    ProcessTrace& trace = sim.RunUnvaultBroadcast(0);
    CHECK(trace.completed);
    CHECK(HasStep(trace, "vault-0", "fetch stored vault transaction", "unavailable"));
    CHECK(HasStep(trace, "vault-1", "fetch stored vault transaction", "ok"));
  }

  SUBCASE("losing every holder strands the pair") {
    Simulation sim(config);
    sim.RunSetup();
    sim.FundWallets();
    sim.RunVaulting();
    for (int device = 0; device < 3; ++device) {
      sim.fleet().FailDevice(WalletRole::Vault, device);
    }
    CHECK(sim.RunUnvaultBroadcast(0).abort_reason ==
          "stored covenant unavailable on every device");
  }

  SUBCASE("the storage set is the smaller of redundancy and device count") {
    config.topology.avt_storage = 2;
    Simulation sim(config);
    sim.RunSetup();
    sim.FundWallets();
    sim.RunVaulting();
    CHECK(sim.StorageDeviceCount() == 2);
    CHECK(sim.fleet().FetchBlob(WalletRole::Vault, 0, "L0/p0/avt").has_value());
    CHECK(sim.fleet().FetchBlob(WalletRole::Vault, 1, "L0/p0/avt").has_value());
    CHECK_FALSE(sim.fleet().FetchBlob(WalletRole::Vault, 2, "L0/p0/avt").has_value());
  }
}

TEST_CASE("wallet signing requires a live threshold of devices") {
  ScenarioConfig config = SmallConfig();
  Simulation sim(config);
  sim.RunSetup();
  sim.FundWallets();
  sim.fleet().FailDevice(WalletRole::Active, 0);
  sim.fleet().FailDevice(WalletRole::Active, 1);

  Transaction probe;
  probe.inputs.push_back(TxInput{OutPoint{}, 0});
  probe.outputs.push_back(TxOutput{1'000, Script().PushInt(1)});
  CHECK_THROWS_WITH_AS(sim.SignWalletInput(WalletRole::Active, 2, 0, probe, 0,
                                           sim.ActiveAddress(0), 1'000, SighashMode::All,
                                           std::nullopt),
                       "insufficient live devices to sign for active", DeviceFailedError);
}

TEST_CASE("the template mechanism runs the same lifecycle without key deletion") {
  ScenarioConfig config = SmallConfig();
  config.mechanism = Mechanism::Ctv;
  config.funds.partitions = {400'000};

  SUBCASE("vault and un-vault complete with template commitments alone") {
    Simulation sim(config);
    sim.RunSetup();
    sim.FundWallets();
    CHECK(sim.RunVaulting().completed);
    REQUIRE(sim.pairs().size() == 1);
    const PairState& pair = sim.Pair(0);
    CHECK(pair.ctv.has_value());
    CHECK(pair.ephemeral_ids.empty());
    CHECK(pair.layer_deletions == std::vector<int>{0});
    CHECK(pair.deposit_confirmed);

    // Each storage device holds the bare and fee-slot variants of both hops.
    for (const std::string label : {"L0/p0/avt", "L0/p0/avt-fee", "L0/p0/p2rw",
                                    "L0/p0/p2rw-fee"}) {
      CHECK(sim.fleet().FetchBlob(WalletRole::Vault, 0, label).has_value());
    }

    CHECK(sim.RunUnvault(0).completed);
    CHECK(sim.HasAlert("unvault-detected"));
    const Simulation::Tally tally = sim.TallyFunds();
    CHECK(tally.funded == 402'200);
    CHECK(tally.fees == 300);
    CHECK(tally.owner == 401'900);
    CHECK(tally.attacker == 0);
  }

  SUBCASE("recovery fee-bumps through the committed fee slot") {
    Simulation sim(config);
    sim.RunSetup();
    sim.FundWallets();
    sim.RunVaulting();
    ProcessTrace& trace = sim.RunRecovery({0}, "drill");
    CHECK(trace.completed);
    CHECK(sim.Pair(0).recovered);
    CHECK(HasStep(trace, "fee-wallet", "attach fee input to the recovery push", "ok"));
    const Simulation::Tally tally = sim.TallyFunds();
    // Deposit fee + vault-transaction fee + the fee coin consumed by the
    // fee-slot variant of the recovery push.
    CHECK(tally.fees == 700);
    CHECK(tally.owner == tally.funded - tally.fees);
    CHECK(tally.attacker == 0);
  }

  SUBCASE("recovery interrupts an un-vault in flight") {
    Simulation sim(config);
    sim.RunSetup();
    sim.FundWallets();
    sim.RunVaulting();
    CHECK(sim.RunUnvaultBroadcast(0).completed);
    CHECK(sim.RunRecovery({0}, "suspicious un-vault").completed);
    CHECK(sim.Pair(0).recovered);
    CHECK(sim.TallyFunds().attacker == 0);
  }
}

}  // TEST_SUITE
