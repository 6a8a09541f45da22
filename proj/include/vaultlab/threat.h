// Copyright (c) 2026 The vaultlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef VAULTLAB_THREAT_H
#define VAULTLAB_THREAT_H

#include <optional>
#include <string>
#include <vector>

#include <vaultlab/orchestrator.h>

namespace vaultlab {

/** Outcome classes, ordered by severity. A scenario's class may legitimately
 *  depend on the mechanism and on owner options; ExpectedClass captures that. */
enum class ScenarioClass : uint8_t {
  NoLoss = 0,       // the adversary ends with nothing
  LimitedLoss = 1,  // the adversary gains something, but not the vaulted total
  Catastrophic = 2, // the adversary drains (essentially) every vaulted coin
};

std::string ClassName(ScenarioClass cls);
std::optional<ScenarioClass> ClassFromName(const std::string& name);

/** Embedded fee in the adversary's theft transactions. Zero: the adversary
 *  compensates miners out of band (the bribe/priority channel), so a theft
 *  claims the stolen output in full and gains compare exactly against
 *  partition amounts. */
inline constexpr Amount kAdversaryFee = 0;

/** Slack when testing whether a gain amounts to "everything": the owner's own
 *  embedded fees nibble a few hundred sats off the vaulted total before the
 *  adversary gets to it. */
inline constexpr Amount kFeeAllowance = 1000;

/** What an attack scenario corrupts, as descriptive metadata. Used to check
 *  that outcome severity is monotone under set inclusion. */
struct CompromiseSet {
  std::vector<int> active_devices;
  std::vector<int> recovery_devices;
  std::vector<int> vault_devices;    // live-key capture (pre-vaulting)
  std::vector<int> fee_devices;
  std::vector<int> watchtower_nodes;
  bool covenant_storage = false;     // stored signed-transaction bundles leaked
  bool recovery_push_copies = false; // stored recovery pushes leaked
  bool human_channels = false;       // both verification channels of a signer

  bool SubsetOf(const CompromiseSet& other) const;
};

struct ScenarioOutcome {
  std::string scenario;
  Mechanism mechanism = Mechanism::DeletedKey;
  ScenarioClass cls = ScenarioClass::NoLoss;
  ScenarioClass expected = ScenarioClass::NoLoss;
  bool matches_expected = false;
  Amount attacker_gain = 0;
  Amount owner_total = 0;
  Amount frozen_total = 0;
  Amount fees_total = 0;
  Amount funded_total = 0;
  Amount vaulted_total = 0;
  std::vector<std::string> notes;
};

/** All scenario ids, in canonical order (honest first, then single-corruption
 *  cases, then compound ones, then the layered-storage case). */
std::vector<std::string> ScenarioCatalog();
bool KnownScenarioId(const std::string& id);
/** One-line description of what the scenario corrupts and plays out. */
std::string ScenarioDescription(const std::string& id);

/** The compromise metadata of a scenario under a given configuration. */
CompromiseSet ScenarioCompromises(const std::string& id, const ScenarioConfig& config);

/** The class a scenario is expected to produce under this configuration,
 *  accounting for the mechanism and owner options. */
ScenarioClass ExpectedClass(const std::string& id, const ScenarioConfig& config);

/** Play the scenario named by sim.config().scenario end to end: honest setup,
 *  the adversary's best deterministic moves, the owner's scripted reaction,
 *  then a full funds tally. Throws on unknown scenario ids. */
ScenarioOutcome RunScenario(Simulation& sim);

/** Minimal two-party fee race on a fresh micro-chain: one leaked single-key
 *  output, owner and attacker both try to claim it in the same block. */
struct RaceResult {
  bool owner_won = false;
  Txid winning_txid{};
};
RaceResult RunFeerateRace(int64_t owner_feerate, int64_t attacker_feerate, int64_t bribe,
                          bool attacker_private);

}  // namespace vaultlab

#endif  // VAULTLAB_THREAT_H
