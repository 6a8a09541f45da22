// Copyright (c) 2026 The vaultlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef VAULTLAB_CONFIG_H
#define VAULTLAB_CONFIG_H

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include <vaultlab/covenant.h>
#include <vaultlab/topology.h>
#include <vaultlab/transaction.h>
#include <vaultlab/watchtower.h>

namespace vaultlab {

struct FeerateConfig {
  int64_t owner = 3;
  int64_t attacker = 2;
  int64_t bribe = 5;     // extra per-byte priority a colluding miner grants
  int64_t recovery = 0;  // 0 = derive: attacker + bribe + 1

  bool operator==(const FeerateConfig&) const = default;
};

struct FundsConfig {
  std::vector<Amount> partitions{5'000'000, 3'000'000, 2'000'000};
  Amount fee_wallet = 2'000;
  Amount external_payment = 300'000;

  bool operator==(const FundsConfig&) const = default;
};

struct WatchtowerSettings {
  WatchtowerVariant variant = WatchtowerVariant::Responder;
  int rate_cap_count = 4;
  int rate_cap_window = 10;

  bool operator==(const WatchtowerSettings&) const = default;
};

struct ScenarioOptions {
  // When the owner learns of a recovery-wallet compromise in time, they can
  // stand responders down and ride the timelock out instead of recovering.
  bool owner_detects_recovery_compromise = false;
  std::vector<int> kill_nodes;  // watchtower ids to fail before the scenario

  bool operator==(const ScenarioOptions&) const = default;
};

struct ScenarioConfig {
  int schema_version = 1;
  std::string name;
  std::string scenario = "honest";
  uint64_t seed = 1;
  Mechanism mechanism = Mechanism::DeletedKey;
  int revault_layers = 1;   // 1 = no re-vault tree
  int revault_fee_tiers = 3;
  WalletTopology topology;
  UnvaultPolicy policy;
  FundsConfig funds;
  FeerateConfig feerates;
  WatchtowerSettings watchtower;
  ScenarioOptions options;
  std::optional<std::string> expect_class;

  int64_t RecoveryFeerate() const {
    return feerates.recovery > 0 ? feerates.recovery : feerates.attacker + feerates.bribe + 1;
  }
  Amount MaxFundsInFlight() const;
  int MinBlocksBetweenUnvaults() const;

  /** Returns the name of the first offending field, or nullopt if valid. */
  std::optional<std::string> Validate() const;

  nlohmann::json ToJson() const;
  /** Parses and shape-checks; on failure returns nullopt and names the bad
   *  field in `error`. */
  static std::optional<ScenarioConfig> FromJson(const nlohmann::json& json, std::string* error);

  bool operator==(const ScenarioConfig&) const = default;
};

/** Load a config file; on failure returns nullopt and fills `error`. */
std::optional<ScenarioConfig> LoadConfigFile(const std::string& path, std::string* error);

}  // namespace vaultlab

#endif  // VAULTLAB_CONFIG_H
