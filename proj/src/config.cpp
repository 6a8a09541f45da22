// Copyright (c) 2026 The vaultlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <vaultlab/config.h>

#include <algorithm>
#include <fstream>

using nlohmann::json;

namespace vaultlab {

namespace {

// Typed field extraction; on a missing key the default survives, on a type
// mismatch the field name is reported.
template <typename T>
bool ReadField(const json& object, const char* key, T& out, const std::string& scope,
               std::string* error) {
  const auto it = object.find(key);
  if (it == object.end()) return true;
  try {
    out = it->get<T>();
    return true;
  } catch (const json::exception&) {
    if (error) *error = scope.empty() ? key : scope + "." + key;
    return false;
  }
}

}  // namespace

Amount ScenarioConfig::MaxFundsInFlight() const {
  if (policy.max_funds_in_flight > 0) return policy.max_funds_in_flight;
  Amount largest = 0;
  for (Amount partition : funds.partitions) largest = std::max(largest, partition);
  return largest;
}

int ScenarioConfig::MinBlocksBetweenUnvaults() const {
  if (policy.min_blocks_between_unvaults >= 0) return policy.min_blocks_between_unvaults;
  return topology.timelock;
}

std::optional<std::string> ScenarioConfig::Validate() const {
  if (schema_version != 1) return "schema_version";
  if (scenario.empty()) return "scenario";
  if (revault_layers < 1 || revault_layers > 4) return "revault_layers";
  if (revault_fee_tiers < 1 || revault_fee_tiers > 4) return "revault_fee_tiers";
  if (mechanism == Mechanism::Ctv && revault_layers > 1) return "revault_layers";
  if (auto field = topology.Validate()) return field;
  if (policy.max_funds_in_flight < 0) return "policy.max_funds_in_flight";
  if (funds.partitions.empty() || funds.partitions.size() > 8) return "funds.partitions";
  for (Amount partition : funds.partitions) {
    if (partition < 10'000) return "funds.partitions";
  }
  if (funds.fee_wallet < 0) return "funds.fee_wallet";
  if (funds.external_payment < 0) return "funds.external_payment";
  if (feerates.owner < 1) return "feerates.owner";
  if (feerates.attacker < 1) return "feerates.attacker";
  if (feerates.bribe < 0) return "feerates.bribe";
  if (feerates.recovery < 0) return "feerates.recovery";
  if (watchtower.rate_cap_count < 1) return "watchtower.rate_cap_count";
  if (watchtower.rate_cap_window < 1) return "watchtower.rate_cap_window";
  for (int node : options.kill_nodes) {
    if (node < 0 || node >= topology.watchtowers) return "options.kill_nodes";
  }
  if (expect_class && *expect_class != "no-loss" && *expect_class != "limited-loss" &&
      *expect_class != "catastrophic") {
    return "expect.class";
  }
  return std::nullopt;
}

json ScenarioConfig::ToJson() const {
  json j;
  j["schema_version"] = schema_version;
  j["name"] = name;
  j["scenario"] = scenario;
  j["seed"] = seed;
  j["mechanism"] = MechanismName(mechanism);
  j["revault_layers"] = revault_layers;
  j["revault_fee_tiers"] = revault_fee_tiers;
  j["topology"] = {
      {"active_threshold", topology.active_threshold},
      {"active_count", topology.active_count},
      {"recovery_threshold", topology.recovery_threshold},
      {"recovery_count", topology.recovery_count},
      {"vault_threshold", topology.vault_threshold},
      {"vault_count", topology.vault_count},
      {"fee_threshold", topology.fee_threshold},
      {"fee_count", topology.fee_count},
      {"avt_storage", topology.avt_storage},
      {"p2rw_storage", topology.p2rw_storage},
      {"watchtowers", topology.watchtowers},
      {"timelock", topology.timelock},
  };
  j["policy"] = {
      {"max_funds_in_flight", policy.max_funds_in_flight},
      {"min_blocks_between_unvaults", policy.min_blocks_between_unvaults},
  };
  j["funds"] = {
      {"partitions", funds.partitions},
      {"fee_wallet", funds.fee_wallet},
      {"external_payment", funds.external_payment},
  };
  j["feerates"] = {
      {"owner", feerates.owner},
      {"attacker", feerates.attacker},
      {"bribe", feerates.bribe},
      {"recovery", feerates.recovery},
  };
  j["watchtower"] = {
      {"variant", watchtower.variant == WatchtowerVariant::Responder ? "responder" : "notification"},
      {"rate_cap_count", watchtower.rate_cap_count},
      {"rate_cap_window", watchtower.rate_cap_window},
  };
  j["options"] = {
      {"owner_detects_recovery_compromise", options.owner_detects_recovery_compromise},
      {"kill_nodes", options.kill_nodes},
  };
  if (expect_class) j["expect"] = {{"class", *expect_class}};
  return j;
}

std::optional<ScenarioConfig> ScenarioConfig::FromJson(const json& j, std::string* error) {
  ScenarioConfig cfg;
  if (!j.is_object()) {
    if (error) *error = "document";
    return std::nullopt;
  }
  if (!ReadField(j, "schema_version", cfg.schema_version, "", error)) return std::nullopt;
  if (!ReadField(j, "name", cfg.name, "", error)) return std::nullopt;
  if (!ReadField(j, "scenario", cfg.scenario, "", error)) return std::nullopt;
  if (!ReadField(j, "seed", cfg.seed, "", error)) return std::nullopt;
  if (j.contains("mechanism")) {
    std::string mechanism;
    if (!ReadField(j, "mechanism", mechanism, "", error)) return std::nullopt;
    const auto parsed = MechanismFromName(mechanism);
    if (!parsed) {
      if (error) *error = "mechanism";
      return std::nullopt;
    }
    cfg.mechanism = *parsed;
  }
  if (!ReadField(j, "revault_layers", cfg.revault_layers, "", error)) return std::nullopt;
  if (!ReadField(j, "revault_fee_tiers", cfg.revault_fee_tiers, "", error)) return std::nullopt;

  if (j.contains("topology")) {
    const json& t = j.at("topology");
    if (!t.is_object()) {
      if (error) *error = "topology";
      return std::nullopt;
    }
    WalletTopology& topo = cfg.topology;
    if (!ReadField(t, "active_threshold", topo.active_threshold, "topology", error)) return std::nullopt;
    if (!ReadField(t, "active_count", topo.active_count, "topology", error)) return std::nullopt;
    if (!ReadField(t, "recovery_threshold", topo.recovery_threshold, "topology", error)) return std::nullopt;
    if (!ReadField(t, "recovery_count", topo.recovery_count, "topology", error)) return std::nullopt;
    if (!ReadField(t, "vault_threshold", topo.vault_threshold, "topology", error)) return std::nullopt;
    if (!ReadField(t, "vault_count", topo.vault_count, "topology", error)) return std::nullopt;
    if (!ReadField(t, "fee_threshold", topo.fee_threshold, "topology", error)) return std::nullopt;
    if (!ReadField(t, "fee_count", topo.fee_count, "topology", error)) return std::nullopt;
    if (!ReadField(t, "avt_storage", topo.avt_storage, "topology", error)) return std::nullopt;
    if (!ReadField(t, "p2rw_storage", topo.p2rw_storage, "topology", error)) return std::nullopt;
    if (!ReadField(t, "watchtowers", topo.watchtowers, "topology", error)) return std::nullopt;
    if (!ReadField(t, "timelock", topo.timelock, "topology", error)) return std::nullopt;
  }
  if (j.contains("policy")) {
    const json& p = j.at("policy");
    if (!p.is_object()) {
      if (error) *error = "policy";
      return std::nullopt;
    }
    if (!ReadField(p, "max_funds_in_flight", cfg.policy.max_funds_in_flight, "policy", error)) return std::nullopt;
    if (!ReadField(p, "min_blocks_between_unvaults", cfg.policy.min_blocks_between_unvaults, "policy", error)) return std::nullopt;
  }
  if (j.contains("funds")) {
    const json& f = j.at("funds");
    if (!f.is_object()) {
      if (error) *error = "funds";
      return std::nullopt;
    }
    if (!ReadField(f, "partitions", cfg.funds.partitions, "funds", error)) return std::nullopt;
    if (!ReadField(f, "fee_wallet", cfg.funds.fee_wallet, "funds", error)) return std::nullopt;
    if (!ReadField(f, "external_payment", cfg.funds.external_payment, "funds", error)) return std::nullopt;
  }
  if (j.contains("feerates")) {
    const json& f = j.at("feerates");
    if (!f.is_object()) {
      if (error) *error = "feerates";
      return std::nullopt;
    }
    if (!ReadField(f, "owner", cfg.feerates.owner, "feerates", error)) return std::nullopt;
    if (!ReadField(f, "attacker", cfg.feerates.attacker, "feerates", error)) return std::nullopt;
    if (!ReadField(f, "bribe", cfg.feerates.bribe, "feerates", error)) return std::nullopt;
    if (!ReadField(f, "recovery", cfg.feerates.recovery, "feerates", error)) return std::nullopt;
  }
  if (j.contains("watchtower")) {
    const json& w = j.at("watchtower");
    if (!w.is_object()) {
      if (error) *error = "watchtower";
      return std::nullopt;
    }
    if (w.contains("variant")) {
      std::string variant;
      if (!ReadField(w, "variant", variant, "watchtower", error)) return std::nullopt;
      if (variant == "responder") {
        cfg.watchtower.variant = WatchtowerVariant::Responder;
      } else if (variant == "notification") {
        cfg.watchtower.variant = WatchtowerVariant::Notification;
      } else {
        if (error) *error = "watchtower.variant";
        return std::nullopt;
      }
    }
    if (!ReadField(w, "rate_cap_count", cfg.watchtower.rate_cap_count, "watchtower", error)) return std::nullopt;
    if (!ReadField(w, "rate_cap_window", cfg.watchtower.rate_cap_window, "watchtower", error)) return std::nullopt;
  }
  if (j.contains("options")) {
    const json& o = j.at("options");
    if (!o.is_object()) {
      if (error) *error = "options";
      return std::nullopt;
    }
    if (!ReadField(o, "owner_detects_recovery_compromise",
                   cfg.options.owner_detects_recovery_compromise, "options", error)) {
      return std::nullopt;
    }
    if (!ReadField(o, "kill_nodes", cfg.options.kill_nodes, "options", error)) return std::nullopt;
  }
  if (j.contains("expect")) {
    const json& e = j.at("expect");
    if (!e.is_object()) {
      if (error) *error = "expect";
      return std::nullopt;
    }
    std::string klass;
    if (!ReadField(e, "class", klass, "expect", error)) return std::nullopt;
    if (!klass.empty()) cfg.expect_class = klass;
  }
  return cfg;
}

std::optional<ScenarioConfig> LoadConfigFile(const std::string& path, std::string* error) {
  std::ifstream in(path);
  if (!in) {
    if (error) *error = "cannot open " + path;
    return std::nullopt;
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    if (error) *error = "invalid JSON in " + path + ": " + e.what();
    return std::nullopt;
  }
  std::string field;
  auto cfg = ScenarioConfig::FromJson(j, &field);
  if (!cfg) {
    if (error) *error = "bad field: " + field;
    return std::nullopt;
  }
  if (auto bad = cfg->Validate()) {
    if (error) *error = "invalid value: " + *bad;
    return std::nullopt;
  }
  return cfg;
}

}  // namespace vaultlab
