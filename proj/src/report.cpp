// Copyright (c) 2026 The vaultlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <vaultlab/report.h>

#include <algorithm>
#include <sstream>

#include <vaultlab/hex.h>

namespace vaultlab {
namespace {

std::string Sanitize(const std::string& field) {
  std::string out = field;
  std::replace(out.begin(), out.end(), '\t', ' ');
  std::replace(out.begin(), out.end(), '\n', ' ');
  return out;
}

}  // namespace

std::string RenderTraceLog(const std::vector<ProcessTrace>& traces) {
  std::ostringstream out;
  for (const ProcessTrace& trace : traces) {
    for (const TraceStep& step : trace.steps) {
      out << Sanitize(trace.process) << '\t' << step.index << '\t' << Sanitize(step.actor)
          << '\t' << Sanitize(step.action) << '\t' << Sanitize(step.result) << '\n';
    }
    out << Sanitize(trace.process) << '\t' << "end" << '\t' << "-" << '\t'
        << (trace.completed ? "completed" : "aborted") << '\t'
        << (trace.abort_reason.empty() ? "ok" : Sanitize(trace.abort_reason)) << '\n';
  }
  return out.str();
}

std::string RenderChainLog(const Chain& chain) {
  std::ostringstream out;
  for (const ChainEventRec& event : chain.EventLog()) {
    out << event.height << '\t' << Sanitize(event.kind) << '\t' << HexStr(event.txid) << '\n';
  }
  return out.str();
}

std::string RenderAlertLog(const std::vector<Alert>& alerts) {
  std::ostringstream out;
  for (const Alert& alert : alerts) {
    out << alert.height << '\t' << alert.node_id << '\t' << Sanitize(alert.kind) << '\t'
        << HexStr(alert.txid) << '\t' << (alert.delivered ? "delivered" : "suppressed") << '\n';
  }
  return out.str();
}

nlohmann::json OutcomeJson(const ScenarioOutcome& outcome, const ScenarioConfig& config,
                           const Simulation& sim) {
  const Simulation::Tally tally = sim.TallyFunds();
  nlohmann::json j;
  j["schema_version"] = 1;
  j["name"] = config.name;
  j["scenario"] = outcome.scenario;
  j["seed"] = config.seed;
  j["mechanism"] = MechanismName(outcome.mechanism);
  j["class"] = ClassName(outcome.cls);
  j["expected_class"] = ClassName(outcome.expected);
  j["matches_expected"] = outcome.matches_expected;
  j["attacker_gain"] = outcome.attacker_gain;
  j["owner_total"] = outcome.owner_total;
  j["frozen_total"] = outcome.frozen_total;
  j["vaulted_total"] = outcome.vaulted_total;
  j["conservation"] = {
      {"funded", tally.funded},
      {"utxo_total", tally.attacker + tally.owner + tally.frozen},
      {"fees", tally.fees},
      {"holds", tally.attacker + tally.owner + tally.frozen + tally.fees == tally.funded},
  };
  j["notes"] = outcome.notes;
  return j;
}

nlohmann::json PlanJson(const Simulation& sim) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const PairState& pair : sim.pairs()) {
    const VaultNode& node = sim.LiveNode(pair);
    nlohmann::json p;
    p["index"] = pair.index;
    p["amount"] = pair.amount;
    p["deposit_txid"] = HexStr(pair.plan.deposit_outpoint.txid);
    p["deposit_vout"] = pair.plan.deposit_outpoint.vout;
    p["timelock"] = node.pair.timelock;
    p["live_layer"] = pair.live_path.size();
    p["live_path"] = pair.live_path;
    p["planned_vault_txid"] = HexStr(node.pair.vault_txid);
    p["deposit_confirmed"] = pair.deposit_confirmed;
    p["layer_deletions"] = pair.layer_deletions;
    p["unvault_in_flight"] = pair.unvault_broadcast;
    p["completed"] = pair.completed;
    p["recovered"] = pair.recovered;
    p["frozen"] = pair.frozen;
    pairs.push_back(std::move(p));
  }
  nlohmann::json j;
  j["schema_version"] = 1;
  j["mechanism"] = MechanismName(sim.config().mechanism);
  j["pairs"] = std::move(pairs);
  return j;
}

std::string RenderToleranceTable(const std::vector<ToleranceRow>& rows) {
  std::ostringstream out;
  out << "component              count  threshold  loss-tolerance  leak-tolerance\n";
  for (const ToleranceRow& row : rows) {
    std::string name = row.component;
    name.resize(21, ' ');
    std::string count = std::to_string(row.count);
    count.resize(5, ' ');
    std::string threshold = row.threshold > 0 ? std::to_string(row.threshold) : "-";
    threshold.resize(9, ' ');
    std::string loss = std::to_string(row.loss_tolerance);
    loss.resize(14, ' ');
    out << name << "  " << count << "  " << threshold << "  " << loss << "  "
        << row.leak_tolerance << '\n';
  }
  return out.str();
}

}  // namespace vaultlab
