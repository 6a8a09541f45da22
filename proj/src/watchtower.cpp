// Copyright (c) 2026 The vaultlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <vaultlab/watchtower.h>

#include <algorithm>

#include <vaultlab/hash.h>
#include <vaultlab/serialize.h>

namespace vaultlab {

bool WatchtowerNode::Register(const WatchRequest& request, bool authenticated) {
  if (m_failed || !authenticated) return false;
  m_watches[request.vault_txid] = request;
  m_deposit_index[request.deposit_outpoint] = request.vault_txid;
  m_vault_index[OutPoint{request.vault_txid, 0}] = request.vault_txid;
  return true;
}

bool WatchtowerNode::Authorize(const Txid& txid, bool authenticated) {
  if (m_failed || !authenticated) return false;
  m_authorized.insert(txid);
  return true;
}

Alert WatchtowerNode::MakeAlert(int height, const std::string& kind, const Txid& txid) const {
  Alert alert;
  alert.height = height;
  alert.node_id = m_id;
  alert.kind = kind;
  alert.txid = txid;
  // A compromised node swallows its alerts; a compromised in-band channel
  // lets the adversary do the same from outside.
  alert.delivered = !m_compromised && !m_channel.inband_compromised;
  return alert;
}

void WatchtowerNode::Respond(Chain& chain, const WatchRequest& request, const Txid& observed_vault_txid) {
  if (m_compromised || m_policy.variant != WatchtowerVariant::Responder) return;
  if (!m_responded.insert(observed_vault_txid).second) return;
  if (!request.response_revaults.empty()) {
    // Re-vaulting is the preferred response: funds stay under covenant.
    chain.Submit(request.response_revaults.front(), m_policy.response_feerate, Visibility::Public);
    return;
  }
  if (request.response_p2rw.has_value()) {
    Transaction tx = *request.response_p2rw;
    if (request.instantiate_response) tx.inputs.at(0).prevout = OutPoint{observed_vault_txid, 0};
    chain.Submit(tx, m_policy.response_feerate, Visibility::Public);
  }
}

std::vector<Alert> WatchtowerNode::Observe(Chain& chain) {
  std::vector<Alert> alerts;
  if (m_failed) return alerts;  // a dead node's cursor freezes
  // The feed can grow while we respond; keep draining until caught up.
  while (m_cursor < chain.PublicFeed().size()) {
    const Observation obs = chain.PublicFeed()[m_cursor++];
    m_last_seen_height = std::max(m_last_seen_height, obs.height);
    if (obs.kind != "mempool" && obs.kind != "mined") continue;

    for (const TxInput& in : obs.tx.inputs) {
      const auto dep = m_deposit_index.find(in.prevout);
      if (dep != m_deposit_index.end()) {
        const WatchRequest& request = m_watches.at(dep->second);
        const bool recreates_vault =
            !obs.tx.outputs.empty() && obs.tx.outputs[0].script == request.vault_script;
        if (recreates_vault) {
          if (!m_seen_unvaults.insert(obs.txid).second) continue;
          // Track the realized vault output: template variants may carry a
          // txid that was unknowable at registration time.
          m_vault_index[OutPoint{obs.txid, 0}] = dep->second;
          m_unvault_heights.push_back(obs.height);
          while (!m_unvault_heights.empty() &&
                 m_unvault_heights.front() <= obs.height - m_policy.rate_cap_window) {
            m_unvault_heights.pop_front();
          }
          const bool authorized = m_authorized.count(obs.txid) > 0;
          if (authorized) {
            alerts.push_back(MakeAlert(obs.height, "unvault-detected", obs.txid));
          } else {
            alerts.push_back(MakeAlert(obs.height, "unauthorized-unvault", obs.txid));
            Respond(chain, request, obs.txid);
          }
          if (static_cast<int>(m_unvault_heights.size()) > m_policy.rate_cap_count) {
            alerts.push_back(MakeAlert(obs.height, "rate-exceeded", obs.txid));
          }
        } else if (m_alerted.insert(obs.txid).second) {
          // Something other than the covenant is draining the deposit.
          alerts.push_back(MakeAlert(obs.height, "deposit-spend", obs.txid));
        }
        continue;
      }

      const auto vlt = m_vault_index.find(in.prevout);
      if (vlt == m_vault_index.end()) continue;
      const WatchRequest& request = m_watches.at(vlt->second);
      const bool to_recovery =
          !obs.tx.outputs.empty() && obs.tx.outputs[0].script == request.recovery_script;
      bool is_revault = false;
      for (const Transaction& revault : request.response_revaults) {
        if (!obs.tx.outputs.empty() && obs.tx.outputs[0].script == revault.outputs[0].script) {
          is_revault = true;
          break;
        }
      }
      if (to_recovery) {
        if (m_alerted.insert(obs.txid).second) {
          alerts.push_back(MakeAlert(obs.height, "recovery-broadcast", obs.txid));
        }
      } else if (is_revault) {
        if (m_alerted.insert(obs.txid).second) {
          alerts.push_back(MakeAlert(obs.height, "revault-broadcast", obs.txid));
        }
      } else if (!m_authorized.count(obs.txid)) {
        if (m_alerted.insert(obs.txid).second) {
          alerts.push_back(MakeAlert(obs.height, "vault-spend", obs.txid));
          // Push funds to recovery; harmless if the hostile spend already won.
          Respond(chain, request, vlt->second);
        }
      }
    }
  }
  return alerts;
}

void WatchtowerNode::ClearResponses() {
  if (m_failed || m_compromised) return;  // an owner order reaches honest nodes only
  for (auto& [txid, request] : m_watches) {
    request.response_p2rw.reset();
    request.response_revaults.clear();
  }
}

ConsistencyReport WatchtowerNode::Consistency() const {
  ConsistencyReport report;
  report.node_id = m_id;
  report.reachable = !m_failed;
  report.last_seen_height = m_last_seen_height;
  report.watch_count = static_cast<int>(m_watches.size());
  ByteWriter writer;
  for (const auto& [txid, request] : m_watches) writer.Bytes(txid.data(), txid.size());
  report.watch_commitment = TaggedHash("vaultlab/watch-set", writer.Get());
  return report;
}

}  // namespace vaultlab
