// Copyright (c) 2026 The vaultlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef VAULTLAB_WATCHTOWER_H
#define VAULTLAB_WATCHTOWER_H

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <vaultlab/chain.h>
#include <vaultlab/fleet.h>
#include <vaultlab/transaction.h>

namespace vaultlab {

enum class WatchtowerVariant : uint8_t {
  Notification,  // alert only
  Responder,     // alert and push the stored response transaction
};

/** One registered covenant pair to watch. The node reacts to spends of the
 *  deposit outpoint and of the vault output. A spend of the deposit whose
 *  first output recreates the expected vault script is recognized as the
 *  vault transaction (this also covers template variants whose txid depends
 *  on a fee input chosen late). */
struct WatchRequest {
  Txid vault_txid{};
  OutPoint deposit_outpoint;
  Amount amount = 0;
  Script vault_script;
  Script recovery_script;                         // recognizes benign recovery pushes
  std::optional<Transaction> response_p2rw;       // responder copy
  bool instantiate_response = false;              // template: point input 0 at the observed vault output
  std::vector<Transaction> response_revaults;     // preferred over the recovery push when present
};

struct Alert {
  int height = 0;
  int node_id = 0;
  std::string kind;  // unauthorized-unvault | unvault-detected | deposit-spend | vault-spend |
                     // recovery-broadcast | revault-broadcast | rate-exceeded
  Txid txid{};
  bool delivered = false;  // false when the owner channel was compromised
};

struct WatchtowerPolicy {
  WatchtowerVariant variant = WatchtowerVariant::Responder;
  int rate_cap_count = 4;   // max un-vault sightings per window
  int rate_cap_window = 10; // blocks
  int64_t response_feerate = 8;
};

struct ConsistencyReport {
  int node_id = 0;
  bool reachable = false;
  int last_seen_height = -1;
  int watch_count = 0;
  Hash256 watch_commitment{};  // hash over the sorted watched vault txids
};

/** A single watchtower node, consuming the chain's public feed through a
 *  cursor. Failed nodes stop consuming; compromised nodes keep consuming but
 *  stay silent and leak their stored state. */
class WatchtowerNode {
 public:
  WatchtowerNode(int id, WatchtowerPolicy policy) : m_id(id), m_policy(policy) {}

  int Id() const { return m_id; }

  /** Both registration and authorization require the owner's authenticated
   *  channel; unauthenticated requests are dropped. */
  bool Register(const WatchRequest& request, bool authenticated);
  bool Authorize(const Txid& txid, bool authenticated);

  /** Consume fresh public observations; responders may submit transactions.
   *  Returns newly raised alerts (delivery already decided per channel). */
  std::vector<Alert> Observe(Chain& chain);

  ConsistencyReport Consistency() const;

  void Fail() { m_failed = true; }
  void Compromise() { m_compromised = true; }
  bool IsFailed() const { return m_failed; }
  bool IsCompromised() const { return m_compromised; }

  ChannelPair& Channel() { return m_channel; }
  const std::map<Txid, WatchRequest>& Watches() const { return m_watches; }
  /** Owner stand-down: drop stored responses, keep alert duty (used when the
   *  recovery wallet itself is suspect and pushing to it would be harmful). */
  void ClearResponses();
  void SetPolicy(const WatchtowerPolicy& policy) { m_policy = policy; }
  const WatchtowerPolicy& Policy() const { return m_policy; }

 private:
  void Respond(Chain& chain, const WatchRequest& request, const Txid& observed_vault_txid);
  Alert MakeAlert(int height, const std::string& kind, const Txid& txid) const;

  int m_id;
  WatchtowerPolicy m_policy;
  std::map<Txid, WatchRequest> m_watches;        // keyed by expected vault txid
  std::map<OutPoint, Txid> m_deposit_index;      // deposit outpoint -> watch key
  std::map<OutPoint, Txid> m_vault_index;        // realized vault outputs -> watch key
  std::set<Txid> m_authorized;
  std::set<Txid> m_seen_unvaults;                // dedupe across mempool + block sightings
  std::set<Txid> m_responded;
  std::set<Txid> m_alerted;                      // one alert per (txid) non-unvault event
  std::deque<int> m_unvault_heights;             // rate-cap window
  size_t m_cursor = 0;
  int m_last_seen_height = -1;
  ChannelPair m_channel;
  bool m_failed = false;
  bool m_compromised = false;
};

}  // namespace vaultlab

#endif  // VAULTLAB_WATCHTOWER_H
