// Copyright (c) 2026 The vaultlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef VAULTLAB_CHAIN_H
#define VAULTLAB_CHAIN_H

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <vaultlab/interpreter.h>
#include <vaultlab/transaction.h>

namespace vaultlab {

enum class Visibility {
  Public,        // relayed; observers see it in the mempool
  MinerPrivate,  // handed straight to the miner; first seen when mined
};

struct ChainEventRec {
  int height = 0;
  std::string kind;  // fund|mempool|mempool-private|replaced|evicted|mined|reject-*
  Txid txid{};
};

/** What a network observer (watchtower node) sees: public mempool activity
 *  and mined blocks. MinerPrivate transactions appear only once mined. */
struct Observation {
  int height = 0;
  std::string kind;  // mempool|replaced|evicted|mined
  Txid txid{};
  Transaction tx;
};

struct SubmitResult {
  bool accepted = false;
  /** "", malformed, duplicate, missing-input, fee, script, csv-premature, conflict */
  std::string reason;
  std::vector<Txid> replaced;
};

struct UtxoEntry {
  Amount amount = 0;
  Script script;
  int height = 0;  // block height at which the output was created
};

/** Single-node block simulator. No forks, no probabilistic propagation:
 *  blocks are mined on demand and every rule is deterministic, including
 *  conflict resolution (higher feerate wins; equal feerates fall back to the
 *  lexicographically smaller txid, independent of submission order). */
class Chain {
 public:
  explicit Chain(int64_t bribe_bonus = 0) : m_bribe_bonus(bribe_bonus) {}

  /** External deposit: creates a confirmed output at the current height and
   *  counts it toward the funding total. */
  OutPoint Fund(Amount amount, const Script& script);

  SubmitResult Submit(const Transaction& tx, int64_t feerate, Visibility vis);

  /** Assemble and connect one block: highest priority first (priority =
   *  feerate, plus the bribe bonus for MinerPrivate), ancestors always before
   *  descendants, ties to the smaller txid. Returns mined txids in order. */
  std::vector<Txid> MineBlock();

  int GetHeight() const { return m_height; }
  /** Mined: height-based depth (1 = in the tip block). In a pool: 0.
   *  Unknown txid: nullopt. */
  std::optional<int> GetConfirmations(const Txid& txid) const;
  bool IsUnspent(const OutPoint& op) const { return m_utxo.count(op) > 0; }
  std::optional<UtxoEntry> GetUtxo(const OutPoint& op) const;
  bool InPool(const Txid& txid) const;
  std::vector<Txid> PoolTxids(Visibility vis) const;

  const std::vector<ChainEventRec>& EventLog() const { return m_events; }
  const std::vector<Observation>& PublicFeed() const { return m_feed; }
  const std::map<OutPoint, UtxoEntry>& UtxoSet() const { return m_utxo; }

  Amount TotalFunded() const { return m_total_funded; }
  Amount TotalFees() const { return m_total_fees; }
  Amount UtxoTotal() const;
  /** Value never appears or vanishes: unspent + fees == funded, always. */
  bool CheckConservation() const { return UtxoTotal() + m_total_fees == m_total_funded; }

 private:
  struct PoolEntry {
    Transaction tx;
    Txid txid{};
    int64_t feerate = 0;
    Visibility vis = Visibility::Public;
  };

  struct ResolvedInput {
    Amount amount = 0;
    Script script;
    int confirmations = 0;
  };

  std::vector<PoolEntry>& PoolFor(Visibility vis) {
    return vis == Visibility::Public ? m_public_pool : m_private_pool;
  }
  std::optional<ResolvedInput> ResolveInput(const OutPoint& op, Visibility vis) const;
  void EvictDescendants(std::vector<PoolEntry>& pool, const Txid& root, const std::string& kind);
  void PurgeInvalidEntries();
  void LogEvent(const std::string& kind, const Txid& txid);
  void Observe(const std::string& kind, const PoolEntry& entry);

  int m_height = 0;
  int64_t m_bribe_bonus = 0;
  uint64_t m_fund_counter = 0;
  Amount m_total_funded = 0;
  Amount m_total_fees = 0;
  std::map<OutPoint, UtxoEntry> m_utxo;
  std::map<Txid, int> m_mined_height;
  std::vector<PoolEntry> m_public_pool;
  std::vector<PoolEntry> m_private_pool;
  std::vector<ChainEventRec> m_events;
  std::vector<Observation> m_feed;
};

}  // namespace vaultlab

#endif  // VAULTLAB_CHAIN_H
