// Copyright (c) 2026 The vaultlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <vaultlab/chain.h>

#include <algorithm>
#include <set>

namespace vaultlab {

void Chain::LogEvent(const std::string& kind, const Txid& txid) {
  m_events.push_back(ChainEventRec{m_height, kind, txid});
}

void Chain::Observe(const std::string& kind, const PoolEntry& entry) {
  m_feed.push_back(Observation{m_height, kind, entry.txid, entry.tx});
}

OutPoint Chain::Fund(Amount amount, const Script& script) {
  ByteWriter w;
  w.U64(m_fund_counter++);
  w.U64(uint64_t(amount));
  Txid txid = TaggedHash("vaultlab/fund", w.Get());
  OutPoint op{txid, 0};
  m_utxo[op] = UtxoEntry{amount, script, m_height};
  m_mined_height[txid] = m_height;
  m_total_funded += amount;
  LogEvent("fund", txid);
  return op;
}

std::optional<Chain::ResolvedInput> Chain::ResolveInput(const OutPoint& op, Visibility vis) const {
  auto it = m_utxo.find(op);
  if (it != m_utxo.end()) {
    return ResolvedInput{it->second.amount, it->second.script, m_height - it->second.height + 1};
  }
  // Unconfirmed parents: public submitters see only the public pool; the
  // miner's private pool is additionally visible to private submitters.
  auto scan = [&](const std::vector<PoolEntry>& pool) -> std::optional<ResolvedInput> {
    for (const PoolEntry& e : pool) {
      if (e.txid == op.txid && op.vout < e.tx.outputs.size()) {
        return ResolvedInput{e.tx.outputs[op.vout].amount, e.tx.outputs[op.vout].script, 0};
      }
    }
    return std::nullopt;
  };
  if (auto r = scan(m_public_pool)) return r;
  if (vis == Visibility::MinerPrivate) {
    if (auto r = scan(m_private_pool)) return r;
  }
  return std::nullopt;
}

void Chain::EvictDescendants(std::vector<PoolEntry>& pool, const Txid& root,
                             const std::string& kind) {
  std::set<Txid> doomed{root};
  bool changed = true;
  while (changed) {
    changed = false;
    for (const PoolEntry& e : pool) {
      if (doomed.count(e.txid)) continue;
      for (const TxInput& in : e.tx.inputs) {
        if (doomed.count(in.prevout.txid)) {
          doomed.insert(e.txid);
          changed = true;
          break;
        }
      }
    }
  }
  for (auto it = pool.begin(); it != pool.end();) {
    if (doomed.count(it->txid)) {
      LogEvent(kind, it->txid);
      if (it->vis == Visibility::Public) Observe(kind, *it);
      it = pool.erase(it);
    } else {
      ++it;
    }
  }
}

SubmitResult Chain::Submit(const Transaction& tx, int64_t feerate, Visibility vis) {
  std::string err;
  if (!IsWellFormed(tx, &err)) return SubmitResult{false, "malformed", {}};
  Txid txid = ComputeTxid(tx);

  if (m_mined_height.count(txid) || InPool(txid)) {
    return SubmitResult{false, "duplicate", {}};
  }

  std::vector<ResolvedInput> resolved;
  resolved.reserve(tx.inputs.size());
  Amount total_in = 0;
  for (const TxInput& in : tx.inputs) {
    auto r = ResolveInput(in.prevout, vis);
    if (!r) {
      LogEvent("reject-missing-input", txid);
      return SubmitResult{false, "missing-input", {}};
    }
    total_in += r->amount;
    resolved.push_back(std::move(*r));
  }

  if (total_in - tx.TotalOut() < 0) {
    LogEvent("reject-fee", txid);
    return SubmitResult{false, "fee", {}};
  }

  for (size_t i = 0; i < tx.inputs.size(); ++i) {
    ExecContext ctx{tx, i, resolved[i].confirmations,
                    i < tx.witnesses.size() ? tx.witnesses[i] : WitnessStack{},
                    resolved[i].amount};
    ScriptResult sr = EvalScript(resolved[i].script, ctx);
    if (!sr.accept) {
      std::string reason = sr.reason == "csv" ? "csv-premature" : "script";
      LogEvent("reject-" + reason, txid);
      return SubmitResult{false, reason, {}};
    }
  }

  // Conflict resolution within the submitter's pool. The winner is decided by
  // feerate, then smaller txid, so the final pool is independent of
  // submission order.
  std::vector<PoolEntry>& pool = PoolFor(vis);
  std::vector<Txid> incumbents;
  for (const PoolEntry& e : pool) {
    for (const TxInput& in : e.tx.inputs) {
      for (const TxInput& mine : tx.inputs) {
        if (in.prevout == mine.prevout) {
          incumbents.push_back(e.txid);
        }
      }
    }
  }
  std::vector<Txid> replaced;
  if (!incumbents.empty()) {
    for (const Txid& inc_txid : incumbents) {
      auto it = std::find_if(pool.begin(), pool.end(),
                             [&](const PoolEntry& e) { return e.txid == inc_txid; });
      bool win = feerate > it->feerate || (feerate == it->feerate && txid < it->txid);
      if (!win) {
        LogEvent("reject-conflict", txid);
        return SubmitResult{false, "conflict", {}};
      }
    }
    for (const Txid& inc_txid : incumbents) {
      EvictDescendants(pool, inc_txid, "replaced");
      replaced.push_back(inc_txid);
    }
  }

  PoolEntry entry{tx, txid, feerate, vis};
  if (vis == Visibility::Public) {
    LogEvent("mempool", txid);
    Observe("mempool", entry);
  } else {
    LogEvent("mempool-private", txid);
  }
  pool.push_back(std::move(entry));
  return SubmitResult{true, "", std::move(replaced)};
}

std::vector<Txid> Chain::MineBlock() {
  struct Candidate {
    const PoolEntry* entry;
    int64_t priority;
  };

  std::set<Txid> included_ids;
  std::vector<PoolEntry> included;
  std::set<OutPoint> spent_in_block;
  std::map<OutPoint, UtxoEntry> created_in_block;

  auto resolve_for_block = [&](const OutPoint& op) -> std::optional<ResolvedInput> {
    if (spent_in_block.count(op)) return std::nullopt;
    auto it = m_utxo.find(op);
    if (it != m_utxo.end()) {
      return ResolvedInput{it->second.amount, it->second.script, m_height - it->second.height + 1};
    }
    auto cit = created_in_block.find(op);
    if (cit != created_in_block.end()) {
      // Same-block parents carry zero confirmations for timelock purposes.
      return ResolvedInput{cit->second.amount, cit->second.script, 0};
    }
    return std::nullopt;
  };

  while (true) {
    const PoolEntry* best = nullptr;
    int64_t best_priority = 0;
    for (const std::vector<PoolEntry>* pool : {&m_public_pool, &m_private_pool}) {
      for (const PoolEntry& e : *pool) {
        if (included_ids.count(e.txid)) continue;
        bool valid = true;
        std::vector<ResolvedInput> ins;
        for (const TxInput& in : e.tx.inputs) {
          auto r = resolve_for_block(in.prevout);
          if (!r) {
            valid = false;
            break;
          }
          ins.push_back(std::move(*r));
        }
        if (!valid) continue;
        for (size_t i = 0; i < e.tx.inputs.size() && valid; ++i) {
          ExecContext ctx{e.tx, i, ins[i].confirmations,
                          i < e.tx.witnesses.size() ? e.tx.witnesses[i] : WitnessStack{},
                          ins[i].amount};
          valid = EvalScript(ins[i].script, ctx).accept;
        }
        if (!valid) continue;
        int64_t priority = e.feerate + (e.vis == Visibility::MinerPrivate ? m_bribe_bonus : 0);
        if (!best || priority > best_priority ||
            (priority == best_priority && e.txid < best->txid)) {
          best = &e;
          best_priority = priority;
        }
      }
    }
    if (!best) break;
    included_ids.insert(best->txid);
    included.push_back(*best);
    for (const TxInput& in : best->tx.inputs) spent_in_block.insert(in.prevout);
    for (size_t v = 0; v < best->tx.outputs.size(); ++v) {
      created_in_block[OutPoint{best->txid, uint32_t(v)}] =
          UtxoEntry{best->tx.outputs[v].amount, best->tx.outputs[v].script, 0};
    }
  }

  m_height += 1;

  std::vector<Txid> mined_order;
  for (const PoolEntry& e : included) {
    Amount in_total = 0;
    for (const TxInput& in : e.tx.inputs) {
      auto it = m_utxo.find(in.prevout);
      in_total += it->second.amount;  // parent applied before child by inclusion order
      m_utxo.erase(it);
    }
    for (size_t v = 0; v < e.tx.outputs.size(); ++v) {
      m_utxo[OutPoint{e.txid, uint32_t(v)}] =
          UtxoEntry{e.tx.outputs[v].amount, e.tx.outputs[v].script, m_height};
    }
    m_total_fees += in_total - e.tx.TotalOut();
    m_mined_height[e.txid] = m_height;
    LogEvent("mined", e.txid);
    Observe("mined", e);
    mined_order.push_back(e.txid);
  }

  for (std::vector<PoolEntry>* pool : {&m_public_pool, &m_private_pool}) {
    pool->erase(std::remove_if(pool->begin(), pool->end(),
                               [&](const PoolEntry& e) { return included_ids.count(e.txid) > 0; }),
                pool->end());
  }
  PurgeInvalidEntries();
  return mined_order;
}

void Chain::PurgeInvalidEntries() {
  // Entries that lost a conflict to a mined transaction reference spent
  // outpoints; drop them and their descendant chains.
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::vector<PoolEntry>* pool : {&m_public_pool, &m_private_pool}) {
      for (const PoolEntry& e : *pool) {
        bool ok = true;
        for (const TxInput& in : e.tx.inputs) {
          if (!ResolveInput(in.prevout, e.vis)) {
            ok = false;
            break;
          }
        }
        if (!ok) {
          EvictDescendants(*pool, e.txid, "evicted");
          changed = true;
          break;
        }
      }
      if (changed) break;
    }
  }
}

std::optional<int> Chain::GetConfirmations(const Txid& txid) const {
  auto it = m_mined_height.find(txid);
  if (it != m_mined_height.end()) return m_height - it->second + 1;
  if (InPool(txid)) return 0;
  return std::nullopt;
}

std::optional<UtxoEntry> Chain::GetUtxo(const OutPoint& op) const {
  auto it = m_utxo.find(op);
  if (it == m_utxo.end()) return std::nullopt;
  return it->second;
}

bool Chain::InPool(const Txid& txid) const {
  for (const std::vector<PoolEntry>* pool : {&m_public_pool, &m_private_pool}) {
    for (const PoolEntry& e : *pool) {
      if (e.txid == txid) return true;
    }
  }
  return false;
}

std::vector<Txid> Chain::PoolTxids(Visibility vis) const {
  std::vector<Txid> out;
  const std::vector<PoolEntry>& pool =
      vis == Visibility::Public ? m_public_pool : m_private_pool;
  for (const PoolEntry& e : pool) out.push_back(e.txid);
  std::sort(out.begin(), out.end());
  return out;
}

Amount Chain::UtxoTotal() const {
  Amount sum = 0;
  for (const auto& [op, entry] : m_utxo) sum += entry.amount;
  return sum;
}

}  // namespace vaultlab
