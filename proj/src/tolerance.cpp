// Copyright (c) 2026 The vaultlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <vaultlab/tolerance.h>

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>

#include <vaultlab/covenant.h>
#include <vaultlab/hash.h>
#include <vaultlab/interpreter.h>
#include <vaultlab/keys.h>
#include <vaultlab/rng.h>
#include <vaultlab/script.h>
#include <vaultlab/sighash.h>
#include <vaultlab/transaction.h>

namespace vaultlab {
namespace {

constexpr int kMaxBruteForce = 12;

/** Try to satisfy a threshold-of-count multisig using only the listed holder
 *  positions, by assembling a real witness and running the interpreter. */
bool AssembleAndRun(const std::vector<KeyPair>& keys, int threshold,
                    const std::vector<int>& holders) {
  const int use = std::min<int>(threshold, static_cast<int>(holders.size()));
  std::vector<PubKey> pubkeys;
  pubkeys.reserve(keys.size());
  for (const KeyPair& key : keys) pubkeys.push_back(key.GetPubKey());
  const Script script = MultisigScript(threshold, pubkeys);

  Transaction tx;
  tx.inputs.push_back(TxInput{OutPoint{TaggedHash("tolerance/coin", {}), 0}, 0});
  tx.outputs.push_back(TxOutput{900, script});
  const Hash256 digest = SighashDigest(tx, 0, SighashMode::All, script, 1000);
  std::vector<Signature> sigs;
  for (int i = 0; i < use; ++i) {
    sigs.push_back(keys[static_cast<size_t>(holders[static_cast<size_t>(i)])].Sign(
        digest, SighashMode::All));
  }
  tx.witnesses = {MultisigWitness(sigs, std::nullopt)};
  const ExecContext ctx{tx, 0, 1, tx.witnesses[0], 1000};
  return EvalScript(script, ctx).accept;
}

/** All subsets of {0..count-1} with exactly `size` members. */
void ForEachSubset(int count, int size, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> subset;
  const std::function<void(int)> descend = [&](int next) {
    if (static_cast<int>(subset.size()) == size) {
      fn(subset);
      return;
    }
    for (int i = next; i < count; ++i) {
      subset.push_back(i);
      descend(i + 1);
      subset.pop_back();
    }
  };
  descend(0);
}

/** Largest f in [0, count] such that the predicate holds on every subset of
 *  size at most f. Predicates here are monotone (a superset of a bad subset
 *  stays bad), which the enumeration double-checks by scanning every size. */
int MaxTolerated(int count, const std::function<bool(const std::vector<int>&)>& holds) {
  if (count > kMaxBruteForce) {
    throw std::invalid_argument("component too large for brute-force tolerance: " +
                                std::to_string(count));
  }
  int best = -1;
  for (int size = 0; size <= count; ++size) {
    bool all_hold = true;
    ForEachSubset(count, size, [&](const std::vector<int>& subset) {
      all_hold = all_hold && holds(subset);
    });
    if (!all_hold) break;
    best = size;
  }
  return best < 0 ? 0 : best;
}

std::vector<int> Complement(int count, const std::vector<int>& subset) {
  std::vector<int> out;
  size_t cursor = 0;
  for (int i = 0; i < count; ++i) {
    if (cursor < subset.size() && subset[cursor] == i) {
      ++cursor;
    } else {
      out.push_back(i);
    }
  }
  return out;
}

ToleranceRow SigningRow(const std::string& component, int count, int threshold, Rng* rng) {
  std::vector<KeyPair> keys;
  keys.reserve(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) keys.push_back(KeyPair::FromSecret(rng->NextHash()));

  ToleranceRow row;
  row.component = component;
  row.count = count;
  row.threshold = threshold;
  // Destroyed devices: the survivors must still clear the threshold.
  row.loss_tolerance = MaxTolerated(count, [&](const std::vector<int>& failed) {
    return AssembleAndRun(keys, threshold, Complement(count, failed));
  });
  // Corrupted devices: the adversary must NOT clear the threshold alone.
  row.leak_tolerance = MaxTolerated(count, [&](const std::vector<int>& corrupted) {
    return !AssembleAndRun(keys, threshold, corrupted);
  });
  return row;
}

/** Replicated storage of an opaque artifact: any surviving copy serves the
 *  owner, but the artifact stays confidential only while no copy at all has
 *  been stolen — every holder keeps the full artifact, so theft of a single
 *  device exposes it. */
ToleranceRow StorageRow(const std::string& component, int count) {
  std::map<int, std::vector<uint8_t>> copies;
  for (int i = 0; i < count; ++i) copies[i] = {0xab, 0xcd};

  ToleranceRow row;
  row.component = component;
  row.count = count;
  row.threshold = 0;
  row.loss_tolerance = MaxTolerated(count, [&](const std::vector<int>& failed) {
    for (int holder : Complement(count, failed)) {
      if (copies.count(holder)) return true;  // fetch succeeds
    }
    return false;
  });
  row.leak_tolerance = MaxTolerated(count, [&](const std::vector<int>& corrupted) {
    std::vector<uint8_t> exposed;
    for (int holder : corrupted) {
      const auto it = copies.find(holder);
      if (it != copies.end()) exposed.insert(exposed.end(), it->second.begin(), it->second.end());
    }
    return exposed.empty();  // confidential iff the theft yielded nothing
  });
  return row;
}

/** Watchtowers: one live node suffices to observe and alert, but each node
 *  stores the full watch state, so corrupting a single node exposes it. */
ToleranceRow WatchtowerRow(int count) {
  std::map<int, std::vector<uint8_t>> state;
  for (int i = 0; i < count; ++i) state[i] = {0x57, 0x54};

  ToleranceRow row;
  row.component = "watchtower";
  row.count = count;
  row.threshold = 0;
  row.loss_tolerance = MaxTolerated(count, [&](const std::vector<int>& failed) {
    return static_cast<int>(failed.size()) < count;
  });
  row.leak_tolerance = MaxTolerated(count, [&](const std::vector<int>& corrupted) {
    std::vector<uint8_t> exposed;
    for (int node : corrupted) {
      const auto it = state.find(node);
      if (it != state.end()) exposed.insert(exposed.end(), it->second.begin(), it->second.end());
    }
    return exposed.empty();
  });
  return row;
}

}  // namespace

std::vector<ToleranceRow> ToleranceOracle(const WalletTopology& topology) {
  Rng rng(0x746f6c65);  // fixed oracle seed; results depend only on the topology
  std::vector<ToleranceRow> rows;
  rows.push_back(
      SigningRow("active-wallet", topology.active_count, topology.active_threshold, &rng));
  rows.push_back(
      SigningRow("recovery-wallet", topology.recovery_count, topology.recovery_threshold, &rng));
  rows.push_back(SigningRow("fee-wallet", topology.fee_count, topology.fee_threshold, &rng));
  rows.push_back(
      SigningRow("covenant-signing", topology.vault_count, topology.vault_threshold, &rng));
  rows.push_back(StorageRow("covenant-storage", topology.avt_storage));
  rows.push_back(StorageRow("recovery-push-storage", topology.p2rw_storage));
  rows.push_back(WatchtowerRow(topology.watchtowers));
  return rows;
}

}  // namespace vaultlab
