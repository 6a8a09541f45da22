// Copyright (c) 2026 The vaultlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef VAULTLAB_TRANSACTION_H
#define VAULTLAB_TRANSACTION_H

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <vaultlab/hash.h>
#include <vaultlab/script.h>
#include <vaultlab/serialize.h>

namespace vaultlab {

using Amount = int64_t;  // satoshis
using Txid = Hash256;

struct OutPoint {
  Txid txid{};
  uint32_t vout = 0;

  bool operator==(const OutPoint&) const = default;
  auto operator<=>(const OutPoint&) const = default;
};

struct TxInput {
  OutPoint prevout;
  uint32_t sequence = 0;

  bool operator==(const TxInput&) const = default;
};

struct TxOutput {
  Amount amount = 0;
  Script script;

  bool operator==(const TxOutput&) const = default;
};

/** One witness stack per input; item order is bottom-of-stack first. */
using WitnessStack = std::vector<std::vector<uint8_t>>;

/** Witnesses live outside the id-relevant serialization, so no witness edit
 *  can ever change a txid (the property the whole covenant design rests on). */
struct Transaction {
  uint32_t version = 2;
  uint32_t locktime = 0;
  std::vector<TxInput> inputs;
  std::vector<TxOutput> outputs;
  std::vector<WitnessStack> witnesses;  // parallel to inputs; may be shorter (treated empty)

  Amount TotalOut() const {
    Amount sum = 0;
    for (const TxOutput& out : outputs) sum += out.amount;
    return sum;
  }

  bool operator==(const Transaction& other) const {
    return version == other.version && locktime == other.locktime && inputs == other.inputs &&
           outputs == other.outputs && witnesses == other.witnesses;
  }
};

/** Well-formedness: at least one input and one output, no duplicate inputs,
 *  no negative output amounts. */
bool IsWellFormed(const Transaction& tx, std::string* error = nullptr);

/** Canonical id-relevant serialization: version, input count, inputs
 *  (outpoint + sequence), output count, outputs, locktime. No witness data. */
std::vector<uint8_t> SerializeTx(const Transaction& tx);

/** Canonical serialization followed by the per-input witness stacks. */
std::vector<uint8_t> SerializeTxWithWitness(const Transaction& tx);

/** Parse either form; with_witness selects which layout is expected.
 *  Throws std::out_of_range / std::invalid_argument on malformed bytes. */
Transaction DeserializeTx(const std::vector<uint8_t>& bytes, bool with_witness);

/** Double SHA-256 of the id-relevant serialization. Throws
 *  std::invalid_argument if the transaction is not well formed. */
Txid ComputeTxid(const Transaction& tx);

std::string TxidHex(const Txid& txid);

}  // namespace vaultlab

#endif  // VAULTLAB_TRANSACTION_H
