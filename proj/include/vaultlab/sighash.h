// Copyright (c) 2026 The vaultlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef VAULTLAB_SIGHASH_H
#define VAULTLAB_SIGHASH_H

#include <vaultlab/keys.h>
#include <vaultlab/transaction.h>

namespace vaultlab {

/** Signature digest for one input of a transaction.
 *
 *  Both modes commit to: version, locktime, the signed input's outpoint and
 *  sequence, all outputs, the spent script, the spent amount, and the mode.
 *  All additionally commits to every input (outpoints + sequences), so adding
 *  an input invalidates All signatures but leaves AllAnyoneCanPay signatures
 *  intact — the property that lets fee inputs be appended to a pre-signed
 *  recovery transaction. Witness data never enters any digest.
 *
 *  Throws std::invalid_argument on a malformed transaction,
 *  std::out_of_range if input_index is out of bounds. */
Hash256 SighashDigest(const Transaction& tx, size_t input_index, SighashMode mode,
                      const Script& spent_script, Amount spent_amount);

}  // namespace vaultlab

#endif  // VAULTLAB_SIGHASH_H
