// Copyright (c) 2026 The vaultlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef VAULTLAB_TOPOLOGY_H
#define VAULTLAB_TOPOLOGY_H

#include <optional>
#include <string>

#include <vaultlab/transaction.h>

namespace vaultlab {

/** Device and threshold layout of one custody deployment. Field names follow
 *  roles, not symbols: active j-of-k, recovery m-of-n, vault p-of-t ephemeral
 *  keys, fee a-of-b, plus storage/watchtower redundancy and the un-vault
 *  timelock in blocks. */
struct WalletTopology {
  int active_threshold = 2;
  int active_count = 3;
  int recovery_threshold = 2;
  int recovery_count = 3;
  int vault_threshold = 2;
  int vault_count = 3;
  int fee_threshold = 2;
  int fee_count = 3;
  int avt_storage = 3;   // devices holding fully signed covenant pairs
  int p2rw_storage = 2;  // holders of recovery-push transactions
  int watchtowers = 2;
  int timelock = 6;

  /** Returns the name of the first offending field, or nullopt if valid. */
  std::optional<std::string> Validate() const;

  bool operator==(const WalletTopology&) const = default;
};

/** Un-vaulting throttle. Zero/negative fields mean "derive the default":
 *  max_funds_in_flight defaults to the largest partition, the spacing to the
 *  timelock, which together yield one un-vault in flight at a time. */
struct UnvaultPolicy {
  Amount max_funds_in_flight = 0;
  int min_blocks_between_unvaults = -1;

  bool operator==(const UnvaultPolicy&) const = default;
};

}  // namespace vaultlab

#endif  // VAULTLAB_TOPOLOGY_H
