// Copyright (c) 2026 The vaultlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <vaultlab/topology.h>

namespace vaultlab {

std::optional<std::string> WalletTopology::Validate() const {
  const auto bad_pair = [](int threshold, int count) {
    return threshold < 1 || count < 1 || threshold > count || count > 20;
  };
  if (bad_pair(active_threshold, active_count)) {
    return active_threshold < 1 || active_threshold > active_count ? "topology.active_threshold" : "topology.active_count";
  }
  if (bad_pair(recovery_threshold, recovery_count)) {
    return recovery_threshold < 1 || recovery_threshold > recovery_count ? "topology.recovery_threshold" : "topology.recovery_count";
  }
  if (bad_pair(vault_threshold, vault_count)) {
    return vault_threshold < 1 || vault_threshold > vault_count ? "topology.vault_threshold" : "topology.vault_count";
  }
  if (bad_pair(fee_threshold, fee_count)) {
    return fee_threshold < 1 || fee_threshold > fee_count ? "topology.fee_threshold" : "topology.fee_count";
  }
  if (avt_storage < 1 || avt_storage > vault_count) return "topology.avt_storage";
  if (watchtowers < 1 || watchtowers > 20) return "topology.watchtowers";
  // Recovery-push copies live on watchtower nodes first, then the interface.
  if (p2rw_storage < 1 || p2rw_storage > watchtowers + 1) return "topology.p2rw_storage";
  if (timelock < 1 || timelock > 20000) return "topology.timelock";
  return std::nullopt;
}

}  // namespace vaultlab
