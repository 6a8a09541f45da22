// Copyright (c) 2026 The vaultlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef VAULTLAB_TOLERANCE_H
#define VAULTLAB_TOLERANCE_H

#include <string>
#include <vector>

#include <vaultlab/topology.h>

namespace vaultlab {

/** Fault tolerance of one protocol component, measured in isolation.
 *
 *  loss_tolerance: the largest f such that EVERY way of destroying f of the
 *  component's devices still leaves the owner able to perform the component's
 *  function.
 *
 *  leak_tolerance: the largest f such that EVERY way of corrupting f devices
 *  leaves the adversary unable to exercise the component's power: forging a
 *  signing quorum for the wallet rows, reading the stored artifact for the
 *  storage and watchtower rows (every holder keeps a full copy, so a single
 *  theft already exposes it — tolerance 0). */
struct ToleranceRow {
  std::string component;
  int count = 0;
  int threshold = 0;  // 0 where no signing threshold applies
  int loss_tolerance = 0;
  int leak_tolerance = 0;

  bool operator==(const ToleranceRow&) const = default;
};

/** Brute-force oracle: enumerates every failure/corruption subset of each
 *  component (components are capped at 12 devices) and tests the component's
 *  function by actually executing it — multisig rows assemble real witnesses
 *  and run them through the script interpreter; storage rows perform the
 *  fetch. Rows come out in canonical order: active-wallet, recovery-wallet,
 *  fee-wallet, covenant-signing, covenant-storage, recovery-push-storage,
 *  watchtower. */
std::vector<ToleranceRow> ToleranceOracle(const WalletTopology& topology);

}  // namespace vaultlab

#endif  // VAULTLAB_TOLERANCE_H
