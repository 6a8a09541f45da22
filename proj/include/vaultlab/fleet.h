// Copyright (c) 2026 The vaultlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef VAULTLAB_FLEET_H
#define VAULTLAB_FLEET_H

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <vaultlab/keys.h>
#include <vaultlab/rng.h>
#include <vaultlab/script.h>
#include <vaultlab/topology.h>
#include <vaultlab/transaction.h>

namespace vaultlab {

enum class WalletRole : uint8_t { Active, Recovery, Vault, Fee };

std::string RoleName(WalletRole role);

/** Thrown when a device is asked to use a key it deleted. */
class KeyDeletedError : public std::runtime_error {
 public:
  explicit KeyDeletedError(const std::string& what) : std::runtime_error(what) {}
};

/** Thrown when a failed (dead) device is asked to do anything. */
class DeviceFailedError : public std::runtime_error {
 public:
  explicit DeviceFailedError(const std::string& what) : std::runtime_error(what) {}
};

/** Thrown on operations the custody policy forbids, e.g. deriving vault keys
 *  from a wallet seed instead of generating them ephemerally. */
class PolicyError : public std::logic_error {
 public:
  explicit PolicyError(const std::string& what) : std::logic_error(what) {}
};

/** Owner-to-device communication: an in-band channel plus an independent
 *  out-of-band verification channel. A tampered payload goes unnoticed only
 *  if both are compromised. */
struct ChannelPair {
  bool inband_compromised = false;
  bool oob_compromised = false;
};

struct DeletionReceipt {
  std::string key_id;
  std::string device;
  int seq = 0;  // fleet-wide event counter, orders deletions among devices
};

struct HardwareModule {
  std::string name;  // e.g. "vault-1"
  WalletRole role = WalletRole::Active;
  Hash256 root_seed{};
  std::map<std::string, Hash256> secrets;              // key id -> secret
  std::set<std::string> deleted;                       // key ids erased forever
  std::map<std::string, std::vector<uint8_t>> blobs;   // label -> stored bytes
  std::set<std::string> address_book;                  // serialized scripts, hex
  ChannelPair channel;
  bool failed = false;
  bool compromised = false;
};

/** Everything a compromise has leaked so far. Secrets of already-deleted keys
 *  never appear here: deletion before compromise is effective. A leaked root
 *  seed lets the adversary derive any of that device's wallet keys, past or
 *  future; ephemeral keys have no derivation path and only leak directly. */
struct AdversaryKnowledge {
  std::map<std::string, Hash256> secrets;
  std::map<std::string, Hash256> seeds;  // device name -> root seed
  std::map<std::string, std::vector<uint8_t>> blobs;
  std::set<std::string> addresses;
  bool any_data_seen = false;

  /** Resolve a key id ("device/m/..." derived or "device/eph/..." ephemeral)
   *  to a secret, deriving from a leaked seed when possible. */
  std::optional<Hash256> SecretFor(const std::string& key_id) const;
  bool HasSecret(const std::string& key_id) const { return SecretFor(key_id).has_value(); }
  Signature SignAs(const std::string& key_id, const Hash256& digest, SighashMode mode) const;
};

/** The device fleet for one deployment: wallet devices hold hierarchical key
 *  trees derived from per-device seeds; vault devices additionally mint
 *  ephemeral keys with no derivation path, so deleting one is final. */
class Fleet {
 public:
  Fleet(const WalletTopology& topology, Rng rng);

  int DeviceCount(WalletRole role) const;
  HardwareModule& Device(WalletRole role, int index);
  const HardwareModule& Device(WalletRole role, int index) const;

  /** Add a replacement device for `role` (device rotation); returns its index. */
  int ProvisionDevice(WalletRole role);

  /** Derive (and cache) one device's key for a wallet address. Vault devices
   *  refuse: ephemeral keys must not be derivable from a seed. */
  PubKey DeriveWalletKey(WalletRole role, int device_index, uint32_t address_index);

  /** Pubkeys of all devices of a role at one address index (device order). */
  std::vector<PubKey> AddressPubKeys(WalletRole role, uint32_t address_index);

  /** Pubkeys of an explicit device subset (used after device rotation, when
   *  addresses are formed from the current roster rather than every device
   *  ever provisioned). */
  std::vector<PubKey> AddressPubKeysFor(WalletRole role, const std::vector<int>& devices,
                                        uint32_t address_index);

  /** Threshold multisig script over AddressPubKeys; recorded in every
   *  involved device's address book. */
  Script WalletAddress(WalletRole role, uint32_t address_index);

  /** Mint an ephemeral key on a vault device. Returns its key id. */
  std::string GenEphemeralKey(int device_index, const std::string& label);

  PubKey EphemeralPubKey(const std::string& key_id) const;

  /** Sign with a device-held key (derived or ephemeral). Throws
   *  KeyDeletedError / DeviceFailedError / invalid_argument. */
  Signature SignWithDevice(WalletRole role, int device_index, const std::string& key_id,
                           const Hash256& digest, SighashMode mode);

  /** Erase an ephemeral key. A receipt is always issued, even when the secret
   *  already leaked — receipts attest intent, not effect. */
  DeletionReceipt DeleteKey(int device_index, const std::string& key_id);

  const std::vector<DeletionReceipt>& Receipts() const { return m_receipts; }

  void StoreBlob(WalletRole role, int device_index, const std::string& label,
                 std::vector<uint8_t> bytes);
  std::optional<std::vector<uint8_t>> FetchBlob(WalletRole role, int device_index,
                                                const std::string& label) const;

  void FailDevice(WalletRole role, int index);

  /** Leak a device's live secrets, stored blobs and address book to the
   *  adversary; subsequent writes to the device keep leaking. */
  void CompromiseDevice(WalletRole role, int index);

  /** Leak only stored blobs whose label starts with `prefix` (models theft of
   *  one storage section, e.g. a single covenant layer's transactions). */
  void LeakBlobs(WalletRole role, int index, const std::string& prefix);

  /** Owner verifies a payload shown on a device across both channels.
   *  Returns false (check caught it) unless the payload is clean or both
   *  channels are compromised. */
  bool HumanCheck(WalletRole role, int index, bool payload_tampered) const;

  AdversaryKnowledge& Adversary() { return m_adversary; }
  const AdversaryKnowledge& Adversary() const { return m_adversary; }

 private:
  std::vector<HardwareModule>& Group(WalletRole role);
  const std::vector<HardwareModule>& Group(WalletRole role) const;
  Hash256 DeriveSecret(const HardwareModule& device, const std::string& path) const;
  void AbsorbIntoAdversary(const HardwareModule& device);

  WalletTopology m_topology;
  Rng m_rng;
  std::vector<HardwareModule> m_active;
  std::vector<HardwareModule> m_recovery;
  std::vector<HardwareModule> m_vault;
  std::vector<HardwareModule> m_fee;
  std::vector<DeletionReceipt> m_receipts;
  AdversaryKnowledge m_adversary;
  int m_seq = 0;
};

}  // namespace vaultlab

#endif  // VAULTLAB_FLEET_H
