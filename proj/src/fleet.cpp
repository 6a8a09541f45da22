// Copyright (c) 2026 The vaultlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <vaultlab/fleet.h>

#include <vaultlab/hash.h>
#include <vaultlab/hex.h>
#include <vaultlab/serialize.h>

namespace vaultlab {

std::string RoleName(WalletRole role) {
  switch (role) {
    case WalletRole::Active: return "active";
    case WalletRole::Recovery: return "recovery";
    case WalletRole::Vault: return "vault";
    case WalletRole::Fee: return "fee";
  }
  return "unknown";
}

std::optional<Hash256> AdversaryKnowledge::SecretFor(const std::string& key_id) const {
  const auto direct = secrets.find(key_id);
  if (direct != secrets.end()) return direct->second;
  const size_t slash = key_id.find('/');
  if (slash == std::string::npos) return std::nullopt;
  const std::string device = key_id.substr(0, slash);
  const std::string path = key_id.substr(slash + 1);
  // Only hierarchical paths are derivable; ephemeral ids ("eph/...") are not.
  if (path.rfind("m/", 0) != 0) return std::nullopt;
  const auto seed = seeds.find(device);
  if (seed == seeds.end()) return std::nullopt;
  std::vector<uint8_t> data(seed->second.begin(), seed->second.end());
  data.insert(data.end(), path.begin(), path.end());
  return TaggedHash("vaultlab/hd", data);
}

Signature AdversaryKnowledge::SignAs(const std::string& key_id, const Hash256& digest,
                                     SighashMode mode) const {
  const auto secret = SecretFor(key_id);
  if (!secret) throw std::invalid_argument("adversary lacks key " + key_id);
  return KeyPair::FromSecret(*secret).Sign(digest, mode);
}

Fleet::Fleet(const WalletTopology& topology, Rng rng) : m_topology(topology), m_rng(rng) {
  const auto init_group = [this](std::vector<HardwareModule>& group, WalletRole role, int count) {
    for (int i = 0; i < count; ++i) {
      HardwareModule device;
      device.name = RoleName(role) + "-" + std::to_string(i);
      device.role = role;
      device.root_seed = m_rng.NextHash();
      group.push_back(std::move(device));
    }
  };
  init_group(m_active, WalletRole::Active, topology.active_count);
  init_group(m_recovery, WalletRole::Recovery, topology.recovery_count);
  init_group(m_vault, WalletRole::Vault, topology.vault_count);
  init_group(m_fee, WalletRole::Fee, topology.fee_count);
}

std::vector<HardwareModule>& Fleet::Group(WalletRole role) {
  switch (role) {
    case WalletRole::Active: return m_active;
    case WalletRole::Recovery: return m_recovery;
    case WalletRole::Vault: return m_vault;
    case WalletRole::Fee: return m_fee;
  }
  throw std::logic_error("unknown role");
}

const std::vector<HardwareModule>& Fleet::Group(WalletRole role) const {
  return const_cast<Fleet*>(this)->Group(role);
}

int Fleet::DeviceCount(WalletRole role) const { return static_cast<int>(Group(role).size()); }

HardwareModule& Fleet::Device(WalletRole role, int index) {
  auto& group = Group(role);
  if (index < 0 || static_cast<size_t>(index) >= group.size()) {
    throw std::invalid_argument("no such device: " + RoleName(role) + "-" + std::to_string(index));
  }
  return group[static_cast<size_t>(index)];
}

const HardwareModule& Fleet::Device(WalletRole role, int index) const {
  return const_cast<Fleet*>(this)->Device(role, index);
}

int Fleet::ProvisionDevice(WalletRole role) {
  auto& group = Group(role);
  HardwareModule device;
  device.name = RoleName(role) + "-" + std::to_string(group.size());
  device.role = role;
  device.root_seed = m_rng.NextHash();
  group.push_back(std::move(device));
  return static_cast<int>(group.size()) - 1;
}

Hash256 Fleet::DeriveSecret(const HardwareModule& device, const std::string& path) const {
  std::vector<uint8_t> data(device.root_seed.begin(), device.root_seed.end());
  data.insert(data.end(), path.begin(), path.end());
  return TaggedHash("vaultlab/hd", data);
}

PubKey Fleet::DeriveWalletKey(WalletRole role, int device_index, uint32_t address_index) {
  if (role == WalletRole::Vault) {
    throw PolicyError("vault keys must be ephemeral, not derived from a seed");
  }
  HardwareModule& device = Device(role, device_index);
  if (device.failed) throw DeviceFailedError(device.name + " is dead");
  const std::string path = "m/vault custody/" + RoleName(role) + "/" + std::to_string(address_index);
  const std::string key_id = device.name + "/" + path;
  auto it = device.secrets.find(key_id);
  if (it == device.secrets.end()) {
    const Hash256 secret = DeriveSecret(device, path);
    device.secrets.emplace(key_id, secret);
    if (device.compromised) {
      m_adversary.secrets[key_id] = secret;
      m_adversary.any_data_seen = true;
    }
    return KeyPair::FromSecret(secret).GetPubKey();
  }
  return KeyPair::FromSecret(it->second).GetPubKey();
}

std::vector<PubKey> Fleet::AddressPubKeys(WalletRole role, uint32_t address_index) {
  std::vector<PubKey> keys;
  const int count = DeviceCount(role);
  keys.reserve(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) keys.push_back(DeriveWalletKey(role, i, address_index));
  return keys;
}

std::vector<PubKey> Fleet::AddressPubKeysFor(WalletRole role, const std::vector<int>& devices,
                                             uint32_t address_index) {
  std::vector<PubKey> keys;
  keys.reserve(devices.size());
  for (int device : devices) keys.push_back(DeriveWalletKey(role, device, address_index));
  return keys;
}

Script Fleet::WalletAddress(WalletRole role, uint32_t address_index) {
  int threshold = 0;
  switch (role) {
    case WalletRole::Active: threshold = m_topology.active_threshold; break;
    case WalletRole::Recovery: threshold = m_topology.recovery_threshold; break;
    case WalletRole::Fee: threshold = m_topology.fee_threshold; break;
    case WalletRole::Vault: throw PolicyError("vault addresses come from ephemeral key sets");
  }
  // Addresses are formed from the original address-set device count, so
  // devices provisioned later never silently join old addresses.
  std::vector<PubKey> keys = AddressPubKeys(role, address_index);
  const Script script = MultisigScript(threshold, keys);
  const std::string serialized = HexStr(SerializeScript(script));
  for (HardwareModule& device : Group(role)) {
    if (device.failed) continue;
    device.address_book.insert(serialized);
    if (device.compromised) {
      m_adversary.addresses.insert(serialized);
      m_adversary.any_data_seen = true;
    }
  }
  return script;
}

std::string Fleet::GenEphemeralKey(int device_index, const std::string& label) {
  HardwareModule& device = Device(WalletRole::Vault, device_index);
  if (device.failed) throw DeviceFailedError(device.name + " is dead");
  const std::string key_id = device.name + "/eph/" + label;
  if (device.secrets.count(key_id) || device.deleted.count(key_id)) {
    throw std::invalid_argument("ephemeral key already exists: " + key_id);
  }
  const Hash256 secret = m_rng.NextHash();
  device.secrets.emplace(key_id, secret);
  KeyPair::FromSecret(secret);  // register with the verification oracle
  if (device.compromised) {
    m_adversary.secrets[key_id] = secret;
    m_adversary.any_data_seen = true;
  }
  return key_id;
}

PubKey Fleet::EphemeralPubKey(const std::string& key_id) const {
  const size_t slash = key_id.find('/');
  if (slash == std::string::npos) throw std::invalid_argument("bad key id " + key_id);
  const std::string device_name = key_id.substr(0, slash);
  for (const HardwareModule& device : m_vault) {
    if (device.name != device_name) continue;
    const auto it = device.secrets.find(key_id);
    if (it == device.secrets.end()) {
      if (device.deleted.count(key_id)) throw KeyDeletedError(key_id + " was deleted");
      throw std::invalid_argument("no such key " + key_id);
    }
    return KeyPair::FromSecret(it->second).GetPubKey();
  }
  throw std::invalid_argument("no such device for key " + key_id);
}

Signature Fleet::SignWithDevice(WalletRole role, int device_index, const std::string& key_id,
                                const Hash256& digest, SighashMode mode) {
  HardwareModule& device = Device(role, device_index);
  if (device.failed) throw DeviceFailedError(device.name + " is dead");
  const auto it = device.secrets.find(key_id);
  if (it == device.secrets.end()) {
    if (device.deleted.count(key_id)) throw KeyDeletedError(key_id + " was deleted");
    throw std::invalid_argument(device.name + " does not hold " + key_id);
  }
  return KeyPair::FromSecret(it->second).Sign(digest, mode);
}

DeletionReceipt Fleet::DeleteKey(int device_index, const std::string& key_id) {
  HardwareModule& device = Device(WalletRole::Vault, device_index);
  if (device.failed) throw DeviceFailedError(device.name + " is dead");
  device.secrets.erase(key_id);
  device.deleted.insert(key_id);
  DeletionReceipt receipt{key_id, device.name, m_seq++};
  m_receipts.push_back(receipt);
  return receipt;
}

void Fleet::StoreBlob(WalletRole role, int device_index, const std::string& label,
                      std::vector<uint8_t> bytes) {
  HardwareModule& device = Device(role, device_index);
  if (device.failed) throw DeviceFailedError(device.name + " is dead");
  if (device.compromised) {
    m_adversary.blobs[device.name + "/" + label] = bytes;
    m_adversary.any_data_seen = true;
  }
  device.blobs[label] = std::move(bytes);
}

std::optional<std::vector<uint8_t>> Fleet::FetchBlob(WalletRole role, int device_index,
                                                     const std::string& label) const {
  const HardwareModule& device = Device(role, device_index);
  if (device.failed) return std::nullopt;
  const auto it = device.blobs.find(label);
  if (it == device.blobs.end()) return std::nullopt;
  return it->second;
}

void Fleet::FailDevice(WalletRole role, int index) { Device(role, index).failed = true; }

void Fleet::AbsorbIntoAdversary(const HardwareModule& device) {
  m_adversary.seeds[device.name] = device.root_seed;
  for (const auto& [key_id, secret] : device.secrets) m_adversary.secrets[key_id] = secret;
  for (const auto& [label, bytes] : device.blobs) m_adversary.blobs[device.name + "/" + label] = bytes;
  for (const std::string& address : device.address_book) m_adversary.addresses.insert(address);
  m_adversary.any_data_seen = true;
}

void Fleet::CompromiseDevice(WalletRole role, int index) {
  HardwareModule& device = Device(role, index);
  device.compromised = true;
  // Keys deleted before this moment are genuinely gone; only live state leaks.
  AbsorbIntoAdversary(device);
}

void Fleet::LeakBlobs(WalletRole role, int index, const std::string& prefix) {
  const HardwareModule& device = Device(role, index);
  for (const auto& [label, bytes] : device.blobs) {
    if (label.rfind(prefix, 0) == 0) {
      m_adversary.blobs[device.name + "/" + label] = bytes;
      m_adversary.any_data_seen = true;
    }
  }
}

bool Fleet::HumanCheck(WalletRole role, int index, bool payload_tampered) const {
  if (!payload_tampered) return true;
  const ChannelPair& channel = Device(role, index).channel;
  // A tampered payload sails through only when no honest channel remains.
  return channel.inband_compromised && channel.oob_compromised;
}

}  // namespace vaultlab
