// Copyright (c) 2026 The vaultlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <doctest.h>

#include <stdexcept>
#include <vector>

#include <vaultlab/fleet.h>
#include <vaultlab/hex.h>
#include <vaultlab/rng.h>

using namespace vaultlab;

TEST_CASE("a fleet provisions named devices per role") {
  Fleet fleet(WalletTopology{}, Rng(0x666c7431));
  CHECK(fleet.DeviceCount(WalletRole::Active) == 3);
  CHECK(fleet.DeviceCount(WalletRole::Recovery) == 3);
  CHECK(fleet.DeviceCount(WalletRole::Vault) == 3);
  CHECK(fleet.DeviceCount(WalletRole::Fee) == 3);
  CHECK(fleet.Device(WalletRole::Active, 0).name == "active-0");
  CHECK(fleet.Device(WalletRole::Vault, 2).name == "vault-2");
  CHECK_THROWS_AS(fleet.Device(WalletRole::Active, 3), std::invalid_argument);
  CHECK_THROWS_AS(fleet.Device(WalletRole::Active, -1), std::invalid_argument);

  const int idx = fleet.ProvisionDevice(WalletRole::Active);
  CHECK(idx == 3);
  CHECK(fleet.Device(WalletRole::Active, 3).name == "active-3");
  // Each device gets its own seed.
  CHECK(fleet.Device(WalletRole::Active, 0).root_seed != fleet.Device(WalletRole::Active, 1).root_seed);
}

TEST_CASE("wallet keys derive deterministically and never for vault devices") {
  Fleet fleet(WalletTopology{}, Rng(0x666c7432));
  const PubKey first = fleet.DeriveWalletKey(WalletRole::Active, 0, 0);
  CHECK(fleet.DeriveWalletKey(WalletRole::Active, 0, 0) == first);
  CHECK(fleet.DeriveWalletKey(WalletRole::Active, 0, 1) != first);   // per address
  CHECK(fleet.DeriveWalletKey(WalletRole::Active, 1, 0) != first);   // per device
  CHECK(fleet.DeriveWalletKey(WalletRole::Recovery, 0, 0) != first); // per role

  // A rebuilt fleet from the same entropy derives the same keys.
  Fleet replay(WalletTopology{}, Rng(0x666c7432));
  CHECK(replay.DeriveWalletKey(WalletRole::Active, 0, 0) == first);

  CHECK_THROWS_AS(fleet.DeriveWalletKey(WalletRole::Vault, 0, 0), PolicyError);
  CHECK_THROWS_AS(fleet.WalletAddress(WalletRole::Vault, 0), PolicyError);

  fleet.FailDevice(WalletRole::Active, 2);
  CHECK_THROWS_AS(fleet.DeriveWalletKey(WalletRole::Active, 2, 0), DeviceFailedError);
}

TEST_CASE("wallet addresses are threshold multisigs recorded in address books") {
  WalletTopology topo;
  topo.active_threshold = 2;
  Fleet fleet(topo, Rng(0x666c7433));

  const Script address = fleet.WalletAddress(WalletRole::Active, 4);
  CHECK(address == MultisigScript(2, fleet.AddressPubKeys(WalletRole::Active, 4)));

  const std::string serialized = HexStr(SerializeScript(address));
  for (int i = 0; i < 3; ++i) {
    CHECK(fleet.Device(WalletRole::Active, i).address_book.count(serialized) == 1);
  }
  // Other roles never learn it.
  CHECK(fleet.Device(WalletRole::Recovery, 0).address_book.empty());

  // An explicit device subset forms a different address (device rotation).
  const int fresh = fleet.ProvisionDevice(WalletRole::Active);
  const std::vector<PubKey> subset =
      fleet.AddressPubKeysFor(WalletRole::Active, {0, 1, fresh}, 4);
  CHECK(subset.size() == 3);
  CHECK(MultisigScript(2, subset) != address);
  CHECK(subset[0] == fleet.DeriveWalletKey(WalletRole::Active, 0, 4));
  CHECK(subset[2] == fleet.DeriveWalletKey(WalletRole::Active, fresh, 4));
}

TEST_CASE("ephemeral keys mint once, sign while alive, and die by receipt") {
  Fleet fleet(WalletTopology{}, Rng(0x666c7434));
  const std::string key_id = fleet.GenEphemeralKey(0, "pair7");
  CHECK(key_id == "vault-0/eph/pair7");
  CHECK_THROWS_AS(fleet.GenEphemeralKey(0, "pair7"), std::invalid_argument);  // no re-mint

  const PubKey pk = fleet.EphemeralPubKey(key_id);
  Rng rng(0x666c7435);
  const Hash256 digest = rng.NextHash();
  const Signature sig =
      fleet.SignWithDevice(WalletRole::Vault, 0, key_id, digest, SighashMode::All);
  CHECK(VerifySignature(pk, digest, sig));

  const DeletionReceipt receipt = fleet.DeleteKey(0, key_id);
  CHECK(receipt.key_id == key_id);
  CHECK(receipt.device == "vault-0");

  // Gone means gone: neither use nor re-creation works.
  CHECK_THROWS_AS(fleet.SignWithDevice(WalletRole::Vault, 0, key_id, digest, SighashMode::All),
                  KeyDeletedError);
  CHECK_THROWS_AS(fleet.EphemeralPubKey(key_id), KeyDeletedError);
  CHECK_THROWS_AS(fleet.GenEphemeralKey(0, "pair7"), std::invalid_argument);

  // Receipts order fleet-wide.
  const std::string other = fleet.GenEphemeralKey(1, "pair8");
  const DeletionReceipt second = fleet.DeleteKey(1, other);
  CHECK(second.seq > receipt.seq);
  CHECK(fleet.Receipts().size() == 2);

  CHECK_THROWS_AS(fleet.EphemeralPubKey("vault-0/eph/never"), std::invalid_argument);
  CHECK_THROWS_AS(fleet.EphemeralPubKey("nodevice/eph/x"), std::invalid_argument);
  CHECK_THROWS_AS(fleet.EphemeralPubKey("noslash"), std::invalid_argument);
  CHECK_THROWS_AS(fleet.SignWithDevice(WalletRole::Vault, 1, "vault-1/eph/none", digest,
                                       SighashMode::All),
                  std::invalid_argument);

  fleet.FailDevice(WalletRole::Vault, 2);
  CHECK_THROWS_AS(fleet.GenEphemeralKey(2, "x"), DeviceFailedError);
  CHECK_THROWS_AS(fleet.DeleteKey(2, "vault-2/eph/x"), DeviceFailedError);
}

TEST_CASE("deletion before compromise keeps the secret out of enemy hands") {
  Fleet fleet(WalletTopology{}, Rng(0x666c7436));
  const std::string dead = fleet.GenEphemeralKey(0, "early");
  const std::string live = fleet.GenEphemeralKey(0, "late");
  fleet.DeleteKey(0, dead);

  fleet.CompromiseDevice(WalletRole::Vault, 0);
  const AdversaryKnowledge& enemy = fleet.Adversary();
  CHECK(enemy.any_data_seen);
  CHECK_FALSE(enemy.HasSecret(dead));  // erased before the breach
  CHECK(enemy.HasSecret(live));        // still resident: leaked

  // The stolen secret actually signs.
  Rng rng(0x666c7437);
  const Hash256 digest = rng.NextHash();
  const Signature forged = enemy.SignAs(live, digest, SighashMode::All);
  CHECK(VerifySignature(fleet.EphemeralPubKey(live), digest, forged));
  CHECK_THROWS_AS(enemy.SignAs(dead, digest, SighashMode::All), std::invalid_argument);

  // A compromised device keeps leaking everything minted on it afterwards.
  const std::string after = fleet.GenEphemeralKey(0, "after");
  CHECK(enemy.HasSecret(after));

  // Deleting after the breach is too late.
  fleet.DeleteKey(0, live);
  CHECK(enemy.HasSecret(live));
}

TEST_CASE("a leaked wallet seed derives everything, but never ephemeral keys") {
  Fleet fleet(WalletTopology{}, Rng(0x666c7438));
  fleet.CompromiseDevice(WalletRole::Active, 0);

  // Keys that were never derived on the device are still forgeable: the seed
  // plus the public derivation path is enough.
  const std::string key_id = "active-0/m/vault custody/active/9";
  REQUIRE(fleet.Adversary().HasSecret(key_id));
  Rng rng(0x666c7439);
  const Hash256 digest = rng.NextHash();
  const Signature forged = fleet.Adversary().SignAs(key_id, digest, SighashMode::All);
  CHECK(VerifySignature(fleet.DeriveWalletKey(WalletRole::Active, 0, 9), digest, forged));

  // Sibling devices stay safe.
  CHECK_FALSE(fleet.Adversary().HasSecret("active-1/m/vault custody/active/9"));

  // Ephemeral ids have no derivation path, so a seed never yields them.
  fleet.CompromiseDevice(WalletRole::Vault, 0);
  CHECK(fleet.Adversary().seeds.count("vault-0") == 1);
  CHECK_FALSE(fleet.Adversary().HasSecret("vault-0/eph/unseen"));
}

TEST_CASE("blob storage leaks by prefix or by full compromise") {
  Fleet fleet(WalletTopology{}, Rng(0x666c743a));
  fleet.StoreBlob(WalletRole::Recovery, 0, "layer0/pair", {1, 2, 3});
  fleet.StoreBlob(WalletRole::Recovery, 0, "layer0/push", {4, 5});
  fleet.StoreBlob(WalletRole::Recovery, 0, "layer1/pair", {6});

  CHECK(fleet.FetchBlob(WalletRole::Recovery, 0, "layer0/pair") == std::vector<uint8_t>{1, 2, 3});
  CHECK_FALSE(fleet.FetchBlob(WalletRole::Recovery, 0, "layer9/pair").has_value());

  // Theft of one storage section: only matching labels leak.
  fleet.LeakBlobs(WalletRole::Recovery, 0, "layer0/");
  const AdversaryKnowledge& enemy = fleet.Adversary();
  CHECK(enemy.blobs.size() == 2);
  CHECK(enemy.blobs.count("recovery-0/layer0/pair") == 1);
  CHECK(enemy.blobs.count("recovery-0/layer0/push") == 1);
  CHECK(enemy.blobs.count("recovery-0/layer1/pair") == 0);

  // Full compromise takes the rest, and future writes keep leaking.
  fleet.CompromiseDevice(WalletRole::Recovery, 0);
  CHECK(enemy.blobs.count("recovery-0/layer1/pair") == 1);
  fleet.StoreBlob(WalletRole::Recovery, 0, "layer2/pair", {7});
  CHECK(enemy.blobs.count("recovery-0/layer2/pair") == 1);

  // Dead devices neither store nor serve.
  fleet.FailDevice(WalletRole::Recovery, 1);
  CHECK_THROWS_AS(fleet.StoreBlob(WalletRole::Recovery, 1, "x", {1}), DeviceFailedError);
  CHECK_FALSE(fleet.FetchBlob(WalletRole::Recovery, 1, "x").has_value());
}

TEST_CASE("the out-of-band check catches tampering unless both channels fall") {
  Fleet fleet(WalletTopology{}, Rng(0x666c743b));
  CHECK(fleet.HumanCheck(WalletRole::Active, 0, /*payload_tampered=*/false));
  CHECK_FALSE(fleet.HumanCheck(WalletRole::Active, 0, /*payload_tampered=*/true));

  fleet.Device(WalletRole::Active, 0).channel.inband_compromised = true;
  CHECK_FALSE(fleet.HumanCheck(WalletRole::Active, 0, true));  // second channel still honest

  fleet.Device(WalletRole::Active, 0).channel.oob_compromised = true;
  CHECK(fleet.HumanCheck(WalletRole::Active, 0, true));  // tampering now invisible

  // Clean payloads pass regardless of channel state.
  CHECK(fleet.HumanCheck(WalletRole::Active, 0, false));
}
