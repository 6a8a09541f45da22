// Copyright (c) 2026 The vaultlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <doctest.h>

#include <algorithm>
#include <vector>

#include <vaultlab/chain.h>
#include <vaultlab/rng.h>

using namespace vaultlab;

namespace {

Script TrueScript() { return Script().PushInt(1); }

/** Minimal spend of one outpoint into an anyone-can-spend output. Varying the
 *  output amount varies the txid. */
Transaction SpendTx(const OutPoint& prev, Amount out_amount, uint32_t sequence = 0) {
  Transaction tx;
  tx.inputs.push_back(TxInput{prev, sequence});
  tx.outputs.push_back(TxOutput{out_amount, TrueScript()});
  return tx;
}

int CountEvents(const Chain& chain, const std::string& kind) {
  int n = 0;
  for (const ChainEventRec& e : chain.EventLog()) {
    if (e.kind == kind) ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("funding creates confirmed outputs and value is conserved through spends") {
  Chain chain;
  const OutPoint coin = chain.Fund(10'000, TrueScript());
  CHECK(chain.IsUnspent(coin));
  CHECK(chain.TotalFunded() == 10'000);
  CHECK(chain.GetUtxo(coin)->amount == 10'000);
  CHECK(chain.GetConfirmations(coin.txid) == 1);  // funded outputs are born confirmed

  const Transaction tx = SpendTx(coin, 9'000);
  const SubmitResult r = chain.Submit(tx, 3, Visibility::Public);
  REQUIRE(r.accepted);
  CHECK(chain.GetConfirmations(ComputeTxid(tx)) == 0);  // pooled, not mined

  const std::vector<Txid> mined = chain.MineBlock();
  REQUIRE(mined.size() == 1);
  CHECK(mined[0] == ComputeTxid(tx));
  CHECK(chain.GetHeight() == 1);
  CHECK(chain.GetConfirmations(mined[0]) == 1);
  CHECK_FALSE(chain.IsUnspent(coin));
  CHECK(chain.IsUnspent(OutPoint{mined[0], 0}));
  CHECK(chain.TotalFees() == 1'000);
  CHECK(chain.UtxoTotal() == 9'000);
  CHECK(chain.CheckConservation());

  chain.MineBlock();  // empty block still advances the clock
  CHECK(chain.GetHeight() == 2);
  CHECK(chain.GetConfirmations(mined[0]) == 2);
  CHECK(chain.GetConfirmations(Txid{}) == std::nullopt);
}

TEST_CASE("submission rejects each failure with its own reason") {
  Chain chain;
  const OutPoint coin = chain.Fund(5'000, TrueScript());

  Transaction no_inputs;
  no_inputs.outputs.push_back(TxOutput{1, TrueScript()});
  CHECK(chain.Submit(no_inputs, 1, Visibility::Public).reason == "malformed");

  Rng rng(0x636e7431);
  CHECK(chain.Submit(SpendTx(OutPoint{rng.NextHash(), 0}, 1), 1, Visibility::Public).reason ==
        "missing-input");

  // Outputs may not exceed inputs; spending exactly everything (zero fee) is fine.
  CHECK(chain.Submit(SpendTx(coin, 5'001), 1, Visibility::Public).reason == "fee");
  CHECK(chain.Submit(SpendTx(coin, 5'000), 1, Visibility::Public).accepted);

  const Transaction dup = SpendTx(coin, 5'000);
  CHECK(chain.Submit(dup, 1, Visibility::Public).reason == "duplicate");
  chain.MineBlock();
  CHECK(chain.Submit(dup, 1, Visibility::Public).reason == "duplicate");  // mined counts too

  // A failing locking script surfaces as a script rejection.
  const OutPoint locked = chain.Fund(400, Script().Add(OP_0));
  CHECK(chain.Submit(SpendTx(locked, 300), 1, Visibility::Public).reason == "script");
}

TEST_CASE("relative timelocks gate entry to the pool") {
  Chain chain;
  const Script csv_script =
      Script().PushInt(5).Add(OP_CHECKSEQUENCEVERIFY).Add(OP_DROP).PushInt(1);
  const OutPoint coin = chain.Fund(2'000, csv_script);

  // Confirmations are short: funded at the current tip counts one.
  CHECK(chain.Submit(SpendTx(coin, 1'900, 5), 1, Visibility::Public).reason == "csv-premature");
  // Sequence below the threshold never matures, no matter the age.
  for (int i = 0; i < 10; ++i) chain.MineBlock();
  CHECK(chain.Submit(SpendTx(coin, 1'900, 4), 1, Visibility::Public).reason == "csv-premature");
  CHECK(chain.Submit(SpendTx(coin, 1'900, 5), 1, Visibility::Public).accepted);
}

TEST_CASE("pool conflicts resolve by feerate with ties to the smaller txid") {
  // Build two deterministic conflicting spenders and order them by txid. The
  // probe chain funds the same outpoint every fresh chain below will fund.
  Chain probe;
  const OutPoint coin_probe = probe.Fund(10'000, TrueScript());
  Transaction t1 = SpendTx(coin_probe, 9'000);
  Transaction t2 = SpendTx(coin_probe, 8'999);
  if (ComputeTxid(t2) < ComputeTxid(t1)) std::swap(t1, t2);
  const Transaction smaller = t1, larger = t2;  // by txid

  SUBCASE("a strictly higher feerate replaces, and evicts descendants") {
    Chain chain;
    const OutPoint coin = chain.Fund(10'000, TrueScript());
    REQUIRE(chain.Submit(smaller, 2, Visibility::Public).accepted);
    // A child of the incumbent rides along in the pool...
    const Transaction child = SpendTx(OutPoint{ComputeTxid(smaller), 0}, 8'000);
    REQUIRE(chain.Submit(child, 2, Visibility::Public).accepted);

    const SubmitResult r = chain.Submit(larger, 3, Visibility::Public);
    REQUIRE(r.accepted);
    REQUIRE(r.replaced.size() == 1);
    CHECK(r.replaced[0] == ComputeTxid(smaller));
    // ...and is torn down with it.
    CHECK_FALSE(chain.InPool(ComputeTxid(smaller)));
    CHECK_FALSE(chain.InPool(ComputeTxid(child)));
    CHECK(chain.InPool(ComputeTxid(larger)));
    CHECK(CountEvents(chain, "replaced") == 2);
    CHECK(chain.IsUnspent(coin));  // nothing mined yet
  }

  SUBCASE("equal feerate: the smaller txid wins regardless of arrival order") {
    Chain first_small;
    first_small.Fund(10'000, TrueScript());
    REQUIRE(first_small.Submit(smaller, 2, Visibility::Public).accepted);
    CHECK(first_small.Submit(larger, 2, Visibility::Public).reason == "conflict");
    CHECK(first_small.InPool(ComputeTxid(smaller)));

    Chain first_large;
    first_large.Fund(10'000, TrueScript());
    REQUIRE(first_large.Submit(larger, 2, Visibility::Public).accepted);
    const SubmitResult r = first_large.Submit(smaller, 2, Visibility::Public);
    CHECK(r.accepted);
    CHECK(r.replaced == std::vector<Txid>{ComputeTxid(larger)});
    CHECK_FALSE(first_large.InPool(ComputeTxid(larger)));
  }

  SUBCASE("a lower feerate never replaces") {
    Chain chain;
    chain.Fund(10'000, TrueScript());
    REQUIRE(chain.Submit(larger, 5, Visibility::Public).accepted);
    CHECK(chain.Submit(smaller, 4, Visibility::Public).reason == "conflict");
  }
}

TEST_CASE("blocks are assembled by priority with ancestors first") {
  Chain chain;
  const OutPoint c1 = chain.Fund(1'000, TrueScript());
  const OutPoint c2 = chain.Fund(1'000, TrueScript());
  const OutPoint c3 = chain.Fund(1'000, TrueScript());

  const Transaction low = SpendTx(c1, 900);
  const Transaction high = SpendTx(c2, 900);
  const Transaction mid = SpendTx(c3, 900);
  REQUIRE(chain.Submit(low, 1, Visibility::Public).accepted);
  REQUIRE(chain.Submit(high, 5, Visibility::Public).accepted);
  REQUIRE(chain.Submit(mid, 3, Visibility::Public).accepted);

  const std::vector<Txid> mined = chain.MineBlock();
  REQUIRE(mined.size() == 3);
  CHECK(mined[0] == ComputeTxid(high));
  CHECK(mined[1] == ComputeTxid(mid));
  CHECK(mined[2] == ComputeTxid(low));

  // A high-feerate child still follows its low-feerate parent.
  const OutPoint c4 = chain.Fund(2'000, TrueScript());
  const Transaction parent = SpendTx(c4, 1'500);
  REQUIRE(chain.Submit(parent, 1, Visibility::Public).accepted);
  const Transaction child = SpendTx(OutPoint{ComputeTxid(parent), 0}, 1'000);
  REQUIRE(chain.Submit(child, 9, Visibility::Public).accepted);
  const std::vector<Txid> fam = chain.MineBlock();
  REQUIRE(fam.size() == 2);
  CHECK(fam[0] == ComputeTxid(parent));
  CHECK(fam[1] == ComputeTxid(child));
  CHECK(chain.TotalFees() == 3 * 100 + 500 + 500);
  CHECK(chain.CheckConservation());
}

TEST_CASE("equal-priority transactions mine in txid order") {
  Chain chain;
  const OutPoint c1 = chain.Fund(1'000, TrueScript());
  const OutPoint c2 = chain.Fund(1'000, TrueScript());
  const Transaction ta = SpendTx(c1, 900);
  const Transaction tb = SpendTx(c2, 900);
  REQUIRE(chain.Submit(ta, 2, Visibility::Public).accepted);
  REQUIRE(chain.Submit(tb, 2, Visibility::Public).accepted);
  const std::vector<Txid> mined = chain.MineBlock();
  REQUIRE(mined.size() == 2);
  CHECK(mined[0] == std::min(ComputeTxid(ta), ComputeTxid(tb)));
  CHECK(mined[1] == std::max(ComputeTxid(ta), ComputeTxid(tb)));
}

TEST_CASE("a timelocked child cannot ride in its parent's block") {
  Chain chain;
  const OutPoint coin = chain.Fund(3'000, TrueScript());
  const Script csv_script =
      Script().PushInt(1).Add(OP_CHECKSEQUENCEVERIFY).Add(OP_DROP).PushInt(1);
  Transaction parent;
  parent.inputs.push_back(TxInput{coin, 0});
  parent.outputs.push_back(TxOutput{2'900, csv_script});
  REQUIRE(chain.Submit(parent, 2, Visibility::Public).accepted);

  // While the parent is unconfirmed the child cannot even enter the pool.
  const Transaction child = SpendTx(OutPoint{ComputeTxid(parent), 0}, 2'800, 1);
  CHECK(chain.Submit(child, 2, Visibility::Public).reason == "csv-premature");

  REQUIRE(chain.MineBlock().size() == 1);
  CHECK(chain.Submit(child, 2, Visibility::Public).accepted);
  REQUIRE(chain.MineBlock() == std::vector<Txid>{ComputeTxid(child)});
}

TEST_CASE("miner-private transactions stay out of the public feed until mined") {
  Chain chain;
  const OutPoint coin = chain.Fund(4'000, TrueScript());
  const Transaction secret = SpendTx(coin, 3'900);
  REQUIRE(chain.Submit(secret, 2, Visibility::MinerPrivate).accepted);

  CHECK(chain.PoolTxids(Visibility::Public).empty());
  CHECK(chain.PoolTxids(Visibility::MinerPrivate) == std::vector<Txid>{ComputeTxid(secret)});
  CHECK(chain.PublicFeed().empty());
  CHECK(CountEvents(chain, "mempool-private") == 1);

  // Public submitters cannot build on an output they cannot see...
  const Transaction graft = SpendTx(OutPoint{ComputeTxid(secret), 0}, 3'800);
  CHECK(chain.Submit(graft, 2, Visibility::Public).reason == "missing-input");
  // ...but the private submitter can chain onto it.
  CHECK(chain.Submit(graft, 2, Visibility::MinerPrivate).accepted);

  const std::vector<Txid> mined = chain.MineBlock();
  REQUIRE(mined.size() == 2);
  REQUIRE(chain.PublicFeed().size() == 2);  // both observations are the mined events
  CHECK(chain.PublicFeed()[0].kind == "mined");
  CHECK(chain.PublicFeed()[1].kind == "mined");
  CHECK(chain.CheckConservation());
}

TEST_CASE("a bribed private double-spend outruns a faster public transaction") {
  // Cross-pool conflicts are settled at mining time by priority.
  Chain bribed(100);
  const OutPoint coin = bribed.Fund(4'000, TrueScript());
  const Transaction honest = SpendTx(coin, 3'500);
  const Transaction thief = SpendTx(coin, 3'400);
  REQUIRE(bribed.Submit(honest, 5, Visibility::Public).accepted);
  REQUIRE(bribed.Submit(thief, 2, Visibility::MinerPrivate).accepted);

  const std::vector<Txid> mined = bribed.MineBlock();
  REQUIRE(mined == std::vector<Txid>{ComputeTxid(thief)});
  CHECK_FALSE(bribed.InPool(ComputeTxid(honest)));  // lost the race, purged
  CHECK(CountEvents(bribed, "evicted") == 1);
  CHECK(bribed.CheckConservation());

  // Without the bribe the public transaction's feerate carries the block.
  Chain plain(0);
  const OutPoint coin2 = plain.Fund(4'000, TrueScript());
  const Transaction honest2 = SpendTx(coin2, 3'500);
  const Transaction thief2 = SpendTx(coin2, 3'400);
  REQUIRE(plain.Submit(honest2, 5, Visibility::Public).accepted);
  REQUIRE(plain.Submit(thief2, 2, Visibility::MinerPrivate).accepted);
  CHECK(plain.MineBlock() == std::vector<Txid>{ComputeTxid(honest2)});
  CHECK_FALSE(plain.InPool(ComputeTxid(thief2)));
}

TEST_CASE("conservation holds across randomized traffic") {
  Chain chain;
  Rng rng(0x636f6e73);
  std::vector<OutPoint> spendable;

  for (int round = 0; round < 200; ++round) {
    const uint64_t action = rng.Below(10);
    if (action < 3 || spendable.empty()) {
      spendable.push_back(chain.Fund(Amount(1'000 + rng.Below(50'000)), TrueScript()));
    } else if (action < 8) {
      const size_t pick = size_t(rng.Below(spendable.size()));
      const OutPoint coin = spendable[pick];
      const Amount amount = chain.GetUtxo(coin) ? chain.GetUtxo(coin)->amount : 0;
      if (amount > 0) {
        const Amount keep = Amount(rng.Below(uint64_t(amount)));
        const Transaction tx = SpendTx(coin, keep);
        const SubmitResult r = chain.Submit(tx, int64_t(1 + rng.Below(6)), Visibility::Public);
        if (r.accepted) {
          spendable.erase(spendable.begin() + pick);
          spendable.push_back(OutPoint{ComputeTxid(tx), 0});
        }
      } else {
        spendable.erase(spendable.begin() + pick);
      }
    } else {
      chain.MineBlock();
      CHECK(chain.CheckConservation());
    }
  }
  chain.MineBlock();
  CHECK(chain.CheckConservation());
  CHECK(chain.UtxoTotal() + chain.TotalFees() == chain.TotalFunded());
}
