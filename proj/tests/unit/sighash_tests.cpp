// Copyright (c) 2026 The vaultlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <doctest.h>

#include <stdexcept>

#include <vaultlab/rng.h>
#include <vaultlab/sighash.h>

#include "reference_codec.h"

using namespace vaultlab;

namespace {

struct Fixture {
  Transaction tx;
  Script spent;
  Amount amount = 50'000;

  Fixture() {
    Rng rng(0x73696768);
    tx.version = 2;
    tx.locktime = 9;
    for (int i = 0; i < 2; ++i) {
      TxInput in;
      in.prevout.txid = rng.NextHash();
      in.prevout.vout = uint32_t(i);
      in.sequence = uint32_t(10 * i);
      tx.inputs.push_back(in);
    }
    tx.outputs.push_back(TxOutput{30'000, Script().PushInt(3)});
    tx.outputs.push_back(TxOutput{19'000, Script().Add(OP_DROP)});
    spent.PushInt(2);
    spent.Push(rng.NextHash());
    spent.Add(OP_CHECKMULTISIG);
  }
};

}  // namespace

TEST_CASE("digests match the independent reference for both modes") {
  const Fixture f;
  for (SighashMode mode : {SighashMode::All, SighashMode::AllAnyoneCanPay}) {
    for (size_t index : {size_t(0), size_t(1)}) {
      CHECK(SighashDigest(f.tx, index, mode, f.spent, f.amount) ==
            testref::RefSighash(f.tx, index, mode, f.spent, f.amount));
    }
  }

  Rng rng(0x73646967);
  for (int i = 0; i < 25; ++i) {
    const Transaction tx = testref::RandomTx(rng);
    const Script spent = Script().PushInt(int64_t(rng.Below(100)));
    const Amount amount = Amount(rng.Below(1'000'000));
    CHECK(SighashDigest(tx, 0, SighashMode::All, spent, amount) ==
          testref::RefSighash(tx, 0, SighashMode::All, spent, amount));
    CHECK(SighashDigest(tx, 0, SighashMode::AllAnyoneCanPay, spent, amount) ==
          testref::RefSighash(tx, 0, SighashMode::AllAnyoneCanPay, spent, amount));
  }
}

TEST_CASE("the two modes differ exactly on commitment to the other inputs") {
  const Fixture f;
  const Hash256 all = SighashDigest(f.tx, 0, SighashMode::All, f.spent, f.amount);
  const Hash256 acp = SighashDigest(f.tx, 0, SighashMode::AllAnyoneCanPay, f.spent, f.amount);
  CHECK(all != acp);

  // Appending a fee input: the ALL digest moves, the ALL|ANYONECANPAY digest
  // of the original input survives untouched (what fee attachment rests on).
  Transaction extended = f.tx;
  TxInput fee_in;
  fee_in.prevout.txid = TaggedHash("test/fee-coin", {});
  fee_in.sequence = 0;
  extended.inputs.push_back(fee_in);
  CHECK(SighashDigest(extended, 0, SighashMode::AllAnyoneCanPay, f.spent, f.amount) == acp);
  CHECK(SighashDigest(extended, 0, SighashMode::All, f.spent, f.amount) != all);

  // Mutating the other input's sequence: same split.
  Transaction reseq = f.tx;
  reseq.inputs[1].sequence += 1;
  CHECK(SighashDigest(reseq, 0, SighashMode::AllAnyoneCanPay, f.spent, f.amount) == acp);
  CHECK(SighashDigest(reseq, 0, SighashMode::All, f.spent, f.amount) != all);
}

TEST_CASE("both modes commit to everything a covenant relies on") {
  const Fixture f;
  for (SighashMode mode : {SighashMode::All, SighashMode::AllAnyoneCanPay}) {
    const Hash256 base = SighashDigest(f.tx, 0, mode, f.spent, f.amount);

    Transaction own_outpoint = f.tx;
    own_outpoint.inputs[0].prevout.vout += 1;
    CHECK(SighashDigest(own_outpoint, 0, mode, f.spent, f.amount) != base);

    Transaction own_sequence = f.tx;
    own_sequence.inputs[0].sequence += 1;
    CHECK(SighashDigest(own_sequence, 0, mode, f.spent, f.amount) != base);

    Transaction amount_moved = f.tx;
    amount_moved.outputs[1].amount += 1;
    CHECK(SighashDigest(amount_moved, 0, mode, f.spent, f.amount) != base);

    Transaction script_moved = f.tx;
    script_moved.outputs[0].script.Add(OP_DROP);
    CHECK(SighashDigest(script_moved, 0, mode, f.spent, f.amount) != base);

    Transaction version_moved = f.tx;
    version_moved.version += 1;
    CHECK(SighashDigest(version_moved, 0, mode, f.spent, f.amount) != base);

    Transaction locktime_moved = f.tx;
    locktime_moved.locktime += 1;
    CHECK(SighashDigest(locktime_moved, 0, mode, f.spent, f.amount) != base);

    CHECK(SighashDigest(f.tx, 0, mode, Script().PushInt(1), f.amount) != base);
    CHECK(SighashDigest(f.tx, 0, mode, f.spent, f.amount + 1) != base);
    CHECK(SighashDigest(f.tx, 1, mode, f.spent, f.amount) != base);
  }
}

TEST_CASE("witness data never reaches a digest") {
  Fixture f;
  const Hash256 all = SighashDigest(f.tx, 0, SighashMode::All, f.spent, f.amount);
  const Hash256 acp = SighashDigest(f.tx, 0, SighashMode::AllAnyoneCanPay, f.spent, f.amount);
  Rng rng(0x776974);
  for (int i = 0; i < 10; ++i) testref::MutateWitness(f.tx, rng);
  CHECK(SighashDigest(f.tx, 0, SighashMode::All, f.spent, f.amount) == all);
  CHECK(SighashDigest(f.tx, 0, SighashMode::AllAnyoneCanPay, f.spent, f.amount) == acp);
}

TEST_CASE("invalid requests throw") {
  const Fixture f;
  CHECK_THROWS_AS(SighashDigest(f.tx, 2, SighashMode::All, f.spent, f.amount), std::out_of_range);
  Transaction malformed = f.tx;
  malformed.outputs.clear();
  CHECK_THROWS_AS(SighashDigest(malformed, 0, SighashMode::All, f.spent, f.amount),
                  std::invalid_argument);
}
