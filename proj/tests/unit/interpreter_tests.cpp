// Copyright (c) 2026 The vaultlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <doctest.h>

#include <vector>

#include <vaultlab/covenant.h>
#include <vaultlab/interpreter.h>
#include <vaultlab/rng.h>
#include <vaultlab/sighash.h>

using namespace vaultlab;

namespace {

struct MultisigFixture {
  std::vector<KeyPair> keys;
  std::vector<PubKey> pubkeys;
  Script script;  // 2-of-3
  Transaction tx;
  Amount amount = 10'000;

  MultisigFixture() {
    Rng rng(0x696e7470);
    for (int i = 0; i < 3; ++i) keys.push_back(KeyPair::FromSecret(rng.NextHash()));
    for (const KeyPair& key : keys) pubkeys.push_back(key.GetPubKey());
    script = MultisigScript(2, pubkeys);
    tx.inputs.push_back(TxInput{OutPoint{rng.NextHash(), 0}, 0});
    tx.outputs.push_back(TxOutput{9'000, Script().Add(OP_0)});
  }

  Hash256 Digest() const { return SighashDigest(tx, 0, SighashMode::All, script, amount); }

  ScriptResult Run(const WitnessStack& witness, int confirmations = 1) const {
    return EvalScript(script, ExecContext{tx, 0, confirmations, witness, amount});
  }
};

}  // namespace

TEST_CASE("threshold multisig accepts an ordered quorum and nothing less") {
  const MultisigFixture f;
  const Hash256 digest = f.Digest();
  const Signature s0 = f.keys[0].Sign(digest, SighashMode::All);
  const Signature s1 = f.keys[1].Sign(digest, SighashMode::All);
  const Signature s2 = f.keys[2].Sign(digest, SighashMode::All);

  CHECK(f.Run(MultisigWitness({s0, s1}, std::nullopt)).accept);
  CHECK(f.Run(MultisigWitness({s0, s2}, std::nullopt)).accept);
  CHECK(f.Run(MultisigWitness({s1, s2}, std::nullopt)).accept);

  // Signatures out of key order fail: each signature consumes keys forward.
  CHECK(f.Run(MultisigWitness({s2, s0}, std::nullopt)).reason == "false");
  // The same signature twice cannot satisfy two key slots.
  CHECK(f.Run(MultisigWitness({s0, s0}, std::nullopt)).reason == "false");
  // One signature is one stack item short of the threshold.
  CHECK(f.Run(MultisigWitness({s0}, std::nullopt)).reason == "stack");
  // Garbage in a signature slot fails to parse.
  CHECK(f.Run({{0xde, 0xad}, s1.Serialize()}, 1).reason == "false");
}

TEST_CASE("signatures bind the digest context") {
  const MultisigFixture f;
  const Hash256 digest = f.Digest();
  const Signature s0 = f.keys[0].Sign(digest, SighashMode::All);
  const Signature s1 = f.keys[1].Sign(digest, SighashMode::All);

  // Valid against the fixture transaction...
  REQUIRE(f.Run(MultisigWitness({s0, s1}, std::nullopt)).accept);

  // ...but re-used against a different spending transaction they fail,
  // because the interpreter recomputes the digest from its own context.
  MultisigFixture other;
  other.tx.outputs[0].amount = 1;  // attacker redirects value
  other.script = f.script;
  CHECK(other.Run(MultisigWitness({s0, s1}, std::nullopt)).reason == "false");
}

TEST_CASE("branch arms of a vault script are mutually exclusive") {
  Rng rng(0x76736372);
  std::vector<KeyPair> active, vault;
  std::vector<PubKey> active_pk, vault_pk;
  for (int i = 0; i < 3; ++i) {
    active.push_back(KeyPair::FromSecret(rng.NextHash()));
    active_pk.push_back(active.back().GetPubKey());
    vault.push_back(KeyPair::FromSecret(rng.NextHash()));
    vault_pk.push_back(vault.back().GetPubKey());
  }
  const int timelock = 6;
  const Script script = VaultScript(timelock, 2, active_pk, 2, vault_pk);

  Transaction tx;
  tx.inputs.push_back(TxInput{OutPoint{rng.NextHash(), 0}, uint32_t(timelock)});
  tx.outputs.push_back(TxOutput{1'000, Script().Add(OP_0)});
  const Amount amount = 2'000;
  const Hash256 digest = SighashDigest(tx, 0, SighashMode::All, script, amount);

  const std::vector<Signature> active_sigs = {active[0].Sign(digest, SighashMode::All),
                                              active[1].Sign(digest, SighashMode::All)};
  const std::vector<Signature> vault_sigs = {vault[0].Sign(digest, SighashMode::All),
                                             vault[1].Sign(digest, SighashMode::All)};

  auto run = [&](const WitnessStack& witness, int confirmations) {
    return EvalScript(script, ExecContext{tx, 0, confirmations, witness, amount});
  };

  // Timelocked arm: active keys, sufficient confirmations.
  CHECK(run(MultisigWitness(active_sigs, true), timelock).accept);
  // Immediate arm: covenant keys, no confirmation requirement.
  CHECK(run(MultisigWitness(vault_sigs, false), 0).accept);
  // Crossed keys on either arm fail.
  CHECK_FALSE(run(MultisigWitness(vault_sigs, true), timelock).accept);
  CHECK_FALSE(run(MultisigWitness(active_sigs, false), 0).accept);
}

TEST_CASE("relative timelock gates on confirmations and sequence") {
  Rng rng(0x637376);
  const KeyPair key = KeyPair::FromSecret(rng.NextHash());
  const int timelock = 6;
  const Script script = VaultScript(timelock, 1, {key.GetPubKey()}, 1, {key.GetPubKey()});

  for (uint32_t sequence : {uint32_t(timelock), uint32_t(timelock - 1)}) {
    Transaction tx;
    tx.inputs.push_back(TxInput{OutPoint{rng.NextHash(), 0}, sequence});
    tx.outputs.push_back(TxOutput{100, Script().Add(OP_0)});
    const Hash256 digest = SighashDigest(tx, 0, SighashMode::All, script, 200);
    const WitnessStack witness = MultisigWitness({key.Sign(digest, SighashMode::All)}, true);

    for (int confirmations : {0, timelock - 1, timelock, timelock + 3}) {
      const ScriptResult r = EvalScript(script, ExecContext{tx, 0, confirmations, witness, 200});
      const bool should_accept = sequence >= uint32_t(timelock) && confirmations >= timelock;
      CHECK(r.accept == should_accept);
      if (!should_accept) CHECK(r.reason == "csv");
    }
  }
}

TEST_CASE("timelock operand must be a valid non-negative number") {
  Script negative;
  negative.Push(std::vector<uint8_t>{0x81});  // -1
  negative.Add(OP_CHECKSEQUENCEVERIFY);
  Transaction tx;
  tx.inputs.push_back(TxInput{OutPoint{}, 100});
  tx.outputs.push_back(TxOutput{1, Script().Add(OP_0)});
  CHECK(EvalScript(negative, ExecContext{tx, 0, 100, {}, 1}).reason == "csv");

  Script oversized;
  oversized.Push(std::vector<uint8_t>{1, 2, 3, 4, 5, 6});
  oversized.Add(OP_CHECKSEQUENCEVERIFY);
  CHECK(EvalScript(oversized, ExecContext{tx, 0, 100, {}, 1}).reason == "num");

  Script empty_stack;
  empty_stack.Add(OP_CHECKSEQUENCEVERIFY);
  CHECK(EvalScript(empty_stack, ExecContext{tx, 0, 100, {}, 1}).reason == "stack");
}

TEST_CASE("template checks accept only the committed transaction") {
  Rng rng(0x637476);
  Transaction tx;
  tx.inputs.push_back(TxInput{OutPoint{rng.NextHash(), 0}, 3});
  tx.outputs.push_back(TxOutput{500, Script().PushInt(7)});

  const Hash256 commitment = CtvHash(tx, 0);
  Script script;
  script.Push(commitment);
  script.Add(OP_CHECKTEMPLATEVERIFY);

  CHECK(EvalScript(script, ExecContext{tx, 0, 1, {}, 600}).accept);

  // Different outpoint, same template: still accepted (outpoints not committed).
  Transaction moved = tx;
  moved.inputs[0].prevout = OutPoint{rng.NextHash(), 2};
  CHECK(EvalScript(script, ExecContext{moved, 0, 1, {}, 600}).accept);

  // Any committed field changing rejects.
  Transaction out_changed = tx;
  out_changed.outputs[0].amount += 1;
  CHECK(EvalScript(script, ExecContext{out_changed, 0, 1, {}, 600}).reason == "ctv");
  Transaction seq_changed = tx;
  seq_changed.inputs[0].sequence += 1;
  CHECK(EvalScript(script, ExecContext{seq_changed, 0, 1, {}, 600}).reason == "ctv");

  // A commitment that is not 32 bytes wide is rejected outright.
  Script stubby;
  stubby.Push(std::vector<uint8_t>{0x01, 0x02});
  stubby.Add(OP_CHECKTEMPLATEVERIFY);
  CHECK(EvalScript(stubby, ExecContext{tx, 0, 1, {}, 600}).reason == "ctv");
}

TEST_CASE("structural failures are reported by kind") {
  Transaction tx;
  tx.inputs.push_back(TxInput{OutPoint{}, 0});
  tx.outputs.push_back(TxOutput{1, Script().Add(OP_0)});
  const ExecContext ctx{tx, 0, 1, {}, 1};

  CHECK(EvalScript(Script().Add(OP_ELSE), ctx).reason == "malformed");
  CHECK(EvalScript(Script().Add(OP_ENDIF), ctx).reason == "malformed");
  CHECK(EvalScript(Script().Add(OP_IF).PushInt(1), ExecContext{tx, 0, 1, {{0x01}}, 1}).reason ==
        "malformed");  // unterminated branch
  CHECK(EvalScript(Script().Add(OP_IF), ctx).reason == "stack");  // no selector on the stack
  CHECK(EvalScript(Script().Add(0xfe), ctx).reason == "op");
  CHECK(EvalScript(Script(), ctx).reason == "stack");          // nothing to judge
  CHECK(EvalScript(Script().Add(OP_0), ctx).reason == "false");
  CHECK(EvalScript(Script().PushInt(5), ctx).accept);
}

TEST_CASE("boolean casting treats negative zero and zero padding as false") {
  Transaction tx;
  tx.inputs.push_back(TxInput{OutPoint{}, 0});
  tx.outputs.push_back(TxOutput{1, Script().Add(OP_0)});

  auto final_verdict = [&](std::vector<uint8_t> item) {
    return EvalScript(Script(), ExecContext{tx, 0, 1, {std::move(item)}, 1}).accept;
  };
  CHECK_FALSE(final_verdict({}));
  CHECK_FALSE(final_verdict({0x00}));
  CHECK_FALSE(final_verdict({0x00, 0x00}));
  CHECK_FALSE(final_verdict({0x00, 0x80}));  // negative zero
  CHECK(final_verdict({0x01}));
  CHECK(final_verdict({0x80, 0x00}));  // 128, genuinely non-zero
  CHECK(final_verdict({0x00, 0x01}));
}

TEST_CASE("skipped branches do not execute or consume") {
  // IF true: push 7; ELSE: an opcode that would fail; ENDIF — the dead arm
  // must not reject the script.
  Script script;
  script.Add(OP_IF);
  script.PushInt(7);
  script.Add(OP_ELSE);
  script.Add(OP_DROP);  // would underflow if executed
  script.Add(OP_ENDIF);

  Transaction tx;
  tx.inputs.push_back(TxInput{OutPoint{}, 0});
  tx.outputs.push_back(TxOutput{1, Script().Add(OP_0)});
  CHECK(EvalScript(script, ExecContext{tx, 0, 1, {{0x01}}, 1}).accept);
  CHECK(EvalScript(script, ExecContext{tx, 0, 1, {}, 1}).reason == "stack");

  // Nested: outer false arm skips the inner IF entirely, including its
  // selector pop.
  Script nested;
  nested.Add(OP_IF);
  nested.Add(OP_IF);
  nested.PushInt(1);
  nested.Add(OP_ENDIF);
  nested.Add(OP_ELSE);
  nested.PushInt(9);
  nested.Add(OP_ENDIF);
  CHECK(EvalScript(nested, ExecContext{tx, 0, 1, {{}}, 1}).accept);  // takes ELSE, pushes 9
}
