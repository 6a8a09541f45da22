// Copyright (c) 2026 The vaultlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef VAULTLAB_RNG_H
#define VAULTLAB_RNG_H

#include <cstdint>
#include <string>

#include <vaultlab/hash.h>

namespace vaultlab {

/** Deterministic splitmix64 generator. Every source of randomness in a run
 *  flows from one seed through instances of this class; std:: distributions
 *  are avoided because their outputs differ across standard libraries. */
class Rng {
 public:
  explicit Rng(uint64_t seed) : m_state(seed) {}

  uint64_t Next() {
    uint64_t z = (m_state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /** Uniform-ish value in [0, n). Modulo bias is irrelevant here; determinism is not. */
  uint64_t Below(uint64_t n) { return n == 0 ? 0 : Next() % n; }

  int64_t Range(int64_t lo, int64_t hi) {  // inclusive bounds
    return lo + int64_t(Below(uint64_t(hi - lo + 1)));
  }

  bool Chance(uint64_t num, uint64_t den) { return Below(den) < num; }

  Hash256 NextHash() {
    Hash256 out;
    for (int i = 0; i < 4; ++i) {
      uint64_t v = Next();
      for (int j = 0; j < 8; ++j) out[size_t(i * 8 + j)] = uint8_t(v >> (8 * j));
    }
    return out;
  }

  /** Independent child stream bound to a label; used to give each scenario
   *  run its own deterministic stream derived from the master seed. */
  Rng Child(const std::string& label) {
    std::vector<uint8_t> buf;
    uint64_t s = m_state;
    for (int j = 0; j < 8; ++j) buf.push_back(uint8_t(s >> (8 * j)));
    buf.insert(buf.end(), label.begin(), label.end());
    Hash256 h = TaggedHash("vaultlab/rng-child", buf);
    uint64_t child_seed = 0;
    for (int j = 0; j < 8; ++j) child_seed |= uint64_t(h[size_t(j)]) << (8 * j);
    return Rng(child_seed);
  }

 private:
  uint64_t m_state;
};

}  // namespace vaultlab

#endif  // VAULTLAB_RNG_H
