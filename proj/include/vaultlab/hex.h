// Copyright (c) 2026 The vaultlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef VAULTLAB_HEX_H
#define VAULTLAB_HEX_H

#include <optional>
#include <string>
#include <vector>

#include <vaultlab/hash.h>

namespace vaultlab {

std::string HexStr(const uint8_t* data, size_t len);
std::string HexStr(const std::vector<uint8_t>& data);
std::string HexStr(const Hash256& h);

/** Strict lowercase/uppercase hex decode; rejects odd length and non-hex chars. */
std::optional<std::vector<uint8_t>> ParseHex(const std::string& hex);
std::optional<Hash256> ParseHash256(const std::string& hex);

}  // namespace vaultlab

#endif  // VAULTLAB_HEX_H
