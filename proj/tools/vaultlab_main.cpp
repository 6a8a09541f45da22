// Copyright (c) 2026 The vaultlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <vaultlab/runner.h>

int main(int argc, char** argv) { return vaultlab::CliMain(argc, argv); }
