// Copyright (c) 2026 The vaultlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef VAULTLAB_RUNNER_H
#define VAULTLAB_RUNNER_H

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include <vaultlab/config.h>
#include <vaultlab/threat.h>

namespace vaultlab {

/** Everything a single scenario run produces. Artifacts are deterministic:
 *  the same configuration always yields byte-identical artifacts. */
struct RunArtifacts {
  ScenarioOutcome outcome;
  nlohmann::json outcome_json;
  nlohmann::json plan_json;
  std::string trace_log;
  std::string chain_log;
  std::string alert_log;
  std::string tolerance_table;
};

/** Build a simulation from the configuration, play its scenario, render all
 *  artifacts. Throws std::invalid_argument on bad configurations. */
RunArtifacts ExecuteRun(const ScenarioConfig& config);

/** Write the artifacts into a directory (created if needed): trace.log,
 *  chain.log, alerts.log, outcome.json, plan.json, tolerance.txt. */
void WriteArtifacts(const RunArtifacts& artifacts, const std::string& directory);

/** One swept configuration field, inclusive bounds. */
struct SweepSpec {
  std::string field;
  int64_t lo = 0;
  int64_t hi = 0;
};

/** Parse "field=lo..hi" or "field=value"; nullopt on malformed input. */
std::optional<SweepSpec> ParseSweep(const std::string& text);

/** Set a configuration field by name. Accepts the short wallet aliases
 *  (j k m n p t a b R S W T) as well as dotted names such as
 *  "feerates.owner" or "revault_layers". Throws on unknown fields. */
void ApplyConfigField(ScenarioConfig& config, const std::string& field, int64_t value);

struct MatrixRow {
  std::string scenario;
  std::string sweep_field;  // empty when nothing was swept
  int64_t sweep_value = 0;
  ScenarioClass cls = ScenarioClass::NoLoss;
  ScenarioClass expected = ScenarioClass::NoLoss;
  Amount attacker_gain = 0;
  bool matches = false;
};

struct MatrixResult {
  std::vector<MatrixRow> rows;
  int divergences = 0;
  std::string table;
};

/** Run every applicable catalog scenario, once per sweep value (or once if
 *  no sweep). Scenarios inapplicable to the configuration are skipped. */
MatrixResult ExecuteMatrix(const ScenarioConfig& base, const std::optional<SweepSpec>& sweep);

/** Command-line entry point. Exit codes: 0 success, 1 configuration or I/O
 *  errors, 2 outcome diverged from a pinned expectation. */
int CliMain(int argc, char** argv);

}  // namespace vaultlab

#endif  // VAULTLAB_RUNNER_H
