// Copyright (c) 2026 The vaultlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef VAULTLAB_REPORT_H
#define VAULTLAB_REPORT_H

#include <string>
#include <vector>

#include <json.hpp>

#include <vaultlab/orchestrator.h>
#include <vaultlab/threat.h>
#include <vaultlab/tolerance.h>

namespace vaultlab {

/** Renderers for run artifacts. All output is deterministic: a run is fully
 *  determined by its configuration, so two runs of the same configuration
 *  must produce byte-identical artifacts (no timestamps, no pointers). */

/** One tab-separated line per process step, plus one closing line per
 *  process recording completion or the abort reason. */
std::string RenderTraceLog(const std::vector<ProcessTrace>& traces);

/** One tab-separated line per chain event: height, kind, txid. */
std::string RenderChainLog(const Chain& chain);

/** One tab-separated line per watchtower alert: height, node, kind, txid,
 *  and whether the owner actually received it. */
std::string RenderAlertLog(const std::vector<Alert>& alerts);

/** Machine-readable scenario outcome: classification, funds buckets,
 *  conservation figures and the adversary's move notes. */
nlohmann::json OutcomeJson(const ScenarioOutcome& outcome, const ScenarioConfig& config,
                           const Simulation& sim);

/** Machine-readable covenant plan summary: one entry per pair with its
 *  outpoints, realized txids, layer state and activation. */
nlohmann::json PlanJson(const Simulation& sim);

/** Fixed-width text table of per-component fault tolerances. */
std::string RenderToleranceTable(const std::vector<ToleranceRow>& rows);

}  // namespace vaultlab

#endif  // VAULTLAB_REPORT_H
