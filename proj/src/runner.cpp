// Copyright (c) 2026 The vaultlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <vaultlab/runner.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include <vaultlab/report.h>
#include <vaultlab/tolerance.h>

namespace vaultlab {
namespace {

void WriteFile(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

std::string PadTo(std::string text, size_t width) {
  if (text.size() < width) text.resize(width, ' ');
  return text;
}

/** Scenarios that can run under this configuration. */
std::vector<std::string> ApplicableScenarios(const ScenarioConfig& config) {
  std::vector<std::string> out;
  for (const std::string& id : ScenarioCatalog()) {
    if (id == "R1" && config.revault_layers < 2) continue;
    out.push_back(id);
  }
  return out;
}

}  // namespace

RunArtifacts ExecuteRun(const ScenarioConfig& config) {
  Simulation sim(config);
  RunArtifacts artifacts;
  artifacts.outcome = RunScenario(sim);
  artifacts.outcome_json = OutcomeJson(artifacts.outcome, config, sim);
  artifacts.plan_json = PlanJson(sim);
  artifacts.trace_log = RenderTraceLog(sim.traces());
  artifacts.chain_log = RenderChainLog(sim.chain());
  artifacts.alert_log = RenderAlertLog(sim.AlertLog());
  artifacts.tolerance_table = RenderToleranceTable(ToleranceOracle(config.topology));
  return artifacts;
}

void WriteArtifacts(const RunArtifacts& artifacts, const std::string& directory) {
  const std::filesystem::path dir(directory);
  std::filesystem::create_directories(dir);
  WriteFile(dir / "trace.log", artifacts.trace_log);
  WriteFile(dir / "chain.log", artifacts.chain_log);
  WriteFile(dir / "alerts.log", artifacts.alert_log);
  WriteFile(dir / "outcome.json", artifacts.outcome_json.dump(2) + "\n");
  WriteFile(dir / "plan.json", artifacts.plan_json.dump(2) + "\n");
  WriteFile(dir / "tolerance.txt", artifacts.tolerance_table);
}

std::optional<SweepSpec> ParseSweep(const std::string& text) {
  const size_t eq = text.find('=');
  if (eq == std::string::npos || eq == 0) return std::nullopt;
  SweepSpec spec;
  spec.field = text.substr(0, eq);
  const std::string range = text.substr(eq + 1);
  const size_t dots = range.find("..");
  try {
    if (dots == std::string::npos) {
      spec.lo = spec.hi = std::stoll(range);
    } else {
      spec.lo = std::stoll(range.substr(0, dots));
      spec.hi = std::stoll(range.substr(dots + 2));
    }
  } catch (const std::exception&) {
    return std::nullopt;
  }
  if (spec.hi < spec.lo) return std::nullopt;
  return spec;
}

void ApplyConfigField(ScenarioConfig& config, const std::string& field, int64_t value) {
  WalletTopology& t = config.topology;
  const int v = static_cast<int>(value);
  if (field == "j" || field == "topology.active_threshold") { t.active_threshold = v; return; }
  if (field == "k" || field == "topology.active_count") { t.active_count = v; return; }
  if (field == "m" || field == "topology.recovery_threshold") { t.recovery_threshold = v; return; }
  if (field == "n" || field == "topology.recovery_count") { t.recovery_count = v; return; }
  if (field == "p" || field == "topology.vault_threshold") { t.vault_threshold = v; return; }
  if (field == "t" || field == "topology.vault_count") { t.vault_count = v; return; }
  if (field == "a" || field == "topology.fee_threshold") { t.fee_threshold = v; return; }
  if (field == "b" || field == "topology.fee_count") { t.fee_count = v; return; }
  if (field == "R" || field == "topology.avt_storage") { t.avt_storage = v; return; }
  if (field == "S" || field == "topology.p2rw_storage") { t.p2rw_storage = v; return; }
  if (field == "W" || field == "topology.watchtowers") { t.watchtowers = v; return; }
  if (field == "T" || field == "topology.timelock") { t.timelock = v; return; }
  if (field == "feerates.owner") { config.feerates.owner = value; return; }
  if (field == "feerates.attacker") { config.feerates.attacker = value; return; }
  if (field == "feerates.bribe") { config.feerates.bribe = value; return; }
  if (field == "feerates.recovery") { config.feerates.recovery = value; return; }
  if (field == "revault_layers") { config.revault_layers = v; return; }
  if (field == "revault_fee_tiers") { config.revault_fee_tiers = v; return; }
  if (field == "seed") { config.seed = static_cast<uint64_t>(value); return; }
  throw std::invalid_argument("unknown configuration field: " + field);
}

MatrixResult ExecuteMatrix(const ScenarioConfig& base, const std::optional<SweepSpec>& sweep) {
  MatrixResult result;
  std::vector<int64_t> values;
  if (sweep) {
    for (int64_t v = sweep->lo; v <= sweep->hi; ++v) values.push_back(v);
  } else {
    values.push_back(0);
  }

  std::ostringstream table;
  const std::string field_header = sweep ? sweep->field : "";
  table << PadTo("scenario", 10);
  if (sweep) table << PadTo(field_header, 10);
  table << PadTo("class", 14) << PadTo("expected", 14) << PadTo("attacker-gain", 15)
        << "verdict\n";

  for (const int64_t value : values) {
    ScenarioConfig config = base;
    if (sweep) ApplyConfigField(config, sweep->field, value);
    if (const auto bad = config.Validate()) {
      throw std::invalid_argument("swept configuration invalid at " + field_header + "=" +
                                  std::to_string(value) + ": " + *bad);
    }
    for (const std::string& id : ApplicableScenarios(config)) {
      config.scenario = id;
      Simulation sim(config);
      const ScenarioOutcome outcome = RunScenario(sim);
      MatrixRow row;
      row.scenario = id;
      row.sweep_field = sweep ? sweep->field : "";
      row.sweep_value = value;
      row.cls = outcome.cls;
      row.expected = outcome.expected;
      row.attacker_gain = outcome.attacker_gain;
      row.matches = outcome.matches_expected;
      if (!row.matches) result.divergences += 1;
      table << PadTo(id, 10);
      if (sweep) table << PadTo(std::to_string(value), 10);
      table << PadTo(ClassName(row.cls), 14) << PadTo(ClassName(row.expected), 14)
            << PadTo(std::to_string(row.attacker_gain), 15)
            << (row.matches ? "ok" : "DIVERGES") << '\n';
      result.rows.push_back(std::move(row));
    }
  }
  result.table = table.str();
  return result;
}

int CliMain(int argc, char** argv) {
  CLI::App app{"deterministic vault custody simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string mechanism_override;
  std::string scenario_override;
  std::string expect_path;
  std::string sweep_text;
  std::optional<uint64_t> seed_override;

  const char* env_out = std::getenv("VAULTLAB_OUT");
  if (env_out != nullptr) out_dir = env_out;

  CLI::App* run = app.add_subcommand("run", "play one scenario and write its artifacts");
  run->add_option("config", config_path, "scenario configuration file")->required();
  run->add_option("--seed", seed_override, "override the configured seed");
  run->add_option("--out", out_dir, "directory for artifacts");
  run->add_option("--mechanism", mechanism_override, "override the covenant mechanism");
  run->add_option("--scenario", scenario_override, "override the configured scenario");
  run->add_option("--expect", expect_path, "golden outcome.json to compare against");

  CLI::App* matrix = app.add_subcommand("matrix", "run the scenario catalog, optionally sweeping");
  matrix->add_option("config", config_path, "base configuration file")->required();
  matrix->add_option("--sweep", sweep_text, "field=lo..hi to sweep");
  matrix->add_option("--seed", seed_override, "override the configured seed");
  matrix->add_option("--out", out_dir, "directory for the matrix table");

  CLI::App* tolerance = app.add_subcommand("tolerance", "print per-component fault tolerances");
  tolerance->add_option("config", config_path, "configuration file")->required();
  tolerance->add_option("--out", out_dir, "directory for the tolerance table");

  CLI::App* scenarios = app.add_subcommand("scenarios", "list the scenario catalog");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (scenarios->parsed()) {
      for (const std::string& id : ScenarioCatalog()) {
        std::cout << PadTo(id, 10) << ScenarioDescription(id) << '\n';
      }
      return 0;
    }

    std::string error;
    auto config = LoadConfigFile(config_path, &error);
    if (!config) {
      std::cerr << "error: " << error << '\n';
      return 1;
    }
    if (seed_override) config->seed = *seed_override;
    if (!mechanism_override.empty()) {
      const auto mechanism = MechanismFromName(mechanism_override);
      if (!mechanism) {
        std::cerr << "error: unknown mechanism: " << mechanism_override << '\n';
        return 1;
      }
      config->mechanism = *mechanism;
    }
    if (!scenario_override.empty()) {
      if (!KnownScenarioId(scenario_override)) {
        std::cerr << "error: unknown scenario: " << scenario_override << '\n';
        return 1;
      }
      config->scenario = scenario_override;
    }

    if (run->parsed()) {
      const RunArtifacts artifacts = ExecuteRun(*config);
      if (!out_dir.empty()) WriteArtifacts(artifacts, out_dir);
      std::cout << "scenario: " << artifacts.outcome.scenario << '\n'
                << "mechanism: " << MechanismName(artifacts.outcome.mechanism) << '\n'
                << "class: " << ClassName(artifacts.outcome.cls) << '\n'
                << "attacker gain: " << artifacts.outcome.attacker_gain << '\n'
                << "owner total: " << artifacts.outcome.owner_total << '\n'
                << "frozen total: " << artifacts.outcome.frozen_total << '\n';
      if (!out_dir.empty()) std::cout << "artifacts: " << out_dir << '\n';

      if (config->expect_class) {
        const auto expected = ClassFromName(*config->expect_class);
        if (!expected) {
          std::cerr << "error: bad expect_class in configuration: " << *config->expect_class
                    << '\n';
          return 1;
        }
        if (artifacts.outcome.cls != *expected) {
          std::cerr << "expectation failed: class " << ClassName(artifacts.outcome.cls)
                    << " != pinned " << ClassName(*expected) << '\n';
          return 2;
        }
      }
      if (!expect_path.empty()) {
        std::ifstream golden_file(expect_path, std::ios::binary);
        if (!golden_file) {
          std::cerr << "error: cannot read " << expect_path << '\n';
          return 1;
        }
        nlohmann::json golden;
        try {
          golden_file >> golden;
        } catch (const std::exception& e) {
          std::cerr << "error: bad golden file: " << e.what() << '\n';
          return 1;
        }
        if (golden != artifacts.outcome_json) {
          std::cerr << "expectation failed: outcome differs from " << expect_path << '\n';
          return 2;
        }
        std::cout << "outcome matches " << expect_path << '\n';
      }
      return 0;
    }

    if (matrix->parsed()) {
      std::optional<SweepSpec> sweep;
      if (!sweep_text.empty()) {
        sweep = ParseSweep(sweep_text);
        if (!sweep) {
          std::cerr << "error: bad sweep (want field=lo..hi): " << sweep_text << '\n';
          return 1;
        }
      }
      const MatrixResult result = ExecuteMatrix(*config, sweep);
      std::cout << result.table;
      if (result.divergences > 0) {
        std::cout << result.divergences << " row(s) diverge from the expectation table\n";
      }
      if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        WriteFile(std::filesystem::path(out_dir) / "matrix.txt", result.table);
        std::cout << "artifacts: " << out_dir << '\n';
      }
      return 0;
    }

    if (tolerance->parsed()) {
      if (const auto bad = config->Validate()) {
        std::cerr << "error: invalid configuration field: " << *bad << '\n';
        return 1;
      }
      const std::string table = RenderToleranceTable(ToleranceOracle(config->topology));
      std::cout << table;
      if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        WriteFile(std::filesystem::path(out_dir) / "tolerance.txt", table);
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace vaultlab
