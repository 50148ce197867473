#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fdbeam/scene.hpp"
#include "fdbeam/select.hpp"
#include "fdbeam/sweep.hpp"

namespace fdbeam {

// Experiment description parsed from a key-value config file. Unknown
// keys are rejected with their line number.
struct ExperimentConfig {
  std::string scene_path;
  std::string output_dir = "out";
  std::vector<double> delta_list_deg = {0, 1, 2, 3, 4, 5, 6};
  double res_deg = 1.0;
  double codebook_start_deg = -60.0;
  double codebook_step_deg = 8.0;
  double codebook_stop_deg = 60.0;
  std::optional<int> quantization_bits = 6;
  double steer_inr_target_db = 0.0;
  double steer_plus_inr_target_db = std::numeric_limits<double>::infinity();
  double steer_plus_se_target = std::numeric_limits<double>::infinity();
  // When set, the solvers use this constant cross-link INR instead of the
  // scene's true pairwise value (approximation mode).
  std::optional<double> crosslink_inr_approx_db;
  std::vector<std::pair<int, int>> pairs;  // empty = all ordered pairs
  std::optional<std::uint64_t> seed_override;
  bool plots = false;
};

ExperimentConfig parse_config(const std::string& path);

// One record per (user pair, neighborhood size, algorithm).
struct ScenarioRecord {
  int dl_user = 0;
  int ul_user = 0;
  double delta_deg = 0.0;
  std::string algorithm;  // "steer" or "steer-plus"
  double theta_tx_init_deg = 0.0;
  double theta_rx_init_deg = 0.0;
  double theta_tx_deg = 0.0;
  double theta_rx_deg = 0.0;
  double inr_db = 0.0;
  double sinr_dl_db = 0.0;
  double sinr_ul_db = 0.0;
  double r_dl = 0.0;
  double r_ul = 0.0;
  double r_sum = 0.0;
  double normalized_se = 0.0;
  bool fallback_used = false;
  MeasurementLedger ledger;
};

struct ScenarioReport {
  std::string scene_digest;
  std::uint64_t seed = 0;
  std::vector<ScenarioRecord> records;
};

// Full evaluation sweep over user pairs and neighborhood sizes:
// beam alignment, then the minimum-interference solver and the
// rate-maximizing solver per pair, with exact measurement accounting.
ScenarioReport run_scenario_paper(const ExperimentConfig& config, const Scene& scene);

// report.csv (one row per record) and report.json; byte-stable for a
// fixed seed.
void export_report(const ScenarioReport& report, const std::string& dir);
std::vector<ScenarioRecord> import_report_csv(const std::string& path);

// Sweep dataset import (sweep-engine format); see import_sweep_csv.
InrMap import_sweep(const std::string& path);

}  // namespace fdbeam
