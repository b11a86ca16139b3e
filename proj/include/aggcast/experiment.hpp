#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aggcast/core.hpp"
#include "aggcast/ingest.hpp"
#include "aggcast/strategies.hpp"

namespace aggcast {

struct ExperimentConfig {
  std::string input_path;
  std::string output_dir;
  std::vector<StrategyConfig> strategies;
  std::vector<std::string> include_experts;  // glob patterns, empty -> all
  std::vector<std::string> exclude_experts;  // glob patterns
  std::vector<std::string> stations;         // empty -> all
  std::vector<int> lead_times;               // empty -> all
  bool write_weights = true;
  bool write_regret = true;
  std::size_t threads = 0;  // 0 -> hardware concurrency
  std::optional<std::string> column_map_path;
};

struct StreamRunResult {
  StreamKey key;
  std::string strategy_label;
  std::vector<std::string> dates;
  std::vector<double> predictions;
  std::vector<double> observations;
  std::vector<std::vector<double>> weights;        // pre-update, T x N
  std::vector<double> agg_losses;
  std::vector<std::vector<double>> expert_losses;  // T x N
  std::size_t rejected_steps = 0;
  std::size_t bound_violations = 0;
};

// One stream x one strategy, strictly sequential over the rows. Steps the
// loss rejects (e.g. percentage loss at y = 0, non-finite input) are
// skipped and counted; the strategy state is untouched by them.
StreamRunResult run_stream(const ForecastPanel& panel, const StreamKey& key,
                           const StrategyConfig& config);

// Keeps experts matching any include pattern (all, when none given) and not
// matching any exclude pattern. Throws if no expert survives.
ForecastPanel filter_experts(const ForecastPanel& panel,
                             const std::vector<std::string>& include,
                             const std::vector<std::string>& exclude);

std::map<StreamKey, ForecastPanel> load_filtered_panels(
    const ExperimentConfig& config, ParseStats* stats = nullptr);

// Pooled RMSE: squared errors pooled across all streams before the root.
double pooled_rmse(const std::vector<StreamRunResult>& results,
                   const std::string& strategy_label);

struct RunReport {
  int exit_code = 0;  // 0 ok, 1 fatal, 2 partial (some streams failed)
  std::size_t streams_ok = 0;
  std::size_t streams_failed = 0;
  std::size_t dropped_rows = 0;
  std::vector<std::string> errors;
};

// Full pipeline: parse, run every stream x strategy, write summary.csv,
// boxplot.csv and optionally regret.csv / weights_<stream>.csv.
RunReport run_experiment(const ExperimentConfig& config);

// Hindsight oracles per stream -> oracles.csv.
RunReport run_oracles(const ExperimentConfig& config);

// Re-runs the full pipeline once per window -> sweep.csv. Window values
// >= T reproduce the unwindowed result.
RunReport run_sweep(const ExperimentConfig& config,
                    const std::vector<std::size_t>& windows);

}  // namespace aggcast
