#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aggcast/core.hpp"

namespace aggcast {

// Maps an external file's column names onto the expected schema. Loaded
// from a key=value file; unset fields keep the defaults.
struct ColumnMap {
  std::string date = "date";
  std::string station = "station_id";
  std::string lead_time = "lead_time";
  std::string obs = "obs";
  // When non-empty, only these columns are taken as experts; otherwise all
  // remaining columns are.
  std::vector<std::string> experts;

  static ColumnMap load(const std::string& path);
};

struct ParseStats {
  std::size_t dropped_rows = 0;  // rows with missing / non-numeric values
  std::size_t total_rows = 0;
};

// Expected header: date,station_id,lead_time,obs,<expert_1>,...,<expert_N>
// (names remappable through ColumnMap). Rows with any missing or
// non-numeric value are dropped per stream with a counted warning.
// Duplicate (stream, date) pairs and malformed headers are errors.
std::map<StreamKey, ForecastPanel> parse_forecast_csv(
    const std::string& path, ParseStats* stats = nullptr,
    const ColumnMap* columns = nullptr);

void write_panel_csv(const std::string& path,
                     const std::map<StreamKey, ForecastPanel>& panels);

// Simple glob with * and ? (for --exclude-experts patterns).
bool glob_match(const std::string& pattern, const std::string& text);

}  // namespace aggcast
