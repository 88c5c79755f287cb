#pragma once

#include "hydrostate/network.hpp"
#include "hydrostate/scenario.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace hydrostate {

// hour,<column ids...> table with one row per instant.
struct HourTable {
  std::vector<std::string> columns;
  std::vector<int> hours;
  std::vector<Vector> rows;
};

std::string hour_table_csv(const HourTable& table, double scale = 1.0);
// Values are divided by `scale`. Throws ParseError.
HourTable parse_hour_table(std::string_view csv, double scale = 1.0);

// Node-indexed table: columns are the node ids in network order.
HourTable node_table(const Network& net, const std::vector<int>& hours, const std::vector<Vector>& rows);
// Reorders columns into network order; throws when a node is missing.
std::vector<Vector> node_rows(const HourTable& table, const Network& net);

// heads.csv, demands.csv (l/s), measured_heads.csv, measured_demands.csv (l/s).
void write_time_series(const std::filesystem::path& dir, const TimeSeriesData& data, const Network& net,
                       const SensorConfig& sensors);
TimeSeriesData read_time_series(const std::filesystem::path& dir, const Network& net, const SensorConfig& sensors);

}  // namespace hydrostate
