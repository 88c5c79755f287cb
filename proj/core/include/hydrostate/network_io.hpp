#pragma once

#include "hydrostate/network.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace hydrostate {

enum class NetworkFormat { Inp, Json };

struct ParsedNetwork {
  Network network;
  std::vector<std::string> warnings;
};

// INP subset: [JUNCTIONS], [RESERVOIRS], [PIPES], [DEMANDS], [PATTERNS].
// Flows in l/s, pipe diameters in mm, everything else SI. Other sections are
// skipped with a warning; closed pipes are dropped with a warning.
//
// JSON: {nodes:[{id, kind, elevation_m, head_m?, pattern?}],
//        pipes:[{id, from, to, length_m, diameter_m, roughness}],
//        demands:{id: base_lps | [{base_lps, pattern}]},
//        patterns:{name:[multipliers]}, default_pattern?}
//
// Throws ParseError (with line number) on syntax errors and InputError on
// semantic ones.
ParsedNetwork parse_network(std::string_view text, NetworkFormat format);

// Format from the extension: ".inp" is INP, anything else JSON.
ParsedNetwork load_network(const std::filesystem::path& path);

std::string serialize_network(const Network& net, NetworkFormat format);

// {"pressure_nodes": [ids], "amr_nodes": [ids]}
SensorConfig parse_sensors(std::string_view json_text, const Network& net);
SensorConfig load_sensors(const std::filesystem::path& path, const Network& net);
std::string serialize_sensors(const SensorConfig& sensors, const Network& net);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace hydrostate
