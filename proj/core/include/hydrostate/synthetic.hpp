#pragma once

#include "hydrostate/network.hpp"

#include <cstdint>
#include <vector>

namespace hydrostate {

// Looped grid-like network sized for testing: a random spanning tree over a
// jittered grid of junctions plus extra loop-closing pipes, reservoirs
// attached at spread boundary junctions, pipe diameters sized to a velocity
// limit at peak demand.
struct SyntheticNetworkSpec {
  int junctions = 60;
  int reservoirs = 2;
  int pipes = 78;                // including one link per reservoir
  double total_demand = 0.12;    // m^3/s, average
  double spacing = 200.0;        // m
  double reservoir_head = 80.0;  // m
  double max_velocity = 1.0;     // m/s, sizing target
  std::uint64_t seed = 7;
};

// 268 junctions, 317 pipes, 4 reservoirs, ~400 l/s, ~72 km of pipe.
SyntheticNetworkSpec modena_sized_spec();

Network make_synthetic_network(const SyntheticNetworkSpec& spec);

// 24 hourly multipliers with unit mean.
std::vector<double> diurnal_pattern();

// Pressure sensors at every reservoir plus `pressure_junctions` junctions;
// AMRs at all pressure sites plus `extra_amr` further junctions. Sites are
// chosen by farthest-point sampling on hop distance.
SensorConfig place_sensors(const Network& net, int pressure_junctions, int extra_amr);

// Junctions whose hop distance to every sensor is at least `min_hops`,
// farthest first.
std::vector<Index> remote_junctions(const Network& net, const SensorConfig& sensors, int min_hops);

}  // namespace hydrostate
