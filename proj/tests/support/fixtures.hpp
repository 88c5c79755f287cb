#pragma once

#include "hydrostate/network.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace hydrostate::fixture {

std::filesystem::path data_path(const std::string& name);

Node junction(const std::string& id, double elevation = 0.0, double demand_m3s = 0.0);
Node reservoir(const std::string& id, double head);
PipeSpec pipe(const std::string& id, const std::string& from, const std::string& to, double length,
              double diameter = 0.3, double roughness = 120.0);

// J1 -- R1, one 1000 m pipe; demand at J1.
Network two_node(double demand_m3s = 0.01);
// R1 (100 m) -> A -> B with the demand at B.
Network line3(double demand_m3s = 0.02);
// Path J1 - J2 - J3 - R1 with lengths 100, 200, 400.
Network path4();
// Four junctions and a reservoir, two loops.
Network five_node();
// Five junctions and a reservoir, two loops, seven pipes.
Network six_node();

struct Shipped {
  Network net;
  SensorConfig sensors;
};
// data/<name>.json|.inp with data/<name>_sensors.json.
Shipped shipped(const std::string& name);

// Temporary directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace hydrostate::fixture
