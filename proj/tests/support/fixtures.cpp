#include "fixtures.hpp"

#include "hydrostate/network_io.hpp"

#include <atomic>
#include <chrono>

#ifndef HYDROSTATE_TEST_DATA_DIR
#error "HYDROSTATE_TEST_DATA_DIR must be defined"
#endif

namespace hydrostate::fixture {

namespace fs = std::filesystem;

fs::path data_path(const std::string& name) { return fs::path(HYDROSTATE_TEST_DATA_DIR) / name; }

Node junction(const std::string& id, double elevation, double demand_m3s) {
  Node n;
  n.id = id;
  n.elevation = elevation;
  if (demand_m3s != 0.0) n.demands.push_back({demand_m3s, ""});
  return n;
}

Node reservoir(const std::string& id, double head) {
  Node n;
  n.id = id;
  n.kind = NodeKind::Reservoir;
  n.head = head;
  n.elevation = head;
  return n;
}

PipeSpec pipe(const std::string& id, const std::string& from, const std::string& to, double length,
              double diameter, double roughness) {
  return {id, from, to, length, diameter, roughness};
}

Network two_node(double demand_m3s) {
  return Network({junction("J1", 10.0, demand_m3s), reservoir("R1", 60.0)}, {pipe("P1", "R1", "J1", 1000.0)});
}

Network line3(double demand_m3s) {
  return Network({junction("A", 20.0), junction("B", 15.0, demand_m3s), reservoir("R1", 100.0)},
                 {pipe("P1", "R1", "A", 800.0, 0.25), pipe("P2", "A", "B", 600.0, 0.2, 110.0)});
}

Network path4() {
  return Network({junction("J1", 0.0, 0.002), junction("J2", 0.0, 0.002), junction("J3", 0.0, 0.002),
                  reservoir("R1", 50.0)},
                 {pipe("P1", "J1", "J2", 100.0), pipe("P2", "J2", "J3", 200.0), pipe("P3", "J3", "R1", 400.0)});
}

Network five_node() {
  return Network({junction("J1", 5.0, 0.004), junction("J2", 4.0, 0.006), junction("J3", 3.0, 0.005),
                  junction("J4", 2.0, 0.003), reservoir("R1", 60.0)},
                 {pipe("P1", "R1", "J1", 300.0, 0.3), pipe("P2", "J1", "J2", 400.0, 0.2),
                  pipe("P3", "J1", "J3", 350.0, 0.2), pipe("P4", "J2", "J4", 500.0, 0.15),
                  pipe("P5", "J3", "J4", 450.0, 0.15), pipe("P6", "J2", "J3", 250.0, 0.1)});
}

Network six_node() {
  return Network({junction("J1", 10.0, 0.003), junction("J2", 8.0, 0.004), junction("J3", 6.0, 0.005),
                  junction("J4", 7.0, 0.002), junction("J5", 5.0, 0.006), reservoir("R1", 70.0)},
                 {pipe("P1", "R1", "J1", 200.0, 0.3), pipe("P2", "J1", "J2", 300.0, 0.2),
                  pipe("P3", "J2", "J3", 250.0, 0.15), pipe("P4", "J1", "J4", 400.0, 0.2),
                  pipe("P5", "J4", "J5", 350.0, 0.15), pipe("P6", "J3", "J5", 300.0, 0.1),
                  pipe("P7", "J2", "J4", 500.0, 0.1)});
}

Shipped shipped(const std::string& name) {
  fs::path net_path = data_path(name + ".json");
  if (!fs::exists(net_path)) net_path = data_path(name + ".inp");
  ParsedNetwork parsed = load_network(net_path);
  SensorConfig sensors = load_sensors(data_path(name + "_sensors.json"), parsed.network);
  return {std::move(parsed.network), std::move(sensors)};
}

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
  path_ = fs::temp_directory_path() /
          ("hydrostate_" + tag + "_" + std::to_string(stamp) + "_" + std::to_string(counter++));
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

}  // namespace hydrostate::fixture
