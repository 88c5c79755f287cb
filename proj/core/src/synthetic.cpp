#include "hydrostate/synthetic.hpp"

#include "hydrostate/error.hpp"
#include "hydrostate/hydraulics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <string>

namespace hydrostate {

namespace {

constexpr double kCommercialDiameters[] = {0.1, 0.125, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.5, 0.6, 0.7, 0.8, 1.0};

struct DisjointSet {
  std::vector<int> parent;
  explicit DisjointSet(int n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[static_cast<std::size_t>(a)] = b;
    return true;
  }
};

double sized_diameter(double flow, double max_velocity) {
  for (const double d : kCommercialDiameters) {
    if (std::abs(flow) <= max_velocity * std::numbers::pi * d * d / 4.0) return d;
  }
  return kCommercialDiameters[std::size(kCommercialDiameters) - 1];
}

}  // namespace

SyntheticNetworkSpec modena_sized_spec() {
  SyntheticNetworkSpec spec;
  spec.junctions = 268;
  spec.reservoirs = 4;
  spec.pipes = 317;
  spec.total_demand = 0.4;
  spec.spacing = 225.0;
  spec.reservoir_head = 72.0;
  spec.seed = 88;
  return spec;
}

std::vector<double> diurnal_pattern() {
  std::vector<double> p = {0.55, 0.45, 0.40, 0.40, 0.45, 0.60, 0.95, 1.35, 1.45, 1.35, 1.25, 1.20,
                           1.25, 1.20, 1.10, 1.05, 1.05, 1.15, 1.35, 1.45, 1.30, 1.05, 0.80, 0.65};
  const double mean = std::accumulate(p.begin(), p.end(), 0.0) / static_cast<double>(p.size());
  for (auto& v : p) v /= mean;
  return p;
}

Network make_synthetic_network(const SyntheticNetworkSpec& spec) {
  const int nj = spec.junctions;
  if (nj < 2 || spec.reservoirs < 1) throw InputError("synthetic network: need >= 2 junctions and >= 1 reservoir");
  const int jj_pipes = spec.pipes - spec.reservoirs;
  if (jj_pipes < nj - 1) throw InputError("synthetic network: too few pipes for a connected network");

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(nj))));
  std::vector<double> x(static_cast<std::size_t>(nj));
  std::vector<double> y(x.size());
  for (int j = 0; j < nj; ++j) {
    x[static_cast<std::size_t>(j)] = (j % cols + 0.3 * (unit(rng) - 0.5)) * spec.spacing;
    y[static_cast<std::size_t>(j)] = (j / cols + 0.3 * (unit(rng) - 0.5)) * spec.spacing;
  }

  std::vector<std::pair<int, int>> candidates;
  for (int j = 0; j < nj; ++j) {
    if ((j % cols) + 1 < cols && j + 1 < nj) candidates.emplace_back(j, j + 1);
    if (j + cols < nj) candidates.emplace_back(j, j + cols);
  }
  if (static_cast<int>(candidates.size()) < jj_pipes) throw InputError("synthetic network: too many pipes requested");
  std::shuffle(candidates.begin(), candidates.end(), rng);

  DisjointSet forest(nj);
  std::vector<std::pair<int, int>> chosen;
  std::vector<std::pair<int, int>> spare;
  for (const auto& e : candidates) {
    (forest.unite(e.first, e.second) ? chosen : spare).push_back(e);
  }
  chosen.insert(chosen.end(), spare.begin(), spare.begin() + (jj_pipes - static_cast<int>(chosen.size())));

  std::vector<Node> nodes;
  std::vector<double> weights(static_cast<std::size_t>(nj));
  for (auto& w : weights) w = 0.5 + unit(rng);
  const double weight_sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  const double extent = cols * spec.spacing;
  for (int j = 0; j < nj; ++j) {
    const double xs = x[static_cast<std::size_t>(j)];
    const double ys = y[static_cast<std::size_t>(j)];
    const double elevation = 20.0 + 6.0 * std::sin(2.0 * std::numbers::pi * xs / extent) + 4.0 * ys / extent +
                             unit(rng);
    nodes.push_back({"J" + std::to_string(j + 1), NodeKind::Junction, std::round(elevation * 100.0) / 100.0, 0.0,
                     {{spec.total_demand * weights[static_cast<std::size_t>(j)] / weight_sum, {}}}});
  }

  // Reservoir feeds at boundary junctions spread by farthest-point sampling.
  std::vector<int> boundary;
  const int rows = (nj + cols - 1) / cols;
  for (int j = 0; j < nj; ++j) {
    const int c = j % cols;
    const int r = j / cols;
    if (c == 0 || c == cols - 1 || r == 0 || r == rows - 1 || j + cols >= nj) boundary.push_back(j);
  }
  std::vector<int> feeds{boundary.front()};
  while (static_cast<int>(feeds.size()) < spec.reservoirs) {
    int best = -1;
    double best_d = -1.0;
    for (const int b : boundary) {
      double d = std::numeric_limits<double>::infinity();
      for (const int f : feeds) {
        d = std::min(d, std::hypot(x[static_cast<std::size_t>(b)] - x[static_cast<std::size_t>(f)],
                                   y[static_cast<std::size_t>(b)] - y[static_cast<std::size_t>(f)]));
      }
      if (d > best_d) {
        best_d = d;
        best = b;
      }
    }
    feeds.push_back(best);
  }

  std::vector<PipeSpec> pipes;
  for (std::size_t k = 0; k < chosen.size(); ++k) {
    const auto [a, b] = chosen[k];
    const double len = std::hypot(x[static_cast<std::size_t>(a)] - x[static_cast<std::size_t>(b)],
                                  y[static_cast<std::size_t>(a)] - y[static_cast<std::size_t>(b)]);
    pipes.push_back({"P" + std::to_string(k + 1), nodes[static_cast<std::size_t>(a)].id,
                     nodes[static_cast<std::size_t>(b)].id, std::round(len * 10.0) / 10.0, 0.3,
                     std::round(100.0 + 30.0 * unit(rng))});
  }
  for (int r = 0; r < spec.reservoirs; ++r) {
    const std::string id = "R" + std::to_string(r + 1);
    const double head = spec.reservoir_head + (r % 2 == 0 ? 0.0 : -1.5) + 0.5 * r;
    nodes.push_back({id, NodeKind::Reservoir, head, head, {}});
    pipes.push_back({"PR" + std::to_string(r + 1), id, nodes[static_cast<std::size_t>(feeds[static_cast<std::size_t>(r)])].id,
                     std::round((100.0 + 100.0 * unit(rng)) * 10.0) / 10.0, 0.5, 120.0});
  }

  PatternTable patterns{{"1", diurnal_pattern()}};
  Network net(nodes, pipes, patterns);

  // Size diameters from peak-hour flows; a few passes settle the layout.
  const auto pattern = diurnal_pattern();
  const int peak = static_cast<int>(std::max_element(pattern.begin(), pattern.end()) - pattern.begin());
  for (int pass = 0; pass < 4; ++pass) {
    const Conductivity cond = conductivity(net);
    const HeadState h = solve_steady_state(net, cond, net.junction_demands(peak)).h;
    const FlowState q = structural_flows(net, cond, h);
    for (std::size_t k = 0; k < pipes.size(); ++k) {
      pipes[k].diameter = sized_diameter(q(static_cast<Index>(k)), spec.max_velocity);
    }
    net = Network(nodes, pipes, patterns);
  }
  return net;
}

SensorConfig place_sensors(const Network& net, int pressure_junctions, int extra_amr) {
  std::vector<Index> chosen;
  for (Index r = net.junction_count(); r < net.node_count(); ++r) chosen.push_back(r);

  const auto farthest = [&](const std::vector<Index>& sites) {
    const auto dist = hop_distances(net, sites);
    Index best = -1;
    int best_d = 0;
    for (Index j = 0; j < net.junction_count(); ++j) {
      if (dist[static_cast<std::size_t>(j)] > best_d) {
        best_d = dist[static_cast<std::size_t>(j)];
        best = j;
      }
    }
    if (best < 0) throw InputError("place_sensors: more sensors requested than junctions");
    return best;
  };

  for (int i = 0; i < pressure_junctions; ++i) chosen.push_back(farthest(chosen));
  SensorConfig sensors;
  sensors.pressure_nodes = chosen;
  for (int i = 0; i < extra_amr; ++i) chosen.push_back(farthest(chosen));
  sensors.amr_nodes = chosen;
  return sensors;
}

std::vector<Index> remote_junctions(const Network& net, const SensorConfig& sensors, int min_hops) {
  std::set<Index> sites(sensors.pressure_nodes.begin(), sensors.pressure_nodes.end());
  sites.insert(sensors.amr_nodes.begin(), sensors.amr_nodes.end());
  const std::vector<Index> list(sites.begin(), sites.end());
  const auto dist = hop_distances(net, list);
  std::vector<Index> out;
  for (Index j = 0; j < net.junction_count(); ++j) {
    if (dist[static_cast<std::size_t>(j)] >= min_hops) out.push_back(j);
  }
  std::stable_sort(out.begin(), out.end(),
                   [&](Index a, Index b) { return dist[static_cast<std::size_t>(a)] > dist[static_cast<std::size_t>(b)]; });
  return out;
}

}  // namespace hydrostate
