#include "hydrostate/network.hpp"

#include "hydrostate/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>

namespace hydrostate {

Network::Network(std::vector<Node> nodes, std::vector<PipeSpec> pipes,
                 PatternTable patterns, std::string default_pattern)
    : patterns_(std::move(patterns)), default_pattern_(std::move(default_pattern)) {
  std::stable_partition(nodes.begin(), nodes.end(),
                        [](const Node& n) { return n.kind == NodeKind::Junction; });
  nodes_ = std::move(nodes);
  junction_count_ = std::count_if(nodes_.begin(), nodes_.end(),
                                  [](const Node& n) { return n.kind == NodeKind::Junction; });

  for (Index i = 0; i < node_count(); ++i) {
    const auto [it, inserted] = node_lookup_.emplace(node(i).id, i);
    if (!inserted) throw InputError("duplicate node id '" + node(i).id + "'");
  }

  if (default_pattern_.empty()) {
    if (patterns_.contains("1")) {
      default_pattern_ = "1";
    } else if (patterns_.size() == 1) {
      default_pattern_ = patterns_.begin()->first;
    }
  }

  pipes_.reserve(pipes.size());
  for (auto& spec : pipes) {
    const auto from = find_node(spec.from);
    const auto to = find_node(spec.to);
    if (!from) throw InputError("pipe '" + spec.id + "' references unknown node '" + spec.from + "'");
    if (!to) throw InputError("pipe '" + spec.id + "' references unknown node '" + spec.to + "'");
    pipes_.push_back(Pipe{std::move(spec.id), *from, *to, spec.length, spec.diameter, spec.roughness});
    const auto [it, inserted] = pipe_lookup_.emplace(pipes_.back().id, pipe_count() - 1);
    if (!inserted) throw InputError("duplicate pipe id '" + pipes_.back().id + "'");
  }

  validate();
}

void Network::validate() const {
  if (reservoir_count() < 1) throw InputError("network has no reservoir");
  if (node_count() < 2) throw InputError("network needs at least two nodes");

  for (const auto& p : pipes_) {
    if (p.from == p.to) throw InputError("pipe '" + p.id + "' is a self-loop");
    if (!(p.length > 0.0) || !(p.diameter > 0.0) || !(p.roughness > 0.0)) {
      throw InputError("pipe '" + p.id + "' needs positive length, diameter and roughness");
    }
  }
  for (const auto& n : nodes_) {
    if (!std::isfinite(n.elevation) || !std::isfinite(n.head)) {
      throw InputError("node '" + n.id + "' has a non-finite elevation or head");
    }
    for (const auto& d : n.demands) {
      if (!std::isfinite(d.base)) throw InputError("node '" + n.id + "' has a non-finite demand");
      if (!d.pattern.empty() && !patterns_.contains(d.pattern)) {
        throw InputError("node '" + n.id + "' references unknown pattern '" + d.pattern + "'");
      }
    }
  }
  if (!default_pattern_.empty() && !patterns_.contains(default_pattern_)) {
    throw InputError("unknown default pattern '" + default_pattern_ + "'");
  }
  for (const auto& [name, values] : patterns_) {
    if (values.empty()) throw InputError("pattern '" + name + "' is empty");
  }

  const std::vector<Index> start{0};
  const auto hops = hop_distances(*this, start);
  for (Index i = 0; i < node_count(); ++i) {
    if (hops[static_cast<std::size_t>(i)] < 0) {
      throw InputError("network is not connected: node '" + node(i).id + "' is unreachable");
    }
  }
}

std::optional<Index> Network::find_node(std::string_view id) const {
  const auto it = node_lookup_.find(std::string(id));
  if (it == node_lookup_.end()) return std::nullopt;
  return it->second;
}

Index Network::node_index(std::string_view id) const {
  if (const auto i = find_node(id)) return *i;
  throw InputError("unknown node id '" + std::string(id) + "'");
}

std::optional<Index> Network::find_pipe(std::string_view id) const {
  const auto it = pipe_lookup_.find(std::string(id));
  if (it == pipe_lookup_.end()) return std::nullopt;
  return it->second;
}

Vector Network::reservoir_heads() const {
  Vector heads(reservoir_count());
  for (Index r = 0; r < reservoir_count(); ++r) heads(r) = node(junction_count_ + r).head;
  return heads;
}

double Network::pattern_multiplier(const std::string& name, int hour) const {
  const std::string& key = name.empty() ? default_pattern_ : name;
  if (key.empty()) return 1.0;
  const auto& values = patterns_.at(key);
  const auto len = static_cast<int>(values.size());
  return values[static_cast<std::size_t>(((hour % len) + len) % len)];
}

double Network::demand_at(Index i, int hour) const {
  if (is_reservoir(i)) return 0.0;
  double total = 0.0;
  for (const auto& d : node(i).demands) total += d.base * pattern_multiplier(d.pattern, hour);
  return total;
}

Vector Network::junction_demands(int hour) const {
  Vector c(junction_count_);
  for (Index i = 0; i < junction_count_; ++i) c(i) = demand_at(i, hour);
  return c;
}

std::vector<std::vector<Index>> Network::adjacency() const {
  std::vector<std::vector<Index>> adj(nodes_.size());
  for (const auto& p : pipes_) {
    adj[static_cast<std::size_t>(p.from)].push_back(p.to);
    adj[static_cast<std::size_t>(p.to)].push_back(p.from);
  }
  for (auto& row : adj) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }
  return adj;
}

Network Network::with_pipe_parameters(std::span<const double> diameters,
                                      std::span<const double> roughness) const {
  if (static_cast<Index>(diameters.size()) != pipe_count() ||
      static_cast<Index>(roughness.size()) != pipe_count()) {
    throw std::invalid_argument("with_pipe_parameters: size mismatch");
  }
  auto specs = pipe_specs();
  for (std::size_t k = 0; k < specs.size(); ++k) {
    specs[k].diameter = diameters[k];
    specs[k].roughness = roughness[k];
  }
  return Network(nodes_, std::move(specs), patterns_, default_pattern_);
}

std::vector<PipeSpec> Network::pipe_specs() const {
  std::vector<PipeSpec> specs;
  specs.reserve(pipes_.size());
  for (const auto& p : pipes_) {
    specs.push_back({p.id, node(p.from).id, node(p.to).id, p.length, p.diameter, p.roughness});
  }
  return specs;
}

bool Network::operator==(const Network& other) const {
  return nodes_ == other.nodes_ && pipes_ == other.pipes_ && patterns_ == other.patterns_ &&
         default_pattern_ == other.default_pattern_;
}

std::vector<int> hop_distances(const Network& net, std::span<const Index> sources) {
  std::vector<std::vector<Index>> adj(static_cast<std::size_t>(net.node_count()));
  for (const auto& p : net.pipes()) {
    adj[static_cast<std::size_t>(p.from)].push_back(p.to);
    adj[static_cast<std::size_t>(p.to)].push_back(p.from);
  }
  std::vector<int> dist(adj.size(), -1);
  std::deque<Index> queue;
  for (const Index s : sources) {
    if (dist[static_cast<std::size_t>(s)] != 0) {
      dist[static_cast<std::size_t>(s)] = 0;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    const Index u = queue.front();
    queue.pop_front();
    for (const Index v : adj[static_cast<std::size_t>(u)]) {
      auto& d = dist[static_cast<std::size_t>(v)];
      if (d < 0) {
        d = dist[static_cast<std::size_t>(u)] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

void validate_sensors(const Network& net, const SensorConfig& sensors) {
  if (sensors.pressure_nodes.empty()) throw InputError("at least one pressure sensor is required");
  const auto check = [&](const std::vector<Index>& list, const char* what) {
    std::set<Index> seen;
    for (const Index i : list) {
      if (i < 0 || i >= net.node_count()) {
        throw InputError(std::string(what) + " sensor index " + std::to_string(i) + " out of range");
      }
      if (!seen.insert(i).second) {
        throw InputError(std::string("duplicate ") + what + " sensor at node '" + net.node(i).id + "'");
      }
    }
  };
  check(sensors.pressure_nodes, "pressure");
  check(sensors.amr_nodes, "AMR");
}

GraphMatrices graph_matrices_from_weights(const Network& net, std::span<const double> pipe_weights) {
  const Index n = net.node_count();
  if (static_cast<Index>(pipe_weights.size()) != net.pipe_count()) {
    throw std::invalid_argument("graph_matrices_from_weights: one weight per pipe required");
  }
  std::vector<Triplet> triplets;
  triplets.reserve(2 * pipe_weights.size());
  Vector degree = Vector::Zero(n);
  for (Index k = 0; k < net.pipe_count(); ++k) {
    const auto& p = net.pipe(k);
    const double w = pipe_weights[static_cast<std::size_t>(k)];
    triplets.emplace_back(p.from, p.to, w);
    triplets.emplace_back(p.to, p.from, w);
    degree(p.from) += w;
    degree(p.to) += w;
  }
  for (Index i = 0; i < n; ++i) {
    if (!(degree(i) > 0.0)) throw InputError("node '" + net.node(i).id + "' has zero degree");
  }

  GraphMatrices g;
  g.W.resize(n, n);
  g.W.setFromTriplets(triplets.begin(), triplets.end());
  g.D = SparseMatrix(degree.asDiagonal());

  const SparseMatrix laplacian = g.D - g.W;
  const SparseMatrix inv_d2 = SparseMatrix(degree.array().square().inverse().matrix().asDiagonal());
  g.Ld = SparseMatrix(laplacian * inv_d2 * laplacian);
  // the product's summation order leaves rounding asymmetry; average it out
  g.Ld = SparseMatrix(0.5 * (g.Ld + SparseMatrix(g.Ld.transpose())));
  return g;
}

GraphMatrices build_gsi_adjacency(const Network& net) {
  std::vector<double> w(static_cast<std::size_t>(net.pipe_count()));
  for (Index k = 0; k < net.pipe_count(); ++k) w[static_cast<std::size_t>(k)] = 1.0 / net.pipe(k).length;
  return graph_matrices_from_weights(net, w);
}

SparseMatrix build_incidence(const Network& net, const HeadState& h_ref) {
  if (h_ref.size() != net.node_count()) throw std::invalid_argument("build_incidence: head size mismatch");
  std::vector<Triplet> triplets;
  triplets.reserve(2 * static_cast<std::size_t>(net.pipe_count()));
  for (Index k = 0; k < net.pipe_count(); ++k) {
    const auto& p = net.pipe(k);
    Index high = p.from;
    Index low = p.to;
    if (h_ref(p.to) > h_ref(p.from) || (h_ref(p.to) == h_ref(p.from) && p.to < p.from)) {
      std::swap(high, low);
    }
    triplets.emplace_back(k, high, 1.0);
    triplets.emplace_back(k, low, -1.0);
  }
  SparseMatrix m(net.pipe_count(), net.node_count());
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

SparseMatrix build_approx_incidence(const Network& net, const HeadState& h_ref) {
  return SparseMatrix(-build_incidence(net, h_ref));
}

SparseMatrix selection_matrix(Index n, std::span<const Index> rows) {
  std::vector<Triplet> triplets;
  triplets.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] < 0 || rows[r] >= n) throw InputError("selection index out of range");
    triplets.emplace_back(static_cast<Index>(r), rows[r], 1.0);
  }
  SparseMatrix s(static_cast<Index>(rows.size()), n);
  s.setFromTriplets(triplets.begin(), triplets.end());
  return s;
}

SparseMatrix select_columns(const SparseMatrix& m, std::span<const Index> cols) {
  SparseMatrix pick(m.cols(), static_cast<Index>(cols.size()));
  std::vector<Triplet> triplets;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (cols[c] < 0 || cols[c] >= m.cols()) throw InputError("column index out of range");
    triplets.emplace_back(cols[c], static_cast<Index>(c), 1.0);
  }
  pick.setFromTriplets(triplets.begin(), triplets.end());
  return SparseMatrix(m * pick);
}

SelectionMatrices build_selection(const Network& net, const SensorConfig& sensors,
                                  const SparseMatrix& incidence) {
  validate_sensors(net, sensors);
  return {selection_matrix(net.node_count(), sensors.pressure_nodes),
          select_columns(incidence, sensors.amr_nodes)};
}

}  // namespace hydrostate
