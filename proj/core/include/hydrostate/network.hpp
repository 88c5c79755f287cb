#pragma once

#include "hydrostate/types.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace hydrostate {

enum class NodeKind { Junction, Reservoir };

// One demand category of a junction. `base` is in m^3/s; an empty pattern
// name means the network default pattern.
struct DemandCategory {
  double base = 0.0;
  std::string pattern;

  bool operator==(const DemandCategory&) const = default;
};

struct Node {
  std::string id;
  NodeKind kind = NodeKind::Junction;
  double elevation = 0.0;  // m
  double head = 0.0;       // m, fixed head; reservoirs only
  std::vector<DemandCategory> demands;

  bool operator==(const Node&) const = default;
};

// Pipe as written in an input file, endpoints referenced by node id.
struct PipeSpec {
  std::string id;
  std::string from;
  std::string to;
  double length = 0.0;     // m
  double diameter = 0.0;   // m
  double roughness = 0.0;  // Hazen-Williams C

  bool operator==(const PipeSpec&) const = default;
};

struct Pipe {
  std::string id;
  Index from = 0;  // structural source, as listed in the input
  Index to = 0;
  double length = 0.0;
  double diameter = 0.0;
  double roughness = 0.0;

  bool operator==(const Pipe&) const = default;
};

using PatternTable = std::map<std::string, std::vector<double>>;

// Immutable water distribution network.
//
// Node order is junctions first, then reservoirs, each group in input order.
// Every matrix in the library is indexed with this order.
class Network {
 public:
  Network(std::vector<Node> nodes, std::vector<PipeSpec> pipes,
          PatternTable patterns = {}, std::string default_pattern = {});

  Index node_count() const { return static_cast<Index>(nodes_.size()); }
  Index pipe_count() const { return static_cast<Index>(pipes_.size()); }
  Index junction_count() const { return junction_count_; }
  Index reservoir_count() const { return node_count() - junction_count_; }

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Pipe>& pipes() const { return pipes_; }
  const Node& node(Index i) const { return nodes_[static_cast<std::size_t>(i)]; }
  const Pipe& pipe(Index k) const { return pipes_[static_cast<std::size_t>(k)]; }
  const PatternTable& patterns() const { return patterns_; }
  const std::string& default_pattern() const { return default_pattern_; }

  bool is_reservoir(Index i) const { return i >= junction_count_; }

  std::optional<Index> find_node(std::string_view id) const;
  // Throws InputError for unknown ids.
  Index node_index(std::string_view id) const;
  std::optional<Index> find_pipe(std::string_view id) const;

  // Fixed heads of the reservoirs, in reservoir order.
  Vector reservoir_heads() const;

  // Pattern multiplier of `name` (empty = default) at `hour`, cyclic.
  double pattern_multiplier(const std::string& name, int hour) const;
  // Junction demand (m^3/s) at `hour`; zero for reservoirs.
  double demand_at(Index node, int hour) const;
  // Demands of all junctions at `hour`, length junction_count().
  Vector junction_demands(int hour) const;

  std::vector<std::vector<Index>> adjacency() const;

  // Same topology with per-pipe diameters and roughness replaced.
  Network with_pipe_parameters(std::span<const double> diameters,
                               std::span<const double> roughness) const;

  std::vector<PipeSpec> pipe_specs() const;

  bool operator==(const Network& other) const;

 private:
  void validate() const;

  std::vector<Node> nodes_;
  std::vector<Pipe> pipes_;
  PatternTable patterns_;
  std::string default_pattern_;
  Index junction_count_ = 0;
  std::unordered_map<std::string, Index> node_lookup_;
  std::unordered_map<std::string, Index> pipe_lookup_;
};

// Hop distance from the nearest of `sources` to every node (BFS).
std::vector<int> hop_distances(const Network& net, std::span<const Index> sources);

struct SensorConfig {
  std::vector<Index> pressure_nodes;
  std::vector<Index> amr_nodes;

  Index pressure_count() const { return static_cast<Index>(pressure_nodes.size()); }
  Index amr_count() const { return static_cast<Index>(amr_nodes.size()); }
  Index measurement_count() const { return pressure_count() + amr_count(); }

  bool operator==(const SensorConfig&) const = default;
};

// Throws InputError on out-of-range or duplicated indices, or no pressure
// sensor.
void validate_sensors(const Network& net, const SensorConfig& sensors);

struct GraphMatrices {
  SparseMatrix W;   // weighted adjacency
  SparseMatrix D;   // diagonal degree
  SparseMatrix Ld;  // (D - W) D^-2 (D - W)
};

// Graph matrices for arbitrary positive per-pipe weights. Parallel pipes
// between one node pair add up.
GraphMatrices graph_matrices_from_weights(const Network& net,
                                          std::span<const double> pipe_weights);

// Inverse-length weights w_ij = 1/length.
GraphMatrices build_gsi_adjacency(const Network& net);

// Edge-node incidence oriented from higher to lower reference head, so that
// (M h_ref)_k >= 0 for every pipe. Ties put +1 on the lower node index.
SparseMatrix build_incidence(const Network& net, const HeadState& h_ref);

// Directionality constraint matrix of the interpolation QP: -M(h_ref).
SparseMatrix build_approx_incidence(const Network& net, const HeadState& h_ref);

// Row-selection matrix with a single 1 per row at `rows[r]`.
SparseMatrix selection_matrix(Index n, std::span<const Index> rows);
// Columns of `m` at `cols`, in the given order.
SparseMatrix select_columns(const SparseMatrix& m, std::span<const Index> cols);

struct SelectionMatrices {
  SparseMatrix S;   // n_s x n
  SparseMatrix Ma;  // |E| x n_ca
};

SelectionMatrices build_selection(const Network& net, const SensorConfig& sensors,
                                  const SparseMatrix& incidence);

}  // namespace hydrostate
