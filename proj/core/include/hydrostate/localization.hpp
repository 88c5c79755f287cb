#pragma once

#include "hydrostate/network.hpp"

#include <span>
#include <string>
#include <vector>

namespace hydrostate {

// Leak likelihood per node: the time-averaged head drop between leak-free
// and leak estimates. Candidates are the strictly positive nodes, sorted by
// decreasing metric with ties broken by the lower index.
struct LeakScore {
  Vector metric;
  std::vector<Index> candidates;
};

// Throws InputError when the lists are empty or differ in length or size.
LeakScore lcsm_score(std::span<const HeadState> h_nom_estimates, std::span<const HeadState> h_leak_estimates);

// Nodes scoring strictly above the best of the leak node and its neighbours.
Index over_ranked_count(const LeakScore& score, Index leak_node, const std::vector<std::vector<Index>>& adjacency);

// node_id,metric,rank (rank 1-based over the candidates, 0 elsewhere).
std::string ranking_csv(const LeakScore& score, const Network& net);
// {node_id: metric normalised to [0, 1]} for colouring the network graph.
std::string colormap_json(const LeakScore& score, const Network& net);

}  // namespace hydrostate
