#include "hydrostate/localization.hpp"

#include "hydrostate/error.hpp"
#include "text_util.hpp"

#include <json.hpp>

#include <algorithm>
#include <numeric>
#include <sstream>

namespace hydrostate {

LeakScore lcsm_score(std::span<const HeadState> h_nom_estimates, std::span<const HeadState> h_leak_estimates) {
  if (h_nom_estimates.empty() || h_nom_estimates.size() != h_leak_estimates.size()) {
    throw InputError("lcsm_score: need equally many (>= 1) leak-free and leak estimates");
  }
  const Index n = h_nom_estimates.front().size();
  LeakScore score;
  score.metric = Vector::Zero(n);
  for (std::size_t t = 0; t < h_nom_estimates.size(); ++t) {
    if (h_nom_estimates[t].size() != n || h_leak_estimates[t].size() != n) {
      throw InputError("lcsm_score: estimates differ in size");
    }
    score.metric += h_nom_estimates[t] - h_leak_estimates[t];
  }
  score.metric /= static_cast<double>(h_nom_estimates.size());

  for (Index i = 0; i < n; ++i) {
    if (score.metric(i) > 0.0) score.candidates.push_back(i);
  }
  std::stable_sort(score.candidates.begin(), score.candidates.end(),
                   [&](Index a, Index b) { return score.metric(a) > score.metric(b); });
  return score;
}

Index over_ranked_count(const LeakScore& score, Index leak_node, const std::vector<std::vector<Index>>& adjacency) {
  if (leak_node < 0 || leak_node >= score.metric.size()) throw InputError("over_ranked_count: leak node out of range");
  double best = score.metric(leak_node);
  for (const Index v : adjacency[static_cast<std::size_t>(leak_node)]) best = std::max(best, score.metric(v));
  return static_cast<Index>((score.metric.array() > best).count());
}

std::string ranking_csv(const LeakScore& score, const Network& net) {
  std::vector<Index> rank(static_cast<std::size_t>(score.metric.size()), 0);
  for (std::size_t r = 0; r < score.candidates.size(); ++r) {
    rank[static_cast<std::size_t>(score.candidates[r])] = static_cast<Index>(r) + 1;
  }
  std::vector<Index> order(rank.size());
  std::iota(order.begin(), order.end(), 0);
  // Candidates first in rank order, then the rest in node order.
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    const auto ra = rank[static_cast<std::size_t>(a)];
    const auto rb = rank[static_cast<std::size_t>(b)];
    if ((ra == 0) != (rb == 0)) return ra != 0;
    return ra < rb;
  });
  std::ostringstream out;
  out << "node_id,metric,rank\n";
  for (const Index i : order) {
    out << net.node(i).id << ',' << detail::format_double(score.metric(i)) << ',' << rank[static_cast<std::size_t>(i)]
        << '\n';
  }
  return out.str();
}

std::string colormap_json(const LeakScore& score, const Network& net) {
  const double lo = score.metric.minCoeff();
  const double hi = score.metric.maxCoeff();
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  for (Index i = 0; i < score.metric.size(); ++i) {
    doc[net.node(i).id] = hi > lo ? (score.metric(i) - lo) / (hi - lo) : 0.0;
  }
  return doc.dump(2) + "\n";
}

}  // namespace hydrostate
