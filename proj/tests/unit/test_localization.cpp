#include "fixtures.hpp"
#include "oracles.hpp"

#include "hydrostate/error.hpp"
#include "hydrostate/localization.hpp"
#include "hydrostate/scenario.hpp"

#include <doctest.h>
#include <json.hpp>

#include <algorithm>
#include <random>
#include <sstream>

using namespace hydrostate;
namespace fx = hydrostate::fixture;

namespace {

std::vector<HeadState> random_heads(Index n, int count, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(30.0, 60.0);
  std::vector<HeadState> out;
  for (int t = 0; t < count; ++t) {
    HeadState h(n);
    for (Index i = 0; i < n; ++i) h(i) = u(rng);
    out.push_back(h);
  }
  return out;
}

}  // namespace

TEST_CASE("identical estimates give no candidates") {
  std::mt19937_64 rng(1);
  const auto h = random_heads(6, 3, rng);
  const LeakScore s = lcsm_score(h, h);
  CHECK(s.metric.cwiseAbs().maxCoeff() == 0.0);
  CHECK(s.candidates.empty());
}

TEST_CASE("a perfectly estimated leak lowers every junction head") {
  const auto f = fx::shipped("desk20");
  for (const char* id : {"J14", "J5", "J19", "J2"}) {
    ScenarioSpec nominal;
    nominal.uncertainty = {0.0, 0.0, 0.0, 0.0};
    nominal.hours = every_other_hour();
    ScenarioSpec leak = nominal;
    leak.leak_node = f.net.node_index(id);
    leak.leak_size = kReferenceLeakSize;
    const TimeSeriesData a = generate(f.net, f.sensors, nominal);
    const TimeSeriesData b = generate(f.net, f.sensors, leak);
    std::vector<HeadState> nom;
    std::vector<HeadState> lk;
    for (std::size_t t = 0; t < a.instants.size(); ++t) {
      nom.push_back(a.instants[t].h_true);
      lk.push_back(b.instants[t].h_true);
    }
    const LeakScore s = lcsm_score(nom, lk);
    const Index nj = f.net.junction_count();
    CHECK(s.metric.head(nj).minCoeff() > 0.0);
    CHECK(s.metric.tail(f.net.node_count() - nj).cwiseAbs().maxCoeff() == 0.0);
    // the leak node itself ranks above the median junction
    const double at_leak = s.metric(*leak.leak_node);
    CHECK((s.metric.head(nj).array() > at_leak).count() < nj / 2);
  }
}

TEST_CASE("a constant offset at one instant cancels") {
  std::mt19937_64 rng(2);
  const auto nom = random_heads(8, 4, rng);
  const auto lk = random_heads(8, 4, rng);
  auto nom2 = nom;
  auto lk2 = lk;
  nom2[1].array() += 3.25;
  lk2[1].array() += 3.25;
  const LeakScore a = lcsm_score(nom, lk);
  const LeakScore b = lcsm_score(nom2, lk2);
  CHECK((a.metric - b.metric).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(a.candidates == b.candidates);
}

TEST_CASE("candidates are positive and sorted") {
  std::mt19937_64 rng(3);
  const auto nom = random_heads(30, 5, rng);
  const auto lk = random_heads(30, 5, rng);
  const LeakScore s = lcsm_score(nom, lk);
  for (std::size_t i = 0; i < s.candidates.size(); ++i) {
    CHECK(s.metric(s.candidates[i]) > 0.0);
    if (i > 0) CHECK(s.metric(s.candidates[i - 1]) >= s.metric(s.candidates[i]));
  }
  CHECK(static_cast<Index>(s.candidates.size()) == (s.metric.array() > 0.0).count());

  SUBCASE("a zero-difference instant rescales without reordering") {
    auto nom2 = nom;
    auto lk2 = lk;
    nom2.push_back(nom.front());
    lk2.push_back(nom.front());
    const LeakScore t = lcsm_score(nom2, lk2);
    CHECK((t.metric - s.metric * (5.0 / 6.0)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(t.candidates == s.candidates);
  }
  SUBCASE("relabelling nodes permutes the metric") {
    std::vector<Index> perm(30);
    for (Index i = 0; i < 30; ++i) perm[static_cast<std::size_t>(i)] = (7 * i) % 30;
    auto pn = nom;
    auto pl = lk;
    for (std::size_t t = 0; t < nom.size(); ++t) {
      for (Index i = 0; i < 30; ++i) {
        pn[t](perm[static_cast<std::size_t>(i)]) = nom[t](i);
        pl[t](perm[static_cast<std::size_t>(i)]) = lk[t](i);
      }
    }
    const LeakScore p = lcsm_score(pn, pl);
    for (Index i = 0; i < 30; ++i) CHECK(p.metric(perm[static_cast<std::size_t>(i)]) == s.metric(i));
  }
}

TEST_CASE("over-ranked count") {
  const Network net = fx::six_node();
  const auto adjacency = net.adjacency();
  const Index leak = net.node_index("J3");
  LeakScore s;
  SUBCASE("leak at the global maximum") {
    s.metric = Vector::LinSpaced(6, 0.1, 0.6);
    s.metric(leak) = 1.0;
    CHECK(over_ranked_count(s, leak, adjacency) == 0);
  }
  SUBCASE("all equal") {
    s.metric = Vector::Constant(6, 0.4);
    CHECK(over_ranked_count(s, leak, adjacency) == 0);
  }
  SUBCASE("three non-neighbours above the leak set") {
    s.metric = Vector::Constant(6, 0.2);
    s.metric(leak) = 0.5;
    s.metric(net.node_index("J2")) = 0.6;  // neighbour
    s.metric(net.node_index("J1")) = 0.9;
    s.metric(net.node_index("J4")) = 0.7;
    s.metric(net.node_index("R1")) = 0.61;
    CHECK(over_ranked_count(s, leak, adjacency) == 3);
    CHECK(oracle::exhaustive_over_ranked(s.metric, leak, adjacency) == 3);
  }
  SUBCASE("bounded by the non-neighbours on random metrics") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const auto f = fx::shipped("desk80");
    const auto adj = f.net.adjacency();
    for (int trial = 0; trial < 50; ++trial) {
      LeakScore r;
      r.metric = Vector(f.net.node_count());
      for (Index i = 0; i < r.metric.size(); ++i) r.metric(i) = u(rng);
      const Index v = trial % f.net.junction_count();
      const Index c = over_ranked_count(r, v, adj);
      CHECK(c == oracle::exhaustive_over_ranked(r.metric, v, adj));
      CHECK(c >= 0);
      CHECK(c <= f.net.node_count() - 1 - static_cast<Index>(adj[static_cast<std::size_t>(v)].size()));
    }
  }
  CHECK_THROWS_AS(over_ranked_count(LeakScore{Vector::Zero(6), {}}, 9, adjacency), InputError);
}

TEST_CASE("ranking and colour map outputs") {
  const Network net = fx::six_node();
  LeakScore s;
  s.metric = Vector(6);
  s.metric << 0.2, -0.1, 0.8, 0.0, 0.4, 0.0;
  s.candidates = {2, 4, 0};
  std::istringstream csv(ranking_csv(s, net));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "node_id,metric,rank");
  std::getline(csv, line);
  CHECK(line.rfind("J3,", 0) == 0);
  CHECK(line.substr(line.rfind(',') + 1) == "1");
  const auto cm = nlohmann::json::parse(colormap_json(s, net));
  CHECK(cm["J3"].get<double>() == doctest::Approx(1.0));
  for (const auto& [id, v] : cm.items()) {
    CHECK(v.get<double>() >= 0.0);
    CHECK(v.get<double>() <= 1.0);
  }
}

TEST_CASE("mismatched estimate lists are rejected") {
  std::mt19937_64 rng(5);
  const auto a = random_heads(4, 2, rng);
  const auto b = random_heads(4, 3, rng);
  CHECK_THROWS_AS(lcsm_score(a, b), InputError);
  CHECK_THROWS_AS(lcsm_score(std::vector<HeadState>{}, std::vector<HeadState>{}), InputError);
}
