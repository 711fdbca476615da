#include <doctest.h>

#include "cexp/clusters.hpp"
#include "cexp/error.hpp"
#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <set>

using namespace cexp;

namespace {

// Multisets of size m over [0, k) in lexicographic order.
void multisets(int k, int m, std::vector<int>& cur, int start, const std::function<void()>& visit) {
  if (static_cast<int>(cur.size()) == m) {
    visit();
    return;
  }
  for (int v = start; v < k; ++v) {
    cur.push_back(v);
    multisets(k, m, cur, v, visit);
    cur.pop_back();
  }
}

// Connectivity straight from supports, independent of the cluster graph code.
bool supports_connected(const std::vector<int>& units, const std::vector<Support>& s) {
  std::vector<bool> seen(units.size(), false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  std::size_t count = 1;
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    for (std::size_t v = 0; v < units.size(); ++v)
      if (!seen[v] && supports_overlap(s[units[u]], s[units[v]])) {
        seen[v] = true;
        ++count;
        stack.push_back(v);
      }
  }
  return count == units.size();
}

std::set<Cluster> brute_clusters(const std::vector<Support>& s, int root, int m) {
  std::set<Cluster> out;
  std::vector<int> cur;
  multisets(static_cast<int>(s.size()), m, cur, 0, [&] {
    if (std::find(cur.begin(), cur.end(), root) == cur.end()) return;
    if (supports_connected(cur, s)) out.insert(Cluster::from_units(cur));
  });
  return out;
}

std::vector<Support> bond_supports(const std::vector<std::pair<int, int>>& bonds) {
  std::vector<Support> s;
  for (auto [a, b] : bonds) s.push_back({std::min(a, b), std::max(a, b)});
  return s;
}

}  // namespace

TEST_CASE("single term clusters") {
  const auto g = build_interaction_graph(std::vector<Support>{{0}});
  const auto c = enumerate_connected_clusters(g, 0, 3);
  REQUIRE(c.size() == 1);
  CHECK(c[0] == Cluster({{0, 3}}));
  CHECK(c[0].factorial() == 6);
  CHECK_THROWS_AS(enumerate_connected_clusters(g, 0, 0), Error);
}

TEST_CASE("path clusters exclude non-adjacent pairs") {
  // X = {0,1}, Y = {1,2}, Z = {2,3}
  const auto g = build_interaction_graph(std::vector<Support>{{0, 1}, {1, 2}, {2, 3}});
  const auto c0 = enumerate_connected_clusters(g, 0, 2);
  CHECK(c0 == std::vector<Cluster>{Cluster({{0, 1}, {1, 1}}), Cluster({{0, 2}})});
  CHECK_FALSE(cluster_connected(Cluster({{0, 1}, {2, 1}}), g));
  CHECK(cluster_connected(Cluster({{0, 1}, {1, 1}, {2, 1}}), g));
  CHECK(count_connected_clusters(g, 0, 2) == 2);
}

TEST_CASE("clusters connected to an observable support") {
  // A acts on {0}; X = {0,1} overlaps it, Y = {1,2} does not. Vertex 2 stands in for A.
  const auto g = build_interaction_graph(std::vector<Support>{{0, 1}, {1, 2}, {0}});
  const auto c = enumerate_clusters_connected_to(g, 2, 1);
  CHECK(c == std::vector<Cluster>{Cluster({{0, 1}}), Cluster({{2, 1}})});
}

TEST_CASE("enumeration agrees with brute force") {
  std::vector<std::vector<Support>> graphs = {
      bond_supports(fixtures::chain_bonds(5)),
      bond_supports(fixtures::expander_bonds(6)),
      build_interaction_graph(fixtures::square_lattice(3)).supports,
      {{0}, {1}, {0, 1}, {1, 2}, {2}},
  };
  for (const auto& s : graphs) {
    const auto g = build_interaction_graph(s);
    for (int root = 0; root < static_cast<int>(s.size()); ++root)
      for (int m = 1; m <= 4; ++m) {
        const auto fast = enumerate_connected_clusters(g, root, m);
        const auto brute = brute_clusters(s, root, m);
        CHECK(std::set<Cluster>(fast.begin(), fast.end()) == brute);
        CHECK(fast.size() == brute.size());
        CHECK(count_connected_clusters(g, root, m) == brute.size());
      }
  }
}

TEST_CASE("cluster counts respect (e d)^m") {
  const auto g = build_interaction_graph(fixtures::square_lattice(4));
  const double ed = std::numbers::e * g.effective_degree();
  for (int m = 1; m <= 6; ++m)
    CHECK(static_cast<double>(count_connected_clusters(g, 0, m)) <= std::pow(ed, m));
}

TEST_CASE("partitions of a doubled term") {
  const auto g = build_interaction_graph(std::vector<Support>{{0}});
  const Cluster w({{0, 2}});
  const auto parts = enumerate_connected_partitions(w, g);
  REQUIRE(parts.size() == 2);
  for (const auto& p : parts) CHECK(partition_factors(w, p).n_p == 1);
}

TEST_CASE("partition counts match labeled partitions") {
  const auto s = bond_supports(fixtures::chain_bonds(5));
  const auto g = build_interaction_graph(s);
  for (int m = 1; m <= 5; ++m)
    for (const auto& w : enumerate_connected_clusters(g, 1, m)) {
      std::uint64_t labeled = 0;
      for_each_labeled_partition(w, g, [&](const std::vector<std::uint32_t>&) { ++labeled; });
      std::uint64_t weighted = 0;
      for (const auto& p : enumerate_connected_partitions(w, g)) {
        weighted += partition_factors(w, p).n_p;
        for (const auto& part : p.parts) CHECK(cluster_connected(part, g));
        CHECK(p.graph.connected());
      }
      CHECK(weighted == labeled);
    }
}

TEST_CASE("partition errors") {
  const auto g = build_interaction_graph(std::vector<Support>{{0, 1}, {1, 2}, {2, 3}});
  CHECK_THROWS_AS(enumerate_connected_partitions(Cluster({{0, 1}, {2, 1}}), g), Error);
  CHECK_THROWS_AS(enumerate_connected_partitions(Cluster({{0, 15}}), g), Error);
  Partition bad;
  bad.parts = {Cluster({{0, 1}})};
  CHECK_THROWS_AS(partition_factors(Cluster({{0, 2}}), bad), Error);
}

TEST_CASE("cluster helpers") {
  const Cluster w({{3, 2}, {1, 1}});
  CHECK(w.size() == 3);
  CHECK(w.units() == std::vector<int>{1, 3, 3});
  CHECK(w.with_removed(3) == Cluster({{1, 1}, {3, 1}}));
  CHECK(w.with_added(0) == Cluster({{0, 1}, {1, 1}, {3, 2}}));
  const std::vector<double> lam{0.5, -0.5, 2.0, 0.25};
  CHECK(w.lambda_power(lam) == doctest::Approx(-0.5 * 0.0625));
}
