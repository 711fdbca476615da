#pragma once

#include "cexp/model.hpp"

#include <cstdint>
#include <mutex>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace cexp {

class SimpleGraph {
 public:
  SimpleGraph() = default;
  explicit SimpleGraph(int vertices);
  SimpleGraph(int vertices, const std::vector<std::pair<int, int>>& edges);

  int vertices() const { return n_; }
  std::size_t edge_count() const;
  void add_edge(int u, int v);  // ignores duplicates; self-loops rejected
  bool adjacent(int u, int v) const { return adj_[u][v]; }
  const std::vector<int>& neighbors(int u) const { return nbr_[u]; }
  int degree(int u) const { return static_cast<int>(nbr_[u].size()); }
  int max_degree() const;
  bool connected() const;
  std::vector<std::pair<int, int>> edges() const;

 private:
  int n_ = 0;
  std::vector<std::vector<bool>> adj_;
  std::vector<std::vector<int>> nbr_;
};

// Terms are vertices, overlapping supports are edges.
struct InteractionGraph {
  std::vector<Support> supports;
  SimpleGraph graph;
  int max_degree = 0;
  int effective_degree() const { return max_degree < 1 ? 1 : max_degree; }
  bool overlap(int a, int b) const { return a == b || graph.adjacent(a, b); }
};

InteractionGraph build_interaction_graph(const LocalHamiltonian& h);
InteractionGraph build_interaction_graph(const std::vector<Support>& supports);

// ---------------------------------------------------------------------------
// Tutte evaluations at (1,0) and (1,1) by deletion-contraction with a memo.

inline constexpr int kDefaultTutteVertexCap = 24;

std::uint64_t tutte_T10(const SimpleGraph& g, int vertex_cap = kDefaultTutteVertexCap);
std::uint64_t tutte_T11(const SimpleGraph& g, int vertex_cap = kDefaultTutteVertexCap);

// Number of spanning trees by Kirchhoff's theorem with exact integer arithmetic.
std::uint64_t spanning_tree_count(const SimpleGraph& g);

// Proper colorings using exactly `colors` colors, each at least once.
std::uint64_t exact_coloring_count(const SimpleGraph& g, int colors);

// Thread-safe memo of T(1,0) keyed by a canonical adjacency encoding.
class TutteCache {
 public:
  explicit TutteCache(int vertex_cap = kDefaultTutteVertexCap) : cap_(vertex_cap) {}
  std::uint64_t t10(const SimpleGraph& g);

 private:
  int cap_;
  std::mutex mu_;
  std::unordered_map<std::string, std::uint64_t> memo_;
};

}  // namespace cexp
