#pragma once

#include "cexp/graphs.hpp"

#include <compare>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace cexp {

struct ClusterEntry {
  int term = 0;
  int count = 0;
  auto operator<=>(const ClusterEntry&) const = default;
};

// Multiset of term indices in canonical form: entries sorted by term,
// every count at least one.
class Cluster {
 public:
  Cluster() = default;
  explicit Cluster(std::vector<ClusterEntry> entries);
  static Cluster from_units(std::span<const int> units);

  int size() const { return size_; }
  bool empty() const { return entries_.empty(); }
  std::span<const ClusterEntry> entries() const { return entries_; }
  std::size_t distinct() const { return entries_.size(); }
  int multiplicity(int term) const;
  bool contains(int term) const { return multiplicity(term) > 0; }
  std::vector<int> units() const;
  std::uint64_t factorial() const;  // W! = prod of count!
  double lambda_power(std::span<const double> coefficients) const;

  Cluster with_added(int term, int count = 1) const;
  Cluster with_removed(int term, int count = 1) const;

  auto operator<=>(const Cluster& other) const { return entries_ <=> other.entries_; }
  bool operator==(const Cluster& other) const { return entries_ == other.entries_; }
  std::size_t hash() const;

 private:
  std::vector<ClusterEntry> entries_;
  int size_ = 0;
};

struct ClusterHash {
  std::size_t operator()(const Cluster& c) const { return c.hash(); }
};

// Cluster graph: one vertex per unit, copies of one term are adjacent to each other.
SimpleGraph cluster_graph(const Cluster& w, const InteractionGraph& g);
bool cluster_connected(const Cluster& w, const InteractionGraph& g);
// True when the cluster together with `extra` forms a connected set.
bool cluster_connected_with(const Cluster& w, const InteractionGraph& g, int extra);

// Connected clusters of size m containing `root`, sorted canonically.
std::vector<Cluster> enumerate_connected_clusters(const InteractionGraph& g, int root, int m);
// Same set, counted without materializing it.
std::uint64_t count_connected_clusters(const InteractionGraph& g, int root, int m);
// All connected clusters of size m (deduplicated across roots).
std::vector<Cluster> enumerate_all_connected_clusters(const InteractionGraph& g, int m);

// Clusters W of size m for which W together with vertex `a` is connected;
// obtained from connected clusters of size m+1 containing `a`.
std::vector<Cluster> enumerate_clusters_connected_to(const InteractionGraph& g, int a, int m);

// Connected vertex sets containing `root` with at most `max_size` vertices.
void for_each_connected_set(const InteractionGraph& g, int root, int max_size,
                            const std::function<void(const std::vector<int>&)>& visit);

// ---------------------------------------------------------------------------

struct Partition {
  std::vector<Cluster> parts;  // sorted, identical parts repeated
  SimpleGraph graph;           // parts overlap -> edge

  int size() const { return static_cast<int>(parts.size()); }
  std::uint64_t factorial() const;  // P! over multiplicities of identical parts
};

struct PartitionFactors {
  std::uint64_t w_factorial = 1;
  std::uint64_t p_factorial = 1;
  std::uint64_t parts_factorial_product = 1;
  std::uint64_t n_p = 1;  // W! / (P! prod V!)
};

inline constexpr int kDefaultPartitionCap = 14;

// Distinct partitions of W into connected subclusters.
std::vector<Partition> enumerate_connected_partitions(const Cluster& w, const InteractionGraph& g,
                                                      int size_cap = kDefaultPartitionCap);
// Visits every set partition of the labeled units of W into connected parts.
// Parts are given as unit bitmasks.
void for_each_labeled_partition(const Cluster& w, const InteractionGraph& g,
                                const std::function<void(const std::vector<std::uint32_t>&)>& visit,
                                int size_cap = kDefaultPartitionCap);

PartitionFactors partition_factors(const Cluster& w, const Partition& p);
SimpleGraph partition_graph(const std::vector<Cluster>& parts, const InteractionGraph& g);

}  // namespace cexp
