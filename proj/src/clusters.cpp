#include "cexp/clusters.hpp"

#include "cexp/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_set>

namespace cexp {

namespace {

std::uint64_t factorial_u64(int k) {
  std::uint64_t f = 1;
  for (int i = 2; i <= k; ++i) {
    if (__builtin_mul_overflow(f, static_cast<std::uint64_t>(i), &f))
      fail(ErrorKind::Overflow, "factorial overflowed 64 bits");
  }
  return f;
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r;
  if (__builtin_mul_overflow(a, b, &r)) fail(ErrorKind::Overflow, "factorial product overflowed 64 bits");
  return r;
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
  return static_cast<std::uint64_t>(r);
}

}  // namespace

Cluster::Cluster(std::vector<ClusterEntry> entries) {
  std::sort(entries.begin(), entries.end());
  for (const auto& e : entries) {
    if (e.count < 0 || e.term < 0) fail(ErrorKind::MalformedSpec, "cluster entries must be nonnegative");
    if (e.count == 0) continue;
    if (!entries_.empty() && entries_.back().term == e.term) entries_.back().count += e.count;
    else entries_.push_back(e);
    size_ += e.count;
  }
}

Cluster Cluster::from_units(std::span<const int> units) {
  std::vector<ClusterEntry> e;
  for (int u : units) e.push_back({u, 1});
  return Cluster(std::move(e));
}

int Cluster::multiplicity(int term) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), ClusterEntry{term, 0},
                             [](const ClusterEntry& a, const ClusterEntry& b) { return a.term < b.term; });
  return (it != entries_.end() && it->term == term) ? it->count : 0;
}

std::vector<int> Cluster::units() const {
  std::vector<int> out;
  out.reserve(size_);
  for (const auto& e : entries_) out.insert(out.end(), e.count, e.term);
  return out;
}

std::uint64_t Cluster::factorial() const {
  std::uint64_t f = 1;
  for (const auto& e : entries_) f = checked_mul(f, factorial_u64(e.count));
  return f;
}

double Cluster::lambda_power(std::span<const double> coefficients) const {
  double p = 1.0;
  for (const auto& e : entries_) p *= std::pow(coefficients[e.term], e.count);
  return p;
}

Cluster Cluster::with_added(int term, int count) const {
  auto e = entries_;
  e.push_back({term, count});
  return Cluster(std::move(e));
}

Cluster Cluster::with_removed(int term, int count) const {
  auto e = entries_;
  for (auto& x : e)
    if (x.term == term) {
      if (x.count < count) fail(ErrorKind::MalformedSpec, "cannot remove more copies than present");
      x.count -= count;
      return Cluster(std::move(e));
    }
  fail(ErrorKind::MalformedSpec, "term not present in cluster");
}

std::size_t Cluster::hash() const {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (const auto& e : entries_) {
    h = (h ^ static_cast<std::size_t>(e.term)) * 0x100000001b3ULL;
    h = (h ^ static_cast<std::size_t>(e.count)) * 0x100000001b3ULL;
  }
  return h;
}

// ---------------------------------------------------------------------------

SimpleGraph cluster_graph(const Cluster& w, const InteractionGraph& g) {
  const auto units = w.units();
  SimpleGraph out(static_cast<int>(units.size()));
  for (std::size_t a = 0; a < units.size(); ++a)
    for (std::size_t b = a + 1; b < units.size(); ++b)
      if (g.overlap(units[a], units[b])) out.add_edge(static_cast<int>(a), static_cast<int>(b));
  return out;
}

namespace {

bool terms_connected(const std::vector<int>& terms, const InteractionGraph& g) {
  if (terms.size() <= 1) return true;
  std::vector<bool> seen(terms.size(), false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  std::size_t count = 1;
  while (!stack.empty()) {
    std::size_t a = stack.back();
    stack.pop_back();
    for (std::size_t b = 0; b < terms.size(); ++b)
      if (!seen[b] && g.overlap(terms[a], terms[b])) { seen[b] = true; ++count; stack.push_back(b); }
  }
  return count == terms.size();
}

}  // namespace

bool cluster_connected(const Cluster& w, const InteractionGraph& g) {
  std::vector<int> terms;
  for (const auto& e : w.entries()) terms.push_back(e.term);
  return terms_connected(terms, g);
}

bool cluster_connected_with(const Cluster& w, const InteractionGraph& g, int extra) {
  std::vector<int> terms{extra};
  for (const auto& e : w.entries())
    if (e.term != extra) terms.push_back(e.term);
  return terms_connected(terms, g);
}

void for_each_connected_set(const InteractionGraph& g, int root, int max_size,
                            const std::function<void(const std::vector<int>&)>& visit) {
  const int n = g.graph.vertices();
  if (root < 0 || root >= n) fail(ErrorKind::MalformedSpec, "root out of range");
  if (max_size < 1) return;
  // Branch on each candidate: include it, or exclude it for the rest of the branch.
  std::vector<char> state(n, 0);  // 0 free, 1 in set, 2 candidate, 3 excluded
  std::vector<int> set{root};
  state[root] = 1;
  auto rec = [&](auto&& self, std::vector<int> candidates) -> void {
    visit(set);
    if (static_cast<int>(set.size()) == max_size) return;
    std::vector<int> excluded_here;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      const int v = candidates[i];
      std::vector<int> next(candidates.begin() + static_cast<std::ptrdiff_t>(i) + 1, candidates.end());
      std::vector<int> added;
      for (int u : g.graph.neighbors(v))
        if (state[u] == 0) { state[u] = 2; added.push_back(u); next.push_back(u); }
      state[v] = 1;
      set.push_back(v);
      self(self, std::move(next));
      set.pop_back();
      for (int u : added) state[u] = 0;
      state[v] = 3;
      excluded_here.push_back(v);
    }
    for (int v : excluded_here) state[v] = 2;
  };
  std::vector<int> start;
  for (int u : g.graph.neighbors(root)) { state[u] = 2; start.push_back(u); }
  rec(rec, start);
}

namespace {

void for_each_composition(int m, int k, const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> parts(k, 1);
  auto rec = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == k - 1) {
      parts[pos] = remaining;
      visit(parts);
      return;
    }
    for (int c = 1; c <= remaining - (k - 1 - pos); ++c) {
      parts[pos] = c;
      self(self, pos + 1, remaining - c);
    }
  };
  if (k >= 1 && m >= k) rec(rec, 0, m);
}

}  // namespace

std::vector<Cluster> enumerate_connected_clusters(const InteractionGraph& g, int root, int m) {
  if (m < 1) fail(ErrorKind::SizeZero, "cluster size must be at least 1");
  std::vector<Cluster> out;
  for_each_connected_set(g, root, m, [&](const std::vector<int>& set) {
    std::vector<int> sorted = set;
    std::sort(sorted.begin(), sorted.end());
    for_each_composition(m, static_cast<int>(sorted.size()), [&](const std::vector<int>& counts) {
      std::vector<ClusterEntry> e;
      for (std::size_t i = 0; i < sorted.size(); ++i) e.push_back({sorted[i], counts[i]});
      out.emplace_back(std::move(e));
    });
  });
  std::sort(out.begin(), out.end());
  return out;
}

std::uint64_t count_connected_clusters(const InteractionGraph& g, int root, int m) {
  if (m < 1) fail(ErrorKind::SizeZero, "cluster size must be at least 1");
  std::uint64_t total = 0;
  for_each_connected_set(g, root, m, [&](const std::vector<int>& set) {
    total += binomial(m - 1, static_cast<int>(set.size()) - 1);
  });
  return total;
}

std::vector<Cluster> enumerate_all_connected_clusters(const InteractionGraph& g, int m) {
  std::unordered_set<Cluster, ClusterHash> seen;
  for (int r = 0; r < g.graph.vertices(); ++r)
    for (auto& c : enumerate_connected_clusters(g, r, m)) seen.insert(std::move(c));
  std::vector<Cluster> out(seen.begin(), seen.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Cluster> enumerate_clusters_connected_to(const InteractionGraph& g, int a, int m) {
  if (m < 1) fail(ErrorKind::SizeZero, "cluster size must be at least 1");
  std::unordered_set<Cluster, ClusterHash> seen;
  for (const auto& c : enumerate_connected_clusters(g, a, m + 1)) seen.insert(c.with_removed(a));
  std::vector<Cluster> out(seen.begin(), seen.end());
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------

std::uint64_t Partition::factorial() const {
  std::uint64_t f = 1;
  std::size_t i = 0;
  while (i < parts.size()) {
    std::size_t j = i;
    while (j < parts.size() && parts[j] == parts[i]) ++j;
    f = checked_mul(f, factorial_u64(static_cast<int>(j - i)));
    i = j;
  }
  return f;
}

SimpleGraph partition_graph(const std::vector<Cluster>& parts, const InteractionGraph& g) {
  SimpleGraph out(static_cast<int>(parts.size()));
  for (std::size_t a = 0; a < parts.size(); ++a)
    for (std::size_t b = a + 1; b < parts.size(); ++b) {
      bool touch = false;
      for (const auto& x : parts[a].entries()) {
        for (const auto& y : parts[b].entries())
          if (g.overlap(x.term, y.term)) { touch = true; break; }
        if (touch) break;
      }
      if (touch) out.add_edge(static_cast<int>(a), static_cast<int>(b));
    }
  return out;
}

void for_each_labeled_partition(const Cluster& w, const InteractionGraph& g,
                                const std::function<void(const std::vector<std::uint32_t>&)>& visit,
                                int size_cap) {
  const int m = w.size();
  if (m < 1) fail(ErrorKind::SizeZero, "cluster is empty");
  if (m > size_cap || m > 30)
    fail(ErrorKind::SizeCap, "partition enumeration capped at m = " + std::to_string(size_cap));
  if (!cluster_connected(w, g)) fail(ErrorKind::DisconnectedCluster, "cluster is not connected");
  const auto units = w.units();
  std::vector<std::uint32_t> adj(m, 0);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      if (a != b && g.overlap(units[a], units[b])) adj[a] |= 1u << b;

  auto connected_mask = [&](std::uint32_t s) {
    std::uint32_t reached = s & (~s + 1);
    std::uint32_t frontier = reached;
    while (frontier) {
      std::uint32_t next = 0;
      for (std::uint32_t f = frontier; f; f &= f - 1) next |= adj[__builtin_ctz(f)];
      next &= s & ~reached;
      reached |= next;
      frontier = next;
    }
    return reached == s;
  };

  // Parts are grown around the smallest remaining label; sweeping every
  // admissible size at each step covers every composition of m.
  std::vector<std::uint32_t> parts;
  auto rec = [&](auto&& self, std::uint32_t remaining) -> void {
    if (remaining == 0) {
      visit(parts);
      return;
    }
    const std::uint32_t anchor = remaining & (~remaining + 1);
    const std::uint32_t rest = remaining & ~anchor;
    for (std::uint32_t sub = rest;; sub = (sub - 1) & rest) {
      const std::uint32_t part = sub | anchor;
      if (connected_mask(part)) {
        parts.push_back(part);
        self(self, remaining & ~part);
        parts.pop_back();
      }
      if (sub == 0) break;
    }
  };
  rec(rec, m == 32 ? 0xffffffffu : ((1u << m) - 1));
}

std::vector<Partition> enumerate_connected_partitions(const Cluster& w, const InteractionGraph& g, int size_cap) {
  const auto units = w.units();
  std::set<std::vector<Cluster>> distinct;
  for_each_labeled_partition(
      w, g,
      [&](const std::vector<std::uint32_t>& masks) {
        std::vector<Cluster> parts;
        parts.reserve(masks.size());
        for (std::uint32_t mask : masks) {
          std::vector<ClusterEntry> e;
          for (std::uint32_t f = mask; f; f &= f - 1) e.push_back({units[__builtin_ctz(f)], 1});
          parts.emplace_back(std::move(e));
        }
        std::sort(parts.begin(), parts.end());
        distinct.insert(std::move(parts));
      },
      size_cap);
  std::vector<Partition> out;
  out.reserve(distinct.size());
  for (const auto& parts : distinct) {
    Partition p;
    p.parts = parts;
    p.graph = partition_graph(parts, g);
    out.push_back(std::move(p));
  }
  return out;
}

PartitionFactors partition_factors(const Cluster& w, const Partition& p) {
  std::map<int, int> total;
  for (const auto& part : p.parts) {
    if (part.empty()) fail(ErrorKind::NotAPartition, "partition contains an empty part");
    for (const auto& e : part.entries()) total[e.term] += e.count;
  }
  std::map<int, int> expected;
  for (const auto& e : w.entries()) expected[e.term] = e.count;
  if (total != expected) fail(ErrorKind::NotAPartition, "parts do not add up to the cluster");
  PartitionFactors f;
  f.w_factorial = w.factorial();
  f.p_factorial = p.factorial();
  for (const auto& part : p.parts) f.parts_factorial_product = checked_mul(f.parts_factorial_product, part.factorial());
  const std::uint64_t denom = checked_mul(f.p_factorial, f.parts_factorial_product);
  if (f.w_factorial % denom != 0) fail(ErrorKind::NotAPartition, "non-integral partition count");
  f.n_p = f.w_factorial / denom;
  return f;
}

}  // namespace cexp
