#include "cexp/graphs.hpp"

#include "cexp/error.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>

namespace cexp {

SimpleGraph::SimpleGraph(int vertices) : n_(vertices), adj_(vertices, std::vector<bool>(vertices, false)), nbr_(vertices) {
  if (vertices < 0) fail(ErrorKind::MalformedSpec, "negative vertex count");
}

SimpleGraph::SimpleGraph(int vertices, const std::vector<std::pair<int, int>>& edges) : SimpleGraph(vertices) {
  for (auto [u, v] : edges) add_edge(u, v);
}

void SimpleGraph::add_edge(int u, int v) {
  if (u < 0 || v < 0 || u >= n_ || v >= n_) fail(ErrorKind::MalformedSpec, "edge endpoint out of range");
  if (u == v) fail(ErrorKind::MalformedSpec, "self-loops are not allowed in a simple graph");
  if (adj_[u][v]) return;
  adj_[u][v] = adj_[v][u] = true;
  nbr_[u].insert(std::upper_bound(nbr_[u].begin(), nbr_[u].end(), v), v);
  nbr_[v].insert(std::upper_bound(nbr_[v].begin(), nbr_[v].end(), u), u);
}

std::size_t SimpleGraph::edge_count() const {
  std::size_t e = 0;
  for (const auto& nb : nbr_) e += nb.size();
  return e / 2;
}

int SimpleGraph::max_degree() const {
  int d = 0;
  for (const auto& nb : nbr_) d = std::max(d, static_cast<int>(nb.size()));
  return d;
}

bool SimpleGraph::connected() const {
  if (n_ <= 1) return true;
  std::vector<bool> seen(n_, false);
  std::vector<int> stack{0};
  seen[0] = true;
  int count = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int v : nbr_[u])
      if (!seen[v]) { seen[v] = true; ++count; stack.push_back(v); }
  }
  return count == n_;
}

std::vector<std::pair<int, int>> SimpleGraph::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int u = 0; u < n_; ++u)
    for (int v : nbr_[u])
      if (u < v) out.emplace_back(u, v);
  return out;
}

InteractionGraph build_interaction_graph(const LocalHamiltonian& h) {
  return build_interaction_graph(h.supports());
}

InteractionGraph build_interaction_graph(const std::vector<Support>& supports) {
  InteractionGraph ig;
  ig.supports = supports;
  const int n = static_cast<int>(supports.size());
  ig.graph = SimpleGraph(n);
  std::map<int, std::vector<int>> by_site;
  for (int i = 0; i < n; ++i)
    for (int s : supports[i]) by_site[s].push_back(i);
  for (const auto& [site, terms] : by_site)
    for (std::size_t a = 0; a < terms.size(); ++a)
      for (std::size_t b = a + 1; b < terms.size(); ++b) ig.graph.add_edge(terms[a], terms[b]);
  ig.max_degree = ig.graph.max_degree();
  return ig;
}

// ---------------------------------------------------------------------------

namespace {

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r;
  if (__builtin_add_overflow(a, b, &r)) fail(ErrorKind::Overflow, "Tutte evaluation overflowed 64 bits");
  return r;
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r;
  if (__builtin_mul_overflow(a, b, &r)) fail(ErrorKind::Overflow, "Tutte evaluation overflowed 64 bits");
  return r;
}

// Loopless multigraph as a symmetric multiplicity matrix.
struct Multigraph {
  int n = 0;
  std::vector<std::uint32_t> m;
  std::uint32_t& at(int u, int v) { return m[static_cast<std::size_t>(u) * n + v]; }
  std::uint32_t at(int u, int v) const { return m[static_cast<std::size_t>(u) * n + v]; }
};

Multigraph from_simple(const SimpleGraph& g) {
  Multigraph mg;
  mg.n = g.vertices();
  mg.m.assign(static_cast<std::size_t>(mg.n) * mg.n, 0);
  for (auto [u, v] : g.edges()) mg.at(u, v) = mg.at(v, u) = 1;
  return mg;
}

bool connected_without(const Multigraph& g, int cu, int cv) {
  std::vector<bool> seen(g.n, false);
  std::vector<int> stack{0};
  seen[0] = true;
  int count = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int v = 0; v < g.n; ++v) {
      if (seen[v] || g.at(u, v) == 0) continue;
      if ((u == cu && v == cv) || (u == cv && v == cu)) continue;
      seen[v] = true;
      ++count;
      stack.push_back(v);
    }
  }
  return count == g.n;
}

// Exact key of the graph after a degree-refined relabeling. Identical keys
// mean identical labeled multigraphs, so memo hits are always correct.
std::string canonical_key(const Multigraph& g) {
  const int n = g.n;
  std::vector<std::uint64_t> sig(n);
  for (int u = 0; u < n; ++u) {
    std::uint64_t d = 0, k = 0;
    for (int v = 0; v < n; ++v) { d += g.at(u, v); k += g.at(u, v) ? 1 : 0; }
    sig[u] = (d << 20) | k;
  }
  for (int round = 0; round < 2; ++round) {
    std::vector<std::uint64_t> next(n);
    for (int u = 0; u < n; ++u) {
      std::vector<std::uint64_t> nb;
      for (int v = 0; v < n; ++v)
        if (g.at(u, v)) nb.push_back(sig[v] * 1315423911ULL + g.at(u, v));
      std::sort(nb.begin(), nb.end());
      std::uint64_t h = sig[u] * 0x9E3779B97F4A7C15ULL;
      for (auto x : nb) h = (h ^ x) * 0x100000001B3ULL;
      next[u] = h;
    }
    sig = std::move(next);
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return sig[a] < sig[b]; });
  std::string key;
  key.reserve(2 + static_cast<std::size_t>(n) * n);
  key.push_back(static_cast<char>(n));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      std::uint32_t c = g.at(order[i], order[j]);
      if (c < 255) {
        key.push_back(static_cast<char>(c));
      } else {
        key.push_back(static_cast<char>(255));
        key.append(reinterpret_cast<const char*>(&c), sizeof c);
      }
    }
  return key;
}

Multigraph contract(const Multigraph& g, int u, int v) {
  Multigraph out;
  out.n = g.n - 1;
  out.m.assign(static_cast<std::size_t>(out.n) * out.n, 0);
  auto map = [&](int w) { return w < v ? w : w - 1; };
  for (int a = 0; a < g.n; ++a) {
    if (a == v) continue;
    for (int b = 0; b < g.n; ++b) {
      if (b == v || a == b) continue;
      out.at(map(a), map(b)) = g.at(a, b);
    }
  }
  const int mu = map(u);
  for (int w = 0; w < g.n; ++w) {
    if (w == u || w == v) continue;
    out.at(mu, map(w)) += g.at(v, w);
    out.at(map(w), mu) = out.at(mu, map(w));
  }
  return out;
}

std::uint64_t tutte_rec(const Multigraph& g, bool y_is_one, std::unordered_map<std::string, std::uint64_t>& memo) {
  if (g.n <= 1) return 1;
  const std::string key = canonical_key(g);
  if (auto it = memo.find(key); it != memo.end()) return it->second;

  // Expand on a parallel class at a vertex of least degree.
  int u = -1, best = std::numeric_limits<int>::max();
  for (int a = 0; a < g.n; ++a) {
    int k = 0;
    for (int b = 0; b < g.n; ++b) k += g.at(a, b) ? 1 : 0;
    if (k < best) { best = k; u = a; }
  }
  int v = -1;
  for (int b = 0; b < g.n; ++b)
    if (g.at(u, b)) { v = b; break; }
  const std::uint64_t c = g.at(u, v);
  const std::uint64_t weight = y_is_one ? c : 1;

  std::uint64_t result;
  const Multigraph contracted = contract(g, u, v);
  if (!connected_without(g, u, v)) {
    result = checked_mul(weight, tutte_rec(contracted, y_is_one, memo));
  } else {
    Multigraph deleted = g;
    deleted.at(u, v) = deleted.at(v, u) = 0;
    result = checked_add(tutte_rec(deleted, y_is_one, memo),
                         checked_mul(weight, tutte_rec(contracted, y_is_one, memo)));
  }
  memo.emplace(key, result);
  return result;
}

void check_tutte_input(const SimpleGraph& g, int cap) {
  if (g.vertices() > cap)
    fail(ErrorKind::GraphTooLarge, "graph has " + std::to_string(g.vertices()) + " vertices, cap is " + std::to_string(cap));
  if (!g.connected()) fail(ErrorKind::DisconnectedInput, "Tutte evaluation requires a connected graph");
}

}  // namespace

std::uint64_t tutte_T10(const SimpleGraph& g, int vertex_cap) {
  check_tutte_input(g, vertex_cap);
  std::unordered_map<std::string, std::uint64_t> memo;
  return tutte_rec(from_simple(g), false, memo);
}

std::uint64_t tutte_T11(const SimpleGraph& g, int vertex_cap) {
  check_tutte_input(g, vertex_cap);
  std::unordered_map<std::string, std::uint64_t> memo;
  return tutte_rec(from_simple(g), true, memo);
}

std::uint64_t TutteCache::t10(const SimpleGraph& g) {
  check_tutte_input(g, cap_);
  const Multigraph mg = from_simple(g);
  const std::string key = canonical_key(mg);
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  }
  std::unordered_map<std::string, std::uint64_t> local;
  const std::uint64_t value = tutte_rec(mg, false, local);
  std::lock_guard<std::mutex> lock(mu_);
  memo_.emplace(key, value);
  return value;
}

std::uint64_t spanning_tree_count(const SimpleGraph& g) {
  using boost::multiprecision::cpp_int;
  const int n = g.vertices();
  if (n <= 1) return 1;
  const int k = n - 1;
  std::vector<std::vector<cpp_int>> a(k, std::vector<cpp_int>(k, 0));
  for (int i = 0; i < k; ++i) {
    a[i][i] = g.degree(i);
    for (int j : g.neighbors(i))
      if (j < k) a[i][j] = -1;
  }
  // Fraction-free Gaussian elimination.
  cpp_int prev = 1;
  int sign = 1;
  for (int p = 0; p < k; ++p) {
    if (a[p][p] == 0) {
      int r = p + 1;
      while (r < k && a[r][p] == 0) ++r;
      if (r == k) return 0;
      std::swap(a[p], a[r]);
      sign = -sign;
    }
    for (int i = p + 1; i < k; ++i) {
      for (int j = p + 1; j < k; ++j) a[i][j] = (a[i][j] * a[p][p] - a[i][p] * a[p][j]) / prev;
      a[i][p] = 0;
    }
    prev = a[p][p];
  }
  cpp_int det = a[k - 1][k - 1] * sign;
  if (det < 0 || det > cpp_int(std::numeric_limits<std::uint64_t>::max()))
    fail(ErrorKind::Overflow, "spanning tree count does not fit in 64 bits");
  return static_cast<std::uint64_t>(det);
}

std::uint64_t exact_coloring_count(const SimpleGraph& g, int colors) {
  const int n = g.vertices();
  if (n > 8) fail(ErrorKind::GraphTooLarge, "exact coloring count is limited to 8 vertices");
  if (colors < 0 || colors > n) return colors == 0 && n == 0 ? 1 : 0;
  // Count partitions into `colors` nonempty independent sets, then label them.
  std::vector<int> color(n, -1);
  std::uint64_t partitions = 0;
  auto rec = [&](auto&& self, int v, int used) -> void {
    if (n - v < colors - used) return;
    if (v == n) {
      if (used == colors) ++partitions;
      return;
    }
    for (int c = 0; c <= used && c < colors; ++c) {
      bool ok = true;
      for (int w : g.neighbors(v))
        if (w < v && color[w] == c) { ok = false; break; }
      if (!ok) continue;
      color[v] = c;
      self(self, v + 1, c == used ? used + 1 : used);
    }
    color[v] = -1;
  };
  rec(rec, 0, 0);
  std::uint64_t factorial = 1;
  for (int c = 2; c <= colors; ++c) factorial *= static_cast<std::uint64_t>(c);
  return partitions * factorial;
}

}  // namespace cexp
