#include "cexp/obs_dynamics.hpp"

#include "cexp/bounds.hpp"
#include "cexp/error.hpp"
#include "cexp/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

namespace cexp {

namespace {

constexpr Complex kI{0.0, 1.0};

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double factorial(int m) {
  double f = 1.0;
  for (int i = 2; i <= m; ++i) f *= i;
  return f;
}

// Everything needed to evaluate one cluster, laid out on U = supp(A) u supp(W).
struct ObsCluster {
  Support u;
  std::vector<Support> supports;
  std::vector<Matrix> h;
  std::vector<Embedding> emb;
  std::vector<double> weight;
  std::vector<int> mu;
  Support a_support;
  Matrix a;
  Matrix psi;
};

ObsCluster make_obs_cluster(const Cluster& w, const LocalHamiltonian& ham, const Observable& a,
                            const ProductState& rho, bool use_lambda) {
  ObsCluster c;
  c.u = a.support;
  for (const auto& e : w.entries()) {
    if (e.term < 0 || e.term >= static_cast<int>(ham.size()))
      fail(ErrorKind::MalformedSpec, "cluster refers to an unknown term");
    c.u = support_union(c.u, ham.term(e.term).support);
  }
  const int d = ham.local_dim();
  for (const auto& e : w.entries()) {
    const Term& t = ham.term(e.term);
    c.supports.push_back(t.support);
    c.h.push_back(t.matrix);
    c.emb.emplace_back(c.u, t.support, d);
    c.weight.push_back(use_lambda ? t.coefficient : 1.0);
    c.mu.push_back(e.count);
  }
  c.a_support = a.support;
  c.a = Embedding(c.u, a.support, d).embed(a.matrix);
  c.psi = rho.factor(c.u);
  return c;
}

Complex traced(const Matrix& op, const Matrix& psi) { return (psi.adjoint() * op * psi).trace(); }

void add_commutator(const ObsCluster& c, std::size_t j, const Matrix& x, Complex scale, Matrix& out) {
  c.emb[j].add_left(c.h[j], x, scale, out);
  c.emb[j].add_right(c.h[j], x, -scale, out);
}

// connected[mask]: the distinct terms in mask together with supp(A) form a connected set.
std::vector<char> connected_to_a(const ObsCluster& c) {
  const std::size_t k = c.mu.size();
  if (k > 20) fail(ErrorKind::SizeCap, "too many distinct terms in one cluster");
  std::vector<char> ok(std::size_t{1} << k, 0);
  ok[0] = 1;
  for (std::size_t mask = 1; mask < ok.size(); ++mask) {
    for (std::size_t j = 0; j < k && !ok[mask]; ++j) {
      if (!(mask >> j & 1)) continue;
      const std::size_t rest = mask & ~(std::size_t{1} << j);
      if (!ok[rest]) continue;
      bool touches = supports_overlap(c.supports[j], c.a_support);
      for (std::size_t i = 0; i < k && !touches; ++i)
        if ((rest >> i & 1) && supports_overlap(c.supports[j], c.supports[i])) touches = true;
      if (touches) ok[mask] = 1;
    }
  }
  return ok;
}

// tr(F(W) rho) with F(U) = (scale/|U|) sum_j w_j [h_j, F(U - e_j)], F(0) = A.
// Only sub-multisets connected to supp(A) are nonzero.
Complex word_recursion(const ObsCluster& c, Complex scale) {
  const std::size_t k = c.mu.size();
  const auto ok = connected_to_a(c);
  std::vector<std::size_t> stride(k);
  std::size_t total = 1;
  int m = 0;
  for (std::size_t j = 0; j < k; ++j) {
    stride[j] = total;
    total *= static_cast<std::size_t>(c.mu[j] + 1);
    m += c.mu[j];
  }
  std::unordered_map<std::size_t, Matrix> prev, cur;
  prev.emplace(0, c.a);
  const Eigen::Index dim = c.a.rows();
  std::vector<int> state(k, 0);
  for (int s = 1; s <= m; ++s) {
    cur.clear();
    auto gen = [&](auto&& self, std::size_t j, int remaining, std::size_t index, std::size_t mask) -> void {
      if (j == k) {
        if (remaining != 0 || !ok[mask]) return;
        Matrix f = Matrix::Zero(dim, dim);
        bool any = false;
        for (std::size_t i = 0; i < k; ++i) {
          if (state[i] == 0) continue;
          auto it = prev.find(index - stride[i]);
          if (it == prev.end()) continue;
          add_commutator(c, i, it->second, c.weight[i], f);
          any = true;
        }
        if (any) {
          f *= scale / static_cast<double>(s);
          cur.emplace(index, std::move(f));
        }
        return;
      }
      const int hi = std::min(c.mu[j], remaining);
      for (int v = 0; v <= hi; ++v) {
        state[j] = v;
        self(self, j + 1, remaining - v, index + static_cast<std::size_t>(v) * stride[j],
             v > 0 ? (mask | (std::size_t{1} << j)) : mask);
      }
      state[j] = 0;
    };
    gen(gen, 0, s, 0, 0);
    std::swap(prev, cur);
    if (prev.empty()) return 0.0;
  }
  auto it = prev.find(total - 1);
  return it == prev.end() ? Complex(0.0) : traced(it->second, c.psi);
}

// sum over all m! orderings of labeled units of tr(nested commutator rho).
Complex naive_sum(const ObsCluster& c) {
  std::vector<int> units;
  for (std::size_t j = 0; j < c.mu.size(); ++j) units.insert(units.end(), c.mu[j], static_cast<int>(j));
  const int m = static_cast<int>(units.size());
  if (m > kNaivePermutationCap) fail(ErrorKind::SizeCap, "naive permutation sum is limited to m <= 7");
  std::vector<int> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  const Eigen::Index dim = c.a.rows();
  Complex sum = 0.0;
  do {
    Matrix x = c.a;
    for (int i = m - 1; i >= 0; --i) {
      Matrix y = Matrix::Zero(dim, dim);
      add_commutator(c, static_cast<std::size_t>(units[perm[i]]), x, c.weight[units[perm[i]]], y);
      x = std::move(y);
    }
    sum += traced(x, c.psi);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return sum;
}

// Same sum through subset power sums:
// sum_sigma nested = sum_{I' , J' disjoint} sum_l (-1)^{|I'|+|J'|+l} C(m,l)
//                    C(m-|I'|-|J'|, l-|I'|) h_{I'}^l A h_{J'}^{m-l}.
Complex inclusion_exclusion_sum(const ObsCluster& c) {
  std::vector<int> units;
  for (std::size_t j = 0; j < c.mu.size(); ++j) units.insert(units.end(), c.mu[j], static_cast<int>(j));
  const int m = static_cast<int>(units.size());
  if (m > 12) fail(ErrorKind::SizeCap, "inclusion-exclusion path is limited to m <= 12");
  const Eigen::Index dim = c.a.rows();
  const Matrix rho = c.psi * c.psi.adjoint();
  std::vector<Matrix> embedded(m);
  for (int i = 0; i < m; ++i) embedded[i] = c.weight[units[i]] * c.emb[units[i]].embed(c.h[units[i]]);
  const std::size_t subsets = std::size_t{1} << m;
  std::vector<std::vector<Matrix>> left(subsets), right(subsets);
  for (std::size_t s = 0; s < subsets; ++s) {
    left[s].resize(m + 1);
    right[s].resize(m + 1);
    if (s == 0) {
      left[0][0] = c.a;
      right[0][0] = rho;
      for (int p = 1; p <= m; ++p) left[0][p] = right[0][p] = Matrix::Zero(dim, dim);
      continue;
    }
    Matrix hs = Matrix::Zero(dim, dim);
    for (int i = 0; i < m; ++i)
      if (s >> i & 1) hs += embedded[i];
    Eigen::SelfAdjointEigenSolver<Matrix> es(hs);
    const Matrix& v = es.eigenvectors();
    const Matrix va = v.adjoint() * c.a;
    const Matrix vr = v.adjoint() * rho;
    for (int p = 0; p <= m; ++p) {
      Eigen::VectorXd e = es.eigenvalues().array().pow(static_cast<double>(p));
      if (p == 0) e.setOnes();
      left[s][p] = v * (e.asDiagonal() * va);
      right[s][p] = v * (e.asDiagonal() * vr);
    }
  }
  Complex sum = 0.0;
  const std::size_t full = subsets - 1;
  for (std::size_t ip = 0; ip < subsets; ++ip) {
    const int ni = __builtin_popcountll(ip);
    const std::size_t comp = full & ~ip;
    for (std::size_t jp = comp;; jp = (jp - 1) & comp) {
      const int nj = __builtin_popcountll(jp);
      const int free = m - ni - nj;
      for (int l = ni; l <= m - nj; ++l) {
        const double coef = ((ni + nj + l) % 2 ? -1.0 : 1.0) * binom(m, l) * binom(free, l - ni);
        if (coef == 0.0) continue;
        sum += coef * left[ip][l].cwiseProduct(right[jp][m - l].transpose()).sum();
      }
      if (jp == 0) break;
    }
  }
  return sum;
}

bool connected_with_a(const Cluster& w, const LocalHamiltonian& ham, const Observable& a) {
  std::vector<Support> sup{a.support};
  for (const auto& e : w.entries()) sup.push_back(ham.term(e.term).support);
  const auto ig = build_interaction_graph(sup);
  return ig.graph.connected();
}

// lambda^W tr(F(W) rho) for every cluster through the split e^{iHt} A e^{-iHt}:
// the lambda^W coefficient is sum_{U+V=W} psi(U)^dagger A psi(V) with
// psi(V) = [lambda^V] e^{-iHt} Psi, psi(V) = (-it/|V|) sum_j lambda_j h_j psi(V - e_j).
// The psi are shared by all clusters. Returns false when they do not fit the budget.
bool shared_state_values(const LocalHamiltonian& h, const Observable& a, const ProductState& rho, double t,
                         const std::vector<const Cluster*>& clusters, int max_order, const ExpansionOptions& opts,
                         std::vector<Complex>& out) {
  const int n = h.sites();
  const int d = h.local_dim();
  Support all(n);
  std::iota(all.begin(), all.end(), 0);
  const double dim = std::pow(static_cast<double>(d), n);
  if (dim > static_cast<double>(opts.shared_state_budget)) return false;
  const Matrix psi0 = rho.factor(all);
  const double bytes_each = static_cast<double>(psi0.size()) * sizeof(Complex);

  // Every sub-multiset of every cluster, level by level from the top.
  std::vector<std::vector<Cluster>> level(max_order + 1);
  {
    std::vector<std::unordered_set<Cluster, ClusterHash>> seen(max_order + 1);
    std::size_t stored = 0;
    for (const Cluster* w : clusters)
      if (seen[w->size()].insert(*w).second) ++stored;
    for (int s = max_order; s >= 1; --s) {
      for (const Cluster& u : seen[s])
        for (const auto& e : u.entries())
          if (seen[s - 1].insert(u.with_removed(e.term)).second) ++stored;
      if (static_cast<double>(stored) * bytes_each > static_cast<double>(opts.shared_state_budget)) return false;
    }
    if (seen[0].empty()) seen[0].insert(Cluster());
    for (int s = 0; s <= max_order; ++s) {
      level[s].assign(seen[s].begin(), seen[s].end());
      std::sort(level[s].begin(), level[s].end());
    }
  }
  std::vector<std::unordered_map<Cluster, std::size_t, ClusterHash>> index(max_order + 1);
  for (int s = 0; s <= max_order; ++s)
    for (std::size_t i = 0; i < level[s].size(); ++i) index[s].emplace(level[s][i], i);
  // child[s][i]: (term, index in level s-1) of level[s][i] with one copy of term removed
  std::vector<std::vector<std::vector<std::pair<int, std::size_t>>>> child(max_order + 1);
  for (int s = 1; s <= max_order; ++s) {
    child[s].resize(level[s].size());
    parallel_for(level[s].size(), opts.workers, [&](std::size_t i) {
      for (const auto& e : level[s][i].entries())
        child[s][i].emplace_back(e.term, index[s - 1].at(level[s][i].with_removed(e.term)));
    });
  }
  auto child_of = [&](int s, std::size_t i, int term) {
    for (const auto& [x, j] : child[s][i])
      if (x == term) return j;
    return std::size_t{0};
  };

  std::vector<Embedding> emb;
  for (const Term& term : h.terms()) emb.emplace_back(all, term.support, d);
  const Embedding a_emb(all, a.support, d);
  std::vector<std::vector<Matrix>> psi(max_order + 1), a_psi(max_order + 1);
  for (int s = 0; s <= max_order; ++s) {
    psi[s].resize(level[s].size());
    a_psi[s].resize(level[s].size());
    const Complex scale = -kI * t / static_cast<double>(std::max(s, 1));
    parallel_for(level[s].size(), opts.workers, [&](std::size_t i) {
      Matrix acc;
      if (s == 0) {
        acc = psi0;
      } else {
        acc = Matrix::Zero(psi0.rows(), psi0.cols());
        for (const auto& [x, j] : child[s][i]) {
          const Term& term = h.term(x);
          emb[x].add_left(term.matrix, psi[s - 1][j], scale * term.coefficient, acc);
        }
      }
      Matrix ax = Matrix::Zero(psi0.rows(), psi0.cols());
      a_emb.add_left(a.matrix, acc, 1.0, ax);
      psi[s][i] = std::move(acc);
      a_psi[s][i] = std::move(ax);
    });
  }

  parallel_for(clusters.size(), opts.workers, [&](std::size_t c) {
    const Cluster& w = *clusters[c];
    const auto entries = w.entries();
    const std::size_t k = entries.size();
    std::vector<std::size_t> stride(k);
    std::size_t full = 0, total_size = 1;
    for (std::size_t j = 0; j < k; ++j) {
      stride[j] = total_size;
      full += static_cast<std::size_t>(entries[j].count) * total_size;
      total_size *= static_cast<std::size_t>(entries[j].count + 1);
    }
    // table[f]: index of the sub-multiset with mixed-radix counts f, size[f] its size
    std::vector<std::size_t> table(total_size);
    std::vector<int> size(total_size);
    std::vector<int> r(k);
    for (std::size_t j = 0; j < k; ++j) r[j] = entries[j].count;
    table[full] = index[w.size()].at(w);
    size[full] = w.size();
    for (std::size_t f = full; f-- > 0;) {
      // decrement the mixed-radix counter r to represent f
      std::size_t j = 0;
      while (r[j] == 0) {
        r[j] = entries[j].count;
        ++j;
      }
      --r[j];
      std::size_t q = 0;
      while (r[q] == entries[q].count) ++q;
      const std::size_t parent = f + stride[q];
      size[f] = size[parent] - 1;
      table[f] = child_of(size[parent], table[parent], entries[q].term);
    }
    Complex total = 0.0;
    for (std::size_t f = 0; f < total_size; ++f) {
      const std::size_t g = full - f;
      total += psi[size[g]][table[g]].conjugate().cwiseProduct(a_psi[size[f]][table[f]]).sum();
    }
    out[c] = total;
  });
  return true;
}

}  // namespace

Complex cluster_derivative_observable(const Cluster& w, const LocalHamiltonian& h, const Observable& a,
                                      const ProductState& rho, Complex t, CommutatorPath path) {
  if (w.empty()) fail(ErrorKind::SizeZero, "cluster is empty");
  const int m = w.size();
  if (path != CommutatorPath::Naive && !connected_with_a(w, h, a)) return 0.0;
  const ObsCluster c = make_obs_cluster(w, h, a, rho, false);
  const Complex it = kI * t;
  switch (path) {
    case CommutatorPath::WordRecursion:
      return static_cast<double>(w.factorial()) * word_recursion(c, it);
    case CommutatorPath::InclusionExclusion:
      return std::pow(it, m) / factorial(m) * inclusion_exclusion_sum(c);
    case CommutatorPath::Naive:
      return std::pow(it, m) / factorial(m) * naive_sum(c);
  }
  return 0.0;
}

ObservableGraph observable_graph(const LocalHamiltonian& h, const Observable& a) {
  ObservableGraph og;
  auto supports = h.supports();
  auto it = std::find(supports.begin(), supports.end(), a.support);
  if (it != supports.end()) {
    og.root = static_cast<int>(it - supports.begin());
  } else {
    og.root = static_cast<int>(supports.size());
    og.phantom = true;
    supports.push_back(a.support);
  }
  og.graph = build_interaction_graph(supports);
  return og;
}

std::vector<Complex> observable_order_totals(const LocalHamiltonian& h, const Observable& a, const ProductState& rho,
                                             Complex t, int max_order, const ExpansionOptions& opts,
                                             std::vector<std::size_t>* counts) {
  if (max_order < 0) fail(ErrorKind::MalformedSpec, "order must be nonnegative");
  if (max_order > opts.max_order)
    fail(ErrorKind::SizeCap, "order " + std::to_string(max_order) + " exceeds the cluster cap " +
                                 std::to_string(opts.max_order));
  if (rho.sites() != h.sites()) fail(ErrorKind::DimensionMismatch, "state and Hamiltonian sizes differ");
  const ObservableGraph og = observable_graph(h, a);
  const int real_terms = static_cast<int>(h.size());

  struct Task {
    int order;
    Cluster w;
  };
  std::vector<Task> tasks;
  std::vector<std::size_t> per_order(max_order + 1, 0);
  per_order[0] = 1;
  for (int m = 1; m <= max_order; ++m) {
    for (auto& w : enumerate_clusters_connected_to(og.graph, og.root, m)) {
      if (og.phantom && w.contains(real_terms)) continue;
      tasks.push_back({m, std::move(w)});
      ++per_order[m];
    }
  }
  std::vector<Complex> values(tasks.size());
  std::vector<const Cluster*> clusters;
  for (const auto& task : tasks) clusters.push_back(&task.w);
  if (t.imag() != 0.0 || !shared_state_values(h, a, rho, t.real(), clusters, max_order, opts, values)) {
    const Complex it = kI * t;
    parallel_for(tasks.size(), opts.workers, [&](std::size_t i) {
      values[i] = word_recursion(make_obs_cluster(tasks[i].w, h, a, rho, true), it);
    });
  }
  std::vector<KahanSum> sums(max_order + 1);
  sums[0].add(rho.expectation(a.support, a.matrix));
  for (std::size_t i = 0; i < tasks.size(); ++i) sums[tasks[i].order].add(values[i]);
  std::vector<Complex> totals(max_order + 1);
  for (int m = 0; m <= max_order; ++m) totals[m] = sums[m].value();
  if (counts) *counts = per_order;
  return totals;
}

std::vector<Complex> observable_order_totals_lightcone(const LocalHamiltonian& h, const Observable& a,
                                                       const ProductState& rho, Complex t, int max_order,
                                                       const ExpansionOptions& opts) {
  const int d = h.local_dim();
  Support supp = a.support;
  Matrix b = a.matrix;
  Matrix psi = rho.factor(supp);
  std::vector<Complex> totals(max_order + 1);
  totals[0] = traced(b, psi);
  std::vector<int> active;
  std::vector<Embedding> emb;
  Support emb_support;
  const Complex it = kI * t;
  for (int l = 1; l <= max_order; ++l) {
    std::vector<int> now;
    Support grown = supp;
    for (std::size_t x = 0; x < h.size(); ++x) {
      const Term& term = h.term(x);
      if (term.coefficient == 0.0 || !supports_overlap(term.support, supp)) continue;
      now.push_back(static_cast<int>(x));
      grown = support_union(grown, term.support);
    }
    if (support_dimension(grown, d) > opts.dense_dim_cap)
      fail(ErrorKind::SizeCap, "light-cone support exceeds the dense dimension cap");
    if (grown != supp) {
      b = Embedding(grown, supp, d).embed(b);
      supp = grown;
      psi = rho.factor(supp);
    }
    if (now != active || emb_support != supp) {
      active = now;
      emb.clear();
      for (int x : active) emb.emplace_back(supp, h.term(x).support, d);
      emb_support = supp;
    }
    Matrix next = Matrix::Zero(b.rows(), b.cols());
    for (std::size_t k = 0; k < active.size(); ++k) {
      const Term& term = h.term(active[k]);
      emb[k].add_left(term.matrix, b, term.coefficient, next);
      emb[k].add_right(term.matrix, b, -term.coefficient, next);
    }
    b = next * (it / static_cast<double>(l));
    totals[l] = traced(b, psi);
  }
  return totals;
}

Estimate expand_observable(const LocalHamiltonian& h, const Observable& a, const ProductState& rho, double t,
                           int max_order, const ExpansionOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  const ObservableGraph og = observable_graph(h, a);
  const Thresholds th = thresholds(og.graph.max_degree);
  Estimate est;
  est.order = max_order;
  est.degree = th.degree;
  est.effective_degree = th.effective_degree;
  est.threshold = th.t_star;
  est.ratio = std::abs(t) / th.t_star;
  est.within_radius = est.ratio < 1.0;
  est.order_contributions = observable_order_totals(h, a, rho, t, max_order, opts, &est.clusters_per_order);
  KahanSum total;
  for (const auto& x : est.order_contributions) total.add(x);
  est.value = total.value();
  est.truncation_bound = est.within_radius ? obs_truncation_bound(t, max_order, th.effective_degree, a.norm())
                                           : std::numeric_limits<double>::infinity();
  est.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return est;
}

int observable_order_for_epsilon(double t, double t_star, int effective_degree, double a_norm, double epsilon) {
  if (!(epsilon > 0.0)) fail(ErrorKind::EpsilonNonpositive, "epsilon must be positive");
  const double r = std::abs(t) / t_star;
  if (r >= 1.0) fail(ErrorKind::OutsideRadius, "|t| is not below t*");
  for (int m = 0; m <= 100000; ++m)
    if (obs_truncation_bound(t, m, effective_degree, a_norm) <= epsilon) return m;
  fail(ErrorKind::SizeCap, "no order below 100000 reaches the requested epsilon");
}

// ---------------------------------------------------------------------------

std::vector<double> strip_map_coefficients(double r_prime, int order) {
  const double q = 1.0 / r_prime;
  const double big_l = -std::log1p(-q);
  std::vector<double> phi(order + 1, 0.0);
  double qp = 1.0;
  for (int l = 1; l <= order; ++l) {
    qp *= q;
    phi[l] = qp / (l * big_l);
  }
  return phi;
}

double strip_map_tail_bound(double r_prime, int order) {
  const double q = 1.0 / r_prime;
  const double big_l = -std::log1p(-q);
  return std::pow(q, order + 1) / ((order + 1) * big_l * (1.0 - q));
}

ContinuationPlan plan_continuation(double t, double t_star, double epsilon, int effective_degree, int max_order) {
  if (!(epsilon > 0.0)) fail(ErrorKind::EpsilonNonpositive, "epsilon must be positive");
  ContinuationPlan p;
  p.t = t;
  p.t_star = t_star;
  p.eta = 0.5;
  if (t == 0.0) {
    p.w = std::numeric_limits<double>::infinity();
    p.r_prime = std::numeric_limits<double>::infinity();
    p.order = 0;
    p.phi = {0.0};
    return p;
  }
  const double x = std::numbers::pi * std::abs(t) / (2.0 * p.eta * t_star);
  p.w = p.eta * t_star / std::abs(t);
  p.r_prime = 1.0 / -std::expm1(-x);
  const double ex = std::exp(x);
  const double required =
      ex * std::log(2.0 * std::numbers::e * effective_degree / ((1.0 - p.eta) * epsilon) * ex);
  if (!std::isfinite(required) || required >= static_cast<double>(max_order))
    fail(ErrorKind::PlanInfeasible, "continuation needs order " +
                                        (std::isfinite(required) ? std::to_string(static_cast<long long>(required) + 1)
                                                                 : std::string("inf")) +
                                        ", cap is " + std::to_string(max_order));
  p.order = std::max(1, static_cast<int>(std::floor(required)) + 1);
  p.phi = strip_map_coefficients(p.r_prime, p.order);
  const double sum = std::accumulate(p.phi.begin(), p.phi.end(), 0.0);
  if (std::abs(sum - 1.0) > strip_map_tail_bound(p.r_prime, p.order) + 1e-12)
    fail(ErrorKind::PlanInfeasible, "strip map coefficients do not sum to one");
  return p;
}

std::vector<double> composition_column_sums(const ContinuationPlan& plan) {
  const int order = plan.order;
  std::vector<double> sums(order + 1, 0.0);
  if (order == 0) {
    sums[0] = 1.0;
    return sums;
  }
  // p(k,l) = [z^k] phi^l obeys p(k+1,l) = q/(k+1) (k p(k,l) + (l/L) p(k,l-1)).
  const double q = 1.0 / plan.r_prime;
  const double inv_l = 1.0 / -std::log1p(-q);
  std::vector<double> row(order + 2, 0.0);
  row[0] = 1.0;
  sums[0] = 1.0;
  for (int k = 0; k < order; ++k) {
    const double f = q / (k + 1);
    for (int l = k + 1; l >= 1; --l) row[l] = f * (k * row[l] + l * inv_l * row[l - 1]);
    row[0] = 0.0;
    for (int l = 1; l <= k + 1; ++l) sums[l] += row[l];
  }
  return sums;
}

std::vector<Complex> compose_truncated(const std::vector<Complex>& a, const std::vector<double>& phi, int order) {
  std::vector<Complex> c(order + 1, 0.0);
  if (!a.empty()) c[0] = a[0];
  std::vector<double> power(order + 1, 0.0);
  power[0] = 1.0;
  for (int l = 1; l <= order && l < static_cast<int>(a.size()); ++l) {
    std::vector<double> next(order + 1, 0.0);
    for (int i = l - 1; i <= order; ++i) {
      if (power[i] == 0.0) continue;
      for (int j = 1; i + j <= order && j < static_cast<int>(phi.size()); ++j) next[i + j] += power[i] * phi[j];
    }
    power = std::move(next);
    for (int k = l; k <= order; ++k) c[k] += a[l] * power[k];
  }
  return c;
}

Estimate continue_observable(const LocalHamiltonian& h, const Observable& a, const ProductState& rho, double t,
                             double epsilon, const ExpansionOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  const ObservableGraph og = observable_graph(h, a);
  const Thresholds th = thresholds(og.graph.max_degree);
  const ContinuationPlan plan =
      plan_continuation(t, th.t_star, epsilon, th.effective_degree, opts.max_continuation_order);
  const int order = plan.order;
  const int cluster_orders = std::min(order, opts.continuation_cluster_orders);
  ExpansionOptions cluster_opts = opts;
  cluster_opts.max_order = std::max(opts.max_order, cluster_orders);
  Estimate est;
  std::vector<Complex> coeffs =
      observable_order_totals(h, a, rho, t, cluster_orders, cluster_opts, &est.clusters_per_order);
  if (order > cluster_orders) {
    const auto tail = observable_order_totals_lightcone(h, a, rho, t, order, opts);
    coeffs.insert(coeffs.end(), tail.begin() + cluster_orders + 1, tail.end());
  }
  const auto sums = composition_column_sums(plan);
  KahanSum total;
  for (int l = 0; l <= order; ++l) total.add(coeffs[l] * sums[l]);
  est.value = total.value();
  est.order = order;
  est.degree = th.degree;
  est.effective_degree = th.effective_degree;
  est.threshold = th.t_star;
  est.ratio = std::abs(t) / th.t_star;
  est.within_radius = true;
  est.truncation_bound = epsilon * a.norm();
  est.order_contributions = std::move(coeffs);
  est.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return est;
}

}  // namespace cexp
