#include "cexp/loschmidt.hpp"

#include "cexp/bounds.hpp"
#include "cexp/error.hpp"
#include "cexp/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace cexp {

namespace {

constexpr Complex kI{0.0, 1.0};

double factorial(int m) {
  double f = 1.0;
  for (int i = 2; i <= m; ++i) f *= i;
  return f;
}

// Units of one label acting on the state space of support U.
struct LabelBlock {
  std::vector<int> terms;  // labeled term indices, distinct
  std::vector<int> mu;
  std::vector<Embedding> emb;
};

struct EchoLayout {
  Support u;
  std::vector<LabelBlock> blocks;  // ordered by label
  std::vector<int> labels;
  Matrix psi;
};

EchoLayout make_layout(const Cluster& v, const LabeledSystem& sys, const ProductState& rho) {
  EchoLayout lay;
  std::map<int, LabelBlock> by_label;
  for (const auto& e : v.entries()) {
    if (e.term < 0 || e.term >= static_cast<int>(sys.terms.size()))
      fail(ErrorKind::MalformedSpec, "cluster refers to an unknown term");
    const auto& t = sys.terms[e.term];
    lay.u = support_union(lay.u, t.support);
    by_label[t.label].terms.push_back(e.term);
    by_label[t.label].mu.push_back(e.count);
  }
  for (auto& [label, block] : by_label) {
    for (int x : block.terms) block.emb.emplace_back(lay.u, sys.terms[x].support, sys.local_dim);
    lay.labels.push_back(label);
    lay.blocks.push_back(std::move(block));
  }
  lay.psi = rho.factor(lay.u);
  return lay;
}

// (1/m!) sum over orderings of the block's units, applied to x from the left.
Matrix apply_block_recursion(const LabelBlock& b, const LabeledSystem& sys, const Matrix& x) {
  const std::size_t k = b.terms.size();
  std::vector<std::size_t> stride(k);
  std::size_t total = 1;
  for (std::size_t j = 0; j < k; ++j) {
    stride[j] = total;
    total *= static_cast<std::size_t>(b.mu[j] + 1);
  }
  std::vector<Matrix> g(total);
  std::vector<int> digits(k, 0);
  g[0] = x;
  for (std::size_t idx = 1; idx < total; ++idx) {
    // digits of idx in mixed radix
    std::size_t r = idx;
    int size = 0;
    for (std::size_t j = 0; j < k; ++j) {
      digits[j] = static_cast<int>(r % static_cast<std::size_t>(b.mu[j] + 1));
      r /= static_cast<std::size_t>(b.mu[j] + 1);
      size += digits[j];
    }
    Matrix out = Matrix::Zero(x.rows(), x.cols());
    for (std::size_t j = 0; j < k; ++j)
      if (digits[j] > 0) b.emb[j].add_left(sys.terms[b.terms[j]].matrix, g[idx - stride[j]], 1.0, out);
    g[idx] = out / static_cast<double>(size);
  }
  // g holds F(W_l)/m_l!, the distinct-word sum; the ordering sum has W_l! more.
  double wf = 1.0;
  for (int c : b.mu) wf *= factorial(c);
  return wf * g[total - 1];
}

Matrix apply_block_naive(const LabelBlock& b, const LabeledSystem& sys, const Matrix& x) {
  std::vector<int> units;
  for (std::size_t j = 0; j < b.terms.size(); ++j) units.insert(units.end(), b.mu[j], static_cast<int>(j));
  const int m = static_cast<int>(units.size());
  if (m > 7) fail(ErrorKind::SizeCap, "naive ordering sum is limited to 7 units per label");
  std::vector<int> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  Matrix sum = Matrix::Zero(x.rows(), x.cols());
  do {
    Matrix y = x;
    for (int i = m - 1; i >= 0; --i) {
      const int j = units[perm[i]];
      Matrix z = Matrix::Zero(x.rows(), x.cols());
      b.emb[j].add_left(sys.terms[b.terms[j]].matrix, y, 1.0, z);
      y = std::move(z);
    }
    sum += y;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return sum / factorial(m);
}

Matrix apply_block_inclusion_exclusion(const LabelBlock& b, const LabeledSystem& sys, const Matrix& x) {
  std::vector<int> units;
  for (std::size_t j = 0; j < b.terms.size(); ++j) units.insert(units.end(), b.mu[j], static_cast<int>(j));
  const int m = static_cast<int>(units.size());
  if (m > 16) fail(ErrorKind::SizeCap, "inclusion-exclusion path is limited to 16 units per label");
  std::vector<Matrix> embedded(b.terms.size());
  for (std::size_t j = 0; j < b.terms.size(); ++j) embedded[j] = b.emb[j].embed(sys.terms[b.terms[j]].matrix);
  Matrix sum = Matrix::Zero(x.rows(), x.cols());
  for (std::size_t s = 1; s < (std::size_t{1} << m); ++s) {
    Matrix hs = Matrix::Zero(x.rows(), x.rows());
    for (int i = 0; i < m; ++i)
      if (s >> i & 1) hs += embedded[units[i]];
    Eigen::SelfAdjointEigenSolver<Matrix> es(hs);
    const Eigen::VectorXd e = es.eigenvalues().array().pow(static_cast<double>(m));
    const double sign = ((m - __builtin_popcountll(s)) % 2) ? -1.0 : 1.0;
    sum += sign * (es.eigenvectors() * (e.asDiagonal() * (es.eigenvectors().adjoint() * x)));
  }
  return sum / factorial(m);
}

Complex echo_expectation_on(const EchoLayout& lay, const LabeledSystem& sys, ProductPath path) {
  Matrix x = lay.psi;
  for (std::size_t b = lay.blocks.size(); b-- > 0;) {
    switch (path) {
      case ProductPath::WordRecursion: x = apply_block_recursion(lay.blocks[b], sys, x); break;
      case ProductPath::Naive: x = apply_block_naive(lay.blocks[b], sys, x); break;
      case ProductPath::InclusionExclusion: x = apply_block_inclusion_exclusion(lay.blocks[b], sys, x); break;
    }
  }
  return (lay.psi.adjoint() * x).trace();
}

Complex time_factor(const Cluster& w, const LabeledSystem& sys) {
  Complex f = 1.0;
  for (const auto& e : w.entries()) f *= std::pow(-kI * sys.times[sys.terms[e.term].label], e.count);
  return f;
}

double lambda_power(const Cluster& w, const LabeledSystem& sys) {
  double p = 1.0;
  for (const auto& e : w.entries()) p *= std::pow(sys.terms[e.term].coefficient, e.count);
  return p;
}

// Expectation and T(1,0) caches shared by all clusters of an expansion.
class EchoEvaluator {
 public:
  EchoEvaluator(const LabeledSystem& sys, const ProductState& rho, const ExpansionOptions& opts)
      : sys_(sys), rho_(rho), opts_(opts), tutte_(opts.tutte_cap) {}

  Complex expectation(const Cluster& v) {
    {
      std::lock_guard<std::mutex> lock(mu_);
      if (auto it = cache_.find(v); it != cache_.end()) return it->second;
    }
    const Complex value = echo_expectation_on(make_layout(v, sys_, rho_), sys_, ProductPath::WordRecursion);
    std::lock_guard<std::mutex> lock(mu_);
    cache_.emplace(v, value);
    return value;
  }

  // sum_P (-1)^{|P|-1} T_P(1,0) / (P! prod V!) prod_V E(V), i.e. D_W log L / (W! times).
  Complex partition_sum(const Cluster& w) {
    const auto partitions = enumerate_connected_partitions(w, sys_.graph, opts_.partition_cap);
    KahanSum sum;
    for (const auto& p : partitions) {
      const auto f = partition_factors(w, p);
      const double t10 = static_cast<double>(tutte_.t10(p.graph));
      Complex prod = 1.0;
      for (const auto& v : p.parts) prod *= expectation(v);
      const double sign = (p.size() - 1) % 2 ? -1.0 : 1.0;
      sum.add(sign * t10 / (static_cast<double>(f.p_factorial) * static_cast<double>(f.parts_factorial_product)) *
              prod);
    }
    return sum.value();
  }

 private:
  const LabeledSystem& sys_;
  const ProductState& rho_;
  ExpansionOptions opts_;
  TutteCache tutte_;
  std::mutex mu_;
  std::unordered_map<Cluster, Complex, ClusterHash> cache_;
};

// D_W log L from naive moments and the truncated series of log(1 + p).
Complex naive_cumulant(const Cluster& w, const LabeledSystem& sys, const ProductState& rho) {
  const auto entries = w.entries();
  const std::size_t k = entries.size();
  std::vector<int> mu;
  std::vector<std::size_t> radix;
  std::size_t total = 1;
  for (const auto& e : entries) {
    mu.push_back(e.count);
    radix.push_back(static_cast<std::size_t>(e.count + 1));
    total *= static_cast<std::size_t>(e.count + 1);
  }
  auto decode = [&](std::size_t idx) {
    std::vector<int> d(k);
    for (std::size_t j = 0; j < k; ++j) { d[j] = static_cast<int>(idx % radix[j]); idx /= radix[j]; }
    return d;
  };
  std::vector<std::vector<int>> digits(total);
  for (std::size_t i = 0; i < total; ++i) digits[i] = decode(i);
  auto encode = [&](const std::vector<int>& d) {
    std::size_t idx = 0, s = 1;
    for (std::size_t j = 0; j < k; ++j) { idx += static_cast<std::size_t>(d[j]) * s; s *= radix[j]; }
    return idx;
  };

  std::vector<Complex> p(total, 0.0);
  for (std::size_t i = 1; i < total; ++i) {
    std::vector<ClusterEntry> sub;
    double uf = 1.0;
    for (std::size_t j = 0; j < k; ++j) {
      if (digits[i][j] > 0) sub.push_back({entries[j].term, digits[i][j]});
      uf *= factorial(digits[i][j]);
    }
    const Cluster u(std::move(sub));
    const Complex moment = time_factor(u, sys) * echo_expectation_on(make_layout(u, sys, rho), sys, ProductPath::Naive);
    p[i] = moment / uf;
  }
  auto multiply = [&](const std::vector<Complex>& a, const std::vector<Complex>& b) {
    std::vector<Complex> c(total, 0.0);
    std::vector<int> d(k);
    for (std::size_t i = 0; i < total; ++i) {
      if (a[i] == Complex(0.0)) continue;
      for (std::size_t j = 0; j < total; ++j) {
        if (b[j] == Complex(0.0)) continue;
        bool fits = true;
        for (std::size_t q = 0; q < k && fits; ++q) {
          d[q] = digits[i][q] + digits[j][q];
          fits = d[q] <= mu[q];
        }
        if (fits) c[encode(d)] += a[i] * b[j];
      }
    }
    return c;
  };
  const int m = w.size();
  std::vector<Complex> power = p;
  Complex coeff = p[total - 1];
  for (int n = 2; n <= m; ++n) {
    power = multiply(power, p);
    coeff += ((n - 1) % 2 ? -1.0 : 1.0) / n * power[total - 1];
  }
  return static_cast<double>(w.factorial()) * coeff;
}

LabeledSystem single_system(const LocalHamiltonian& h, Complex t) {
  MultiEchoSpec spec;
  spec.hamiltonians.push_back(h);
  spec.times.push_back(t);
  return make_labeled_system(spec);
}

}  // namespace

void validate_multi_echo(const MultiEchoSpec& spec, const ProductState& rho) {
  if (spec.hamiltonians.empty()) fail(ErrorKind::MalformedSpec, "echo needs at least one Hamiltonian");
  if (spec.hamiltonians.size() != spec.times.size())
    fail(ErrorKind::MalformedSpec, "echo needs exactly one time per Hamiltonian");
  const auto& first = spec.hamiltonians.front();
  for (const auto& h : spec.hamiltonians)
    if (h.sites() != first.sites() || h.local_dim() != first.local_dim())
      fail(ErrorKind::IncompatibleHamiltonians, "echo Hamiltonians act on different systems");
  if (rho.sites() != first.sites() || rho.local_dim() != first.local_dim())
    fail(ErrorKind::DimensionMismatch, "state does not match the Hamiltonian's system");
}

LabeledSystem make_labeled_system(const MultiEchoSpec& spec) {
  if (spec.hamiltonians.empty() || spec.hamiltonians.size() != spec.times.size())
    fail(ErrorKind::MalformedSpec, "echo needs one time per Hamiltonian");
  for (const auto& h : spec.hamiltonians)
    if (h.sites() != spec.hamiltonians[0].sites() || h.local_dim() != spec.hamiltonians[0].local_dim())
      fail(ErrorKind::IncompatibleHamiltonians, "echo Hamiltonians act on different systems");
  LabeledSystem sys;
  sys.local_dim = spec.hamiltonians[0].local_dim();
  sys.times = spec.times;
  std::set<Support> all;
  for (const auto& h : spec.hamiltonians)
    for (const auto& t : h.terms()) all.insert(t.support);
  sys.base_supports.assign(all.begin(), all.end());
  std::vector<Support> labeled;
  for (std::size_t l = 0; l < spec.hamiltonians.size(); ++l)
    for (const auto& t : spec.hamiltonians[l].terms()) {
      LabeledSystem::Entry e;
      e.label = static_cast<int>(l);
      e.base = static_cast<int>(std::lower_bound(sys.base_supports.begin(), sys.base_supports.end(), t.support) -
                                sys.base_supports.begin());
      e.support = t.support;
      e.coefficient = t.coefficient;
      e.matrix = t.matrix;
      labeled.push_back(t.support);
      sys.terms.push_back(std::move(e));
    }
  sys.graph = build_interaction_graph(labeled);
  sys.base_graph = build_interaction_graph(sys.base_supports);
  const int k = static_cast<int>(spec.hamiltonians.size());
  if (sys.graph.max_degree > k * (sys.base_graph.max_degree + 1) - 1)
    throw std::logic_error("labeled interaction graph exceeds its degree bound");
  return sys;
}

Complex echo_expectation(const Cluster& v, const LabeledSystem& sys, const ProductState& rho, ProductPath path) {
  if (v.empty()) return 1.0;
  return echo_expectation_on(make_layout(v, sys, rho), sys, path);
}

Complex symmetrized_expectation(const Cluster& v, const LocalHamiltonian& h, const ProductState& rho,
                                ProductPath path) {
  return echo_expectation(v, single_system(h, 1.0), rho, path);
}

Complex cluster_derivative_multi(const Cluster& w, const LabeledSystem& sys, const ProductState& rho,
                                 LogEchoPath path) {
  if (w.empty()) fail(ErrorKind::SizeZero, "cluster is empty");
  if (path == LogEchoPath::NaiveCumulant) return naive_cumulant(w, sys, rho);
  if (!cluster_connected(w, sys.graph)) return 0.0;
  EchoEvaluator ev(sys, rho, ExpansionOptions{});
  return time_factor(w, sys) * static_cast<double>(w.factorial()) * ev.partition_sum(w);
}

Complex cluster_derivative_logL(const Cluster& w, const LocalHamiltonian& h, const ProductState& rho, Complex t,
                                LogEchoPath path) {
  return cluster_derivative_multi(w, single_system(h, t), rho, path);
}

Estimate expand_logL_multi(const MultiEchoSpec& spec, const ProductState& rho, int max_order,
                           const ExpansionOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  validate_multi_echo(spec, rho);
  if (max_order < 0) fail(ErrorKind::MalformedSpec, "order must be nonnegative");
  if (max_order > opts.max_order || max_order > opts.partition_cap)
    fail(ErrorKind::SizeCap, "order " + std::to_string(max_order) + " exceeds the partition cap");
  const LabeledSystem sys = make_labeled_system(spec);
  const Thresholds th = thresholds(sys.base_graph.max_degree);
  const std::size_t s = sys.base_supports.size();
  double sum_t = 0.0;
  for (const auto& t : spec.times) sum_t += std::abs(t);
  const double tau = static_cast<double>(spec.times.size()) * sum_t / th.t_star_L;

  struct Task {
    int order;
    Cluster w;
  };
  std::vector<Task> tasks;
  Estimate est;
  est.clusters_per_order.assign(max_order + 1, 0);
  for (int m = 1; m <= max_order; ++m)
    for (auto& w : enumerate_all_connected_clusters(sys.graph, m)) {
      if (lambda_power(w, sys) == 0.0) continue;
      tasks.push_back({m, std::move(w)});
      ++est.clusters_per_order[m];
    }
  EchoEvaluator ev(sys, rho, opts);
  std::vector<Complex> values(tasks.size());
  parallel_for(tasks.size(), opts.workers, [&](std::size_t i) {
    const Cluster& w = tasks[i].w;
    values[i] = lambda_power(w, sys) * time_factor(w, sys) * ev.partition_sum(w);
  });
  std::vector<KahanSum> sums(max_order + 1);
  for (std::size_t i = 0; i < tasks.size(); ++i) sums[tasks[i].order].add(values[i]);
  est.order_contributions.resize(max_order + 1);
  KahanSum total;
  for (int m = 0; m <= max_order; ++m) {
    est.order_contributions[m] = sums[m].value();
    total.add(est.order_contributions[m]);
  }
  est.value = total.value();
  est.order = max_order;
  est.degree = th.degree;
  est.effective_degree = th.effective_degree;
  est.threshold = th.t_star_L;
  est.ratio = tau;
  est.within_radius = tau < 1.0;
  est.truncation_bound =
      est.within_radius ? multi_truncation_bound(tau, max_order, s) : std::numeric_limits<double>::infinity();
  est.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return est;
}

Estimate expand_logL(const LocalHamiltonian& h, const ProductState& rho, Complex t, int max_order,
                     const ExpansionOptions& opts) {
  MultiEchoSpec spec;
  spec.hamiltonians.push_back(h);
  spec.times.push_back(t);
  return expand_logL_multi(spec, rho, max_order, opts);
}

SiteRate per_site_rate(const LocalHamiltonian& h, const ProductState& rho, Complex t, int max_order,
                       const ExpansionOptions& opts) {
  SiteRate r;
  r.estimate = expand_logL(h, rho, t, max_order, opts);
  const double n = h.sites();
  r.rate = r.estimate.value / n;
  r.bound = r.estimate.truncation_bound / n;
  return r;
}

int loschmidt_order_for_epsilon(double ratio, std::size_t terms, double epsilon) {
  if (!(epsilon > 0.0)) fail(ErrorKind::EpsilonNonpositive, "epsilon must be positive");
  if (ratio >= 1.0) fail(ErrorKind::OutsideRadius, "time is outside the certified window");
  for (int m = 0; m <= 100000; ++m)
    if (multi_truncation_bound(ratio, m, terms) <= epsilon) return m;
  fail(ErrorKind::SizeCap, "no order below 100000 reaches the requested epsilon");
}

}  // namespace cexp
