#pragma once

#include "cexp/clusters.hpp"
#include "cexp/estimate.hpp"

#include <vector>

namespace cexp {

enum class CommutatorPath {
  WordRecursion,       // recursion over sub-multisets of W, production path
  InclusionExclusion,  // subset power sums via eigendecomposition
  Naive,               // explicit sum over all m! orderings (m <= 7)
};

inline constexpr int kNaivePermutationCap = 7;

// D_W <A(t)> = (it)^m/m! sum_sigma tr([h_s1,[...,[h_sm, A]]] rho), without
// the lambda^W factor. Clusters not connected to supp(A) give exactly 0 on
// the non-naive paths.
Complex cluster_derivative_observable(const Cluster& w, const LocalHamiltonian& h, const Observable& a,
                                      const ProductState& rho, Complex t,
                                      CommutatorPath path = CommutatorPath::WordRecursion);

// Interaction graph of H with supp(A) attached. When supp(A) is not the
// support of a term it becomes an extra vertex with index h.size().
struct ObservableGraph {
  InteractionGraph graph;
  int root = 0;
  bool phantom = false;
};
ObservableGraph observable_graph(const LocalHamiltonian& h, const Observable& a);

// Order totals sum_{W in G_m^A} lambda^W/W! D_W <A(t)> for m = 0..M from the
// cluster sum. counts (optional) receives the number of clusters per order.
std::vector<Complex> observable_order_totals(const LocalHamiltonian& h, const Observable& a, const ProductState& rho,
                                             Complex t, int max_order, const ExpansionOptions& opts,
                                             std::vector<std::size_t>* counts = nullptr);

// Same totals from the Heisenberg recursion B_l = (it/l)[H, B_{l-1}] on the
// growing light cone of supp(A).
std::vector<Complex> observable_order_totals_lightcone(const LocalHamiltonian& h, const Observable& a,
                                                       const ProductState& rho, Complex t, int max_order,
                                                       const ExpansionOptions& opts);

Estimate expand_observable(const LocalHamiltonian& h, const Observable& a, const ProductState& rho, double t,
                           int max_order, const ExpansionOptions& opts = {});

// Smallest order whose truncation bound does not exceed epsilon.
int observable_order_for_epsilon(double t, double t_star, int effective_degree, double a_norm, double epsilon);

// ---------------------------------------------------------------------------

struct ContinuationPlan {
  double t = 0.0;
  double t_star = 0.0;
  double eta = 0.5;
  double w = 0.0;
  double r_prime = 0.0;
  int order = 0;
  std::vector<double> phi;  // phi[0] = 0, phi[l] for l = 1..order
};

ContinuationPlan plan_continuation(double t, double t_star, double epsilon, int effective_degree,
                                   int max_order = 200000);

// Coefficients phi_l = -R'^{-l} / (l log(1 - 1/R')) of the strip map.
std::vector<double> strip_map_coefficients(double r_prime, int order);
// Upper bound on sum_{l > order} phi_l.
double strip_map_tail_bound(double r_prime, int order);

// S_l = sum_{k=l}^{M} [z^k] phi(z)^l for l = 0..M.
std::vector<double> composition_column_sums(const ContinuationPlan& plan);

// c_k = sum_l a_l [z^k] phi(z)^l by iterated truncated multiplication.
std::vector<Complex> compose_truncated(const std::vector<Complex>& a, const std::vector<double>& phi, int order);

Estimate continue_observable(const LocalHamiltonian& h, const Observable& a, const ProductState& rho, double t,
                             double epsilon, const ExpansionOptions& opts = {});

}  // namespace cexp
