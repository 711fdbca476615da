#pragma once

#include "cexp/clusters.hpp"
#include "cexp/estimate.hpp"

#include <memory>
#include <vector>

namespace cexp {

enum class ProductPath {
  WordRecursion,       // recursion over sub-multisets, applied to the state
  InclusionExclusion,  // sum_I (-1)^{l-|I|} (sum_{i in I} h_i)^l
  Naive,               // explicit sum over all orderings (m <= 7)
};

// <h^V>_s = (1/|V|!) sum_sigma tr(h_s1 ... h_sl rho)
Complex symmetrized_expectation(const Cluster& v, const LocalHamiltonian& h, const ProductState& rho,
                                ProductPath path = ProductPath::WordRecursion);

enum class LogEchoPath {
  PartitionFormula,  // sum over connected partitions with T(1,0); 0 for disconnected W
  NaiveCumulant,     // moments from naive ordering sums, then the truncated series of log
};

// D_W log L(t) for L(t) = tr(e^{-iHt} rho), without the lambda^W factor.
Complex cluster_derivative_logL(const Cluster& w, const LocalHamiltonian& h, const ProductState& rho, Complex t,
                                LogEchoPath path = LogEchoPath::PartitionFormula);

Estimate expand_logL(const LocalHamiltonian& h, const ProductState& rho, Complex t, int max_order,
                     const ExpansionOptions& opts = {});

// L({t_l}) = tr(e^{-i H^1 t_1} e^{-i H^2 t_2} ... e^{-i H^K t_K} rho)
struct MultiEchoSpec {
  std::vector<LocalHamiltonian> hamiltonians;
  std::vector<Complex> times;
};

void validate_multi_echo(const MultiEchoSpec& spec, const ProductState& rho);

// Labeled terms (X, l) of the echo. Vertex index = position in `terms`.
struct LabeledSystem {
  struct Entry {
    int label = 0;
    int base = 0;  // index into the union of supports
    Support support;
    double coefficient = 1.0;
    Matrix matrix;
  };
  int local_dim = 2;
  std::vector<Entry> terms;
  std::vector<Complex> times;        // per label
  std::vector<Support> base_supports;  // union S of all supports
  InteractionGraph graph;              // over labeled terms
  InteractionGraph base_graph;         // over S
};

LabeledSystem make_labeled_system(const MultiEchoSpec& spec);

// Label-ordered expectation prod_l (1/m_l!) tr[(sum_sigma W_1) ... (sum_sigma W_K) rho].
Complex echo_expectation(const Cluster& v, const LabeledSystem& sys, const ProductState& rho,
                         ProductPath path = ProductPath::WordRecursion);

// D_W log L({t_l}) over labeled terms, without the lambda^W factor.
Complex cluster_derivative_multi(const Cluster& w, const LabeledSystem& sys, const ProductState& rho,
                                 LogEchoPath path = LogEchoPath::PartitionFormula);

Estimate expand_logL_multi(const MultiEchoSpec& spec, const ProductState& rho, int max_order,
                           const ExpansionOptions& opts = {});

struct SiteRate {
  Complex rate{0.0, 0.0};
  double bound = 0.0;
  Estimate estimate;
};

SiteRate per_site_rate(const LocalHamiltonian& h, const ProductState& rho, Complex t, int max_order,
                       const ExpansionOptions& opts = {});

// Smallest order whose Loschmidt truncation bound does not exceed epsilon.
int loschmidt_order_for_epsilon(double ratio, std::size_t terms, double epsilon);

}  // namespace cexp
