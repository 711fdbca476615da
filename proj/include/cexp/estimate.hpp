#pragma once

#include "cexp/model.hpp"

#include <cstddef>
#include <vector>

namespace cexp {

struct ExpansionOptions {
  int workers = 0;  // 0 selects the hardware concurrency
  int max_order = 24;
  int partition_cap = 14;
  int tutte_cap = 24;
  // Continuation: orders up to this value come from the cluster sum, higher
  // orders from the light-cone recursion.
  int continuation_cluster_orders = 8;
  int max_continuation_order = 200000;
  std::size_t dense_dim_cap = 1024;
  // Observable sums at real times share full-space state vectors between
  // clusters when they fit in this many bytes; otherwise each cluster is
  // evaluated on its own support.
  std::size_t shared_state_budget = std::size_t{1} << 31;
};

struct Estimate {
  Complex value{0.0, 0.0};
  double truncation_bound = 0.0;  // +inf when no certificate applies
  int order = 0;
  bool within_radius = true;
  double threshold = 0.0;  // t* or t*_L
  double ratio = 0.0;      // |t| / threshold, or tau for echoes
  double wall_seconds = 0.0;
  int degree = 0;
  int effective_degree = 1;
  std::vector<std::size_t> clusters_per_order;  // index = order
  std::vector<Complex> order_contributions;     // index = order
};

// Compensated summation.
class KahanSum {
 public:
  void add(Complex x) {
    const Complex y = x - c_;
    const Complex t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  Complex value() const { return s_; }

 private:
  Complex s_{0.0, 0.0};
  Complex c_{0.0, 0.0};
};

}  // namespace cexp
