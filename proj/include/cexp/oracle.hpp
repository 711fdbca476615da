#pragma once

#include "cexp/clusters.hpp"
#include "cexp/loschmidt.hpp"

#include <vector>

namespace cexp {

inline constexpr std::size_t kDefaultOracleDimCap = 4096;

// Full-space Hamiltonian with its eigendecomposition.
class DenseSystem {
 public:
  explicit DenseSystem(const LocalHamiltonian& h, std::size_t dim_cap = kDefaultOracleDimCap);

  std::size_t dim() const { return static_cast<std::size_t>(energies_.size()); }
  const Eigen::VectorXd& energies() const { return energies_; }
  const Matrix& eigenvectors() const { return vectors_; }
  // e^{-iHt} for complex t
  Matrix propagator(Complex t) const;

 private:
  Eigen::VectorXd energies_;
  Matrix vectors_;
};

Complex exact_observable(const LocalHamiltonian& h, const Observable& a, const ProductState& rho, double t,
                         std::size_t dim_cap = kDefaultOracleDimCap);
Complex exact_loschmidt(const LocalHamiltonian& h, const ProductState& rho, Complex t,
                        std::size_t dim_cap = kDefaultOracleDimCap);
Complex exact_loschmidt(const MultiEchoSpec& spec, const ProductState& rho,
                        std::size_t dim_cap = kDefaultOracleDimCap);

// rho(t) = e^{-iHt} rho e^{iHt} on the full space.
Matrix evolved_density(const LocalHamiltonian& h, const ProductState& rho, double t,
                       std::size_t dim_cap = kDefaultOracleDimCap);

struct EnergyLevel {
  double energy = 0.0;
  double probability = 0.0;
};
// Outcome distribution of measuring H in the given full-space state;
// eigenvalues closer than 1e-8 are merged.
std::vector<EnergyLevel> exact_measurement_distribution(const LocalHamiltonian& h, const Matrix& density,
                                                        std::size_t dim_cap = kDefaultOracleDimCap);

struct InterpolationOptions {
  double half_width = 0.3;  // lambda grid spans [-h, h]
  int extra_nodes = 8;      // nodes per variable beyond mu + 1
  double residual_tolerance = 1e-8;
};

// D_W log L(t) from a polynomial fit of log tr(e^{-i t sum_j lambda_j h_j} rho)
// on a tensor Chebyshev grid.
Complex exact_cluster_derivative_logL(const Cluster& w, const LocalHamiltonian& h, const ProductState& rho, Complex t,
                                      const InterpolationOptions& opts = {});

}  // namespace cexp
