#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace cexp {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Sorted, duplicate-free list of site indices. Tensor factors of any matrix
// acting on a support are ordered by ascending site index, first site most
// significant.
using Support = std::vector<int>;

inline constexpr double kNormTolerance = 1e-9;
inline constexpr double kHermitianTolerance = 1e-12;

bool supports_overlap(const Support& a, const Support& b);
Support support_union(const Support& a, const Support& b);
bool support_contains(const Support& outer, const Support& inner);
std::size_t support_dimension(const Support& s, int d);

double spectral_norm(const Matrix& m);
double hermiticity_defect(const Matrix& m);
Matrix kron(const Matrix& a, const Matrix& b);

// ---------------------------------------------------------------------------
// Placement of an operator on `inner` sites inside the space of `outer` sites.

class Embedding {
 public:
  Embedding(const Support& outer, const Support& inner, int d);

  std::size_t outer_dim() const { return inner_of_.size(); }
  std::size_t inner_dim() const { return inner_dim_; }

  Matrix embed(const Matrix& op) const;

  // out += scale * (op (x) 1) * x
  void add_left(const Matrix& op, const Matrix& x, Complex scale, Matrix& out) const;
  // out += scale * x * (op (x) 1)
  void add_right(const Matrix& op, const Matrix& x, Complex scale, Matrix& out) const;

 private:
  std::size_t inner_dim_ = 1;
  std::vector<int> inner_of_;
  std::vector<int> rest_of_;
  std::vector<int> compose_;  // compose_[rest * inner_dim + inner]
};

// ---------------------------------------------------------------------------

struct Term {
  Support support;
  double coefficient = 1.0;
  Matrix matrix;
};

class LocalHamiltonian {
 public:
  LocalHamiltonian() = default;
  // Validates every invariant; throws cexp::Error on violation.
  LocalHamiltonian(int n, int d, std::vector<Term> terms);

  int sites() const { return n_; }
  int local_dim() const { return d_; }
  std::size_t size() const { return terms_.size(); }
  const Term& term(std::size_t i) const { return terms_[i]; }
  std::span<const Term> terms() const { return terms_; }
  std::vector<Support> supports() const;
  int locality() const;
  Matrix dense_matrix() const;

 private:
  int n_ = 0;
  int d_ = 2;
  std::vector<Term> terms_;
};

struct Observable {
  Support support;
  Matrix matrix;

  Observable() = default;
  Observable(Support s, Matrix m);
  double norm() const { return norm_; }

 private:
  double norm_ = 0.0;
};

// Product state. Each site keeps a factor F_v with rho_v = F_v F_v^dagger;
// pure sites have a single column.
class ProductState {
 public:
  ProductState() = default;
  static ProductState from_density_matrices(std::vector<Matrix> rhos);
  static ProductState from_vectors(const std::vector<Vector>& psis);
  static ProductState computational_zero(int n, int d);

  int sites() const { return static_cast<int>(rho_.size()); }
  int local_dim() const { return d_; }
  const Matrix& site_density(int v) const { return rho_[v]; }
  bool site_is_pure(int v) const { return factor_[v].cols() == 1; }
  bool is_pure() const;

  Matrix density(const Support& s) const;
  Matrix factor(const Support& s) const;
  Matrix full_density() const;
  Vector full_vector() const;  // requires is_pure()

  // tr(op rho_s) for an operator acting on support s.
  Complex expectation(const Support& s, const Matrix& op) const;

 private:
  int d_ = 2;
  std::vector<Matrix> rho_;
  std::vector<Matrix> factor_;
};

// tr(O (x)_v rho_v) for a dense operator on O's support.
Complex product_expectation(const Support& s, const Matrix& op, const ProductState& rho);

namespace pauli {
Matrix identity();
Matrix x();
Matrix y();
Matrix z();
}  // namespace pauli

}  // namespace cexp
