#pragma once

#include "cexp/model.hpp"

#include <random>
#include <utility>
#include <vector>

namespace fixtures {

using cexp::Complex;
using cexp::Matrix;
using cexp::Vector;

inline Matrix random_hermitian(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = Complex(g(rng), g(rng));
  Matrix h = (m + m.adjoint()) / 2.0;
  h /= cexp::spectral_norm(h);
  Matrix exact = (h + h.adjoint()) / 2.0;
  return exact;
}

inline double random_coefficient(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return u(rng);
}

inline cexp::LocalHamiltonian random_two_local(int n, const std::vector<std::pair<int, int>>& bonds,
                                               std::mt19937_64& rng) {
  std::vector<cexp::Term> terms;
  for (auto [a, b] : bonds) {
    cexp::Term t;
    t.support = {std::min(a, b), std::max(a, b)};
    t.coefficient = random_coefficient(rng);
    t.matrix = random_hermitian(4, rng);
    terms.push_back(std::move(t));
  }
  return cexp::LocalHamiltonian(n, 2, std::move(terms));
}

inline std::vector<std::pair<int, int>> chain_bonds(int n) {
  std::vector<std::pair<int, int>> b;
  for (int i = 0; i + 1 < n; ++i) b.emplace_back(i, i + 1);
  return b;
}

// Chain plus long-range chords, giving a denser interaction graph.
inline std::vector<std::pair<int, int>> expander_bonds(int n) {
  auto b = chain_bonds(n);
  b.emplace_back(0, n - 1);
  if (n >= 4) b.emplace_back(0, n / 2);
  if (n >= 6) b.emplace_back(1, n - 2);
  return b;
}

inline Vector random_qubit(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vector v(2);
  v << Complex(g(rng), g(rng)), Complex(g(rng), g(rng));
  return v / v.norm();
}

inline cexp::ProductState random_pure_state(int n, std::mt19937_64& rng) {
  std::vector<Vector> psis;
  for (int i = 0; i < n; ++i) psis.push_back(random_qubit(rng));
  return cexp::ProductState::from_vectors(psis);
}

inline cexp::ProductState random_mixed_state(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 0.95);
  std::vector<Matrix> rhos;
  for (int i = 0; i < n; ++i) {
    const Vector a = random_qubit(rng);
    Vector b(2);
    b << -std::conj(a(1)), std::conj(a(0));
    const double p = u(rng);
    rhos.push_back(p * a * a.adjoint() + (1.0 - p) * b * b.adjoint());
  }
  return cexp::ProductState::from_density_matrices(rhos);
}

inline cexp::Observable random_site_observable(int site, std::mt19937_64& rng) {
  return cexp::Observable({site}, 1.5 * random_hermitian(2, rng));
}

inline cexp::Term pauli_term(cexp::Support s, const Matrix& m, double c = 1.0) {
  return cexp::Term{std::move(s), c, m};
}

// (XX + YY + ZZ) / 3 on each bond of an open chain.
inline cexp::LocalHamiltonian heisenberg_chain(int n) {
  using namespace cexp::pauli;
  const Matrix h = (cexp::kron(x(), x()) + cexp::kron(y(), y()) + cexp::kron(z(), z())) / 3.0;
  std::vector<cexp::Term> terms;
  for (int i = 0; i + 1 < n; ++i) terms.push_back(pauli_term({i, i + 1}, h));
  return cexp::LocalHamiltonian(n, 2, std::move(terms));
}

// -ZZ on bonds, -g X on sites.
inline cexp::LocalHamiltonian ising_chain(int n, double g) {
  using namespace cexp::pauli;
  std::vector<cexp::Term> terms;
  for (int i = 0; i + 1 < n; ++i) terms.push_back(pauli_term({i, i + 1}, cexp::kron(z(), z()), -1.0));
  for (int i = 0; i < n; ++i) terms.push_back(pauli_term({i}, x(), -g));
  return cexp::LocalHamiltonian(n, 2, std::move(terms));
}

// ZZ on every edge of an L x L open square lattice.
inline cexp::LocalHamiltonian square_lattice(int l) {
  using namespace cexp::pauli;
  std::vector<cexp::Term> terms;
  const Matrix zz = cexp::kron(z(), z());
  for (int r = 0; r < l; ++r)
    for (int c = 0; c < l; ++c) {
      const int v = r * l + c;
      if (c + 1 < l) terms.push_back(pauli_term({v, v + 1}, zz));
      if (r + 1 < l) terms.push_back(pauli_term({v, v + l}, zz));
    }
  return cexp::LocalHamiltonian(l * l, 2, std::move(terms));
}

inline cexp::LocalHamiltonian single_site_field(int n, const Matrix& m) {
  std::vector<cexp::Term> terms;
  for (int i = 0; i < n; ++i) terms.push_back(pauli_term({i}, m));
  return cexp::LocalHamiltonian(n, 2, std::move(terms));
}

}  // namespace fixtures
