#include <doctest.h>

#include "cexp/error.hpp"
#include "cexp/model.hpp"
#include "fixtures.hpp"

#include <cmath>

using namespace cexp;

namespace {

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::Usage;
}

}  // namespace

TEST_CASE("pauli terms have unit norm") {
  CHECK(spectral_norm(pauli::x()) == doctest::Approx(1.0));
  CHECK(spectral_norm(2.0 * pauli::identity()) == doctest::Approx(2.0));
  CHECK(spectral_norm(kron(pauli::z(), pauli::z())) == doctest::Approx(1.0));
}

TEST_CASE("hamiltonian validation") {
  using pauli::x;
  CHECK(kind_of([] { LocalHamiltonian(1, 2, {Term{{0}, 1.5, x()}}); }) == ErrorKind::CoefficientOutOfRange);
  CHECK(kind_of([] { LocalHamiltonian(1, 2, {Term{{0}, 1.0, 2.0 * x()}}); }) == ErrorKind::NormViolation);
  CHECK(kind_of([] { LocalHamiltonian(2, 2, {Term{{0}, 1.0, x()}, Term{{0}, 0.5, pauli::z()}}); }) ==
        ErrorKind::DuplicateSupport);
  CHECK(kind_of([] { LocalHamiltonian(2, 2, {Term{{0, 1}, 1.0, x()}}); }) == ErrorKind::DimensionMismatch);
  CHECK_THROWS_AS(LocalHamiltonian(1, 2, {Term{{3}, 1.0, x()}}), Error);
  Matrix skew = x();
  skew(0, 1) = Complex(1.0, 0.1);
  skew /= spectral_norm(skew);
  CHECK(kind_of([&] { LocalHamiltonian(1, 2, {Term{{0}, 1.0, skew}}); }) == ErrorKind::NonHermitianTerm);
  const auto lattice = fixtures::square_lattice(3);
  CHECK(lattice.size() == 12);
  CHECK(lattice.locality() == 2);
}

TEST_CASE("single-site expectations") {
  const auto zero = ProductState::computational_zero(1, 2);
  CHECK(std::abs(zero.expectation({0}, pauli::z()) - 1.0) < 1e-14);
  CHECK(std::abs(zero.expectation({0}, pauli::x())) < 1e-14);
  const Matrix yplus = (pauli::identity() + pauli::y()) / 2.0;
  const auto s = ProductState::from_density_matrices({yplus});
  CHECK(std::abs(s.expectation({0}, pauli::y()) - 1.0) < 1e-14);
  CHECK(s.is_pure());  // rank one, stored as a vector
}

TEST_CASE("embedding matches explicit kron") {
  std::mt19937_64 rng(7);
  const Matrix a = fixtures::random_hermitian(4, rng);
  const Embedding emb({0, 1, 2}, {0, 2}, 2);
  Matrix expect = Matrix::Zero(8, 8);
  // a acts on sites 0 and 2, identity on site 1
  for (int i0 = 0; i0 < 2; ++i0)
    for (int i1 = 0; i1 < 2; ++i1)
      for (int i2 = 0; i2 < 2; ++i2)
        for (int j0 = 0; j0 < 2; ++j0)
          for (int j2 = 0; j2 < 2; ++j2)
            expect(i0 * 4 + i1 * 2 + i2, j0 * 4 + i1 * 2 + j2) = a(i0 * 2 + i2, j0 * 2 + j2);
  CHECK((emb.embed(a) - expect).norm() < 1e-14);

  const Matrix x = fixtures::random_hermitian(8, rng);
  Matrix out = Matrix::Zero(8, 8);
  emb.add_left(a, x, Complex(0.0, 2.0), out);
  emb.add_right(a, x, 1.0, out);
  CHECK((out - (Complex(0.0, 2.0) * expect * x + x * expect)).norm() < 1e-12);
}

TEST_CASE("product state reductions agree with the full state") {
  std::mt19937_64 rng(11);
  const auto rho = fixtures::random_mixed_state(3, rng);
  const Matrix full = rho.full_density();
  CHECK(std::abs(full.trace() - 1.0) < 1e-12);
  const Matrix r02 = rho.density({0, 2});
  const Matrix f = rho.factor({0, 2});
  CHECK((f * f.adjoint() - r02).norm() < 1e-12);
  const Matrix op = fixtures::random_hermitian(4, rng);
  const Matrix full_op = Embedding({0, 1, 2}, {0, 2}, 2).embed(op);
  const Complex direct = (full_op * full).trace();
  CHECK(std::abs(rho.expectation({0, 2}, op) - direct) < 1e-12);
  CHECK(std::abs(product_expectation({0, 2}, op, rho) - direct) < 1e-12);

  const auto pure = fixtures::random_pure_state(3, rng);
  const Vector psi = pure.full_vector();
  CHECK((psi * psi.adjoint() - pure.full_density()).norm() < 1e-12);
}

TEST_CASE("dense matrix of a two-site hamiltonian") {
  const auto h = fixtures::ising_chain(2, 0.5);
  using namespace pauli;
  const Matrix expect = -kron(z(), z()) - 0.5 * (kron(x(), identity()) + kron(identity(), x()));
  CHECK((h.dense_matrix() - expect).norm() < 1e-14);
}
