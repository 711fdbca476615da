#include <doctest.h>

#include "cexp/error.hpp"
#include "cexp/oracle.hpp"
#include "fixtures.hpp"

#include <cmath>

using namespace cexp;

TEST_CASE("single qubit closed forms") {
  const LocalHamiltonian h(1, 2, {Term{{0}, 1.0, pauli::x()}});
  const auto zero = ProductState::computational_zero(1, 2);
  const Observable z({0}, pauli::z());
  CHECK(std::abs(exact_observable(h, z, zero, 0.1) - std::cos(0.2)) < 1e-14);
  CHECK(std::abs(exact_loschmidt(h, zero, 0.3) - std::cos(0.3)) < 1e-14);
  // imaginary time gives cosh
  CHECK(std::abs(exact_loschmidt(h, zero, Complex(0.0, -0.3)) - std::cosh(0.3)) < 1e-14);
}

TEST_CASE("forward and backward echo is trivial") {
  std::mt19937_64 rng(61);
  const auto h = fixtures::random_two_local(4, fixtures::chain_bonds(4), rng);
  const auto rho = fixtures::random_mixed_state(4, rng);
  const MultiEchoSpec spec{{h, h}, {Complex(0.7), Complex(-0.7)}};
  CHECK(std::abs(exact_loschmidt(spec, rho) - 1.0) < 1e-12);
}

TEST_CASE("measurement distribution") {
  const LocalHamiltonian h(1, 2, {Term{{0}, 1.0, pauli::z()}});
  Vector plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const auto rho = ProductState::from_vectors({plus});
  const auto dist = exact_measurement_distribution(h, rho.full_density());
  REQUIRE(dist.size() == 2);
  CHECK(dist[0].energy == doctest::Approx(-1.0));
  CHECK(dist[0].probability == doctest::Approx(0.5));
  CHECK(dist[1].energy == doctest::Approx(1.0));
  CHECK(dist[1].probability == doctest::Approx(0.5));
}

TEST_CASE("degenerate levels merge") {
  const auto h = fixtures::single_site_field(3, pauli::z());
  const auto rho = ProductState::from_density_matrices(
      {pauli::identity() / 2.0, pauli::identity() / 2.0, pauli::identity() / 2.0});
  const auto dist = exact_measurement_distribution(h, rho.full_density());
  REQUIRE(dist.size() == 4);
  CHECK(dist[1].probability == doctest::Approx(3.0 / 8.0));
}

TEST_CASE("evolved density stays normalized") {
  std::mt19937_64 rng(62);
  const auto h = fixtures::random_two_local(3, fixtures::chain_bonds(3), rng);
  const auto rho = fixtures::random_pure_state(3, rng);
  const Matrix r = evolved_density(h, rho, 0.9);
  CHECK(std::abs(r.trace() - 1.0) < 1e-12);
  CHECK(std::abs((r * r).trace() - 1.0) < 1e-12);
}

TEST_CASE("dimension cap") {
  const auto h = fixtures::ising_chain(5, 0.3);
  CHECK_THROWS_AS(DenseSystem(h, 16), Error);
}

TEST_CASE("interpolation recovers a second derivative") {
  const LocalHamiltonian h(1, 2, {Term{{0}, 1.0, pauli::x()}});
  const auto zero = ProductState::computational_zero(1, 2);
  // log cos(lambda t): second lambda-derivative at 0 is -t^2
  const Complex d2 = exact_cluster_derivative_logL(Cluster({{0, 2}}), h, zero, 0.6);
  CHECK(std::abs(d2 + 0.36) < 1e-8);
  InterpolationOptions tight;
  tight.half_width = 3.0;
  tight.extra_nodes = 0;
  tight.residual_tolerance = 1e-14;
  CHECK_THROWS_AS(exact_cluster_derivative_logL(Cluster({{0, 2}}), h, zero, 0.6, tight), Error);
}
