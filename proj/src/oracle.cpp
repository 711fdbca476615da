#include "cexp/oracle.hpp"

#include "cexp/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace cexp {

namespace {

constexpr Complex kI{0.0, 1.0};

// Coefficient of x^mu in the Chebyshev polynomial T_p.
double chebyshev_monomial(int p, int mu) {
  if (mu > p || (p - mu) % 2) return 0.0;
  std::vector<double> prev(p + 1, 0.0), cur(p + 1, 0.0);
  prev[0] = 1.0;
  if (p == 0) return prev[mu];
  cur[1] = 1.0;
  for (int q = 1; q < p; ++q) {
    std::vector<double> next(p + 1, 0.0);
    for (int i = 0; i < p; ++i) next[i + 1] += 2.0 * cur[i];
    for (int i = 0; i <= p; ++i) next[i] -= prev[i];
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur[mu];
}

Support all_sites(int n) {
  Support s(n);
  for (int v = 0; v < n; ++v) s[v] = v;
  return s;
}

void check_dim(const LocalHamiltonian& h, std::size_t cap) {
  const std::size_t dim = support_dimension(all_sites(h.sites()), h.local_dim());
  if (dim > cap)
    fail(ErrorKind::SystemTooLarge, "dense dimension " + std::to_string(dim) + " exceeds cap " + std::to_string(cap));
}

Complex state_trace(const Matrix& op, const ProductState& rho) {
  if (rho.is_pure()) {
    const Vector psi = rho.full_vector();
    return psi.dot(op * psi);
  }
  const Matrix r = rho.full_density();
  return op.cwiseProduct(r.transpose()).sum();
}

}  // namespace

DenseSystem::DenseSystem(const LocalHamiltonian& h, std::size_t dim_cap) {
  check_dim(h, dim_cap);
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.dense_matrix());
  energies_ = es.eigenvalues();
  vectors_ = es.eigenvectors();
}

Matrix DenseSystem::propagator(Complex t) const {
  Vector phase(energies_.size());
  for (Eigen::Index i = 0; i < energies_.size(); ++i) phase(i) = std::exp(-kI * t * energies_(i));
  return vectors_ * phase.asDiagonal() * vectors_.adjoint();
}

Complex exact_observable(const LocalHamiltonian& h, const Observable& a, const ProductState& rho, double t,
                         std::size_t dim_cap) {
  if (rho.sites() != h.sites()) fail(ErrorKind::DimensionMismatch, "state and Hamiltonian sizes differ");
  const DenseSystem sys(h, dim_cap);
  const Matrix u = sys.propagator(t);
  const Matrix full_a = Embedding(all_sites(h.sites()), a.support, h.local_dim()).embed(a.matrix);
  return state_trace(u.adjoint() * full_a * u, rho);
}

Complex exact_loschmidt(const LocalHamiltonian& h, const ProductState& rho, Complex t, std::size_t dim_cap) {
  if (rho.sites() != h.sites()) fail(ErrorKind::DimensionMismatch, "state and Hamiltonian sizes differ");
  const DenseSystem sys(h, dim_cap);
  return state_trace(sys.propagator(t), rho);
}

Complex exact_loschmidt(const MultiEchoSpec& spec, const ProductState& rho, std::size_t dim_cap) {
  validate_multi_echo(spec, rho);
  Matrix product;
  for (std::size_t l = 0; l < spec.hamiltonians.size(); ++l) {
    const DenseSystem sys(spec.hamiltonians[l], dim_cap);
    const Matrix u = sys.propagator(spec.times[l]);
    product = l == 0 ? u : Matrix(product * u);
  }
  return state_trace(product, rho);
}

Matrix evolved_density(const LocalHamiltonian& h, const ProductState& rho, double t, std::size_t dim_cap) {
  const DenseSystem sys(h, dim_cap);
  const Matrix u = sys.propagator(t);
  return u * rho.full_density() * u.adjoint();
}

std::vector<EnergyLevel> exact_measurement_distribution(const LocalHamiltonian& h, const Matrix& density,
                                                        std::size_t dim_cap) {
  const DenseSystem sys(h, dim_cap);
  if (static_cast<std::size_t>(density.rows()) != sys.dim())
    fail(ErrorKind::DimensionMismatch, "density matrix does not match the Hamiltonian");
  const Matrix& v = sys.eigenvectors();
  const Matrix rotated = v.adjoint() * density * v;
  std::vector<EnergyLevel> out;
  for (Eigen::Index i = 0; i < sys.energies().size(); ++i) {
    const double e = sys.energies()(i);
    const double p = rotated(i, i).real();
    if (!out.empty() && e - out.back().energy <= 1e-8) {
      out.back().probability += p;
    } else {
      out.push_back({e, p});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

Complex exact_cluster_derivative_logL(const Cluster& w, const LocalHamiltonian& h, const ProductState& rho, Complex t,
                                      const InterpolationOptions& opts) {
  if (w.empty()) fail(ErrorKind::SizeZero, "cluster is empty");
  const auto entries = w.entries();
  const std::size_t k = entries.size();
  Support u;
  for (const auto& e : entries) u = support_union(u, h.term(e.term).support);
  const int d = h.local_dim();
  std::vector<Matrix> ops;
  for (const auto& e : entries) ops.push_back(Embedding(u, h.term(e.term).support, d).embed(h.term(e.term).matrix));
  const Matrix rho_u = rho.density(u);

  auto log_echo = [&](const std::vector<double>& lambda) {
    Matrix hw = Matrix::Zero(rho_u.rows(), rho_u.cols());
    for (std::size_t j = 0; j < k; ++j) hw += lambda[j] * ops[j];
    Eigen::SelfAdjointEigenSolver<Matrix> es(hw);
    Vector phase(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < phase.size(); ++i) phase(i) = std::exp(-kI * t * es.eigenvalues()(i));
    const Matrix prop = es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
    return std::log(prop.cwiseProduct(rho_u.transpose()).sum());
  };

  // Chebyshev nodes per variable in the scaled coordinate x = lambda / h.
  // Values are transformed to Chebyshev coefficients with the discrete
  // orthogonality relation, which keeps the fit well conditioned.
  std::vector<int> nodes(k);
  std::vector<Eigen::MatrixXd> transform(k);
  std::vector<std::vector<double>> xs(k);
  std::size_t total = 1;
  for (std::size_t j = 0; j < k; ++j) {
    nodes[j] = entries[j].count + 1 + opts.extra_nodes;
    const int n = nodes[j];
    Eigen::MatrixXd c(n, n);
    for (int i = 0; i < n; ++i) {
      const double theta = std::numbers::pi * (2.0 * i + 1.0) / (2.0 * n);
      xs[j].push_back(std::cos(theta));
      for (int p = 0; p < n; ++p) c(p, i) = (p == 0 ? 1.0 : 2.0) / n * std::cos(p * theta);
    }
    transform[j] = c;
    total *= static_cast<std::size_t>(n);
  }
  std::vector<Complex> values(total);
  std::vector<int> idx(k, 0);
  std::vector<double> lambda(k);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t r = flat;
    for (std::size_t j = 0; j < k; ++j) {
      idx[j] = static_cast<int>(r % nodes[j]);
      r /= nodes[j];
      lambda[j] = opts.half_width * xs[j][idx[j]];
    }
    values[flat] = log_echo(lambda);
  }
  // Apply the transform along each axis.
  std::vector<Complex> coef = values;
  std::size_t inner = 1;
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t n = nodes[j];
    const std::size_t outer = total / (inner * n);
    std::vector<Complex> next(total, 0.0);
    for (std::size_t o = 0; o < outer; ++o)
      for (std::size_t i = 0; i < inner; ++i)
        for (std::size_t p = 0; p < n; ++p) {
          Complex acc = 0.0;
          for (std::size_t q = 0; q < n; ++q)
            acc += transform[j](static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) * coef[(o * n + q) * inner + i];
          next[(o * n + p) * inner + i] = acc;
        }
    coef = std::move(next);
    inner *= n;
  }
  auto evaluate_fit = [&](const std::vector<double>& x) {
    Complex sum = 0.0;
    for (std::size_t flat = 0; flat < total; ++flat) {
      std::size_t r = flat;
      double basis = 1.0;
      for (std::size_t j = 0; j < k; ++j) {
        basis *= std::cos(static_cast<double>(r % nodes[j]) * std::acos(x[j]));
        r /= nodes[j];
      }
      sum += coef[flat] * basis;
    }
    return sum;
  };
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  double residual = 0.0;
  for (int trial = 0; trial < 4; ++trial) {
    std::vector<double> x(k);
    for (auto& xi : x) xi = unif(rng);
    for (std::size_t j = 0; j < k; ++j) lambda[j] = opts.half_width * x[j];
    residual = std::max(residual, std::abs(evaluate_fit(x) - log_echo(lambda)));
  }
  if (residual > opts.residual_tolerance)
    fail(ErrorKind::IllConditionedFit, "interpolation residual " + std::to_string(residual) + " exceeds tolerance");
  // Monomial coefficient of prod_j x_j^mu_j from the Chebyshev coefficients.
  Complex target = 0.0;
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t r = flat;
    double weight = 1.0;
    for (std::size_t j = 0; j < k && weight != 0.0; ++j) {
      weight *= chebyshev_monomial(static_cast<int>(r % nodes[j]), entries[j].count);
      r /= nodes[j];
    }
    if (weight != 0.0) target += weight * coef[flat];
  }
  return target * static_cast<double>(w.factorial()) / std::pow(opts.half_width, w.size());
}

}  // namespace cexp
