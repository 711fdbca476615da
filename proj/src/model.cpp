#include "cexp/model.hpp"

#include "cexp/error.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace cexp {

bool supports_overlap(const Support& a, const Support& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i == *j) return true;
    if (*i < *j) ++i; else ++j;
  }
  return false;
}

Support support_union(const Support& a, const Support& b) {
  Support out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool support_contains(const Support& outer, const Support& inner) {
  return std::includes(outer.begin(), outer.end(), inner.begin(), inner.end());
}

std::size_t support_dimension(const Support& s, int d) {
  std::size_t dim = 1;
  for (std::size_t i = 0; i < s.size(); ++i) dim *= static_cast<std::size_t>(d);
  return dim;
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  if (hermiticity_defect(m) <= 1e-12) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

double hermiticity_defect(const Matrix& m) {
  if (m.rows() != m.cols()) return 1.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// ---------------------------------------------------------------------------

Embedding::Embedding(const Support& outer, const Support& inner, int d) {
  if (!support_contains(outer, inner))
    fail(ErrorKind::DimensionMismatch, "embedding support is not contained in target support");
  const std::size_t k = outer.size();
  std::vector<bool> is_inner(k, false);
  for (std::size_t p = 0, q = 0; p < k; ++p)
    if (q < inner.size() && outer[p] == inner[q]) { is_inner[p] = true; ++q; }
  std::size_t outer_dim = support_dimension(outer, d);
  inner_dim_ = support_dimension(inner, d);
  const std::size_t rest_dim = outer_dim / inner_dim_;
  inner_of_.resize(outer_dim);
  rest_of_.resize(outer_dim);
  compose_.resize(outer_dim);
  std::vector<int> digits(k);
  for (std::size_t r = 0; r < outer_dim; ++r) {
    std::size_t x = r;
    for (std::size_t p = k; p-- > 0;) { digits[p] = static_cast<int>(x % d); x /= d; }
    int a = 0, b = 0;
    for (std::size_t p = 0; p < k; ++p) {
      if (is_inner[p]) a = a * d + digits[p]; else b = b * d + digits[p];
    }
    inner_of_[r] = a;
    rest_of_[r] = b;
    compose_[static_cast<std::size_t>(b) * inner_dim_ + a] = static_cast<int>(r);
  }
  (void)rest_dim;
}

Matrix Embedding::embed(const Matrix& op) const {
  const Eigen::Index n = static_cast<Eigen::Index>(outer_dim());
  Matrix out = Matrix::Zero(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const std::size_t base = static_cast<std::size_t>(rest_of_[c]) * inner_dim_;
    for (std::size_t a = 0; a < inner_dim_; ++a)
      out(compose_[base + a], c) = op(static_cast<Eigen::Index>(a), inner_of_[c]);
  }
  return out;
}

void Embedding::add_left(const Matrix& op, const Matrix& x, Complex scale, Matrix& out) const {
  const Eigen::Index rows = static_cast<Eigen::Index>(outer_dim());
  const Eigen::Index cols = x.cols();
  for (Eigen::Index c = 0; c < cols; ++c) {
    const Complex* xc = x.col(c).data();
    Complex* oc = out.col(c).data();
    for (Eigen::Index r = 0; r < rows; ++r) {
      const std::size_t base = static_cast<std::size_t>(rest_of_[r]) * inner_dim_;
      const Eigen::Index a = inner_of_[r];
      Complex acc = 0.0;
      for (std::size_t b = 0; b < inner_dim_; ++b)
        acc += op(a, static_cast<Eigen::Index>(b)) * xc[compose_[base + b]];
      oc[r] += scale * acc;
    }
  }
}

void Embedding::add_right(const Matrix& op, const Matrix& x, Complex scale, Matrix& out) const {
  const Eigen::Index n = static_cast<Eigen::Index>(outer_dim());
  for (Eigen::Index c = 0; c < n; ++c) {
    const std::size_t base = static_cast<std::size_t>(rest_of_[c]) * inner_dim_;
    const Eigen::Index a = inner_of_[c];
    for (std::size_t b = 0; b < inner_dim_; ++b) {
      const Complex w = op(static_cast<Eigen::Index>(b), a);
      if (w == Complex(0.0)) continue;
      out.col(c) += (scale * w) * x.col(compose_[base + b]);
    }
  }
}

// ---------------------------------------------------------------------------

LocalHamiltonian::LocalHamiltonian(int n, int d, std::vector<Term> terms)
    : n_(n), d_(d), terms_(std::move(terms)) {
  if (n < 1) fail(ErrorKind::MalformedSpec, "number of sites must be positive");
  if (d < 2) fail(ErrorKind::MalformedSpec, "local dimension must be at least 2");
  std::set<Support> seen;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const Term& t = terms_[i];
    const std::string where = "term " + std::to_string(i);
    if (t.support.empty()) fail(ErrorKind::MalformedSpec, where + ": empty support");
    for (std::size_t k = 0; k < t.support.size(); ++k) {
      if (t.support[k] < 0 || t.support[k] >= n)
        fail(ErrorKind::MalformedSpec, where + ": site index out of range");
      if (k > 0 && t.support[k] <= t.support[k - 1])
        fail(ErrorKind::MalformedSpec, where + ": support must be strictly increasing");
    }
    if (!seen.insert(t.support).second)
      fail(ErrorKind::DuplicateSupport, where + ": support already used by another term");
    const auto dim = static_cast<Eigen::Index>(support_dimension(t.support, d));
    if (t.matrix.rows() != dim || t.matrix.cols() != dim)
      fail(ErrorKind::DimensionMismatch, where + ": matrix dimension does not match support");
    if (!(std::abs(t.coefficient) <= 1.0))
      fail(ErrorKind::CoefficientOutOfRange, where + ": |coefficient| must not exceed 1");
    if (hermiticity_defect(t.matrix) > kHermitianTolerance)
      fail(ErrorKind::NonHermitianTerm, where + ": matrix is not Hermitian");
    const double norm = spectral_norm(t.matrix);
    if (std::abs(norm - 1.0) > kNormTolerance)
      fail(ErrorKind::NormViolation, where + ": operator norm is " + std::to_string(norm) + ", expected 1");
  }
}

std::vector<Support> LocalHamiltonian::supports() const {
  std::vector<Support> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) out.push_back(t.support);
  return out;
}

int LocalHamiltonian::locality() const {
  std::size_t k = 0;
  for (const auto& t : terms_) k = std::max(k, t.support.size());
  return static_cast<int>(k);
}

Matrix LocalHamiltonian::dense_matrix() const {
  Support all(n_);
  for (int v = 0; v < n_; ++v) all[v] = v;
  const auto dim = static_cast<Eigen::Index>(support_dimension(all, d_));
  Matrix h = Matrix::Zero(dim, dim);
  for (const auto& t : terms_) {
    Embedding e(all, t.support, d_);
    h += t.coefficient * e.embed(t.matrix);
  }
  return h;
}

Observable::Observable(Support s, Matrix m) : support(std::move(s)), matrix(std::move(m)) {
  if (support.empty()) fail(ErrorKind::MalformedSpec, "observable support is empty");
  for (std::size_t k = 1; k < support.size(); ++k)
    if (support[k] <= support[k - 1])
      fail(ErrorKind::MalformedSpec, "observable support must be strictly increasing");
  if (matrix.rows() != matrix.cols())
    fail(ErrorKind::DimensionMismatch, "observable matrix is not square");
  norm_ = spectral_norm(matrix);
}

// ---------------------------------------------------------------------------

namespace {

Matrix density_factor(const Matrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
  const auto& w = es.eigenvalues();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = w.size(); i-- > 0;)
    if (w(i) > 1e-14) keep.push_back(i);
  if (keep.size() == 1 && std::abs(w(keep[0]) - 1.0) < 1e-12) {
    Matrix f = es.eigenvectors().col(keep[0]);
    return f;
  }
  Matrix f(rho.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j)
    f.col(static_cast<Eigen::Index>(j)) = std::sqrt(w(keep[j])) * es.eigenvectors().col(keep[j]);
  return f;
}

}  // namespace

ProductState ProductState::from_density_matrices(std::vector<Matrix> rhos) {
  if (rhos.empty()) fail(ErrorKind::MalformedSpec, "state has no sites");
  ProductState s;
  s.d_ = static_cast<int>(rhos[0].rows());
  for (std::size_t v = 0; v < rhos.size(); ++v) {
    const Matrix& r = rhos[v];
    const std::string where = "site " + std::to_string(v);
    if (r.rows() != s.d_ || r.cols() != s.d_)
      fail(ErrorKind::DimensionMismatch, where + ": density matrix has wrong dimension");
    if (hermiticity_defect(r) > 1e-10) fail(ErrorKind::MalformedSpec, where + ": density matrix not Hermitian");
    if (std::abs(r.trace() - Complex(1.0)) > 1e-10) fail(ErrorKind::MalformedSpec, where + ": trace is not 1");
    Eigen::SelfAdjointEigenSolver<Matrix> es(r, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10)
      fail(ErrorKind::MalformedSpec, where + ": density matrix not positive semidefinite");
    s.factor_.push_back(density_factor(r));
  }
  s.rho_ = std::move(rhos);
  return s;
}

ProductState ProductState::from_vectors(const std::vector<Vector>& psis) {
  if (psis.empty()) fail(ErrorKind::MalformedSpec, "state has no sites");
  ProductState s;
  s.d_ = static_cast<int>(psis[0].size());
  for (std::size_t v = 0; v < psis.size(); ++v) {
    if (psis[v].size() != s.d_)
      fail(ErrorKind::DimensionMismatch, "site " + std::to_string(v) + ": vector has wrong dimension");
    if (std::abs(psis[v].norm() - 1.0) > 1e-10)
      fail(ErrorKind::MalformedSpec, "site " + std::to_string(v) + ": vector is not normalized");
    s.factor_.push_back(Matrix(psis[v]));
    s.rho_.push_back(psis[v] * psis[v].adjoint());
  }
  return s;
}

ProductState ProductState::computational_zero(int n, int d) {
  std::vector<Vector> psis(n, Vector::Zero(d));
  for (auto& p : psis) p(0) = 1.0;
  return from_vectors(psis);
}

bool ProductState::is_pure() const {
  return std::all_of(factor_.begin(), factor_.end(), [](const Matrix& f) { return f.cols() == 1; });
}

Matrix ProductState::density(const Support& s) const {
  Matrix out = Matrix::Identity(1, 1);
  for (int v : s) out = kron(out, rho_.at(v));
  return out;
}

Matrix ProductState::factor(const Support& s) const {
  Matrix out = Matrix::Identity(1, 1);
  for (int v : s) out = kron(out, factor_.at(v));
  return out;
}

Matrix ProductState::full_density() const {
  Matrix out = Matrix::Identity(1, 1);
  for (const auto& r : rho_) out = kron(out, r);
  return out;
}

Vector ProductState::full_vector() const {
  if (!is_pure()) fail(ErrorKind::MixedStateUnsupported, "state is not pure");
  Matrix out = Matrix::Identity(1, 1);
  for (const auto& f : factor_) out = kron(out, f);
  return out.col(0);
}

Complex ProductState::expectation(const Support& s, const Matrix& op) const {
  const Matrix f = factor(s);
  return (f.adjoint() * op * f).trace();
}

Complex product_expectation(const Support& s, const Matrix& op, const ProductState& rho) {
  return rho.expectation(s, op);
}

namespace pauli {
Matrix identity() { return Matrix::Identity(2, 2); }
Matrix x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
Matrix y() {
  Matrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}
Matrix z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}
}  // namespace pauli

}  // namespace cexp
