#include "cexp/bounds.hpp"

#include "cexp/error.hpp"
#include "cexp/graphs.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace cexp {

namespace {
constexpr double kE = std::numbers::e;

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}
}  // namespace

Thresholds thresholds(int degree) {
  Thresholds th;
  th.degree = degree;
  th.effective_degree = degree < 1 ? 1 : degree;
  const double d = th.effective_degree;
  th.t_star = 1.0 / (2.0 * kE * d);
  th.t_star_L = 1.0 / (2.0 * kE * kE * d * (d + 1.0));
  return th;
}

Thresholds thresholds(const LocalHamiltonian& h) { return thresholds(build_interaction_graph(h).max_degree); }

double obs_truncation_bound(double t, int order, int effective_degree, double a_norm) {
  const double t_star = thresholds(effective_degree).t_star;
  const double r = std::abs(t) / t_star;
  if (r >= 1.0) fail(ErrorKind::OutsideRadius, "|t| = " + fmt(std::abs(t)) + " is not below t* = " + fmt(t_star));
  return kE * effective_degree * a_norm * std::pow(r, order + 1) / (1.0 - r);
}

double loschmidt_truncation_bound(double abs_t, int order, std::size_t terms, int effective_degree) {
  const double t_star_L = thresholds(effective_degree).t_star_L;
  const double r = abs_t / t_star_L;
  if (r >= 1.0) fail(ErrorKind::OutsideRadius, "|t| = " + fmt(abs_t) + " is not below t*_L = " + fmt(t_star_L));
  return static_cast<double>(terms) * std::pow(r, order + 1) / (1.0 - r);
}

double multi_truncation_bound(double tau, int order, std::size_t terms) {
  if (tau >= 1.0) fail(ErrorKind::OutsideRadius, "tau = " + fmt(tau) + " is not below 1");
  return static_cast<double>(terms) * std::pow(tau, order + 1) / (1.0 - tau);
}

Certificate multiplicative_certificate(Complex log_estimate, double epsilon) {
  const double mag = std::exp(log_estimate.real());
  return {std::exp(-epsilon) * mag, std::exp(epsilon) * mag};
}

ConcentrationReport concentration_bound(ConcentrationVariant variant, double delta, std::size_t terms,
                                        int effective_degree, double time) {
  ConcentrationReport r;
  r.variant = variant;
  r.delta = delta;
  r.time = time;
  r.terms = terms;
  r.t_star_L = thresholds(effective_degree).t_star_L;
  const double s = static_cast<double>(terms);
  if (!(delta > 0.0) || delta > s)
    fail(ErrorKind::DeltaOutOfRange, "delta must satisfy 0 < delta <= |S| = " + std::to_string(terms));
  const double tl = r.t_star_L;
  if (variant == ConcentrationVariant::Product) {
    r.nu = delta * tl * tl / (4.0 * s);
    r.raw_bound = 2.0 * std::exp(-(delta * tl) * (delta * tl) / (8.0 * s));
  } else {
    if (std::abs(time) > tl / 7.0)
      fail(ErrorKind::TimeTooLarge, "|t| = " + fmt(std::abs(time)) + " exceeds t*_L/7 = " + fmt(tl / 7.0));
    r.nu = kEvolvedEta * delta * tl * tl / s;
    r.raw_bound = 2.0 * std::exp(-(delta * tl) * (delta * tl) / (250.0 * 250.0 * s));
  }
  r.clamped = r.raw_bound > 1.0;
  r.bound = r.clamped ? 1.0 : r.raw_bound;
  return r;
}

double product_mean_energy(const LocalHamiltonian& h, const ProductState& rho) {
  double e = 0.0;
  for (const auto& term : h.terms()) e += term.coefficient * rho.expectation(term.support, term.matrix).real();
  return e;
}

double product_energy_variance(const LocalHamiltonian& h, const ProductState& rho) {
  // Only overlapping pairs are correlated in a product state.
  const auto ig = build_interaction_graph(h);
  const int n = static_cast<int>(h.size());
  std::vector<Complex> mean(n);
  for (int i = 0; i < n; ++i) mean[i] = rho.expectation(h.term(i).support, h.term(i).matrix);
  double var = 0.0;
  for (int i = 0; i < n; ++i) {
    std::vector<int> partners{i};
    for (int j : ig.graph.neighbors(i)) partners.push_back(j);
    for (int j : partners) {
      const Term& x = h.term(i);
      const Term& y = h.term(j);
      const Support u = support_union(x.support, y.support);
      const int d = h.local_dim();
      const Matrix prod = Embedding(u, x.support, d).embed(x.matrix) * Embedding(u, y.support, d).embed(y.matrix);
      const Complex cov = rho.expectation(u, prod) - mean[i] * mean[j];
      var += x.coefficient * y.coefficient * cov.real();
    }
  }
  return std::max(var, 0.0);
}

QslReport qsl_report(const LocalHamiltonian& h, const ProductState& rho, double t) {
  if (!rho.is_pure()) fail(ErrorKind::MixedStateUnsupported, "the speed-limit bound needs a pure product state");
  const Thresholds th = thresholds(h);
  QslReport r;
  r.t = t;
  r.t_qsl_floor = th.t_star_L;
  const double tau = std::abs(t) / th.t_star_L;
  if (tau >= 1.0) fail(ErrorKind::OutsideRadius, "|t| = " + fmt(std::abs(t)) + " is not below t*_L = " + fmt(th.t_star_L));
  r.energy_variance = product_energy_variance(h, rho);
  r.mean_energy = product_mean_energy(h, rho);
  const double s = static_cast<double>(h.size());
  const double tau2 = tau * tau;
  r.lower_bound = std::exp(-s * tau2 * tau2 / (1.0 - tau2)) * std::exp(-r.energy_variance * t * t / 2.0);
  // A vanishing variance means the state never becomes orthogonal. The
  // Margolus-Levitin term only applies for positive mean energy.
  r.mt_ml_finite = r.energy_variance > 0.0;
  if (r.mt_ml_finite) {
    double inv = 1.0 / std::sqrt(r.energy_variance);
    if (r.mean_energy > 0.0) inv = std::max(inv, 1.0 / r.mean_energy);
    r.mt_ml_bound = std::numbers::pi / 2.0 * inv;
  } else {
    r.mt_ml_bound = std::numeric_limits<double>::infinity();
  }
  return r;
}

}  // namespace cexp
